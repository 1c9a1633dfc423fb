#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <vector>

#include "json.hpp"

#include "dmp/harness/config.hpp"
#include "dmp/harness/losses.hpp"
#include "dmp/metrics.hpp"
#include "dmp/models/discriminator.hpp"
#include "dmp/models/generator.hpp"
#include "dmp/synth.hpp"

namespace dmp::harness {

struct CurvePoint {
  std::int64_t iteration = 0;
  double total = 0.0;
  std::array<double, kNumTerms> raw{};
  bool disc_updated = false;
  double disc_loss = 0.0;  // only meaningful when disc_updated
};

struct TrainedModels {
  std::unique_ptr<models::Generator> generator;
  std::unique_ptr<models::MotionDiscriminator> discriminator;
  std::vector<CurvePoint> curve;
};

// Called after every iteration with its 1-based index and the models as
// they stand after that iteration's updates.
using TrainObserver =
    std::function<void(std::int64_t iteration, const models::Generator&, const models::MotionDiscriminator&)>;

synth::DatasetOptions dataset_options(const TrainConfig& cfg);
synth::Dataset make_dataset(const TrainConfig& cfg);
models::GeneratorConfig generator_config(const TrainConfig& cfg, Variant v);

// Iteration i (1-based): sample a batch, generator step on the weighted loss; when
// i % disc_update_every == 0 also a discriminator step on real motions and
// this iteration's fakes. Throws NonFiniteLoss naming the iteration and term.
TrainedModels train(const TrainConfig& cfg, Variant variant, const synth::Dataset& data,
                    const TrainObserver& observer = {}, ExecPolicy policy = ExecPolicy::parallel);

struct EvalContext {
  double gt_acc = 0.0;           // mm / frame^2
  double obs_acc_err_px = 0.0;   // raw 2D observations against clean 2D
};

struct EvalResult {
  metrics::MetricReport report;
  EvalContext context;
  std::uint64_t data_hash = 0;
};

// Root-relative predictions in mm, (3J) x T per clip, scored clip by clip and
// averaged in clip order.
EvalResult evaluate_predictions(std::span<const Matrix> pred_mm, std::span<const synth::TrainingClip> clips,
                                ExecPolicy policy = ExecPolicy::parallel);
// Predicted root-relative keypoints in mm for every clip.
std::vector<Matrix> predict(const models::Generator& gen, std::span<const synth::TrainingClip> clips,
                            ExecPolicy policy = ExecPolicy::parallel);
EvalResult evaluate(const models::Generator& gen, std::span<const synth::TrainingClip> clips,
                    ExecPolicy policy = ExecPolicy::parallel);

// FNV-1a over the eval clips' observations and ground truth.
std::uint64_t clip_hash(std::span<const synth::TrainingClip> clips);

nlohmann::json checkpoint_meta(const TrainConfig& cfg, Variant v, const char* kind);

struct VariantReport {
  Variant variant;
  EvalResult eval;
  std::array<double, kNumTerms> final_raw{};
  double final_total = 0.0;
  std::uint64_t generator_checksum = 0;
};

nlohmann::json to_json(const TrainConfig& cfg, const VariantReport& r);
nlohmann::json to_json(const TrainConfig& cfg, std::span<const VariantReport> rows);
// Plain-text comparison table, one row per variant.
std::string comparison_table(std::span<const VariantReport> rows);
void write_curve_csv(const std::filesystem::path& path, const std::vector<CurvePoint>& curve);

// Trains one variant and writes <out>/<variant>.gen.ckpt, .disc.ckpt and
// _curve.csv.
VariantReport run_variant(const TrainConfig& cfg, Variant v, const synth::Dataset& data,
                          const std::filesystem::path& out, ExecPolicy policy = ExecPolicy::parallel);

// All three variants on the same data and seed; writes report.json and
// table.txt next to the checkpoints.
std::vector<VariantReport> run_ablation(const TrainConfig& cfg, const std::filesystem::path& out,
                                        ExecPolicy policy = ExecPolicy::parallel);

}  // namespace dmp::harness
