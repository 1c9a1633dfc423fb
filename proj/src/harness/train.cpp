#include "dmp/harness/train.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <string>

#include "dmp/error.hpp"
#include "dmp/grad/adam.hpp"
#include "dmp/grad/checkpoint.hpp"
#include "dmp/grad/ops.hpp"
#include "dmp/models/geometry_ops.hpp"

namespace dmp::harness {

using skeleton::kNumJoints;

namespace {

// Independent streams for generator init, discriminator init and sampling.
constexpr std::uint64_t kGenStream = 0x6a09e667f3bcc908ULL;
constexpr std::uint64_t kDiscStream = 0xbb67ae8584caa73bULL;
constexpr std::uint64_t kSampleStream = 0x3c6ef372fe94f82bULL;

void check_finite(double v, std::int64_t it, std::string_view term) {
  if (!std::isfinite(v)) {
    throw NonFiniteLoss("iteration " + std::to_string(it) + ", term " + std::string(term) + " = " +
                        std::to_string(v));
  }
}

metrics::JointTrajectory to_trajectory(const Matrix& m, int dims, double fps) {
  const std::ptrdiff_t joints = m.rows() / dims;
  metrics::JointTrajectory out(m.cols(), joints, fps);
  for (std::ptrdiff_t t = 0; t < m.cols(); ++t) {
    for (std::ptrdiff_t j = 0; j < joints; ++j) {
      auto p = out.at(t, j);
      p.setZero();
      p.head(dims) = m.col(t).segment(dims * j, dims);
    }
  }
  return out;
}

}  // namespace

synth::DatasetOptions dataset_options(const TrainConfig& cfg) {
  synth::DatasetOptions o;
  o.frames = cfg.frames;
  o.noise_px = cfg.noise_px;
  o.frame_rate = cfg.frame_rate;
  o.intrinsics = cfg.intrinsics;
  return o;
}

synth::Dataset make_dataset(const TrainConfig& cfg) {
  return synth::make_dataset(cfg.clips, cfg.data_seed, dataset_options(cfg));
}

models::GeneratorConfig generator_config(const TrainConfig& cfg, Variant v) {
  models::GeneratorConfig g;
  g.feature_dim = cfg.feature_dim;
  g.cam_dim = cfg.cam_dim;
  g.hidden_dim = cfg.hidden_dim;
  g.temporal = v != Variant::baseline;
  g.init_scale = cfg.init_scale;
  g.intrinsics = cfg.intrinsics;
  return g;
}

TrainedModels train(const TrainConfig& cfg, Variant variant, const synth::Dataset& data,
                    const TrainObserver& observer, ExecPolicy policy) {
  cfg.validate();
  if (data.train.empty() || data.real.empty()) throw ConfigError("training needs clips and real motions");
  if (cfg.threads > 0) set_threads(static_cast<int>(cfg.threads));

  TrainedModels m;
  m.generator = std::make_unique<models::Generator>(generator_config(cfg, variant));
  m.discriminator = std::make_unique<models::MotionDiscriminator>();
  m.generator->init(cfg.seed ^ kGenStream);
  m.discriminator->init(cfg.seed ^ kDiscStream);

  const grad::AdamConfig adam{cfg.lr, cfg.weight_decay};
  grad::Adam gen_opt(m.generator->params(), adam);
  grad::Adam disc_opt(m.discriminator->params(), adam);

  std::mt19937_64 rng(cfg.seed ^ kSampleStream);
  std::uniform_int_distribution<std::size_t> pick_clip(0, data.train.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_real(0, data.real.size() - 1);
  const bool use_reg = variant == Variant::sep_t_reg;

  m.curve.reserve(static_cast<std::size_t>(cfg.iterations));
  for (std::int64_t it = 1; it <= cfg.iterations; ++it) {
    std::vector<const synth::TrainingClip*> clips;
    for (std::int64_t b = 0; b < cfg.batch; ++b) clips.push_back(&data.train[pick_clip(rng)]);
    const synth::ClipBatch batch = synth::make_batch(clips);

    CurvePoint point;
    point.iteration = it;
    Matrix fake6d;
    {
      grad::Tape tape;
      const models::GeneratorGraph g = m.generator->forward(tape, batch.obs, batch.layout, policy);
      const GeneratorLoss loss =
          generator_loss(tape, g, batch, *m.discriminator, cfg.weights, cfg.intrinsics, use_reg);
      for (int k = 0; k < kNumTerms; ++k) check_finite(loss.raw[k], it, kTermNames[k]);
      point.total = loss.total.value()(0, 0);
      point.raw = loss.raw;
      check_finite(point.total, it, "total");
      fake6d = models::rotmat_to_sixd(g.rotmats).value();
      tape.backward(loss.total);
    }
    gen_opt.step();
    m.discriminator->params().zero_grad();

    if (it % cfg.disc_update_every == 0) {
      std::vector<const skeleton::MotionSequence*> real;
      for (std::int64_t b = 0; b < cfg.real_batch; ++b) real.push_back(&data.real[pick_real(rng)]);
      const Matrix real6d = synth::motion_sixd_batch(real);
      grad::Tape tape;
      const DiscriminatorLoss dl =
          discriminator_loss(tape, *m.discriminator, real6d, {cfg.frames, cfg.real_batch}, fake6d,
                             batch.layout, cfg.lsgan_literal);
      point.disc_loss = dl.total.value()(0, 0);
      check_finite(point.disc_loss, it, "discriminator");
      tape.backward(dl.total);
      disc_opt.step();
      m.generator->params().zero_grad();
      point.disc_updated = true;
    }
    m.curve.push_back(point);
    if (observer) observer(it, *m.generator, *m.discriminator);
  }
  return m;
}

std::vector<Matrix> predict(const models::Generator& gen, std::span<const synth::TrainingClip> clips,
                            ExecPolicy policy) {
  std::vector<Matrix> out;
  if (clips.empty()) return out;
  std::vector<const synth::TrainingClip*> ptrs;
  for (const auto& c : clips) ptrs.push_back(&c);
  const synth::ClipBatch batch = synth::make_batch(ptrs);
  grad::Tape tape;
  const models::GeneratorGraph g = gen.forward(tape, batch.obs, batch.layout, policy);
  const Matrix pos =
      models::forward_kinematics(g.rotmats, g.beta, batch.layout, skeleton::default_tree()).value() * 1000.0;
  const SeqLayout l = batch.layout;
  for (std::ptrdiff_t b = 0; b < l.batch; ++b) {
    Matrix p(pos.rows(), l.frames);
    for (std::ptrdiff_t t = 0; t < l.frames; ++t) p.col(t) = pos.col(l.col(t, b));
    out.push_back(std::move(p));
  }
  return out;
}

EvalResult evaluate_predictions(std::span<const Matrix> pred_mm, std::span<const synth::TrainingClip> clips,
                                ExecPolicy policy) {
  if (pred_mm.size() != clips.size()) {
    throw ShapeMismatch("predictions for " + std::to_string(pred_mm.size()) + " clips, expected " +
                        std::to_string(clips.size()));
  }
  EvalResult r;
  r.data_hash = clip_hash(clips);
  if (clips.empty()) return r;
  for (std::size_t i = 0; i < clips.size(); ++i) {
    const synth::TrainingClip& c = clips[i];
    const double fps = c.gt_motion.frame_rate;
    const metrics::JointTrajectory gt = to_trajectory(c.gt_keypoints_3d, 3, fps);
    const metrics::MetricReport m = metrics::evaluate_all(to_trajectory(pred_mm[i], 3, fps), gt, policy);
    r.report.mpjpe += m.mpjpe;
    r.report.pa_mpjpe += m.pa_mpjpe;
    r.report.acc += m.acc;
    r.report.acc_err += m.acc_err;
    r.context.gt_acc += metrics::acceleration(gt);

    Matrix obs2d(2 * kNumJoints, c.frames());
    for (int j = 0; j < kNumJoints; ++j) obs2d.middleRows(2 * j, 2) = c.observations.middleRows(3 * j, 2);
    r.context.obs_acc_err_px +=
        metrics::acceleration_error(to_trajectory(obs2d, 2, fps), to_trajectory(c.gt_keypoints_2d, 2, fps));
  }
  const double n = static_cast<double>(clips.size());
  r.report.mpjpe /= n;
  r.report.pa_mpjpe /= n;
  r.report.acc /= n;
  r.report.acc_err /= n;
  r.context.gt_acc /= n;
  r.context.obs_acc_err_px /= n;
  return r;
}

EvalResult evaluate(const models::Generator& gen, std::span<const synth::TrainingClip> clips,
                    ExecPolicy policy) {
  const std::vector<Matrix> pred = predict(gen, clips, policy);
  return evaluate_predictions(pred, clips, policy);
}

std::uint64_t clip_hash(std::span<const synth::TrainingClip> clips) {
  std::uint64_t h = grad::fnv1a(nullptr, 0);
  for (const auto& c : clips) {
    for (const Matrix* m : {&c.observations, &c.gt_keypoints_2d, &c.gt_keypoints_3d}) {
      h = grad::fnv1a(m->data(), static_cast<std::size_t>(m->size()) * sizeof(double), h);
    }
  }
  return h;
}

nlohmann::json checkpoint_meta(const TrainConfig& cfg, Variant v, const char* kind) {
  return {{"kind", kind},
          {"variant", std::string(variant_name(v))},
          {"seed", cfg.seed},
          {"config_hash", hex64(cfg.hash())},
          {"step", cfg.iterations},
          {"config", cfg.to_json()},
          {"generator", generator_config(cfg, v).to_json()}};
}

nlohmann::json to_json(const TrainConfig& cfg, const VariantReport& r) {
  nlohmann::json losses = nlohmann::json::object();
  for (int k = 0; k < kNumTerms; ++k) losses[std::string(kTermNames[k])] = r.final_raw[k];
  losses["total"] = r.final_total;
  return {{"variant", std::string(variant_name(r.variant))},
          {"seed", cfg.seed},
          {"config_hash", hex64(cfg.hash())},
          {"mpjpe", r.eval.report.mpjpe},
          {"pa_mpjpe", r.eval.report.pa_mpjpe},
          {"acc", r.eval.report.acc},
          {"acc_err", r.eval.report.acc_err},
          {"final_losses", losses},
          {"context", {{"gt_acc", r.eval.context.gt_acc}, {"obs_acc_err_px", r.eval.context.obs_acc_err_px}}},
          {"eval_data_hash", hex64(r.eval.data_hash)},
          {"generator_checksum", hex64(r.generator_checksum)}};
}

nlohmann::json to_json(const TrainConfig& cfg, std::span<const VariantReport> rows) {
  nlohmann::json variants = nlohmann::json::array();
  for (const auto& r : rows) variants.push_back(to_json(cfg, r));
  return {{"seed", cfg.seed}, {"config_hash", hex64(cfg.hash())}, {"config", cfg.to_json()}, {"variants", variants}};
}

std::string comparison_table(std::span<const VariantReport> rows) {
  std::string out = "variant      mpjpe_mm  pa_mpjpe_mm  acc     acc_err\n";
  for (const auto& r : rows) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-12s %8.2f  %11.2f  %6.3f  %7.3f\n", std::string(variant_name(r.variant)).c_str(),
                  r.eval.report.mpjpe, r.eval.report.pa_mpjpe, r.eval.report.acc, r.eval.report.acc_err);
    out += buf;
  }
  return out;
}

void write_curve_csv(const std::filesystem::path& path, const std::vector<CurvePoint>& curve) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  out << "iteration,total";
  for (auto name : kTermNames) out << ',' << name;
  out << ",disc_updated,disc_loss\n";
  char buf[32];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
  };
  for (const auto& p : curve) {
    out << p.iteration << ',' << num(p.total);
    for (double v : p.raw) out << ',' << num(v);
    out << ',' << (p.disc_updated ? 1 : 0) << ',' << num(p.disc_loss) << '\n';
  }
}

VariantReport run_variant(const TrainConfig& cfg, Variant v, const synth::Dataset& data,
                          const std::filesystem::path& out, ExecPolicy policy) {
  TrainedModels m = train(cfg, v, data, {}, policy);
  VariantReport r;
  r.variant = v;
  r.eval = evaluate(*m.generator, data.eval, policy);
  if (!m.curve.empty()) {
    r.final_raw = m.curve.back().raw;
    r.final_total = m.curve.back().total;
  }
  r.generator_checksum = m.generator->params().checksum();
  if (!out.empty()) {
    std::filesystem::create_directories(out);
    const std::string name(variant_name(v));
    grad::save_checkpoint(out / (name + ".gen.ckpt"), m.generator->params(), checkpoint_meta(cfg, v, "generator"));
    grad::save_checkpoint(out / (name + ".disc.ckpt"), m.discriminator->params(),
                          checkpoint_meta(cfg, v, "discriminator"));
    write_curve_csv(out / (name + "_curve.csv"), m.curve);
  }
  return r;
}

std::vector<VariantReport> run_ablation(const TrainConfig& cfg, const std::filesystem::path& out,
                                        ExecPolicy policy) {
  const synth::Dataset data = make_dataset(cfg);
  std::vector<VariantReport> rows;
  for (Variant v : kAllVariants) rows.push_back(run_variant(cfg, v, data, out, policy));
  if (!out.empty()) {
    std::ofstream report(out / "report.json");
    report << to_json(cfg, rows).dump(2) << '\n';
    std::ofstream table(out / "table.txt");
    table << comparison_table(rows);
  }
  return rows;
}

}  // namespace dmp::harness
