// Command-line front end: data generation, training, evaluation, the
// three-variant ablation and the finite-difference gradient suite.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "dmp/error.hpp"
#include "dmp/grad/checkpoint.hpp"
#include "dmp/harness/config.hpp"
#include "dmp/harness/gradcheck.hpp"
#include "dmp/harness/io.hpp"
#include "dmp/harness/train.hpp"

namespace fs = std::filesystem;
using namespace dmp;

namespace {

struct CameraOverrides {
  std::optional<double> focal;
  std::optional<double> res;

  void apply(camera::CameraIntrinsics& intr) const {
    if (focal) intr.focal = *focal;
    if (res) intr.res = *res;
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

harness::TrainConfig load_config(const std::string& path, const CameraOverrides& cam, bool lsgan_literal) {
  harness::TrainConfig cfg = path.empty() ? harness::TrainConfig{} : harness::TrainConfig::from_file(path);
  cam.apply(cfg.intrinsics);
  if (lsgan_literal) cfg.lsgan_literal = true;
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Per-joint temporal motion prior: synthetic training and evaluation"};
  app.require_subcommand(1);

  CameraOverrides cam;
  app.add_option("--focal", cam.focal, "Focal length in pixels (default 5000)");
  app.add_option("--res", cam.res, "Square image resolution in pixels (default 224)");

  // gen-data
  auto* gen = app.add_subcommand("gen-data", "Write a synthetic dataset");
  std::string gen_out;
  std::int64_t gen_clips = 80;
  double gen_noise = 3.0;
  std::uint64_t gen_seed = 7;
  std::int64_t gen_frames = 16;
  gen->add_option("--out", gen_out, "Output directory")->required();
  gen->add_option("--clips", gen_clips, "Number of clips, split 80/20 into train/eval");
  gen->add_option("--noise-px", gen_noise, "Observation noise std in pixels");
  gen->add_option("--seed", gen_seed, "Split seed");
  gen->add_option("--frames", gen_frames, "Frames per clip");

  // train
  auto* tr = app.add_subcommand("train", "Train one variant");
  std::string tr_config, tr_variant = "sep_t_reg", tr_out, tr_data;
  bool tr_literal = false;
  tr->add_option("--config", tr_config, "Config file (flat key = value)");
  tr->add_option("--variant", tr_variant, "baseline | sep_t | sep_t_reg");
  tr->add_option("--out", tr_out, "Output directory")->required();
  tr->add_option("--data", tr_data, "Dataset directory from gen-data (default: generate from config)");
  tr->add_flag("--lsgan-literal", tr_literal, "Swap the discriminator targets (real toward 0, fake toward 1)");

  // eval
  auto* ev = app.add_subcommand("eval", "Evaluate a generator checkpoint");
  std::string ev_ckpt, ev_data, ev_report;
  ev->add_option("--checkpoint", ev_ckpt, "Generator checkpoint")->required();
  ev->add_option("--data", ev_data, "Dataset directory; its eval clips are scored")->required();
  ev->add_option("--report", ev_report, "Report file (JSON)")->required();

  // ablate
  auto* ab = app.add_subcommand("ablate", "Train and evaluate all three variants");
  std::string ab_config, ab_out;
  bool ab_literal = false;
  ab->add_option("--config", ab_config, "Config file (flat key = value)");
  ab->add_option("--out", ab_out, "Output directory")->required();
  ab->add_flag("--lsgan-literal", ab_literal, "Swap the discriminator targets (real toward 0, fake toward 1)");

  // check-grad
  auto* cg = app.add_subcommand("check-grad", "Finite-difference gradient suite");
  harness::GradCheckOptions cg_opts;
  double cg_tol = 1e-5;
  bool cg_verbose = false;
  cg->add_option("--samples", cg_opts.samples_per_block, "Entries sampled per parameter block");
  cg->add_option("--seed", cg_opts.seed, "Seed");
  cg->add_option("--step", cg_opts.step, "Central-difference step");
  cg->add_option("--feature-dim", cg_opts.feature_dim, "Per-joint feature width");
  cg->add_option("--hidden-dim", cg_opts.hidden_dim, "GRU hidden width");
  cg->add_option("--cam-dim", cg_opts.cam_dim, "Per-joint camera/shape feature width");
  cg->add_option("--tol", cg_tol, "Maximum relative error");
  cg->add_flag("-v,--verbose", cg_verbose, "Print every sampled entry");

  CLI11_PARSE(app, argc, argv);

  try {
    const auto t0 = std::chrono::steady_clock::now();
    if (*gen) {
      synth::DatasetOptions o;
      o.frames = gen_frames;
      o.noise_px = gen_noise;
      cam.apply(o.intrinsics);
      const synth::Dataset data = synth::make_dataset(gen_clips, gen_seed, o);
      harness::save_dataset(gen_out, data);
      std::printf("wrote %zu train, %zu eval clips and %zu real motions to %s\n", data.train.size(),
                  data.eval.size(), data.real.size(), gen_out.c_str());
    } else if (*tr) {
      const harness::TrainConfig cfg = load_config(tr_config, cam, tr_literal);
      const harness::Variant v = harness::parse_variant(tr_variant);
      const synth::Dataset data = tr_data.empty() ? harness::make_dataset(cfg) : harness::load_dataset(tr_data);
      const harness::VariantReport r = harness::run_variant(cfg, v, data, tr_out);
      std::ofstream(fs::path(tr_out) / (tr_variant + ".report.json")) << harness::to_json(cfg, r).dump(2) << '\n';
      const harness::VariantReport rows[] = {r};
      std::fputs(harness::comparison_table(rows).c_str(), stdout);
    } else if (*ev) {
      const nlohmann::json meta = grad::read_checkpoint_meta(ev_ckpt);
      if (meta.at("kind") != "generator") throw FormatError("not a generator checkpoint: " + ev_ckpt);
      models::GeneratorConfig gcfg = models::GeneratorConfig::from_json(meta.at("generator"));
      cam.apply(gcfg.intrinsics);
      models::Generator g(gcfg);
      grad::load_checkpoint(ev_ckpt, g.params());
      const synth::Dataset data = harness::load_dataset(ev_data);
      const harness::EvalResult r = harness::evaluate(g, data.eval);
      const nlohmann::json report = {{"variant", meta.at("variant")},
                                     {"seed", meta.at("seed")},
                                     {"config_hash", meta.at("config_hash")},
                                     {"mpjpe", r.report.mpjpe},
                                     {"pa_mpjpe", r.report.pa_mpjpe},
                                     {"acc", r.report.acc},
                                     {"acc_err", r.report.acc_err},
                                     {"context", {{"gt_acc", r.context.gt_acc}, {"obs_acc_err_px", r.context.obs_acc_err_px}}},
                                     {"eval_data_hash", harness::hex64(r.data_hash)}};
      std::ofstream(ev_report) << report.dump(2) << '\n';
      std::cout << report.dump(2) << '\n';
    } else if (*ab) {
      const harness::TrainConfig cfg = load_config(ab_config, cam, ab_literal);
      const auto rows = harness::run_ablation(cfg, ab_out);
      std::fputs(harness::comparison_table(rows).c_str(), stdout);
    } else if (*cg) {
      const harness::GradCheckReport r = harness::check_gradients(cg_opts);
      if (cg_verbose) {
        for (const auto& e : r.entries) {
          std::printf("%-13s %-28s (%3ld,%3ld) analytic % .10e numeric % .10e rel %.2e\n", e.loss.c_str(),
                      e.block.c_str(), static_cast<long>(e.row), static_cast<long>(e.col), e.analytic, e.numeric,
                      e.rel_err);
        }
      }
      for (const auto& b : r.blocks) {
        std::printf("%-14s %-28s normwise rel %.2e (max |a-n| %.2e, max |n| %.2e)\n", b.loss.c_str(), b.block.c_str(),
                    b.rel_err, b.max_abs_err, b.max_abs_numeric);
      }
      const bool ok = r.max_rel_err < cg_tol;
      std::printf("%s: %zu blocks, %zu entries, max normwise relative error %.3e (tolerance %.1e), "
                  "per-term %.3e, max entrywise %.3e\n",
                  ok ? "PASS" : "FAIL", r.blocks.size(), r.entries.size(), r.max_rel_err, cg_tol,
                  r.max_term_rel_err, r.max_entry_rel_err);
      if (!ok) return 1;
    }
    std::fprintf(stderr, "wall-clock %.2f s\n", seconds_since(t0));
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
