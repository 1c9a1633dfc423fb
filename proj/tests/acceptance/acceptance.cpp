// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero when a criterion fails that was not listed with --allow-fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dmp/camera.hpp"
#include "dmp/harness/config.hpp"
#include "dmp/harness/gradcheck.hpp"
#include "dmp/harness/train.hpp"
#include "dmp/metrics.hpp"
#include "dmp/rot3.hpp"
#include "metric_oracles.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;
using namespace dmp;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

// 1. Rotation suite.
Outcome rotations() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(20240611);
  std::normal_distribution<double> n(0.0, 1.0);
  double worst_orth = 0.0, worst_det = 0.0, worst_six = 0.0, worst_aa = 0.0;
  for (int i = 0; i < 10000; ++i) {
    double six[6];
    for (double& v : six) v = n(rng);
    const rot3::RotMat r = rot3::sixd_to_rotmat(rot3::RotationSixD::from_array(six));
    worst_orth = std::max(worst_orth, (r.m.transpose() * r.m - rot3::Mat3::Identity()).norm());
    worst_det = std::max(worst_det, std::abs(r.m.determinant() - 1.0));
    // rotmat -> 6D -> rotmat, and the 6D of a rotation maps back to itself.
    const rot3::RotationSixD x = rot3::rotmat_to_sixd(r);
    const rot3::RotMat back = rot3::sixd_to_rotmat(x);
    const rot3::RotationSixD x2 = rot3::rotmat_to_sixd(back);
    worst_six = std::max({worst_six, test::max_abs(back.m - r.m), (x2.a0 - x.a0).cwiseAbs().maxCoeff(),
                          (x2.a1 - x.a1).cwiseAbs().maxCoeff()});
  }
  // Axis-angle round trips over the whole range plus bands within 1e-4 of 0 and pi.
  std::uniform_real_distribution<double> any(0.0, std::numbers::pi), band(0.0, 1e-4);
  const std::function<double()> angle_draws[] = {[&] { return any(rng); }, [&] { return band(rng); },
                                                 [&] { return std::numbers::pi - band(rng); }};
  for (const auto& draw : angle_draws) {
    for (int i = 0; i < 10000; ++i) {
      const double theta = draw();
      const rot3::AxisAngle a{theta * test::random_unit(rng)};
      const rot3::RotMat r = rot3::axis_angle_to_rotmat(a);
      const rot3::AxisAngle b = rot3::rotmat_to_axis_angle(r);
      // At exactly pi, v and -v name the same rotation.
      const double d = std::min((b.v - a.v).cwiseAbs().maxCoeff(),
                                theta == std::numbers::pi ? (b.v + a.v).cwiseAbs().maxCoeff() : 1e300);
      const rot3::RotMat r2 = rot3::axis_angle_to_rotmat(b);
      worst_aa = std::max({worst_aa, d, test::max_abs(r2.m - r.m)});
    }
  }
  const rot3::Vec3 half_turn_axes[] = {rot3::Vec3::UnitX(), rot3::Vec3(1, 2, 3).normalized(),
                                       rot3::Vec3(-1, 0, 1).normalized()};
  for (const rot3::Vec3& axis : half_turn_axes) {
    const rot3::RotMat r{test::rotation_about(axis, std::numbers::pi)};
    const rot3::RotMat back = rot3::axis_angle_to_rotmat(rot3::rotmat_to_axis_angle(r));
    worst_aa = std::max(worst_aa, test::max_abs(back.m - r.m));
  }
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = worst_orth < 1e-9 && worst_det < 1e-9 && worst_six < 1e-8 && worst_aa < 1e-8 && secs < 5.0;
  o.detail = fmt("orth %.2e det %.2e 6d-roundtrip %.2e aa-roundtrip %.2e, %.2f s", worst_orth, worst_det,
                 worst_six, worst_aa, secs);
  return o;
}

// 2. Gradient oracle.
Outcome gradients() {
  const auto t0 = Clock::now();
  const harness::GradCheckReport r = harness::check_gradients();
  const double secs = seconds_since(t0);
  bool saw_gen = false, saw_disc = false;
  for (const auto& b : r.blocks) {
    saw_gen |= b.loss == "generator";
    saw_disc |= b.loss == "discriminator";
  }
  Outcome o;
  o.pass = saw_gen && saw_disc && r.max_rel_err < 1e-5 && secs < 60.0;
  o.detail = fmt("%zu blocks, max relative error %.2e (tolerance 1e-5), %.2f s", r.blocks.size(), r.max_rel_err, secs);
  return o;
}

// 3. Metric oracles.
Outcome metric_oracles() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> frames(3, 8), joints(3, 6);
  std::uniform_real_distribution<double> scale(0.3, 3.0);
  double worst_naive = 0.0, worst_sim = 0.0;
  bool ordered = true;
  for (int i = 0; i < 1000; ++i) {
    const int T = frames(rng), J = joints(rng);
    const metrics::JointTrajectory p = test::random_trajectory(rng, T, J), g = test::random_trajectory(rng, T, J);
    const double m = metrics::mpjpe(p, g), pa = metrics::pa_mpjpe(p, g);
    worst_naive = std::max({worst_naive, std::abs(m - test::naive_mpjpe(p, g)),
                            std::abs(pa - test::naive_pa_mpjpe(p, g)),
                            std::abs(metrics::acceleration(p) - test::naive_acc(p)),
                            std::abs(metrics::acceleration_error(p, g) - test::naive_acc_err(p, g))});
    ordered &= pa <= m;

    metrics::JointTrajectory q = g;
    for (std::ptrdiff_t t = 0; t < T; ++t) {
      q.frame(t) = (scale(rng) * test::random_rotation(rng) * g.frame(t)).colwise() + 100.0 * test::random_unit(rng);
    }
    worst_sim = std::max(worst_sim, metrics::pa_mpjpe(q, g));
  }
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = worst_naive < 1e-12 && worst_sim < 1e-9 && ordered && secs < 10.0;
  o.detail = fmt("naive max diff %.2e, similarity copy %.2e, pa<=mpjpe %s, %.2f s", worst_naive, worst_sim,
                 ordered ? "yes" : "no", secs);
  return o;
}

struct SeedRow {
  double base_acc_err, sep_acc_err, reg_acc_err, sep_mpjpe, reg_mpjpe;
};

bool run_ablate(const fs::path& cli, const fs::path& config, const fs::path& out) {
  fs::remove_all(out);
  const std::string cmd = "\"" + cli.string() + "\" ablate --config \"" + config.string() + "\" --out \"" +
                          out.string() + "\" > \"" + out.string() + ".log\" 2>&1";
  return std::system(cmd.c_str()) == 0;
}

double median3(double a, double b, double c) { return std::max(std::min(a, b), std::min(std::max(a, b), c)); }

// 4. Directional reproduction on synthetic data, default config, seeds 1-3.
Outcome table_direction(const fs::path& cli, const fs::path& work) {
  const auto t0 = Clock::now();
  std::vector<SeedRow> rows;
  for (int seed = 1; seed <= 3; ++seed) {
    const fs::path cfg = work / fmt("seed%d.cfg", seed);
    std::ofstream(cfg) << "seed = " << seed << "\n";
    const fs::path out = work / fmt("seed%d", seed);
    if (!run_ablate(cli, cfg, out)) return {false, "ablate failed for seed " + std::to_string(seed)};
    std::ifstream in(out / "report.json");
    const nlohmann::json j = nlohmann::json::parse(in);
    SeedRow r{};
    for (const auto& v : j.at("variants")) {
      const std::string name = v.at("variant");
      const double ae = v.at("acc_err"), mp = v.at("mpjpe");
      if (name == "baseline") r.base_acc_err = ae;
      if (name == "sep_t") r.sep_acc_err = ae, r.sep_mpjpe = mp;
      if (name == "sep_t_reg") r.reg_acc_err = ae, r.reg_mpjpe = mp;
    }
    std::printf("    seed %d: ACC-ERR baseline %.3f sep_t %.3f sep_t_reg %.3f | MPJPE sep_t %.2f sep_t_reg %.2f\n", seed,
                r.base_acc_err, r.sep_acc_err, r.reg_acc_err, r.sep_mpjpe, r.reg_mpjpe);
    std::fflush(stdout);
    rows.push_back(r);
  }
  auto med = [&](double SeedRow::*f) { return median3(rows[0].*f, rows[1].*f, rows[2].*f); };
  const double base = med(&SeedRow::base_acc_err), sep = med(&SeedRow::sep_acc_err),
               reg = med(&SeedRow::reg_acc_err), sep_mp = med(&SeedRow::sep_mpjpe), reg_mp = med(&SeedRow::reg_mpjpe);
  const bool a = sep <= 0.8 * base, b = reg_mp <= sep_mp, c = reg <= 0.9 * base;
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = a && b && c && secs < 900.0;
  o.detail = fmt("(a) %s %.3f <= %.3f, (b) %s %.2f <= %.2f, (c) %s %.3f <= %.3f, %.0f s", a ? "ok" : "FAILS", sep,
                 0.8 * base, b ? "ok" : "FAILS", reg_mp, sep_mp, c ? "ok" : "FAILS", reg, 0.9 * base, secs);
  return o;
}

std::string file_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

// 5. Two ablate runs with the same config and seed are byte-identical.
Outcome determinism(const fs::path& cli, const fs::path& work, const fs::path& first) {
  const fs::path cfg = work / "seed1.cfg";
  const fs::path second = work / "seed1_repeat";
  if (!fs::exists(first / "report.json")) {
    std::ofstream(cfg) << "seed = 1\n";
    if (!run_ablate(cli, cfg, first)) return {false, "first ablate failed"};
  }
  if (!run_ablate(cli, cfg, second)) return {false, "second ablate failed"};
  std::size_t compared = 0;
  std::vector<std::string> differing;
  for (const auto& e : fs::directory_iterator(first)) {
    const std::string name = e.path().filename().string();
    const bool wanted = name == "report.json" || name == "table.txt" || e.path().extension() == ".ckpt";
    if (!wanted) continue;
    ++compared;
    if (!fs::exists(second / name) || file_bytes(e.path()) != file_bytes(second / name)) differing.push_back(name);
  }
  Outcome o;
  o.pass = compared == 8 && differing.empty();
  o.detail = fmt("%zu files compared (report, table, 6 checkpoints), %zu differ", compared, differing.size());
  for (const auto& d : differing) o.detail += " " + d;
  return o;
}

// 6. Depth from the weak-camera scale.
Outcome depth_formula() {
  const camera::CameraIntrinsics intr{5000.0, 224.0};
  const double tz = camera::recover_translation({1.0, 0.0, 0.0}, intr).z();
  Outcome o;
  o.pass = std::abs(tz - 44.642857142857146) <= 1e-12;
  o.detail = fmt("t_z = %.17g", tz);
  return o;
}

// 7. Discriminator cadence and the lambda_reg = 0 toggle, default model size.
Outcome cadence_and_toggle() {
  harness::TrainConfig cfg;
  cfg.iterations = 20;
  const synth::Dataset data = harness::make_dataset(cfg);
  std::vector<std::uint64_t> sums;
  const harness::TrainedModels m = harness::train(
      cfg, harness::Variant::sep_t_reg, data,
      [&](std::int64_t, const models::Generator&, const models::MotionDiscriminator& d) {
        sums.push_back(d.params().checksum());
      });
  models::MotionDiscriminator fresh;
  fresh.init(cfg.seed ^ 0xbb67ae8584caa73bULL);
  std::uint64_t prev = fresh.params().checksum();
  int wrong = 0;
  for (std::size_t i = 0; i < sums.size(); ++i) {
    const bool changed = sums[i] != prev;
    if (changed != ((i + 1) % 5 == 0)) ++wrong;
    prev = sums[i];
  }

  harness::TrainConfig zero = cfg;
  zero.weights.reg = 0.0;
  const harness::TrainedModels a = harness::train(zero, harness::Variant::sep_t, data);
  const harness::TrainedModels b = harness::train(zero, harness::Variant::sep_t_reg, data);
  bool curves_equal = a.curve.size() == b.curve.size();
  for (std::size_t i = 0; curves_equal && i < a.curve.size(); ++i) curves_equal = a.curve[i].total == b.curve[i].total;
  const bool same = a.generator->params().checksum() == b.generator->params().checksum() &&
                    a.discriminator->params().checksum() == b.discriminator->params().checksum() && curves_equal;
  Outcome o;
  o.pass = wrong == 0 && same && !m.curve.empty();
  o.detail = fmt("%d cadence violations over %zu iterations; lambda_reg=0 vs sep_t %s (gen %s)", wrong, sums.size(),
                 same ? "bitwise equal" : "DIFFERENT", harness::hex64(a.generator->params().checksum()).c_str());
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::string workdir = (fs::temp_directory_path() / "dmp_acceptance").string();
  std::string cli = DMP_CLI_PATH;
  std::vector<int> only, allow_fail;
  app.add_option("--workdir", workdir, "Scratch directory for training runs");
  app.add_option("--cli", cli, "Path to dmp_cli");
  app.add_option("--only", only, "Run only these criteria");
  app.add_option("--allow-fail", allow_fail, "Criteria whose failure does not change the exit status");
  CLI11_PARSE(app, argc, argv);

  const fs::path work = workdir;
  fs::create_directories(work);
  const std::set<int> selected(only.begin(), only.end());
  const std::set<int> tolerated(allow_fail.begin(), allow_fail.end());

  const std::function<Outcome()> criteria[] = {
      rotations,
      gradients,
      metric_oracles,
      [&] { return table_direction(cli, work); },
      [&] { return determinism(cli, work, work / "seed1"); },
      depth_formula,
      cadence_and_toggle,
  };
  const char* names[] = {"rotation suite",        "gradient oracle", "metric oracles", "ablation direction",
                         "ablate determinism",    "depth formula",   "cadence and lambda_reg toggle"};

  int hard_failures = 0;
  for (int i = 0; i < 7; ++i) {
    const int id = i + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %d (%s): %s  %s\n", id, names[i], o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass && !tolerated.count(id)) ++hard_failures;
  }
  return hard_failures == 0 ? 0 : 1;
}
