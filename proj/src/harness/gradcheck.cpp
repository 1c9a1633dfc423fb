#include "dmp/harness/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <cstdio>

#include "dmp/grad/tape.hpp"
#include "dmp/models/geometry_ops.hpp"
#include "dmp/harness/losses.hpp"
#include "dmp/harness/train.hpp"

namespace dmp::harness {

namespace {

// Moves every parameter off its structured initial value (zero biases,
// identity head) so that no sampled derivative sits at a special point.
// The spread is scaled by 1/sqrt(fan_in) like the initializer.
void jitter(grad::ParamStore& store, std::mt19937_64& rng, double sd) {
  for (std::size_t i = 0; i < store.size(); ++i) {
    Matrix& v = store[i].values;
    std::normal_distribution<double> n(0.0, sd / std::sqrt(static_cast<double>(v.cols())));
    for (Eigen::Index k = 0; k < v.size(); ++k) v.data()[k] += n(rng);
  }
}

void check_block(const std::string& loss_name, grad::ParamStore& store, const std::string& block,
                 const std::function<double(bool)>& eval, const GradCheckOptions& opts, std::mt19937_64& rng,
                 GradCheckReport& report) {
  store.zero_grad();
  eval(true);
  grad::ParamBlock& p = store.at(block);
  const Matrix analytic = p.grad;
  std::uniform_int_distribution<Eigen::Index> pick(0, p.values.size() - 1);
  GradCheckBlock summary{loss_name, block};
  for (int s = 0; s < opts.samples_per_block; ++s) {
    const Eigen::Index k = pick(rng);
    double& x = p.values.data()[k];
    const double x0 = x;
    x = x0 + opts.step;
    const double up = eval(false);
    x = x0 - opts.step;
    const double down = eval(false);
    x = x0;
    GradCheckEntry e;
    e.loss = loss_name;
    e.block = block;
    e.row = k % p.values.rows();
    e.col = k / p.values.rows();
    e.analytic = analytic.data()[k];
    e.numeric = (up - down) / (2 * opts.step);
    e.rel_err = relative_error(e.analytic, e.numeric);
    report.max_entry_rel_err = std::max(report.max_entry_rel_err, e.rel_err);
    summary.max_abs_err = std::max(summary.max_abs_err, std::abs(e.analytic - e.numeric));
    summary.max_abs_numeric = std::max(summary.max_abs_numeric, std::abs(e.numeric));
    report.entries.push_back(e);
  }
  summary.rel_err = summary.max_abs_err / std::max(summary.max_abs_numeric, 1e-7);
  double& slot = loss_name.find('.') == std::string::npos ? report.max_rel_err : report.max_term_rel_err;
  slot = std::max(slot, summary.rel_err);
  report.blocks.push_back(summary);
  store.zero_grad();
}

}  // namespace

double relative_error(double analytic, double numeric, double floor) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / denom;
}

GradCheckReport check_gradients(const GradCheckOptions& opts) {
  TrainConfig cfg;
  cfg.frames = opts.frames;
  cfg.feature_dim = opts.feature_dim;
  cfg.cam_dim = opts.cam_dim;
  cfg.hidden_dim = opts.hidden_dim;
  cfg.lsgan_literal = opts.lsgan_literal;

  synth::DatasetOptions dopts = dataset_options(cfg);
  dopts.real_pool = opts.batch;
  const synth::Dataset data = synth::make_dataset(2 * opts.batch, opts.seed, dopts, ExecPolicy::serial);
  std::vector<const synth::TrainingClip*> clips;
  for (std::int64_t b = 0; b < opts.batch; ++b) clips.push_back(&data.train[static_cast<std::size_t>(b)]);
  const synth::ClipBatch batch = synth::make_batch(clips);
  std::vector<const skeleton::MotionSequence*> real;
  for (const auto& m : data.real) real.push_back(&m);
  const Matrix real6d = synth::motion_sixd_batch(real);
  const SeqLayout real_layout{opts.frames, static_cast<std::ptrdiff_t>(real.size())};

  models::Generator gen(generator_config(cfg, Variant::sep_t_reg));
  models::MotionDiscriminator disc;
  std::mt19937_64 rng(opts.seed);
  gen.init(rng());
  disc.init(rng());
  jitter(gen.params(), rng, opts.jitter);
  jitter(disc.params(), rng, opts.jitter);

  auto gen_term = [&](int term, bool backward) {
    grad::Tape tape;
    const models::GeneratorGraph g = gen.forward(tape, batch.obs, batch.layout, ExecPolicy::serial);
    const GeneratorLoss l = generator_loss(tape, g, batch, disc, cfg.weights, cfg.intrinsics, true);
    const Var out = term < 0 ? l.total : l.terms[static_cast<std::size_t>(term)];
    const double v = out.value()(0, 0);
    if (backward) tape.backward(out);
    return v;
  };

  // Fakes for the discriminator loss come from the current generator.
  Matrix fake6d;
  {
    grad::Tape tape;
    const models::GeneratorGraph g = gen.forward(tape, batch.obs, batch.layout, ExecPolicy::serial);
    fake6d = models::rotmat_to_sixd(g.rotmats).value();
  }
  auto disc_loss = [&](bool backward) {
    grad::Tape tape;
    const DiscriminatorLoss l =
        discriminator_loss(tape, disc, real6d, real_layout, fake6d, batch.layout, cfg.lsgan_literal);
    const double v = l.total.value()(0, 0);
    if (backward) tape.backward(l.total);
    return v;
  };

  const std::string j = models::joint_prefix(4);
  const std::vector<std::string> gen_blocks = {
      j + ".enc.W",          j + ".enc.b",           j + ".temporal.gru0.W_z", j + ".temporal.gru0.b_n",
      j + ".temporal.gru1.U_r", j + ".temporal.lift.W", j + ".head.W",          j + ".head.b",
      "gen.cam.W",           "gen.cam.b",            "gen.shape.W"};
  const std::vector<std::string> disc_blocks = {"disc.fc1.W", "disc.fc2.b", "disc.attn.W", "disc.out.W",
                                                "disc.out.b"};

  GradCheckReport report;
  for (int term = -1; term < kNumTerms; ++term) {
    const std::string name = term < 0 ? "generator" : "generator." + std::string(kTermNames[static_cast<std::size_t>(term)]);
    for (const auto& b : gen_blocks) {
      check_block(name, gen.params(), b, [&](bool bw) { return gen_term(term, bw); }, opts, rng, report);
    }
  }
  for (const auto& b : disc_blocks) check_block("discriminator", disc.params(), b, disc_loss, opts, rng, report);
  return report;
}

}  // namespace dmp::harness
