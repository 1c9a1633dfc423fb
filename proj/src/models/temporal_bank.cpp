#include "dmp/models/temporal_bank.hpp"

#include <memory>
#include <vector>

#include "dmp/grad/ops.hpp"

namespace dmp::models {

TemporalEncoder TemporalEncoder::create(grad::ParamStore& store, const std::string& prefix,
                                        Eigen::Index feature_dim, Eigen::Index hidden_dim) {
  TemporalEncoder e;
  e.layer0 = grad::GruCell::create(store, prefix + ".gru0", feature_dim, hidden_dim);
  e.layer1 = grad::GruCell::create(store, prefix + ".gru1", hidden_dim, hidden_dim);
  e.lift_w = &store.add(prefix + ".lift.W", feature_dim, hidden_dim);
  e.lift_b = &store.add(prefix + ".lift.b", feature_dim, 1);
  return e;
}

void TemporalEncoder::init(std::mt19937_64& rng) {
  layer0.init(rng);
  layer1.init(rng);
  grad::init_uniform_fan_in(*lift_w, rng);
  lift_b->values.setZero();
}

namespace {

struct JointTrace {
  grad::GruTrace t0, t1;
  Matrix h1;
};

}  // namespace

Var temporal_bank(grad::Tape& tape, std::span<const TemporalEncoder> encoders, Var features,
                  SeqLayout layout, ExecPolicy policy) {
  const auto nj = static_cast<std::ptrdiff_t>(encoders.size());
  const Eigen::Index fd = encoders.empty() ? 0 : encoders[0].feature_dim();
  if (features.rows() != nj * fd || features.cols() != layout.cols()) {
    grad::throw_shape_mismatch_(features.rows(), features.cols(), nj * fd, layout.cols());
  }

  auto traces = std::make_shared<std::vector<JointTrace>>(static_cast<std::size_t>(nj));
  Matrix out(features.rows(), features.cols());
  const Matrix& f = features.value();
#pragma omp parallel for schedule(static) if (policy == ExecPolicy::parallel)
  for (std::ptrdiff_t j = 0; j < nj; ++j) {
    const TemporalEncoder& e = encoders[static_cast<std::size_t>(j)];
    JointTrace& tr = (*traces)[static_cast<std::size_t>(j)];
    const Matrix h0 = grad::gru_sequence_forward(e.layer0, f.middleRows(j * fd, fd), layout, &tr.t0);
    tr.h1 = grad::gru_sequence_forward(e.layer1, h0, layout, &tr.t1);
    out.middleRows(j * fd, fd) = (e.lift_w->values * tr.h1).colwise() + e.lift_b->values.col(0);
  }

  std::vector<TemporalEncoder> enc(encoders.begin(), encoders.end());
  return tape.record_custom(
      std::move(out), true,
      [features, traces, enc = std::move(enc), layout, policy, fd](grad::Tape& t, const Matrix& g,
                                                                   const Matrix&) {
        const auto nj = static_cast<std::ptrdiff_t>(enc.size());
        Matrix gf(g.rows(), g.cols());
#pragma omp parallel for schedule(static) if (policy == ExecPolicy::parallel)
        for (std::ptrdiff_t j = 0; j < nj; ++j) {
          const TemporalEncoder& e = enc[static_cast<std::size_t>(j)];
          const JointTrace& tr = (*traces)[static_cast<std::size_t>(j)];
          const auto gj = g.middleRows(j * fd, fd);
          e.lift_w->grad.noalias() += gj * tr.h1.transpose();
          e.lift_b->grad += gj.rowwise().sum();
          const Matrix gh1 = e.lift_w->values.transpose() * gj;
          const Matrix gh0 = grad::gru_sequence_backward(e.layer1, tr.t1, gh1, layout);
          gf.middleRows(j * fd, fd) = grad::gru_sequence_backward(e.layer0, tr.t0, gh0, layout);
        }
        t.accumulate(features, gf);
      });
}

Var temporal_reference(grad::Tape& tape, const TemporalEncoder& enc, Var joint_features,
                       SeqLayout layout) {
  const grad::GruVars c0 = grad::bind(tape, enc.layer0);
  const grad::GruVars c1 = grad::bind(tape, enc.layer1);
  const Var lift_w = tape.param(*enc.lift_w);
  const Var lift_b = tape.param(*enc.lift_b);
  Var h0 = tape.constant(Matrix::Zero(enc.layer0.hidden_dim, layout.batch));
  Var h1 = tape.constant(Matrix::Zero(enc.layer1.hidden_dim, layout.batch));
  std::vector<Var> steps;
  for (std::ptrdiff_t t = 0; t < layout.frames; ++t) {
    const Var x = grad::cols(joint_features, t * layout.batch, layout.batch);
    h0 = grad::gru_step(c0, x, h0);
    h1 = grad::gru_step(c1, h0, h1);
    steps.push_back(grad::linear(lift_w, lift_b, h1));
  }
  return grad::hconcat(steps);
}

}  // namespace dmp::models
