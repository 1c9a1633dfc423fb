#include "dmp/harness/losses.hpp"

#include <vector>

#include "dmp/grad/ops.hpp"
#include "dmp/grad/seq_ops.hpp"
#include "dmp/models/geometry_ops.hpp"

namespace dmp::harness {

using skeleton::kNumJoints;

namespace {

double scalar(Var v) { return v.value()(0, 0); }

}  // namespace

GeneratorLoss generator_loss(grad::Tape& tape, const models::GeneratorGraph& g, const synth::ClipBatch& batch,
                             const models::MotionDiscriminator& disc, const LossWeights& w,
                             const camera::CameraIntrinsics& intr, bool include_reg) {
  const SeqLayout layout = g.layout;
  const Var pred3d = models::forward_kinematics(g.rotmats, g.beta, layout, skeleton::default_tree());
  const Var pred2d = models::project_normalized(pred3d, g.trans, intr);

  std::array<Var, kNumTerms> terms;
  terms[k3d] = grad::mse(pred3d, tape.constant(batch.gt3d));
  terms[k2d] = grad::mse(pred2d, tape.constant(batch.gt2d));
  terms[kPose] = grad::mse(g.rotmats, tape.constant(batch.gt_rotmats));
  terms[kBeta] = grad::mse(g.beta, tape.constant(batch.gt_beta));

  const Var score = disc.forward(tape, models::rotmat_to_sixd(g.rotmats), layout, /*trainable=*/false).score;
  terms[kAdv] = grad::mean(grad::square(grad::add_scalar(score, -1.0)));

  const Eigen::Index block = g.features.rows() / kNumJoints;
  const Var norms = grad::block_frobenius(grad::sub(g.ftilde, g.features), block, layout);
  terms[kReg] = grad::scale(grad::sum(norms), 1.0 / static_cast<double>(kNumJoints * layout.cols()));

  const std::array<double, kNumTerms> weight = {w.w3d, w.w2d, w.pose, w.beta, w.adv, w.reg};
  GeneratorLoss out;
  std::vector<Var> parts;
  out.terms = terms;
  for (int k = 0; k < kNumTerms; ++k) {
    out.raw[k] = scalar(terms[k]);
    if (k == kReg && (!include_reg || weight[k] == 0.0)) continue;
    parts.push_back(grad::scale(terms[k], weight[k]));
    out.weighted[k] = scalar(parts.back());
  }
  out.total = grad::add_n(parts);
  return out;
}

DiscriminatorLoss discriminator_loss(grad::Tape& tape, const models::MotionDiscriminator& disc,
                                     const Matrix& real6d, SeqLayout real_layout, const Matrix& fake6d,
                                     SeqLayout fake_layout, bool literal) {
  const Var real = disc.forward(tape, tape.constant(real6d), real_layout, /*trainable=*/true).score;
  const Var fake = disc.forward(tape, tape.constant(fake6d), fake_layout, /*trainable=*/true).score;
  const double real_target = literal ? 0.0 : 1.0;
  const double fake_target = literal ? 1.0 : 0.0;
  const Var lr = grad::mean(grad::square(grad::add_scalar(real, -real_target)));
  const Var lf = grad::mean(grad::square(grad::add_scalar(fake, -fake_target)));
  DiscriminatorLoss out;
  out.real_term = scalar(lr);
  out.fake_term = scalar(lf);
  const Var both[] = {lr, lf};
  out.total = grad::add_n(both);
  return out;
}

}  // namespace dmp::harness
