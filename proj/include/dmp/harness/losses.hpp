#pragma once

#include <array>
#include <string_view>

#include "dmp/harness/config.hpp"
#include "dmp/models/discriminator.hpp"
#include "dmp/models/generator.hpp"
#include "dmp/synth.hpp"

namespace dmp::harness {

using grad::Matrix;
using grad::Var;

enum Term : int { k3d = 0, k2d, kPose, kBeta, kAdv, kReg, kNumTerms };
inline constexpr std::array<std::string_view, kNumTerms> kTermNames = {"l3d", "l2d", "pose", "beta", "adv", "reg"};

struct GeneratorLoss {
  Var total;
  std::array<Var, kNumTerms> terms;          // unweighted, all recorded
  std::array<double, kNumTerms> raw{};       // unweighted
  std::array<double, kNumTerms> weighted{};  // weight * raw; sums to total
};

// Weighted generator objective on one recorded generator pass. Keypoints are compared root-relative
// in meters, 2D in normalized image coordinates, poses as rotation matrices.
// The discriminator is read but not trained. The regularizer is
// sum over joints and clips of ||ftilde_i - f_i||_F, divided by J * T * B.
// When include_reg is false, or its weight is zero, the regularizer is
// reported but left out of the graph.
GeneratorLoss generator_loss(grad::Tape& tape, const models::GeneratorGraph& g, const synth::ClipBatch& batch,
                             const models::MotionDiscriminator& disc, const LossWeights& w,
                             const camera::CameraIntrinsics& intr, bool include_reg);

struct DiscriminatorLoss {
  Var total;
  double real_term = 0.0;
  double fake_term = 0.0;
};

// Least-squares objective, mean((D(real) - 1)^2) + mean(D(fake)^2). With
// literal = true the targets are swapped. `fake6d` is plain data, so nothing
// reaches the generator.
DiscriminatorLoss discriminator_loss(grad::Tape& tape, const models::MotionDiscriminator& disc,
                                     const Matrix& real6d, SeqLayout real_layout, const Matrix& fake6d,
                                     SeqLayout fake_layout, bool literal);

}  // namespace dmp::harness
