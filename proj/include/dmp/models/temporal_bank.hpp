#pragma once

#include <span>
#include <string>

#include "dmp/exec.hpp"
#include "dmp/grad/gru.hpp"

namespace dmp::models {

using grad::Matrix;
using grad::Var;

// One joint's temporal encoder: two stacked GRU layers followed by a linear
// lift from the hidden size back to the feature size.
struct TemporalEncoder {
  grad::GruCell layer0;
  grad::GruCell layer1;
  grad::ParamBlock* lift_w = nullptr;
  grad::ParamBlock* lift_b = nullptr;

  static TemporalEncoder create(grad::ParamStore& store, const std::string& prefix,
                                Eigen::Index feature_dim, Eigen::Index hidden_dim);
  void init(std::mt19937_64& rng);
  Eigen::Index feature_dim() const { return layer0.input_dim; }
};

// Runs every joint's encoder over its own row block of `features`
// ((J * feature_dim) x cols) as one fused tape node. Joints execute in
// parallel under ExecPolicy::parallel; each joint only touches its own
// parameters and row block, so results do not depend on scheduling.
Var temporal_bank(grad::Tape& tape, std::span<const TemporalEncoder> encoders, Var features,
                  SeqLayout layout, ExecPolicy policy);

// Serial reference for one joint composed from recorded gru_step ops.
Var temporal_reference(grad::Tape& tape, const TemporalEncoder& enc, Var joint_features,
                       SeqLayout layout);

}  // namespace dmp::models
