#pragma once

#include <cstdint>

#include "dmp/exec.hpp"
#include "dmp/grad/tape.hpp"

namespace dmp::models {

using grad::Matrix;
using grad::Var;

// Motion discriminator: a two-layer tanh MLP embeds each frame's pose (24
// joints in 6D), a linear score per frame is softmax-normalized over the
// clip, and the attention-pooled embedding is mapped to one scalar per clip.
class MotionDiscriminator {
 public:
  struct Config {
    Eigen::Index input_dim = 144;
    Eigen::Index embed_dim = 256;
  };

  struct Graph {
    Var attention;  // 1 x N, sums to one per clip
    Var score;      // 1 x B
  };

  MotionDiscriminator() : MotionDiscriminator(Config{}) {}
  explicit MotionDiscriminator(Config cfg);
  MotionDiscriminator(const MotionDiscriminator&) = delete;
  MotionDiscriminator& operator=(const MotionDiscriminator&) = delete;

  void init(std::uint64_t seed);

  grad::ParamStore& params() { return params_; }
  const grad::ParamStore& params() const { return params_; }
  const Config& config() const { return cfg_; }

  // With trainable = false the parameters are read but never receive
  // gradient. uniform_attention replaces the softmax weights by 1/T.
  Graph forward(grad::Tape& tape, Var poses, SeqLayout layout, bool trainable,
                bool uniform_attention = false) const;

 private:
  Config cfg_;
  grad::ParamStore params_;
  grad::ParamBlock* fc1_w_;
  grad::ParamBlock* fc1_b_;
  grad::ParamBlock* fc2_w_;
  grad::ParamBlock* fc2_b_;
  grad::ParamBlock* attn_w_;
  grad::ParamBlock* attn_b_;
  grad::ParamBlock* out_w_;
  grad::ParamBlock* out_b_;
};

}  // namespace dmp::models
