#include "dmp/models/discriminator.hpp"

#include <random>

#include "dmp/grad/ops.hpp"
#include "dmp/grad/seq_ops.hpp"

namespace dmp::models {

MotionDiscriminator::MotionDiscriminator(Config cfg) : cfg_(cfg) {
  fc1_w_ = &params_.add("disc.fc1.W", cfg_.embed_dim, cfg_.input_dim);
  fc1_b_ = &params_.add("disc.fc1.b", cfg_.embed_dim, 1);
  fc2_w_ = &params_.add("disc.fc2.W", cfg_.embed_dim, cfg_.embed_dim);
  fc2_b_ = &params_.add("disc.fc2.b", cfg_.embed_dim, 1);
  attn_w_ = &params_.add("disc.attn.W", 1, cfg_.embed_dim);
  attn_b_ = &params_.add("disc.attn.b", 1, 1);
  out_w_ = &params_.add("disc.out.W", 1, cfg_.embed_dim);
  out_b_ = &params_.add("disc.out.b", 1, 1);
}

void MotionDiscriminator::init(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (grad::ParamBlock* w : {fc1_w_, fc2_w_, attn_w_, out_w_}) grad::init_uniform_fan_in(*w, rng);
  for (grad::ParamBlock* b : {fc1_b_, fc2_b_, attn_b_, out_b_}) b->values.setZero();
  params_.zero_grad();
}

MotionDiscriminator::Graph MotionDiscriminator::forward(grad::Tape& tape, Var poses, SeqLayout layout,
                                                        bool trainable, bool uniform_attention) const {
  auto bind = [&](grad::ParamBlock* p) { return trainable ? tape.param(*p) : tape.frozen(*p); };
  const Var h1 = grad::tanh(grad::linear(bind(fc1_w_), bind(fc1_b_), poses));
  const Var h2 = grad::tanh(grad::linear(bind(fc2_w_), bind(fc2_b_), h1));
  Graph g;
  if (uniform_attention) {
    g.attention = tape.constant(grad::uniform_attention(layout));
  } else {
    g.attention = grad::segment_softmax(grad::linear(bind(attn_w_), bind(attn_b_), h2), layout);
  }
  const Var pooled = grad::attention_pool(h2, g.attention, layout);
  g.score = grad::linear(bind(out_w_), bind(out_b_), pooled);
  return g;
}

}  // namespace dmp::models
