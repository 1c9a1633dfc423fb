#pragma once

#include <cstdint>
#include <vector>

#include "dmp/grad/param.hpp"

namespace dmp::grad {

struct AdamConfig {
  double lr = 1e-4;
  double weight_decay = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Adam with bias correction and decoupled weight decay: every step first
// applies p -= lr * wd * p, then the Adam delta. Gradients are zeroed after
// the update.
class Adam {
 public:
  Adam(ParamStore& params, AdamConfig cfg);

  void step();
  std::int64_t steps() const { return steps_; }
  const AdamConfig& config() const { return cfg_; }

 private:
  ParamStore& params_;
  AdamConfig cfg_;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
  std::int64_t steps_ = 0;
};

}  // namespace dmp::grad
