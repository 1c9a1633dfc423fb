#include "dmp/grad/adam.hpp"

#include <cmath>

namespace dmp::grad {

Adam::Adam(ParamStore& params, AdamConfig cfg) : params_(params), cfg_(cfg) {
  m_.reserve(params.size());
  v_.reserve(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_.push_back(Matrix::Zero(params[i].values.rows(), params[i].values.cols()));
    v_.push_back(Matrix::Zero(params[i].values.rows(), params[i].values.cols()));
  }
}

void Adam::step() {
  ++steps_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(steps_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(steps_));
  for (std::size_t i = 0; i < params_.size(); ++i) {
    ParamBlock& p = params_[i];
    auto m = m_[i].array();
    auto v = v_[i].array();
    const auto g = p.grad.array();
    m = cfg_.beta1 * m + (1.0 - cfg_.beta1) * g;
    v = cfg_.beta2 * v + (1.0 - cfg_.beta2) * g.square();
    p.values *= 1.0 - cfg_.lr * cfg_.weight_decay;
    p.values.array() -= cfg_.lr * (m / bc1) / ((v / bc2).sqrt() + cfg_.eps);
    p.zero_grad();
  }
}

}  // namespace dmp::grad
