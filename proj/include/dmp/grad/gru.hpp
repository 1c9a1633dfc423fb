#pragma once

#include <random>
#include <string>

#include "dmp/exec.hpp"
#include "dmp/grad/tape.hpp"

namespace dmp::grad {

// One GRU layer:
//   z = sigmoid(W_z x + U_z h + b_z)
//   r = sigmoid(W_r x + U_r h + b_r)
//   n = tanh(W_n x + r * (U_n h) + b_n)
//   h' = (1 - z) * n + z * h
struct GruCell {
  Eigen::Index input_dim = 0;
  Eigen::Index hidden_dim = 0;
  ParamBlock* w_z = nullptr;
  ParamBlock* w_r = nullptr;
  ParamBlock* w_n = nullptr;
  ParamBlock* u_z = nullptr;
  ParamBlock* u_r = nullptr;
  ParamBlock* u_n = nullptr;
  ParamBlock* b_z = nullptr;
  ParamBlock* b_r = nullptr;
  ParamBlock* b_n = nullptr;

  // Registers the nine blocks as "<prefix>.W_z", ... in a fixed order.
  static GruCell create(ParamStore& store, const std::string& prefix, Eigen::Index input_dim,
                        Eigen::Index hidden_dim);
  // Weights uniform in +-1/sqrt(fan_in), biases zero.
  void init(std::mt19937_64& rng);
};

struct GruVars {
  Var w_z, w_r, w_n, u_z, u_r, u_n, b_z, b_r, b_n;
};

GruVars bind(Tape& tape, const GruCell& cell);

// Single recorded step (hidden x batch). Throws ShapeMismatch.
Var gru_step(const GruVars& cell, Var x, Var h_prev);

// Activations kept by the fused forward for the backward pass. Columns follow
// SeqLayout; hp holds h_{t-1} (zero at t = 0).
struct GruTrace {
  Matrix x, hp, z, r, n, un;
};

// Whole-sequence forward from a zero initial state. x is input_dim x cols.
Matrix gru_sequence_forward(const GruCell& cell, const Matrix& x, SeqLayout layout,
                            GruTrace* trace);

// Backpropagation through time. Adds parameter gradients into the cell's
// blocks and returns the gradient with respect to x.
Matrix gru_sequence_backward(const GruCell& cell, const GruTrace& trace, const Matrix& grad_h,
                             SeqLayout layout);

}  // namespace dmp::grad
