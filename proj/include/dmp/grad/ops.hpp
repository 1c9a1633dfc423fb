#pragma once

#include <cmath>
#include <span>

#include "dmp/grad/tape.hpp"

namespace dmp::grad {

Var matmul(Var a, Var b);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var hadamard(Var a, Var b);
Var scale(Var a, double s);
Var add_scalar(Var a, double s);
// x (n x m) plus column vector b (n x 1) broadcast over columns.
Var add_bias(Var x, Var b);
Var sigmoid(Var a);
Var tanh(Var a);
Var square(Var a);

// 1 x 1 reductions.
Var sum(Var a);
Var mean(Var a);
// Mean of squared entrywise differences. Throws ShapeMismatch.
Var mse(Var a, Var b);

// W x + b. Throws ShapeMismatch.
Var linear(Var w, Var b, Var x);

Var rows(Var a, Eigen::Index start, Eigen::Index count);
Var vconcat(std::span<const Var> parts);
Var cols(Var a, Eigen::Index start, Eigen::Index count);
Var hconcat(std::span<const Var> parts);
Var add_n(std::span<const Var> parts);

// Plain-value helpers shared by the fused kernels.
inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace dmp::grad
