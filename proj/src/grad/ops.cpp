#include "dmp/grad/ops.hpp"

#include <cmath>

#include "dmp/error.hpp"

namespace dmp::grad {
namespace {

void same_shape(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw_shape_mismatch_(a.rows(), a.cols(), b.rows(), b.cols());
  }
}

Tape& tape_of(Var a) { return *a.tape(); }

Matrix scalar(double v) { return Matrix::Constant(1, 1, v); }

}  // namespace

Var matmul(Var a, Var b) {
  if (a.cols() != b.rows()) throw_shape_mismatch_(a.rows(), a.cols(), b.rows(), b.cols());
  Tape& t = tape_of(a);
  return t.record(a.value() * b.value(), {a, b}, [a, b](Tape& t, const Matrix& g, const Matrix&) {
    if (t.requires_grad(a)) t.accumulate(a, g * b.value().transpose());
    if (t.requires_grad(b)) t.accumulate(b, a.value().transpose() * g);
  });
}

Var add(Var a, Var b) {
  same_shape(a.value(), b.value());
  return tape_of(a).record(a.value() + b.value(), {a, b},
                           [a, b](Tape& t, const Matrix& g, const Matrix&) {
                             t.accumulate(a, g);
                             t.accumulate(b, g);
                           });
}

Var sub(Var a, Var b) {
  same_shape(a.value(), b.value());
  return tape_of(a).record(a.value() - b.value(), {a, b},
                           [a, b](Tape& t, const Matrix& g, const Matrix&) {
                             t.accumulate(a, g);
                             t.accumulate(b, -g);
                           });
}

Var hadamard(Var a, Var b) {
  same_shape(a.value(), b.value());
  return tape_of(a).record(a.value().cwiseProduct(b.value()), {a, b},
                           [a, b](Tape& t, const Matrix& g, const Matrix&) {
                             if (t.requires_grad(a)) t.accumulate(a, g.cwiseProduct(b.value()));
                             if (t.requires_grad(b)) t.accumulate(b, g.cwiseProduct(a.value()));
                           });
}

Var scale(Var a, double s) {
  return tape_of(a).record(s * a.value(), {a},
                           [a, s](Tape& t, const Matrix& g, const Matrix&) { t.accumulate(a, s * g); });
}

Var add_scalar(Var a, double s) {
  return tape_of(a).record((a.value().array() + s).matrix(), {a},
                           [a](Tape& t, const Matrix& g, const Matrix&) { t.accumulate(a, g); });
}

Var add_bias(Var x, Var b) {
  if (b.cols() != 1 || b.rows() != x.rows()) {
    throw_shape_mismatch_(x.rows(), 1, b.rows(), b.cols());
  }
  Matrix out = x.value().colwise() + b.value().col(0);
  return tape_of(x).record(std::move(out), {x, b}, [x, b](Tape& t, const Matrix& g, const Matrix&) {
    t.accumulate(x, g);
    if (t.requires_grad(b)) t.accumulate(b, g.rowwise().sum());
  });
}

Var sigmoid(Var a) {
  Matrix out = a.value().unaryExpr([](double v) { return sigmoid(v); });
  return tape_of(a).record(std::move(out), {a}, [a](Tape& t, const Matrix& g, const Matrix& y) {
    t.accumulate(a, g.cwiseProduct((y.array() * (1.0 - y.array())).matrix()));
  });
}

Var tanh(Var a) {
  Matrix out = a.value().array().tanh().matrix();
  return tape_of(a).record(std::move(out), {a}, [a](Tape& t, const Matrix& g, const Matrix& y) {
    t.accumulate(a, g.cwiseProduct((1.0 - y.array().square()).matrix()));
  });
}

Var square(Var a) {
  return tape_of(a).record(a.value().array().square().matrix(), {a},
                           [a](Tape& t, const Matrix& g, const Matrix&) {
                             t.accumulate(a, 2.0 * g.cwiseProduct(a.value()));
                           });
}

Var sum(Var a) {
  return tape_of(a).record(scalar(a.value().sum()), {a}, [a](Tape& t, const Matrix& g, const Matrix&) {
    t.accumulate(a, Matrix::Constant(a.rows(), a.cols(), g(0, 0)));
  });
}

Var mean(Var a) {
  const double n = static_cast<double>(a.value().size());
  return tape_of(a).record(scalar(a.value().sum() / n), {a},
                           [a, n](Tape& t, const Matrix& g, const Matrix&) {
                             t.accumulate(a, Matrix::Constant(a.rows(), a.cols(), g(0, 0) / n));
                           });
}

Var mse(Var a, Var b) {
  same_shape(a.value(), b.value());
  const double n = static_cast<double>(a.value().size());
  Matrix diff = a.value() - b.value();
  const double v = diff.squaredNorm() / n;
  return tape_of(a).record(scalar(v), {a, b},
                           [a, b, n, diff = std::move(diff)](Tape& t, const Matrix& g, const Matrix&) {
                             const double k = 2.0 * g(0, 0) / n;
                             t.accumulate(a, k * diff);
                             t.accumulate(b, -k * diff);
                           });
}

Var linear(Var w, Var b, Var x) {
  if (w.cols() != x.rows()) throw_shape_mismatch_(w.rows(), w.cols(), x.rows(), x.cols());
  return add_bias(matmul(w, x), b);
}

Var rows(Var a, Eigen::Index start, Eigen::Index count) {
  if (start < 0 || count < 0 || start + count > a.rows()) {
    throw_shape_mismatch_(a.rows(), a.cols(), start + count, a.cols());
  }
  Matrix out = a.value().middleRows(start, count);
  return tape_of(a).record(std::move(out), {a},
                           [a, start, count](Tape& t, const Matrix& g, const Matrix&) {
                             Matrix full = Matrix::Zero(a.rows(), a.cols());
                             full.middleRows(start, count) = g;
                             t.accumulate(a, full);
                           });
}

Var vconcat(std::span<const Var> parts) {
  if (parts.empty()) throw ShapeMismatch("vconcat of nothing");
  Tape& t = tape_of(parts[0]);
  const Eigen::Index cols = parts[0].cols();
  Eigen::Index total = 0;
  bool req = false;
  for (Var p : parts) {
    if (p.cols() != cols) throw_shape_mismatch_(p.rows(), p.cols(), p.rows(), cols);
    total += p.rows();
    req = req || t.requires_grad(p);
  }
  Matrix out(total, cols);
  Eigen::Index r = 0;
  for (Var p : parts) {
    out.middleRows(r, p.rows()) = p.value();
    r += p.rows();
  }
  std::vector<Var> keep(parts.begin(), parts.end());
  return t.record_custom(std::move(out), req,
                         [keep = std::move(keep)](Tape& t, const Matrix& g, const Matrix&) {
                           Eigen::Index r = 0;
                           for (Var p : keep) {
                             t.accumulate(p, g.middleRows(r, p.rows()));
                             r += p.rows();
                           }
                         });
}

Var cols(Var a, Eigen::Index start, Eigen::Index count) {
  if (start < 0 || count < 0 || start + count > a.cols()) {
    throw_shape_mismatch_(a.rows(), a.cols(), a.rows(), start + count);
  }
  Matrix out = a.value().middleCols(start, count);
  return tape_of(a).record(std::move(out), {a},
                           [a, start, count](Tape& t, const Matrix& g, const Matrix&) {
                             Matrix full = Matrix::Zero(a.rows(), a.cols());
                             full.middleCols(start, count) = g;
                             t.accumulate(a, full);
                           });
}

Var hconcat(std::span<const Var> parts) {
  if (parts.empty()) throw ShapeMismatch("hconcat of nothing");
  Tape& t = tape_of(parts[0]);
  const Eigen::Index nrows = parts[0].rows();
  Eigen::Index total = 0;
  bool req = false;
  for (Var p : parts) {
    if (p.rows() != nrows) throw_shape_mismatch_(p.rows(), p.cols(), nrows, p.cols());
    total += p.cols();
    req = req || t.requires_grad(p);
  }
  Matrix out(nrows, total);
  Eigen::Index c = 0;
  for (Var p : parts) {
    out.middleCols(c, p.cols()) = p.value();
    c += p.cols();
  }
  std::vector<Var> keep(parts.begin(), parts.end());
  return t.record_custom(std::move(out), req,
                         [keep = std::move(keep)](Tape& t, const Matrix& g, const Matrix&) {
                           Eigen::Index c = 0;
                           for (Var p : keep) {
                             t.accumulate(p, g.middleCols(c, p.cols()));
                             c += p.cols();
                           }
                         });
}

Var add_n(std::span<const Var> parts) {
  if (parts.empty()) throw ShapeMismatch("add_n of nothing");
  Tape& t = tape_of(parts[0]);
  Matrix out = parts[0].value();
  bool req = t.requires_grad(parts[0]);
  for (std::size_t i = 1; i < parts.size(); ++i) {
    same_shape(out, parts[i].value());
    out += parts[i].value();
    req = req || t.requires_grad(parts[i]);
  }
  std::vector<Var> keep(parts.begin(), parts.end());
  return t.record_custom(std::move(out), req,
                         [keep = std::move(keep)](Tape& t, const Matrix& g, const Matrix&) {
                           for (Var p : keep) t.accumulate(p, g);
                         });
}

}  // namespace dmp::grad
