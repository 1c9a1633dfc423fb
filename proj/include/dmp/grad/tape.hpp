#pragma once

#include <deque>
#include <functional>
#include <initializer_list>

#include "dmp/grad/param.hpp"

namespace dmp::grad {

class Tape;

[[noreturn]] void throw_shape_mismatch_(Eigen::Index r0, Eigen::Index c0, Eigen::Index r1,
                                        Eigen::Index c1);

// Handle to a value recorded on a Tape.
class Var {
 public:
  Var() = default;

  const Matrix& value() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  int id() const { return id_; }
  Tape* tape() const { return tape_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  friend class Tape;
  Var(Tape* tape, int id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  int id_ = -1;
};

// Single-use reverse-mode recording. Values are computed eagerly as ops are
// recorded; backward() walks the recording once in reverse and accumulates
// into ParamBlock::grad for every bound parameter. Gradients accumulate
// across tapes until the caller zeroes them.
class Tape {
 public:
  // Receives the gradient of the node's output and its forward value.
  using BackwardFn = std::function<void(Tape&, const Matrix& grad_out, const Matrix& out)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Matrix value);
  // Differentiable input; its gradient is readable through grad() afterwards.
  Var leaf(Matrix value);
  // Reads p.values without copying; backward adds into p.grad.
  Var param(ParamBlock& p);
  // Reads p.values, never receives gradient.
  Var frozen(const ParamBlock& p);

  // Records an op. `fn` runs during backward only if some input requires grad.
  Var record(Matrix value, std::initializer_list<Var> inputs, BackwardFn fn);
  // For fused kernels that write parameter gradients themselves.
  Var record_custom(Matrix value, bool requires_grad, BackwardFn fn);

  bool requires_grad(Var v) const;
  const Matrix& value(Var v) const;
  // Zero-sized if no gradient reached v.
  const Matrix& grad(Var v) const;

  template <typename Derived>
  void accumulate(Var v, const Eigen::MatrixBase<Derived>& g);

  // Throws GraphConsumed on a second call and ShapeMismatch for a non-scalar loss.
  void backward(Var loss);

  bool consumed() const { return consumed_; }
  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Matrix value;
    const Matrix* external = nullptr;
    Matrix grad;
    bool has_grad = false;
    bool requires_grad = false;
    ParamBlock* param = nullptr;
    BackwardFn fn;

    const Matrix& val() const { return external ? *external : value; }
  };

  Node& node(Var v);
  const Node& node(Var v) const;
  Var push(Node n);

  std::deque<Node> nodes_;
  bool consumed_ = false;
};

template <typename Derived>
void Tape::accumulate(Var v, const Eigen::MatrixBase<Derived>& g) {
  Node& n = node(v);
  if (!n.requires_grad) return;
  if (g.rows() != n.val().rows() || g.cols() != n.val().cols()) {
    throw_shape_mismatch_(n.val().rows(), n.val().cols(), g.rows(), g.cols());
  }
  if (n.has_grad) {
    n.grad += g;
  } else {
    n.grad = g;
    n.has_grad = true;
  }
}

}  // namespace dmp::grad
