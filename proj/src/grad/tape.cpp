#include "dmp/grad/tape.hpp"

#include <sstream>

#include "dmp/error.hpp"

namespace dmp::grad {

void throw_shape_mismatch_(Eigen::Index r0, Eigen::Index c0, Eigen::Index r1, Eigen::Index c1) {
  std::ostringstream os;
  os << r0 << "x" << c0 << " vs " << r1 << "x" << c1;
  throw ShapeMismatch(os.str());
}

const Matrix& Var::value() const { return tape_->value(*this); }

Tape::Node& Tape::node(Var v) {
  if (v.tape_ != this || v.id_ < 0 || static_cast<std::size_t>(v.id_) >= nodes_.size()) {
    throw ShapeMismatch("variable does not belong to this tape");
  }
  return nodes_[static_cast<std::size_t>(v.id_)];
}

const Tape::Node& Tape::node(Var v) const { return const_cast<Tape*>(this)->node(v); }

Var Tape::push(Node n) {
  if (consumed_) throw GraphConsumed("cannot record on a consumed tape");
  nodes_.push_back(std::move(n));
  return Var(this, static_cast<int>(nodes_.size() - 1));
}

Var Tape::constant(Matrix value) {
  Node n;
  n.value = std::move(value);
  return push(std::move(n));
}

Var Tape::leaf(Matrix value) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = true;
  return push(std::move(n));
}

Var Tape::param(ParamBlock& p) {
  Node n;
  n.external = &p.values;
  n.requires_grad = true;
  n.param = &p;
  return push(std::move(n));
}

Var Tape::frozen(const ParamBlock& p) {
  Node n;
  n.external = &p.values;
  return push(std::move(n));
}

Var Tape::record(Matrix value, std::initializer_list<Var> inputs, BackwardFn fn) {
  bool req = false;
  for (Var v : inputs) req = req || node(v).requires_grad;
  return record_custom(std::move(value), req, std::move(fn));
}

Var Tape::record_custom(Matrix value, bool requires_grad, BackwardFn fn) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = requires_grad;
  if (requires_grad) n.fn = std::move(fn);
  return push(std::move(n));
}

bool Tape::requires_grad(Var v) const { return node(v).requires_grad; }

const Matrix& Tape::value(Var v) const { return node(v).val(); }

const Matrix& Tape::grad(Var v) const {
  static const Matrix empty;
  const Node& n = node(v);
  return n.has_grad ? n.grad : empty;
}

void Tape::backward(Var loss) {
  if (consumed_) throw GraphConsumed("backward already ran on this tape");
  Node& root = node(loss);
  if (root.val().rows() != 1 || root.val().cols() != 1) {
    throw_shape_mismatch_(root.val().rows(), root.val().cols(), 1, 1);
  }
  consumed_ = true;
  if (!root.requires_grad) return;
  root.grad = Matrix::Ones(1, 1);
  root.has_grad = true;
  for (int id = loss.id_; id >= 0; --id) {
    Node& n = nodes_[static_cast<std::size_t>(id)];
    if (!n.has_grad) continue;
    if (n.fn) {
      n.fn(*this, n.grad, n.val());
      n.fn = nullptr;
    }
    if (n.param != nullptr) n.param->grad += n.grad;
  }
}

}  // namespace dmp::grad
