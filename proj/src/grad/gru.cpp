#include "dmp/grad/gru.hpp"

#include <cmath>

#include "dmp/error.hpp"
#include "dmp/grad/ops.hpp"

namespace dmp::grad {

GruCell GruCell::create(ParamStore& store, const std::string& prefix, Eigen::Index input_dim,
                        Eigen::Index hidden_dim) {
  GruCell c;
  c.input_dim = input_dim;
  c.hidden_dim = hidden_dim;
  c.w_z = &store.add(prefix + ".W_z", hidden_dim, input_dim);
  c.w_r = &store.add(prefix + ".W_r", hidden_dim, input_dim);
  c.w_n = &store.add(prefix + ".W_n", hidden_dim, input_dim);
  c.u_z = &store.add(prefix + ".U_z", hidden_dim, hidden_dim);
  c.u_r = &store.add(prefix + ".U_r", hidden_dim, hidden_dim);
  c.u_n = &store.add(prefix + ".U_n", hidden_dim, hidden_dim);
  c.b_z = &store.add(prefix + ".b_z", hidden_dim, 1);
  c.b_r = &store.add(prefix + ".b_r", hidden_dim, 1);
  c.b_n = &store.add(prefix + ".b_n", hidden_dim, 1);
  return c;
}

void GruCell::init(std::mt19937_64& rng) {
  for (ParamBlock* w : {w_z, w_r, w_n, u_z, u_r, u_n}) init_uniform_fan_in(*w, rng);
  for (ParamBlock* b : {b_z, b_r, b_n}) b->values.setZero();
}

GruVars bind(Tape& tape, const GruCell& c) {
  return {tape.param(*c.w_z), tape.param(*c.w_r), tape.param(*c.w_n),
          tape.param(*c.u_z), tape.param(*c.u_r), tape.param(*c.u_n),
          tape.param(*c.b_z), tape.param(*c.b_r), tape.param(*c.b_n)};
}

Var gru_step(const GruVars& c, Var x, Var h_prev) {
  if (x.cols() != h_prev.cols()) throw_shape_mismatch_(x.rows(), x.cols(), h_prev.rows(), h_prev.cols());
  Var z = sigmoid(add_bias(add(matmul(c.w_z, x), matmul(c.u_z, h_prev)), c.b_z));
  Var r = sigmoid(add_bias(add(matmul(c.w_r, x), matmul(c.u_r, h_prev)), c.b_r));
  Var n = tanh(add_bias(add(matmul(c.w_n, x), hadamard(r, matmul(c.u_n, h_prev))), c.b_n));
  Var keep = add_scalar(scale(z, -1.0), 1.0);
  return add(hadamard(keep, n), hadamard(z, h_prev));
}

Matrix gru_sequence_forward(const GruCell& c, const Matrix& x, SeqLayout layout, GruTrace* trace) {
  if (x.rows() != c.input_dim || x.cols() != layout.cols()) {
    throw_shape_mismatch_(x.rows(), x.cols(), c.input_dim, layout.cols());
  }
  const Eigen::Index hid = c.hidden_dim;
  const Eigen::Index nb = layout.batch;
  const Eigen::Index cols = layout.cols();

  Matrix az = (c.w_z->values * x).colwise() + c.b_z->values.col(0);
  Matrix ar = (c.w_r->values * x).colwise() + c.b_r->values.col(0);
  Matrix an = (c.w_n->values * x).colwise() + c.b_n->values.col(0);

  Matrix h(hid, cols), hp(hid, cols), z(hid, cols), r(hid, cols), n(hid, cols), un(hid, cols);
  hp.leftCols(nb).setZero();
  for (Eigen::Index t = 0; t < layout.frames; ++t) {
    const Eigen::Index c0 = t * nb;
    if (t > 0) hp.middleCols(c0, nb) = h.middleCols(c0 - nb, nb);
    const auto hprev = hp.middleCols(c0, nb);
    z.middleCols(c0, nb) =
        (az.middleCols(c0, nb) + c.u_z->values * hprev).unaryExpr([](double v) { return sigmoid(v); });
    r.middleCols(c0, nb) =
        (ar.middleCols(c0, nb) + c.u_r->values * hprev).unaryExpr([](double v) { return sigmoid(v); });
    un.middleCols(c0, nb) = c.u_n->values * hprev;
    n.middleCols(c0, nb) =
        (an.middleCols(c0, nb).array() +
         r.middleCols(c0, nb).array() * un.middleCols(c0, nb).array())
            .tanh()
            .matrix();
    h.middleCols(c0, nb) =
        ((1.0 - z.middleCols(c0, nb).array()) * n.middleCols(c0, nb).array() +
         z.middleCols(c0, nb).array() * hprev.array())
            .matrix();
  }
  if (trace != nullptr) {
    trace->x = x;
    trace->hp = std::move(hp);
    trace->z = std::move(z);
    trace->r = std::move(r);
    trace->n = std::move(n);
    trace->un = std::move(un);
  }
  return h;
}

Matrix gru_sequence_backward(const GruCell& c, const GruTrace& tr, const Matrix& grad_h,
                             SeqLayout layout) {
  const Eigen::Index hid = c.hidden_dim;
  const Eigen::Index nb = layout.batch;
  const Eigen::Index cols = layout.cols();
  if (grad_h.rows() != hid || grad_h.cols() != cols) {
    throw_shape_mismatch_(grad_h.rows(), grad_h.cols(), hid, cols);
  }

  Matrix gaz(hid, cols), gar(hid, cols), gan(hid, cols), gun(hid, cols);
  Matrix carry = Matrix::Zero(hid, nb);
  for (Eigen::Index t = layout.frames - 1; t >= 0; --t) {
    const Eigen::Index c0 = t * nb;
    const auto z = tr.z.middleCols(c0, nb).array();
    const auto r = tr.r.middleCols(c0, nb).array();
    const auto n = tr.n.middleCols(c0, nb).array();
    const auto un = tr.un.middleCols(c0, nb).array();
    const auto hp = tr.hp.middleCols(c0, nb).array();

    const Eigen::ArrayXXd dh = grad_h.middleCols(c0, nb).array() + carry.array();
    const Eigen::ArrayXXd dan = dh * (1.0 - z) * (1.0 - n.square());
    const Eigen::ArrayXXd daz = dh * (hp - n) * z * (1.0 - z);
    const Eigen::ArrayXXd dun = dan * r;
    const Eigen::ArrayXXd dar = dan * un * r * (1.0 - r);

    gaz.middleCols(c0, nb) = daz.matrix();
    gar.middleCols(c0, nb) = dar.matrix();
    gan.middleCols(c0, nb) = dan.matrix();
    gun.middleCols(c0, nb) = dun.matrix();

    carry = (dh * z).matrix();
    carry.noalias() += c.u_z->values.transpose() * daz.matrix();
    carry.noalias() += c.u_r->values.transpose() * dar.matrix();
    carry.noalias() += c.u_n->values.transpose() * dun.matrix();
  }

  c.u_z->grad.noalias() += gaz * tr.hp.transpose();
  c.u_r->grad.noalias() += gar * tr.hp.transpose();
  c.u_n->grad.noalias() += gun * tr.hp.transpose();
  c.w_z->grad.noalias() += gaz * tr.x.transpose();
  c.w_r->grad.noalias() += gar * tr.x.transpose();
  c.w_n->grad.noalias() += gan * tr.x.transpose();
  c.b_z->grad += gaz.rowwise().sum();
  c.b_r->grad += gar.rowwise().sum();
  c.b_n->grad += gan.rowwise().sum();

  Matrix gx = c.w_z->values.transpose() * gaz;
  gx.noalias() += c.w_r->values.transpose() * gar;
  gx.noalias() += c.w_n->values.transpose() * gan;
  return gx;
}

}  // namespace dmp::grad
