#include "dmp/grad/seq_ops.hpp"

#include <cmath>

namespace dmp::grad {
namespace {

void require_cols(const Matrix& m, SeqLayout layout) {
  if (m.cols() != layout.cols()) throw_shape_mismatch_(m.rows(), m.cols(), m.rows(), layout.cols());
}

}  // namespace

Var segment_mean(Var x, SeqLayout layout) {
  require_cols(x.value(), layout);
  const auto nb = layout.batch;
  const double inv_t = 1.0 / static_cast<double>(layout.frames);
  Matrix out = Matrix::Zero(x.rows(), nb);
  for (Eigen::Index t = 0; t < layout.frames; ++t) out += x.value().middleCols(t * nb, nb);
  out *= inv_t;
  return x.tape()->record(std::move(out), {x}, [x, layout, inv_t](Tape& t, const Matrix& g, const Matrix&) {
    Matrix gx(x.rows(), layout.cols());
    for (Eigen::Index f = 0; f < layout.frames; ++f) gx.middleCols(f * layout.batch, layout.batch) = inv_t * g;
    t.accumulate(x, gx);
  });
}

Var segment_softmax(Var scores, SeqLayout layout) {
  require_cols(scores.value(), layout);
  if (scores.rows() != 1) throw_shape_mismatch_(scores.rows(), scores.cols(), 1, scores.cols());
  const Matrix& s = scores.value();
  Matrix out(1, layout.cols());
  for (Eigen::Index b = 0; b < layout.batch; ++b) {
    double mx = -INFINITY;
    for (Eigen::Index t = 0; t < layout.frames; ++t) mx = std::max(mx, s(0, layout.col(t, b)));
    double z = 0.0;
    for (Eigen::Index t = 0; t < layout.frames; ++t) {
      const double e = std::exp(s(0, layout.col(t, b)) - mx);
      out(0, layout.col(t, b)) = e;
      z += e;
    }
    for (Eigen::Index t = 0; t < layout.frames; ++t) out(0, layout.col(t, b)) /= z;
  }
  return scores.tape()->record(std::move(out), {scores},
                               [scores, layout](Tape& t, const Matrix& g, const Matrix& y) {
                                 Matrix gs(1, layout.cols());
                                 for (Eigen::Index b = 0; b < layout.batch; ++b) {
                                   double dot = 0.0;
                                   for (Eigen::Index f = 0; f < layout.frames; ++f) {
                                     dot += g(0, layout.col(f, b)) * y(0, layout.col(f, b));
                                   }
                                   for (Eigen::Index f = 0; f < layout.frames; ++f) {
                                     const auto c = layout.col(f, b);
                                     gs(0, c) = y(0, c) * (g(0, c) - dot);
                                   }
                                 }
                                 t.accumulate(scores, gs);
                               });
}

Matrix uniform_attention(SeqLayout layout) {
  return Matrix::Constant(1, layout.cols(), 1.0 / static_cast<double>(layout.frames));
}

Var attention_pool(Var h, Var alpha, SeqLayout layout) {
  require_cols(h.value(), layout);
  require_cols(alpha.value(), layout);
  const auto nb = layout.batch;
  Matrix out = Matrix::Zero(h.rows(), nb);
  for (Eigen::Index f = 0; f < layout.frames; ++f) {
    for (Eigen::Index b = 0; b < nb; ++b) {
      out.col(b) += alpha.value()(0, layout.col(f, b)) * h.value().col(layout.col(f, b));
    }
  }
  return h.tape()->record(std::move(out), {h, alpha}, [h, alpha, layout](Tape& t, const Matrix& g, const Matrix&) {
    if (t.requires_grad(h)) {
      Matrix gh(h.rows(), layout.cols());
      for (Eigen::Index c = 0; c < layout.cols(); ++c) {
        gh.col(c) = alpha.value()(0, c) * g.col(c % layout.batch);
      }
      t.accumulate(h, gh);
    }
    if (t.requires_grad(alpha)) {
      Matrix ga(1, layout.cols());
      for (Eigen::Index c = 0; c < layout.cols(); ++c) {
        ga(0, c) = h.value().col(c).dot(g.col(c % layout.batch));
      }
      t.accumulate(alpha, ga);
    }
  });
}

Var block_frobenius(Var x, Eigen::Index block_rows, SeqLayout layout) {
  require_cols(x.value(), layout);
  if (block_rows <= 0 || x.rows() % block_rows != 0) {
    throw_shape_mismatch_(x.rows(), x.cols(), block_rows, x.cols());
  }
  const Eigen::Index nblocks = x.rows() / block_rows;
  Matrix out = Matrix::Zero(nblocks, layout.batch);
  for (Eigen::Index c = 0; c < layout.cols(); ++c) {
    for (Eigen::Index k = 0; k < nblocks; ++k) {
      out(k, c % layout.batch) += x.value().col(c).segment(k * block_rows, block_rows).squaredNorm();
    }
  }
  out = out.array().sqrt().matrix();
  return x.tape()->record(std::move(out), {x}, [x, block_rows, layout, nblocks](Tape& t, const Matrix& g,
                                                                                 const Matrix& norms) {
    Matrix gx(x.rows(), layout.cols());
    for (Eigen::Index c = 0; c < layout.cols(); ++c) {
      const Eigen::Index b = c % layout.batch;
      for (Eigen::Index k = 0; k < nblocks; ++k) {
        const double nrm = norms(k, b);
        const double w = nrm > 0.0 ? g(k, b) / nrm : 0.0;
        gx.col(c).segment(k * block_rows, block_rows) = w * x.value().col(c).segment(k * block_rows, block_rows);
      }
    }
    t.accumulate(x, gx);
  });
}

Var select_rows(Var x, const std::vector<Eigen::Index>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] < 0 || rows[i] >= x.rows()) throw_shape_mismatch_(x.rows(), x.cols(), rows[i], x.cols());
    out.row(static_cast<Eigen::Index>(i)) = x.value().row(rows[i]);
  }
  return x.tape()->record(std::move(out), {x}, [x, rows](Tape& t, const Matrix& g, const Matrix&) {
    Matrix gx = Matrix::Zero(x.rows(), x.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) gx.row(rows[i]) += g.row(static_cast<Eigen::Index>(i));
    t.accumulate(x, gx);
  });
}

}  // namespace dmp::grad
