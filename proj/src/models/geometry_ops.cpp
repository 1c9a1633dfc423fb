#include "dmp/models/geometry_ops.hpp"

#include <array>
#include <sstream>

#include "dmp/error.hpp"

namespace dmp::models {
namespace {

using rot3::Mat3;
using rot3::Vec3;
using skeleton::kNumJoints;
using skeleton::kNumShape;

using ConstMap3 = Eigen::Map<const Mat3>;

}  // namespace

Var sixd_to_rotmat(Var pose6d) {
  const Matrix& x = pose6d.value();
  if (x.rows() % 6 != 0) grad::throw_shape_mismatch_(x.rows(), x.cols(), 6, x.cols());
  const Eigen::Index nj = x.rows() / 6;
  Matrix out(9 * nj, x.cols());
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    for (Eigen::Index j = 0; j < nj; ++j) {
      try {
        const auto r = rot3::sixd_to_rotmat(rot3::RotationSixD::from_array(x.col(c).data() + 6 * j));
        Eigen::Map<Mat3>(out.col(c).data() + 9 * j) = r.m;
      } catch (const DegenerateSixD& e) {
        std::ostringstream os;
        os << "joint " << j << ", column " << c << ": " << e.what();
        throw DegenerateSixD(os.str());
      }
    }
  }
  return pose6d.tape()->record(std::move(out), {pose6d}, [pose6d, nj](grad::Tape& t, const Matrix& g,
                                                                      const Matrix& y) {
    const Matrix& x = pose6d.value();
    Matrix gx(x.rows(), x.cols());
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      for (Eigen::Index j = 0; j < nj; ++j) {
        const double* a = x.col(c).data() + 6 * j;
        const Vec3 a0(a[0], a[1], a[2]);
        const Vec3 a1(a[3], a[4], a[5]);
        const ConstMap3 r(y.col(c).data() + 9 * j);
        const ConstMap3 gr(g.col(c).data() + 9 * j);
        const Vec3 b0 = r.col(0);
        const Vec3 b1 = r.col(1);
        const double n0 = a0.norm();
        const double d = b0.dot(a1);
        const double nu = (a1 - d * b0).norm();

        Vec3 gb0 = gr.col(0) + b1.cross(gr.col(2));
        const Vec3 gb1 = gr.col(1) + Vec3(gr.col(2)).cross(b0);
        const Vec3 gu = (gb1 - b1 * b1.dot(gb1)) / nu;
        const Vec3 ga1 = gu - b0 * b0.dot(gu);
        gb0 += -d * gu - b0.dot(gu) * a1;
        const Vec3 ga0 = (gb0 - b0 * b0.dot(gb0)) / n0;

        double* out = gx.col(c).data() + 6 * j;
        for (int k = 0; k < 3; ++k) {
          out[k] = ga0[k];
          out[3 + k] = ga1[k];
        }
      }
    }
    t.accumulate(pose6d, gx);
  });
}

Var rotmat_to_sixd(Var rotmats) {
  const Eigen::Index nj = rotmats.rows() / 9;
  if (rotmats.rows() != 9 * nj) grad::throw_shape_mismatch_(rotmats.rows(), rotmats.cols(), 9, rotmats.cols());
  Matrix out(6 * nj, rotmats.cols());
  for (Eigen::Index j = 0; j < nj; ++j) out.middleRows(6 * j, 6) = rotmats.value().middleRows(9 * j, 6);
  return rotmats.tape()->record(std::move(out), {rotmats}, [rotmats, nj](grad::Tape& t, const Matrix& g,
                                                                         const Matrix&) {
    Matrix gr = Matrix::Zero(rotmats.rows(), rotmats.cols());
    for (Eigen::Index j = 0; j < nj; ++j) gr.middleRows(9 * j, 6) = g.middleRows(6 * j, 6);
    t.accumulate(rotmats, gr);
  });
}

Var weak_camera_translation(Var cam, const camera::CameraIntrinsics& intr) {
  if (cam.rows() != 3) grad::throw_shape_mismatch_(cam.rows(), cam.cols(), 3, cam.cols());
  Matrix out(3, cam.cols());
  for (Eigen::Index c = 0; c < cam.cols(); ++c) {
    const double s = cam.value()(0, c);
    out(0, c) = cam.value()(1, c);
    out(1, c) = cam.value()(2, c);
    out(2, c) = camera::depth_from_scale(s, intr);
  }
  return cam.tape()->record(std::move(out), {cam}, [cam, intr](grad::Tape& t, const Matrix& g, const Matrix&) {
    Matrix gc(3, cam.cols());
    for (Eigen::Index c = 0; c < cam.cols(); ++c) {
      const double s = cam.value()(0, c);
      gc(0, c) = -g(2, c) * 2.0 * intr.focal / (intr.res * s * s);
      gc(1, c) = g(0, c);
      gc(2, c) = g(1, c);
    }
    t.accumulate(cam, gc);
  });
}

Var forward_kinematics(Var rotmats, Var beta, SeqLayout layout, const skeleton::KinematicTree& tree) {
  if (rotmats.rows() != 9 * kNumJoints || rotmats.cols() != layout.cols()) {
    grad::throw_shape_mismatch_(rotmats.rows(), rotmats.cols(), 9 * kNumJoints, layout.cols());
  }
  if (beta.rows() != kNumShape || beta.cols() != layout.batch) {
    grad::throw_shape_mismatch_(beta.rows(), beta.cols(), kNumShape, layout.batch);
  }
  const Eigen::Index n = layout.cols();

  // Bones depend only on the clip's shape.
  auto bones_for = [&tree](const Matrix& beta_value, Eigen::Index b) {
    std::array<Vec3, kNumJoints> d;
    const skeleton::ShapeVec bvec = beta_value.col(b);
    for (int j = 0; j < kNumJoints; ++j) d[j] = tree.rest_offset[j] + tree.shape_basis[j] * bvec;
    return d;
  };

  Matrix out(3 * kNumJoints, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    const auto d = bones_for(beta.value(), c % layout.batch);
    std::array<Mat3, kNumJoints> glob;
    const double* rcol = rotmats.value().col(c).data();
    glob[0] = ConstMap3(rcol);
    out.col(c).segment<3>(0).setZero();
    for (int j = 1; j < kNumJoints; ++j) {
      const int p = tree.parent[j];
      out.col(c).segment<3>(3 * j) = out.col(c).segment<3>(3 * p) + glob[p] * d[j];
      glob[j] = glob[p] * ConstMap3(rcol + 9 * j);
    }
  }

  return rotmats.tape()->record(
      std::move(out), {rotmats, beta},
      [rotmats, beta, layout, &tree, bones_for](grad::Tape& t, const Matrix& g, const Matrix&) {
        const Eigen::Index n = layout.cols();
        Matrix grot(9 * kNumJoints, n);
        Matrix gbeta = Matrix::Zero(kNumShape, layout.batch);
        for (Eigen::Index c = 0; c < n; ++c) {
          const Eigen::Index b = c % layout.batch;
          const auto d = bones_for(beta.value(), b);
          const double* rcol = rotmats.value().col(c).data();
          std::array<Mat3, kNumJoints> glob;
          glob[0] = ConstMap3(rcol);
          for (int j = 1; j < kNumJoints; ++j) glob[j] = glob[tree.parent[j]] * ConstMap3(rcol + 9 * j);

          std::array<Vec3, kNumJoints> gp;
          std::array<Mat3, kNumJoints> gg;
          for (int j = 0; j < kNumJoints; ++j) {
            gp[j] = g.col(c).segment<3>(3 * j);
            gg[j].setZero();
          }
          // Children carry larger indices, so a descending sweep sees every
          // joint's gradient complete before propagating it to the parent.
          for (int j = kNumJoints - 1; j >= 1; --j) {
            const int p = tree.parent[j];
            gp[p] += gp[j];
            gg[p].noalias() += gp[j] * d[j].transpose();
            const Vec3 gd = glob[p].transpose() * gp[j];
            gbeta.col(b).noalias() += tree.shape_basis[j].transpose() * gd;
            const ConstMap3 rj(rcol + 9 * j);
            gg[p].noalias() += gg[j] * rj.transpose();
            Eigen::Map<Mat3>(grot.col(c).data() + 9 * j) = glob[p].transpose() * gg[j];
          }
          Eigen::Map<Mat3>(grot.col(c).data()) = gg[0];
        }
        t.accumulate(rotmats, grot);
        t.accumulate(beta, gbeta);
      });
}

Var project_normalized(Var points, Var trans, const camera::CameraIntrinsics& intr) {
  const Eigen::Index nj = points.rows() / 3;
  if (points.rows() != 3 * nj || trans.rows() != 3 || trans.cols() != points.cols()) {
    grad::throw_shape_mismatch_(points.rows(), points.cols(), trans.rows(), trans.cols());
  }
  const double k = intr.focal / intr.center();
  Matrix out(2 * nj, points.cols());
  for (Eigen::Index c = 0; c < points.cols(); ++c) {
    for (Eigen::Index j = 0; j < nj; ++j) {
      const Vec3 q = points.value().col(c).segment<3>(3 * j) + trans.value().col(c);
      if (!(q.z() > camera::kMinDepth)) {
        std::ostringstream os;
        os << "joint " << j << ", column " << c << ", depth " << q.z();
        throw BehindCamera(os.str());
      }
      out(2 * j, c) = k * q.x() / q.z();
      out(2 * j + 1, c) = k * q.y() / q.z();
    }
  }
  return points.tape()->record(std::move(out), {points, trans}, [points, trans, k, nj](grad::Tape& t,
                                                                                       const Matrix& g,
                                                                                       const Matrix&) {
    Matrix gp(points.rows(), points.cols());
    Matrix gt = Matrix::Zero(3, points.cols());
    for (Eigen::Index c = 0; c < points.cols(); ++c) {
      for (Eigen::Index j = 0; j < nj; ++j) {
        const Vec3 q = points.value().col(c).segment<3>(3 * j) + trans.value().col(c);
        const double iz = 1.0 / q.z();
        const double gu = g(2 * j, c);
        const double gv = g(2 * j + 1, c);
        const Vec3 gq(k * iz * gu, k * iz * gv, -k * iz * iz * (q.x() * gu + q.y() * gv));
        gp.col(c).segment<3>(3 * j) = gq;
        gt.col(c) += gq;
      }
    }
    t.accumulate(points, gp);
    t.accumulate(trans, gt);
  });
}

}  // namespace dmp::models
