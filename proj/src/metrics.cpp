#include "dmp/metrics.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/SVD>

#include "dmp/error.hpp"

namespace dmp::metrics {
namespace {

void require_same_shape(const JointTrajectory& a, const JointTrajectory& b) {
  if (a.frames() != b.frames() || a.joints() != b.joints()) {
    std::ostringstream os;
    os << "trajectories " << a.frames() << "x" << a.joints() << " vs " << b.frames() << "x"
       << b.joints();
    throw ShapeMismatch(os.str());
  }
}

void require_frames(const JointTrajectory& a, std::ptrdiff_t n) {
  if (a.frames() < n) {
    std::ostringstream os;
    os << "need at least " << n << " frames, got " << a.frames();
    throw TooShort(os.str());
  }
}

// Per-frame partial sums are reduced in frame order so the result does not
// depend on the thread count.
double ordered_sum(const std::vector<double>& partial) {
  double sum = 0.0;
  for (double v : partial) sum += v;
  return sum;
}

}  // namespace

JointTrajectory::JointTrajectory(std::ptrdiff_t frames, std::ptrdiff_t joints, double frame_rate)
    : frames_(frames),
      joints_(joints),
      frame_rate_(frame_rate),
      data_(static_cast<std::size_t>(3 * frames * joints), 0.0) {}

double mpjpe(const JointTrajectory& pred, const JointTrajectory& gt) {
  require_same_shape(pred, gt);
  require_frames(pred, 1);
  std::vector<double> partial(static_cast<std::size_t>(pred.frames()), 0.0);
  for (std::ptrdiff_t t = 0; t < pred.frames(); ++t) {
    double s = 0.0;
    for (std::ptrdiff_t j = 0; j < pred.joints(); ++j) s += (pred.at(t, j) - gt.at(t, j)).norm();
    partial[static_cast<std::size_t>(t)] = s;
  }
  return ordered_sum(partial) / static_cast<double>(pred.frames() * pred.joints());
}

Similarity umeyama(const Eigen::Matrix3Xd& src, const Eigen::Matrix3Xd& dst) {
  const auto n = static_cast<double>(src.cols());
  const Eigen::Vector3d mu_src = src.rowwise().mean();
  const Eigen::Vector3d mu_dst = dst.rowwise().mean();
  const Eigen::Matrix3Xd x = src.colwise() - mu_src;
  const Eigen::Matrix3Xd y = dst.colwise() - mu_dst;

  // Rank check on the source: collinear points leave the rotation about the
  // line undetermined.
  Eigen::JacobiSVD<Eigen::Matrix3d> src_svd(x * x.transpose() / n);
  const Eigen::Vector3d sv = src_svd.singularValues();
  if (!(sv(1) > 1e-12 * std::max(sv(0), 1e-300))) {
    throw DegenerateFrame("source points are rank deficient");
  }

  const Eigen::Matrix3d cov = y * x.transpose() / n;
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Vector3d d = Eigen::Vector3d::Ones();
  if (svd.matrixU().determinant() * svd.matrixV().determinant() < 0.0) d(2) = -1.0;

  Similarity s;
  s.rotation = svd.matrixU() * d.asDiagonal() * svd.matrixV().transpose();
  const double var_src = x.squaredNorm() / n;
  s.scale = svd.singularValues().dot(d) / var_src;
  s.translation = mu_dst - s.scale * s.rotation * mu_src;
  return s;
}

JointTrajectory procrustes_align(const JointTrajectory& pred, const JointTrajectory& gt,
                                 ExecPolicy policy) {
  require_same_shape(pred, gt);
  JointTrajectory out(pred.frames(), pred.joints(), pred.frame_rate());
  const std::ptrdiff_t frames = pred.frames();
  // Exceptions cannot cross the OpenMP region; the first failing frame is
  // recorded and rethrown afterwards.
  std::vector<int> failed(static_cast<std::size_t>(frames), 0);
#pragma omp parallel for schedule(static) if (policy == ExecPolicy::parallel)
  for (std::ptrdiff_t t = 0; t < frames; ++t) {
    try {
      const Eigen::Matrix3Xd src = pred.frame(t);
      const Similarity s = metrics::umeyama(src, gt.frame(t));
      out.frame(t) = (s.scale * s.rotation * src).colwise() + s.translation;
    } catch (const DegenerateFrame&) {
      failed[static_cast<std::size_t>(t)] = 1;
    }
  }
  for (std::ptrdiff_t t = 0; t < frames; ++t) {
    if (failed[static_cast<std::size_t>(t)]) {
      throw DegenerateFrame("frame " + std::to_string(t) + " is rank deficient");
    }
  }
  return out;
}

double pa_mpjpe(const JointTrajectory& pred, const JointTrajectory& gt, ExecPolicy policy) {
  return mpjpe(procrustes_align(pred, gt, policy), gt);
}

double acceleration(const JointTrajectory& traj) {
  require_frames(traj, 3);
  std::vector<double> partial(static_cast<std::size_t>(traj.frames()), 0.0);
  for (std::ptrdiff_t t = 1; t + 1 < traj.frames(); ++t) {
    double s = 0.0;
    for (std::ptrdiff_t j = 0; j < traj.joints(); ++j) {
      s += (traj.at(t + 1, j) - 2.0 * traj.at(t, j) + traj.at(t - 1, j)).norm();
    }
    partial[static_cast<std::size_t>(t)] = s;
  }
  return ordered_sum(partial) / static_cast<double>((traj.frames() - 2) * traj.joints());
}

double acceleration_error(const JointTrajectory& pred, const JointTrajectory& gt) {
  require_same_shape(pred, gt);
  require_frames(pred, 3);
  std::vector<double> partial(static_cast<std::size_t>(pred.frames()), 0.0);
  for (std::ptrdiff_t t = 1; t + 1 < pred.frames(); ++t) {
    double s = 0.0;
    for (std::ptrdiff_t j = 0; j < pred.joints(); ++j) {
      const Eigen::Vector3d ap = pred.at(t + 1, j) - 2.0 * pred.at(t, j) + pred.at(t - 1, j);
      const Eigen::Vector3d ag = gt.at(t + 1, j) - 2.0 * gt.at(t, j) + gt.at(t - 1, j);
      s += (ap - ag).norm();
    }
    partial[static_cast<std::size_t>(t)] = s;
  }
  return ordered_sum(partial) / static_cast<double>((pred.frames() - 2) * pred.joints());
}

MetricReport evaluate_all(const JointTrajectory& pred, const JointTrajectory& gt,
                          ExecPolicy policy) {
  MetricReport r;
  r.mpjpe = mpjpe(pred, gt);
  r.pa_mpjpe = pa_mpjpe(pred, gt, policy);
  r.acc = acceleration(pred);
  r.acc_err = acceleration_error(pred, gt);
  return r;
}

}  // namespace dmp::metrics
