#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "dmp/exec.hpp"

namespace dmp::metrics {

// T x J x 3 positions, stored frame-major. Millimeters.
class JointTrajectory {
 public:
  JointTrajectory() = default;
  JointTrajectory(std::ptrdiff_t frames, std::ptrdiff_t joints, double frame_rate = 25.0);

  std::ptrdiff_t frames() const { return frames_; }
  std::ptrdiff_t joints() const { return joints_; }
  double frame_rate() const { return frame_rate_; }

  Eigen::Map<Eigen::Vector3d> at(std::ptrdiff_t t, std::ptrdiff_t j) {
    return Eigen::Map<Eigen::Vector3d>(data_.data() + 3 * (t * joints_ + j));
  }
  Eigen::Map<const Eigen::Vector3d> at(std::ptrdiff_t t, std::ptrdiff_t j) const {
    return Eigen::Map<const Eigen::Vector3d>(data_.data() + 3 * (t * joints_ + j));
  }
  // 3 x J view of one frame.
  Eigen::Map<Eigen::Matrix3Xd> frame(std::ptrdiff_t t) {
    return Eigen::Map<Eigen::Matrix3Xd>(data_.data() + 3 * t * joints_, 3, joints_);
  }
  Eigen::Map<const Eigen::Matrix3Xd> frame(std::ptrdiff_t t) const {
    return Eigen::Map<const Eigen::Matrix3Xd>(data_.data() + 3 * t * joints_, 3, joints_);
  }

  const std::vector<double>& data() const { return data_; }

 private:
  std::ptrdiff_t frames_ = 0;
  std::ptrdiff_t joints_ = 0;
  double frame_rate_ = 25.0;
  std::vector<double> data_;
};

struct MetricReport {
  double mpjpe = 0.0;     // mm
  double pa_mpjpe = 0.0;  // mm
  double acc = 0.0;       // mm / frame^2
  double acc_err = 0.0;   // mm / frame^2
};

struct Similarity {
  double scale = 1.0;
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
};

double mpjpe(const JointTrajectory& pred, const JointTrajectory& gt);

// Least-squares similarity mapping src onto dst (3 x J each). Throws
// DegenerateFrame when src is collinear.
Similarity umeyama(const Eigen::Matrix3Xd& src, const Eigen::Matrix3Xd& dst);

// Per-frame Procrustes alignment of pred onto gt.
JointTrajectory procrustes_align(const JointTrajectory& pred, const JointTrajectory& gt,
                                 ExecPolicy policy = ExecPolicy::parallel);

double pa_mpjpe(const JointTrajectory& pred, const JointTrajectory& gt,
                ExecPolicy policy = ExecPolicy::parallel);

// Mean norm of the second temporal difference. Throws TooShort for T < 3.
double acceleration(const JointTrajectory& traj);

// Mean norm of the difference of second differences.
double acceleration_error(const JointTrajectory& pred, const JointTrajectory& gt);

MetricReport evaluate_all(const JointTrajectory& pred, const JointTrajectory& gt,
                          ExecPolicy policy = ExecPolicy::parallel);

}  // namespace dmp::metrics
