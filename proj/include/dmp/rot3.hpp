#pragma once

#include <Eigen/Dense>

namespace dmp::rot3 {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// 6D inputs whose columns are shorter than this, or closer to parallel than
// 1 - kDegenerateEps in |cos|, are rejected.
inline constexpr double kDegenerateEps = 1e-8;

// Switch-over distance from 0 and pi for the log map branches.
inline constexpr double kLogMapDelta = 1e-6;

// First two columns of an (unnormalized) rotation matrix.
struct RotationSixD {
  Vec3 a0 = Vec3::UnitX();
  Vec3 a1 = Vec3::UnitY();

  static RotationSixD from_array(const double* six);
  void to_array(double* six) const;
};

struct RotMat {
  Mat3 m = Mat3::Identity();
};

// Direction is the rotation axis, norm the angle in radians.
struct AxisAngle {
  Vec3 v = Vec3::Zero();
};

Mat3 skew(const Vec3& v);
Vec3 vee(const Mat3& s);

// Gram-Schmidt on (a0, a1) followed by a cross product. Throws DegenerateSixD.
RotMat sixd_to_rotmat(const RotationSixD& x);
RotationSixD rotmat_to_sixd(const RotMat& r);

// arccos((tr(r) - 1) / 2), evaluated as atan2 of the skew and symmetric parts.
double rotation_angle(const RotMat& r);

RotMat axis_angle_to_rotmat(const AxisAngle& a);
AxisAngle rotmat_to_axis_angle(const RotMat& r);

bool is_rotation(const RotMat& r, double tol = 1e-9);

}  // namespace dmp::rot3
