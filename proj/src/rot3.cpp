#include "dmp/rot3.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "dmp/error.hpp"

namespace dmp::rot3 {

RotationSixD RotationSixD::from_array(const double* six) {
  return {Vec3(six[0], six[1], six[2]), Vec3(six[3], six[4], six[5])};
}

void RotationSixD::to_array(double* six) const {
  for (int k = 0; k < 3; ++k) {
    six[k] = a0[k];
    six[3 + k] = a1[k];
  }
}

Mat3 skew(const Vec3& v) {
  Mat3 s;
  s << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return s;
}

Vec3 vee(const Mat3& s) { return {s(2, 1), s(0, 2), s(1, 0)}; }

RotMat sixd_to_rotmat(const RotationSixD& x) {
  const double n0 = x.a0.norm();
  const double n1 = x.a1.norm();
  if (!(n0 >= kDegenerateEps) || !(n1 >= kDegenerateEps)) {
    std::ostringstream os;
    os << "column norms " << n0 << ", " << n1;
    throw DegenerateSixD(os.str());
  }
  const double cosang = x.a0.dot(x.a1) / (n0 * n1);
  if (std::abs(cosang) > 1.0 - kDegenerateEps) {
    throw DegenerateSixD("columns are parallel");
  }
  RotMat r;
  const Vec3 b0 = x.a0 / n0;
  const Vec3 u = x.a1 - b0.dot(x.a1) * b0;
  const Vec3 b1 = u / u.norm();
  r.m.col(0) = b0;
  r.m.col(1) = b1;
  r.m.col(2) = b0.cross(b1);
  return r;
}

RotationSixD rotmat_to_sixd(const RotMat& r) {
  return {r.m.col(0), r.m.col(1)};
}

// arccos((tr - 1) / 2) loses half the significant digits next to 0 and pi
// (an O(eps) trace error becomes O(sqrt(eps)) in the angle). The same angle
// from atan2(|vee(skew)|, (tr - 1) / 2) is accurate to O(eps) everywhere.
double rotation_angle(const RotMat& r) {
  const double c = std::clamp((r.m.trace() - 1.0) / 2.0, -1.0, 1.0);
  const double s = vee(0.5 * (r.m - r.m.transpose())).norm();
  return std::atan2(s, c);
}

RotMat axis_angle_to_rotmat(const AxisAngle& a) {
  const double theta = a.v.norm();
  RotMat r;
  if (theta < 1e-8) {
    r.m = Mat3::Identity() + skew(a.v);
    return r;
  }
  const Mat3 k = skew(a.v / theta);
  r.m = Mat3::Identity() + std::sin(theta) * k + (1.0 - std::cos(theta)) * k * k;
  return r;
}

AxisAngle rotmat_to_axis_angle(const RotMat& r) {
  const double theta = rotation_angle(r);
  const Vec3 skew_part = vee(0.5 * (r.m - r.m.transpose()));
  if (theta < kLogMapDelta) {
    // sin(theta) ~ theta: the skew part already is the rotation vector.
    return {skew_part};
  }
  if (theta < std::numbers::pi - kLogMapDelta) {
    // |skew_part| = sin(theta); normalizing keeps the magnitude exactly theta.
    return {theta * skew_part.normalized()};
  }
  // Near pi the skew part vanishes. The symmetric part is
  // cos(theta) I + (1 - cos(theta)) k k^T, so k k^T is recovered exactly and
  // its column with the largest diagonal gives the best-conditioned axis.
  const double c = std::cos(theta);
  const Mat3 sym = 0.5 * (r.m + r.m.transpose());
  const Mat3 kkt = (sym - c * Mat3::Identity()) / (1.0 - c);
  Eigen::Index col = 0;
  kkt.diagonal().maxCoeff(&col);
  Vec3 k = kkt.col(col).normalized();
  if (k.dot(skew_part) < 0.0) k = -k;
  return {theta * k};
}

bool is_rotation(const RotMat& r, double tol) {
  const double ortho = (r.m.transpose() * r.m - Mat3::Identity()).norm();
  const double det = r.m.determinant();
  return ortho < tol && std::abs(det - 1.0) <= tol;
}

}  // namespace dmp::rot3
