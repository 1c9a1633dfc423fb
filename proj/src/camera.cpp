#include "dmp/camera.hpp"

#include <sstream>

#include "dmp/error.hpp"

namespace dmp::camera {

double depth_from_scale(double s, const CameraIntrinsics& intr) {
  if (!(s > 0.0)) {
    std::ostringstream os;
    os << "weak camera scale " << s;
    throw NonPositiveScale(os.str());
  }
  return 2.0 * intr.focal / (intr.res * s);
}

Vec3 recover_translation(const WeakCamera& cam, const CameraIntrinsics& intr) {
  return {cam.tx, cam.ty, depth_from_scale(cam.s, intr)};
}

double scale_for_depth(double tz, const CameraIntrinsics& intr) {
  return 2.0 * intr.focal / (intr.res * tz);
}

Vec2 project_point(const Vec3& point, const CameraIntrinsics& intr, const Vec3& trans) {
  const Vec3 p = point + trans;
  if (!(p.z() > kMinDepth)) {
    std::ostringstream os;
    os << "translated depth " << p.z();
    throw BehindCamera(os.str());
  }
  return {intr.focal * p.x() / p.z() + intr.center(), intr.focal * p.y() / p.z() + intr.center()};
}

std::vector<Vec2> project(std::span<const Vec3> points, const CameraIntrinsics& intr,
                          const Vec3& trans) {
  std::vector<Vec2> out;
  out.reserve(points.size());
  for (const Vec3& p : points) out.push_back(project_point(p, intr, trans));
  return out;
}

Vec2 normalize_pixel(const Vec2& px, const CameraIntrinsics& intr) {
  return (px.array() - intr.center()) / intr.center();
}

Vec2 denormalize_pixel(const Vec2& n, const CameraIntrinsics& intr) {
  return n.array() * intr.center() + intr.center();
}

}  // namespace dmp::camera
