#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace dmp::camera {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

inline constexpr double kMinDepth = 1e-6;

// Weak-perspective camera [s, t_x, t_y]. t_x and t_y are camera-space meters.
struct WeakCamera {
  double s = 1.0;
  double tx = 0.0;
  double ty = 0.0;
};

// Square image with the principal point at its center.
struct CameraIntrinsics {
  double focal = 5000.0;  // px
  double res = 224.0;     // px

  double center() const { return res / 2.0; }
};

// t_z = 2 f / (res s). Throws NonPositiveScale for s <= 0.
double depth_from_scale(double s, const CameraIntrinsics& intr);
Vec3 recover_translation(const WeakCamera& cam, const CameraIntrinsics& intr);

// Inverse of depth_from_scale.
double scale_for_depth(double tz, const CameraIntrinsics& intr);

// Pinhole projection with identity extrinsic rotation; pixels.
// Throws BehindCamera if any translated depth is <= kMinDepth.
std::vector<Vec2> project(std::span<const Vec3> points, const CameraIntrinsics& intr,
                          const Vec3& trans);
Vec2 project_point(const Vec3& point, const CameraIntrinsics& intr, const Vec3& trans);

// Pixel coordinates mapped to [-1, 1] across the image, and back.
Vec2 normalize_pixel(const Vec2& px, const CameraIntrinsics& intr);
Vec2 denormalize_pixel(const Vec2& n, const CameraIntrinsics& intr);

}  // namespace dmp::camera
