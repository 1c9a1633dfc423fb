#include <gtest/gtest.h>

#include "dmp/camera.hpp"
#include "dmp/error.hpp"
#include "dmp/skeleton.hpp"
#include "test_util.hpp"

using namespace dmp;
using namespace dmp::camera;

TEST(RecoverTranslation, Examples) {
  const CameraIntrinsics intr{5000.0, 224.0};
  EXPECT_NEAR(recover_translation({1.0, 0, 0}, intr).z(), 44.642857142857146, 1e-12);
  EXPECT_NEAR(recover_translation({2.0, 0, 0}, intr).z(), 22.321428571428573, 1e-12);
  const Vec3 unit = recover_translation({2.0 * 5000.0 / 224.0, 0, 0}, intr);
  EXPECT_NEAR(unit.x(), 0.0, 0.0);
  EXPECT_NEAR(unit.y(), 0.0, 0.0);
  EXPECT_NEAR(unit.z(), 1.0, 1e-15);
  const Vec3 t = recover_translation({1.0, 0.25, -0.5}, intr);
  EXPECT_EQ(t.x(), 0.25);
  EXPECT_EQ(t.y(), -0.5);
}

TEST(RecoverTranslation, RejectsNonPositiveScale) {
  EXPECT_THROW(recover_translation({0.0, 0, 0}, {}), NonPositiveScale);
  EXPECT_THROW(recover_translation({-1.0, 0, 0}, {}), NonPositiveScale);
}

TEST(RecoverTranslation, ScaleForDepthInverts) {
  const CameraIntrinsics intr{4000.0, 256.0};
  for (double s : {0.3, 0.85, 1.0, 7.5}) EXPECT_NEAR(scale_for_depth(depth_from_scale(s, intr), intr), s, 1e-14);
}

TEST(Project, Examples) {
  const CameraIntrinsics intr{5000.0, 224.0};
  const Vec2 c = project_point(Vec3::Zero(), intr, Vec3(0, 0, 10));
  EXPECT_EQ(c, Vec2(112, 112));
  const Vec2 u = project_point(Vec3(1, 0, 0), intr, Vec3(0, 0, 5000));
  EXPECT_NEAR(u.x(), 113.0, 1e-12);
  EXPECT_NEAR(u.y(), 112.0, 1e-12);
}

TEST(Project, DoublingDepthHalvesOffset) {
  const CameraIntrinsics intr;
  const Vec3 p(0.3, -0.2, 0.0);
  const Vec2 a = project_point(p, intr, Vec3(0, 0, 10)) - Vec2(112, 112);
  const Vec2 b = project_point(p, intr, Vec3(0, 0, 20)) - Vec2(112, 112);
  EXPECT_LT((a - 2.0 * b).norm(), 1e-12);
}

TEST(Project, BehindCamera) {
  const Vec3 pts[] = {Vec3(0, 0, 1), Vec3(0, 0, -1)};
  EXPECT_THROW(project(pts, {}, Vec3(0, 0, 1)), BehindCamera);
  EXPECT_THROW(project_point(Vec3::Zero(), {}, Vec3(0, 0, 1e-7)), BehindCamera);
  EXPECT_NO_THROW(project(pts, {}, Vec3(0, 0, 1.5)));
}

TEST(Project, BatchMatchesPointwise) {
  std::mt19937_64 rng(59);
  std::vector<Vec3> pts;
  for (int i = 0; i < 24; ++i) pts.push_back(0.5 * test::random_unit(rng));
  const Vec3 trans(0.1, -0.05, 30.0);
  const auto out = project(pts, {}, trans);
  for (std::size_t i = 0; i < pts.size(); ++i) EXPECT_EQ(out[i], project_point(pts[i], {}, trans));
}

// Weak-perspective semantics: with translation from recover_translation,
// scaling s by lambda scales offsets from the principal point by lambda.
TEST(Project, ScaleConsistentWithWeakCamera) {
  const CameraIntrinsics intr;
  const auto pts = skeleton::forward_kinematics(skeleton::default_tree(), {}, {});
  std::vector<Vec3> flat;
  for (const auto& p : pts) flat.push_back(Vec3(p.x(), p.y(), 0.0));
  const Vec2 c(intr.center(), intr.center());
  for (double lambda : {0.5, 1.7, 3.0}) {
    const auto a = project(flat, intr, recover_translation({0.8, 0, 0}, intr));
    const auto b = project(flat, intr, recover_translation({0.8 * lambda, 0, 0}, intr));
    for (std::size_t j = 0; j < flat.size(); ++j) EXPECT_LT((b[j] - c - lambda * (a[j] - c)).norm(), 1e-9);
  }
}

TEST(Project, FiniteDifferenceGradient) {
  const CameraIntrinsics intr;
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (int i = 0; i < 50; ++i) {
    Eigen::Matrix<double, 6, 1> x;
    x << u(rng), u(rng), u(rng), u(rng), u(rng), 20.0 + 10 * u(rng);
    auto f = [&](const Eigen::Matrix<double, 6, 1>& v) {
      return project_point(v.head<3>(), intr, v.tail<3>());
    };
    // Analytic Jacobian of the pinhole map.
    const double X = x[0] + x[3], Y = x[1] + x[4], Z = x[2] + x[5];
    Eigen::Matrix<double, 2, 6> j;
    j << intr.focal / Z, 0, -intr.focal * X / (Z * Z), intr.focal / Z, 0, -intr.focal * X / (Z * Z), 0,
        intr.focal / Z, -intr.focal * Y / (Z * Z), 0, intr.focal / Z, -intr.focal * Y / (Z * Z);
    for (int k = 0; k < 6; ++k) {
      const double h = 1e-5;
      Eigen::Matrix<double, 6, 1> up = x, dn = x;
      up[k] += h;
      dn[k] -= h;
      const Vec2 num = (f(up) - f(dn)) / (2 * h);
      for (int r = 0; r < 2; ++r) {
        const double denom = std::max({std::abs(num[r]), std::abs(j(r, k)), 1e-6});
        EXPECT_LT(std::abs(num[r] - j(r, k)) / denom, 1e-6);
      }
    }
  }
}

TEST(NormalizePixel, RoundTrip) {
  const CameraIntrinsics intr;
  EXPECT_EQ(normalize_pixel(Vec2(112, 112), intr), Vec2(0, 0));
  EXPECT_EQ(normalize_pixel(Vec2(224, 0), intr), Vec2(1, -1));
  const Vec2 p(37.25, 190.5);
  EXPECT_LT((denormalize_pixel(normalize_pixel(p, intr), intr) - p).norm(), 1e-13);
}
