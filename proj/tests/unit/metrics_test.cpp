#include <gtest/gtest.h>

#include "dmp/error.hpp"
#include "dmp/metrics.hpp"
#include "metric_oracles.hpp"
#include "test_util.hpp"

using namespace dmp;
using namespace dmp::metrics;
using dmp::test::random_trajectory;

TEST(Mpjpe, Examples) {
  std::mt19937_64 rng(1);
  const JointTrajectory gt = random_trajectory(rng, 5, 4);
  EXPECT_EQ(mpjpe(gt, gt), 0.0);
  JointTrajectory off = gt;
  for (std::ptrdiff_t t = 0; t < 5; ++t)
    for (std::ptrdiff_t j = 0; j < 4; ++j) off.at(t, j) += Eigen::Vector3d(3, 4, 0);
  EXPECT_NEAR(mpjpe(off, gt), 5.0, 1e-12);
}

TEST(Mpjpe, ShapeMismatch) {
  std::mt19937_64 rng(2);
  EXPECT_THROW(mpjpe(random_trajectory(rng, 4, 3), random_trajectory(rng, 5, 3)), ShapeMismatch);
  EXPECT_THROW(mpjpe(random_trajectory(rng, 4, 3), random_trajectory(rng, 4, 2)), ShapeMismatch);
}

TEST(Metrics, MatchNaiveOracles) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> frames(3, 8), joints(3, 5);
  for (int i = 0; i < 1000; ++i) {
    const int T = frames(rng), J = joints(rng);
    const JointTrajectory p = random_trajectory(rng, T, J), g = random_trajectory(rng, T, J);
    EXPECT_NEAR(mpjpe(p, g), test::naive_mpjpe(p, g), 1e-12);
    EXPECT_NEAR(pa_mpjpe(p, g), test::naive_pa_mpjpe(p, g), 1e-12);
    EXPECT_NEAR(acceleration(p), test::naive_acc(p), 1e-12);
    EXPECT_NEAR(acceleration_error(p, g), test::naive_acc_err(p, g), 1e-12);
  }
}

TEST(Umeyama, RecoversSimilarity) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> s(0.2, 5.0);
  for (int i = 0; i < 200; ++i) {
    const JointTrajectory g = random_trajectory(rng, 1, 6);
    const Similarity truth{s(rng), test::random_rotation(rng), 100.0 * test::random_unit(rng)};
    const Eigen::Matrix3Xd src = g.frame(0);
    const Eigen::Matrix3Xd dst = (truth.scale * truth.rotation * src).colwise() + truth.translation;
    const Similarity est = metrics::umeyama(src, dst);
    EXPECT_NEAR(est.scale, truth.scale, 1e-10);
    EXPECT_LT(test::max_abs(est.rotation - truth.rotation), 1e-10);
    EXPECT_LT(test::max_abs(est.translation - truth.translation), 1e-8);
  }
}

TEST(Umeyama, NeverReflects) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    const JointTrajectory a = random_trajectory(rng, 1, 5), b = random_trajectory(rng, 1, 5);
    EXPECT_NEAR(metrics::umeyama(a.frame(0), b.frame(0)).rotation.determinant(), 1.0, 1e-12);
  }
}

TEST(Umeyama, DegenerateFrame) {
  Eigen::Matrix3Xd line(3, 4);
  line << 0, 1, 2, 3, 0, 2, 4, 6, 0, 3, 6, 9;
  EXPECT_THROW(metrics::umeyama(line, line), DegenerateFrame);
  Eigen::Matrix3Xd point = Eigen::Matrix3Xd::Ones(3, 4);
  EXPECT_THROW(metrics::umeyama(point, line), DegenerateFrame);
}

TEST(ProcrustesAlign, SimilarityCopyAlignsExactly) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> s(0.3, 3.0);
  for (int i = 0; i < 100; ++i) {
    const JointTrajectory gt = random_trajectory(rng, 6, 24);
    JointTrajectory pred = gt;
    for (std::ptrdiff_t t = 0; t < gt.frames(); ++t) {
      const Eigen::Matrix3d r = test::random_rotation(rng);
      const Eigen::Vector3d tr = 500.0 * test::random_unit(rng);
      const double sc = s(rng);
      pred.frame(t) = (sc * r * gt.frame(t)).colwise() + tr;
    }
    const JointTrajectory aligned = procrustes_align(pred, gt);
    for (std::size_t k = 0; k < gt.data().size(); ++k) EXPECT_NEAR(aligned.data()[k], gt.data()[k], 1e-9);
    EXPECT_LT(pa_mpjpe(pred, gt), 1e-9);
  }
}

TEST(ProcrustesAlign, IdentityOptimum) {
  std::mt19937_64 rng(7);
  const JointTrajectory gt = random_trajectory(rng, 4, 10);
  const JointTrajectory aligned = procrustes_align(gt, gt);
  for (std::size_t k = 0; k < gt.data().size(); ++k) EXPECT_NEAR(aligned.data()[k], gt.data()[k], 1e-10);
}

// Random search over similarities never beats the closed form.
TEST(ProcrustesAlign, OptimalAgainstRandomSearch) {
  std::mt19937_64 rng(8);
  const JointTrajectory gt = random_trajectory(rng, 1, 8);
  const JointTrajectory pred = random_trajectory(rng, 1, 8);
  const JointTrajectory aligned = procrustes_align(pred, gt);
  const double best = (aligned.frame(0) - gt.frame(0)).squaredNorm();
  std::uniform_real_distribution<double> s(0.05, 3.0);
  std::normal_distribution<double> n(0.0, 100.0);
  const Similarity opt = metrics::umeyama(pred.frame(0), gt.frame(0));
  for (int i = 0; i < 100000; ++i) {
    Similarity cand;
    if (i % 2 == 0) {
      cand = {s(rng), test::random_rotation(rng), Eigen::Vector3d(n(rng), n(rng), n(rng))};
    } else {
      // Local perturbations of the optimum probe the neighbourhood as well.
      cand = {opt.scale * (1.0 + 0.01 * n(rng) / 100.0),
              test::rotation_about(test::random_unit(rng), 0.01 * std::abs(n(rng)) / 100.0) * opt.rotation,
              opt.translation + 0.01 * Eigen::Vector3d(n(rng), n(rng), n(rng))};
    }
    const Eigen::Matrix3Xd moved = (cand.scale * cand.rotation * pred.frame(0)).colwise() + cand.translation;
    ASSERT_GE((moved - gt.frame(0)).squaredNorm(), best - 1e-9 * best);
  }
}

TEST(PaMpjpe, NeverExceedsMpjpe) {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 1000; ++i) {
    const JointTrajectory p = random_trajectory(rng, 3, 5), g = random_trajectory(rng, 3, 5);
    EXPECT_LE(pa_mpjpe(p, g), mpjpe(p, g) + 1e-12);
  }
}

TEST(PaMpjpe, InvariantToSimilarityOfPrediction) {
  std::mt19937_64 rng(10);
  for (int i = 0; i < 200; ++i) {
    const JointTrajectory p = random_trajectory(rng, 4, 24), g = random_trajectory(rng, 4, 24);
    JointTrajectory q = p;
    const Eigen::Matrix3d r = test::random_rotation(rng);
    for (std::ptrdiff_t t = 0; t < p.frames(); ++t) q.frame(t) = (2.5 * r * p.frame(t)).colwise() + Eigen::Vector3d(7, -3, 40);
    EXPECT_NEAR(pa_mpjpe(q, g), pa_mpjpe(p, g), 1e-9);
  }
}

TEST(Acceleration, Examples) {
  JointTrajectory lin(10, 2), quad(10, 1);
  for (std::ptrdiff_t t = 0; t < 10; ++t) {
    lin.at(t, 0) = Eigen::Vector3d(2.0 * t, -t, 5.0);
    lin.at(t, 1) = Eigen::Vector3d(0.5 * t, 0, 0);
    quad.at(t, 0) = Eigen::Vector3d(double(t * t), 0, 0);
  }
  EXPECT_EQ(acceleration(lin), 0.0);
  EXPECT_NEAR(acceleration(quad), 2.0, 1e-12);
  EXPECT_THROW(acceleration(JointTrajectory(2, 3)), TooShort);
}

TEST(AccelerationError, Examples) {
  std::mt19937_64 rng(11);
  const JointTrajectory gt = random_trajectory(rng, 8, 5);
  EXPECT_EQ(acceleration_error(gt, gt), 0.0);
  JointTrajectory offset = gt, drift = gt;
  for (std::ptrdiff_t t = 0; t < 8; ++t) {
    for (std::ptrdiff_t j = 0; j < 5; ++j) {
      offset.at(t, j) += Eigen::Vector3d(10, -20, 30);
      drift.at(t, j) += double(t) * Eigen::Vector3d(1.5, 0.25, -2.0) + Eigen::Vector3d(4, 4, 4);
    }
  }
  EXPECT_NEAR(acceleration_error(offset, gt), 0.0, 1e-12);
  EXPECT_NEAR(acceleration_error(drift, gt), 0.0, 1e-12);
  EXPECT_THROW(acceleration_error(random_trajectory(rng, 2, 5), random_trajectory(rng, 2, 5)), TooShort);
  EXPECT_THROW(acceleration_error(random_trajectory(rng, 4, 5), random_trajectory(rng, 5, 5)), ShapeMismatch);
}

TEST(AccelerationError, SymmetricInArguments) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 200; ++i) {
    const JointTrajectory p = random_trajectory(rng, 6, 4), g = random_trajectory(rng, 6, 4);
    EXPECT_EQ(acceleration_error(p, g), acceleration_error(g, p));
  }
}

TEST(EvaluateAll, MatchesIndividualCallsAndPolicies) {
  std::mt19937_64 rng(13);
  const JointTrajectory p = random_trajectory(rng, 16, 24), g = random_trajectory(rng, 16, 24);
  const MetricReport a = evaluate_all(p, g, ExecPolicy::serial);
  const MetricReport b = evaluate_all(p, g, ExecPolicy::parallel);
  EXPECT_EQ(a.mpjpe, mpjpe(p, g));
  EXPECT_EQ(a.pa_mpjpe, pa_mpjpe(p, g, ExecPolicy::serial));
  EXPECT_EQ(a.acc, acceleration(p));
  EXPECT_EQ(a.acc_err, acceleration_error(p, g));
  EXPECT_EQ(a.pa_mpjpe, b.pa_mpjpe);
  EXPECT_EQ(a.mpjpe, b.mpjpe);
  const JointTrajectory sa = procrustes_align(p, g, ExecPolicy::serial);
  const JointTrajectory pa = procrustes_align(p, g, ExecPolicy::parallel);
  EXPECT_EQ(sa.data(), pa.data());
}
