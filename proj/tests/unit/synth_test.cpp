#include <gtest/gtest.h>

#include <numbers>
#include <set>

#include "dmp/error.hpp"
#include "dmp/synth.hpp"
#include "test_util.hpp"

using namespace dmp;
using namespace dmp::synth;

namespace {

MotionFamilyConfig fixed_config(double amp, double freq) {
  MotionFamilyConfig cfg;
  cfg.amplitude.fill(amp);
  cfg.frequency.fill(freq);
  cfg.phase.fill(0.3);
  return cfg;
}

}  // namespace

TEST(Synth, AnatomicalAxesAreUnit) {
  for (const Vec3& a : anatomical_axes()) EXPECT_NEAR(a.norm(), 1.0, 1e-15);
  EXPECT_EQ(family_name(MotionFamily::walk), "walk");
}

TEST(SampleMotion, ZeroAmplitudeIsRestPose) {
  MotionFamilyConfig cfg = fixed_config(0.0, 1.0);
  const auto seq = sample_motion(cfg, 10);
  ASSERT_EQ(seq.length(), 10);
  for (const auto& f : seq.frames) {
    for (const auto& a : f.joints) EXPECT_EQ(a.v, Vec3::Zero());
    EXPECT_EQ(f.trans, Vec3::Zero());
  }
}

TEST(SampleMotion, OneHertzHasPeriodTwentyFive) {
  const auto seq = sample_motion(fixed_config(0.4, 1.0), 60);
  for (std::size_t t = 0; t + 25 < seq.frames.size(); ++t) {
    for (int j = 0; j < kNumJoints; ++j) {
      EXPECT_NEAR(seq.frames[t].joints[j].v(0), seq.frames[t + 25].joints[j].v(0), 1e-12);
      EXPECT_NEAR(seq.frames[t].joints[j].v.norm(), seq.frames[t + 25].joints[j].v.norm(), 1e-12);
    }
  }
}

TEST(SampleMotion, RotatesAboutAnatomicalAxes) {
  const auto seq = sample_motion(random_config(MotionFamily::wave, 3), 16);
  const auto& axes = anatomical_axes();
  for (const auto& f : seq.frames) {
    for (int j = 0; j < kNumJoints; ++j) EXPECT_LT(f.joints[j].v.cross(axes[j]).norm(), 1e-15);
  }
}

// Second differences of A sin(w t) never exceed A (w / fps)^2.
TEST(SampleMotion, AccelerationBounded) {
  for (int fam = 0; fam < kNumFamilies; ++fam) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const MotionFamilyConfig cfg = random_config(static_cast<MotionFamily>(fam), seed);
      const auto seq = sample_motion(cfg, 40);
      const auto& axes = anatomical_axes();
      for (int j = 0; j < kNumJoints; ++j) {
        const double w = 2 * std::numbers::pi * cfg.frequency[j] / cfg.frame_rate;
        for (std::size_t t = 1; t + 1 < seq.frames.size(); ++t) {
          const double acc = (seq.frames[t + 1].joints[j].v - 2 * seq.frames[t].joints[j].v +
                              seq.frames[t - 1].joints[j].v)
                                 .dot(axes[j]);
          EXPECT_LE(std::abs(acc), cfg.amplitude[j] * w * w + 1e-12);
        }
      }
      for (std::size_t t = 1; t + 1 < seq.frames.size(); ++t) {
        const Vec3 a = seq.frames[t + 1].trans - 2 * seq.frames[t].trans + seq.frames[t - 1].trans;
        EXPECT_LT(a.norm(), 1e-12);
      }
    }
  }
}

TEST(MotionFamilyConfig, ValidateRejectsOutOfRange) {
  MotionFamilyConfig cfg = fixed_config(0.3, 1.0);
  EXPECT_NO_THROW(cfg.validate());
  cfg.amplitude[5] = 2.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = fixed_config(0.3, 1.0);
  cfg.amplitude[0] = -0.1;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = fixed_config(0.3, 0.0);
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = fixed_config(0.3, 6.5);
  EXPECT_THROW(cfg.validate(), ConfigError);
  EXPECT_THROW(sample_motion(cfg, 4), ConfigError);
}

TEST(RandomConfig, ValidDeterministicAndSeedSensitive) {
  for (int fam = 0; fam < kNumFamilies; ++fam) {
    const auto f = static_cast<MotionFamily>(fam);
    for (std::uint64_t s = 0; s < 50; ++s) EXPECT_NO_THROW(random_config(f, s).validate());
    const auto a = random_config(f, 11), b = random_config(f, 11), c = random_config(f, 12);
    EXPECT_EQ(a.amplitude, b.amplitude);
    EXPECT_EQ(a.phase, b.phase);
    EXPECT_NE(a.phase, c.phase);
    if (f == MotionFamily::walk) {
      EXPECT_GT(a.root_velocity.norm(), 0.0);
    } else {
      EXPECT_EQ(a.root_velocity, Vec3::Zero());
    }
  }
}

TEST(SynthesizeClip, NoiselessObservationsAreExact) {
  const camera::CameraIntrinsics intr;
  const TrainingClip clip = synthesize_clip(random_config(MotionFamily::walk, 4), intr, 0.0, 4);
  ASSERT_EQ(clip.frames(), 16);
  for (std::ptrdiff_t t = 0; t < 16; ++t) {
    for (int j = 0; j < kNumJoints; ++j) {
      EXPECT_EQ(clip.observations(3 * j, t), clip.gt_keypoints_2d(2 * j, t));
      EXPECT_EQ(clip.observations(3 * j + 1, t), clip.gt_keypoints_2d(2 * j + 1, t));
      EXPECT_EQ(clip.observations(3 * j + 2, t), 1.0);
    }
  }
}

// Ground-truth 2D is the projection of the root-relative 3D keypoints moved
// by the ground-truth camera.
TEST(SynthesizeClip, ThreeDAndTwoDConsistent) {
  const camera::CameraIntrinsics intr;
  for (int fam = 0; fam < kNumFamilies; ++fam) {
    const TrainingClip clip = synthesize_clip(random_config(static_cast<MotionFamily>(fam), 5), intr, 3.0, 5);
    for (std::ptrdiff_t t = 0; t < clip.frames(); ++t) {
      const auto& cam = clip.gt_camera[static_cast<std::size_t>(t)];
      const Vec3 trans = camera::recover_translation(cam, intr);
      EXPECT_LT((trans - clip.gt_motion.frames[static_cast<std::size_t>(t)].trans).norm(), 1e-9);
      EXPECT_LT(clip.gt_keypoints_3d.col(t).head(3).norm(), 1e-9);
      for (int j = 0; j < kNumJoints; ++j) {
        const Vec3 p = clip.gt_keypoints_3d.block<3, 1>(3 * j, t) / 1000.0;
        const camera::Vec2 px = camera::project_point(p, intr, trans);
        EXPECT_LT((px - clip.gt_keypoints_2d.block<2, 1>(2 * j, t)).norm(), 1e-9);
      }
    }
  }
}

TEST(SynthesizeClip, CameraRanges) {
  const camera::CameraIntrinsics intr;
  for (std::uint64_t s = 0; s < 30; ++s) {
    const TrainingClip clip = synthesize_clip(random_config(MotionFamily::idle_sway, s), intr, 3.0, s);
    const auto& c = clip.gt_camera[0];
    EXPECT_GE(c.s, 0.7 - 1e-12);
    EXPECT_LE(c.s, 1.0 + 1e-12);
    EXPECT_LE(std::abs(c.tx), 0.15);
    EXPECT_LE(std::abs(c.ty), 0.15);
  }
}

TEST(SynthesizeClip, NoiseStatistics) {
  const camera::CameraIntrinsics intr;
  const double sigma = 3.0;
  double sum = 0.0, sq = 0.0, conf = 0.0;
  std::size_t n = 0;
  for (std::uint64_t s = 0; n < 20000; ++s) {
    const TrainingClip clip = synthesize_clip(random_config(MotionFamily::wave, s), intr, sigma, s + 1000);
    for (std::ptrdiff_t t = 0; t < clip.frames(); ++t) {
      for (int j = 0; j < kNumJoints; ++j) {
        const camera::Vec2 d = clip.observations.block<2, 1>(3 * j, t) - clip.gt_keypoints_2d.block<2, 1>(2 * j, t);
        const double c = clip.observations(3 * j + 2, t);
        EXPECT_NEAR(c, std::exp(-d.squaredNorm() / (2 * sigma * sigma)), 1e-9);
        conf += c;
        sum += d.sum();
        sq += d.squaredNorm();
        n += 2;
      }
    }
  }
  const double mean = sum / static_cast<double>(n);
  const double sd = std::sqrt(sq / static_cast<double>(n) - mean * mean);
  EXPECT_NEAR(sd, sigma, 0.05 * sigma);
  EXPECT_LT(std::abs(mean), 0.1);
  // E[exp(-|n|^2 / 2 sigma^2)] for 2D Gaussian noise is 1/2.
  EXPECT_NEAR(conf / static_cast<double>(n / 2), 0.5, 0.02);
}

TEST(SynthesizeClip, RejectsNegativeNoise) {
  EXPECT_THROW(synthesize_clip(random_config(MotionFamily::walk, 1), {}, -1.0, 1), ConfigError);
}

TEST(MakeDataset, SplitAndSeeds) {
  DatasetOptions opts;
  opts.frames = 8;
  const Dataset ds = make_dataset(10, 42, opts);
  EXPECT_EQ(ds.train.size(), 8u);
  EXPECT_EQ(ds.eval.size(), 2u);
  EXPECT_EQ(ds.real.size(), 32u);
  std::set<std::uint64_t> all;
  for (const auto* v : {&ds.train_seeds, &ds.eval_seeds, &ds.real_seeds}) all.insert(v->begin(), v->end());
  EXPECT_EQ(all.size(), 8u + 2u + 32u);
  EXPECT_EQ(make_dataset(2, 1, opts).train.size(), 1u);
  EXPECT_EQ(make_dataset(2, 1, opts).eval.size(), 1u);
  EXPECT_EQ(make_dataset(7, 1, opts).train.size(), 5u);
  EXPECT_THROW(make_dataset(1, 1, opts), ConfigError);
}

TEST(MakeDataset, DeterministicAcrossPolicies) {
  DatasetOptions opts;
  opts.frames = 6;
  const Dataset a = make_dataset(12, 9, opts, ExecPolicy::serial);
  const Dataset b = make_dataset(12, 9, opts, ExecPolicy::parallel);
  const Dataset c = make_dataset(12, 10, opts, ExecPolicy::serial);
  ASSERT_EQ(a.train.size(), b.train.size());
  for (std::size_t i = 0; i < a.train.size(); ++i) EXPECT_EQ(a.train[i].observations, b.train[i].observations);
  for (std::size_t i = 0; i < a.eval.size(); ++i) EXPECT_EQ(a.eval[i].gt_keypoints_3d, b.eval[i].gt_keypoints_3d);
  EXPECT_NE(a.train_seeds, c.train_seeds);
}

TEST(MakeBatch, LayoutAndUnits) {
  DatasetOptions opts;
  opts.frames = 5;
  const Dataset ds = make_dataset(5, 3, opts);
  const TrainingClip* clips[] = {&ds.train[0], &ds.train[2]};
  const ClipBatch b = make_batch(clips);
  EXPECT_EQ(b.layout.frames, 5);
  EXPECT_EQ(b.layout.batch, 2);
  EXPECT_EQ(b.obs.cols(), 10);
  const double c = opts.intrinsics.center();
  for (std::ptrdiff_t t = 0; t < 5; ++t) {
    for (std::ptrdiff_t k = 0; k < 2; ++k) {
      const TrainingClip& clip = *clips[k];
      const auto col = b.layout.col(t, k);
      EXPECT_EQ(b.obs.col(col), clip.observations.col(t));
      EXPECT_LT((b.gt3d.col(col) * 1000.0 - clip.gt_keypoints_3d.col(t)).cwiseAbs().maxCoeff(), 1e-12);
      EXPECT_LT(((b.gt2d.col(col).array() * c + c).matrix() - clip.gt_keypoints_2d.col(t)).cwiseAbs().maxCoeff(),
                1e-12);
    }
    EXPECT_EQ(b.gt_beta.col(1), clips[1]->gt_motion.shape.beta);
  }
}

TEST(MotionRotmats, MatchAxisAngleAndSixD) {
  const auto seq = sample_motion(random_config(MotionFamily::walk, 8), 4);
  const Matrix r = motion_rotmats(seq);
  ASSERT_EQ(r.rows(), 9 * kNumJoints);
  const skeleton::MotionSequence* ms[] = {&seq, &seq};
  const Matrix six = motion_sixd_batch(ms);
  ASSERT_EQ(six.cols(), 8);
  for (std::ptrdiff_t t = 0; t < 4; ++t) {
    for (int j = 0; j < kNumJoints; ++j) {
      const rot3::Mat3 ref = test::rotation_about_vec(seq.frames[static_cast<std::size_t>(t)].joints[j].v);
      const Eigen::Map<const rot3::Mat3> got(r.col(t).data() + 9 * j);
      EXPECT_LT(test::max_abs(got - ref), 1e-14);
      EXPECT_LT((six.block<3, 1>(6 * j, 2 * t + 1) - ref.col(0)).norm(), 1e-14);
      EXPECT_LT((six.block<3, 1>(6 * j + 3, 2 * t) - ref.col(1)).norm(), 1e-14);
    }
  }
}
