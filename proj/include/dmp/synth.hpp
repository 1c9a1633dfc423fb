#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "dmp/camera.hpp"
#include "dmp/exec.hpp"
#include "dmp/skeleton.hpp"

namespace dmp::synth {

using skeleton::kNumJoints;
using Matrix = Eigen::MatrixXd;
using Vec3 = Eigen::Vector3d;

enum class MotionFamily : int { walk = 0, wave = 1, idle_sway = 2 };
inline constexpr int kNumFamilies = 3;

std::string_view family_name(MotionFamily f);

// Fixed rotation axis per joint in the joint's local frame. Legs, spine and
// head flex about x, the arm chain (except elbows) about z, elbows and the
// pelvis twist about y.
const std::array<Vec3, kNumJoints>& anatomical_axes();

struct MotionFamilyConfig {
  MotionFamily family = MotionFamily::idle_sway;
  std::array<double, kNumJoints> amplitude{};  // rad
  std::array<double, kNumJoints> frequency{};  // Hz
  std::array<double, kNumJoints> phase{};      // rad
  Vec3 root_velocity = Vec3::Zero();           // m/s, nonzero only for walk
  skeleton::ShapeParams shape;
  double frame_rate = 25.0;
  std::uint64_t seed = 0;

  // Throws ConfigError unless amplitudes lie in [0, pi/2] and frequencies in
  // (0, frame_rate / 4].
  void validate() const;
};

// Family template scaled per clip: amplitudes x U(0.7, 1.3), one frequency
// for the whole body (base x U(0.8, 1.2)), phases = global phase + template
// offset + small jitter, random shape and walking speed.
MotionFamilyConfig random_config(MotionFamily family, std::uint64_t seed, double frame_rate = 25.0);

// Sinusoidal joint drivers about the anatomical axes; translation starts at
// zero and advances at root_velocity.
skeleton::MotionSequence sample_motion(const MotionFamilyConfig& cfg, std::ptrdiff_t frames);

struct TrainingClip {
  skeleton::MotionSequence gt_motion;  // trans is the camera-space root translation
  std::vector<camera::WeakCamera> gt_camera;
  Matrix gt_keypoints_3d;  // (3J) x T, mm, root-relative
  Matrix gt_keypoints_2d;  // (2J) x T, px
  Matrix observations;     // (3J) x T: u, v (px), confidence per joint
  camera::CameraIntrinsics intrinsics;
  std::uint64_t seed = 0;

  std::ptrdiff_t frames() const { return gt_keypoints_3d.cols(); }
};

// Ground-truth weak camera: s ~ U(0.7, 1.0), t_x, t_y ~ U(-0.15, 0.15) m.
TrainingClip synthesize_clip(const MotionFamilyConfig& cfg, const camera::CameraIntrinsics& intr,
                             double noise_px, std::uint64_t seed, std::ptrdiff_t frames = 16);

struct DatasetOptions {
  std::ptrdiff_t frames = 16;
  double noise_px = 3.0;
  double frame_rate = 25.0;
  camera::CameraIntrinsics intrinsics;
  // Real-motion pool size; 0 picks four motions per training clip.
  std::ptrdiff_t real_pool = 0;
};

struct Dataset {
  std::vector<TrainingClip> train;
  std::vector<TrainingClip> eval;
  std::vector<skeleton::MotionSequence> real;
  std::vector<std::uint64_t> train_seeds, eval_seeds, real_seeds;
};

// 80/20 split (floor for train, at least one eval clip). Families cycle by
// clip index. All seeds are distinct draws from one stream seeded by
// split_seed. Throws ConfigError for n_clips < 2.
Dataset make_dataset(std::ptrdiff_t n_clips, std::uint64_t split_seed, const DatasetOptions& opts = {},
                     ExecPolicy policy = ExecPolicy::parallel);

// Batched training tensors, frame t of clip b in column t * B + b.
struct ClipBatch {
  SeqLayout layout;
  Matrix obs;         // (3J) x N, px and confidence
  Matrix gt3d;        // (3J) x N, meters, root-relative
  Matrix gt2d;        // (2J) x N, normalized image coordinates
  Matrix gt_rotmats;  // (9J) x N
  Matrix gt_beta;     // 10 x B
};

ClipBatch make_batch(std::span<const TrainingClip* const> clips);

// Local rotations of a motion as (9J) x T columns, and the 6D form (6J) x T.
Matrix motion_rotmats(const skeleton::MotionSequence& m);
// (6J) x N for a batch of motions with equal length.
Matrix motion_sixd_batch(std::span<const skeleton::MotionSequence* const> motions);

}  // namespace dmp::synth
