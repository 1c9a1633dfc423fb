#include "dmp/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <unordered_set>

#include "dmp/error.hpp"
#include "dmp/rot3.hpp"

namespace dmp::synth {

using namespace skeleton;
using std::numbers::pi;

namespace {

struct FamilyTemplate {
  double base_freq;                      // Hz
  std::array<double, kNumJoints> amp;    // rad
  std::array<double, kNumJoints> phase;  // rad, relative to the clip's global phase
};

// Joint order: pelvis, l_hip, r_hip, spine1, l_knee, r_knee, spine2, l_ankle,
// r_ankle, spine3, l_foot, r_foot, neck, l_collar, r_collar, head, l_shoulder,
// r_shoulder, l_elbow, r_elbow, l_wrist, r_wrist, l_hand, r_hand.
constexpr FamilyTemplate kWalk{
    1.0,
    {0.10, 0.45, 0.45, 0.05, 0.50, 0.50, 0.04, 0.20, 0.20, 0.04, 0.10, 0.10,
     0.05, 0.03, 0.03, 0.06, 0.30, 0.30, 0.25, 0.25, 0.10, 0.10, 0.05, 0.05},
    {0.0, 0.0, pi, 0.0, pi / 2, 3 * pi / 2, 0.0, pi, 0.0, 0.0, pi, 0.0,
     0.0, 0.0, pi, 0.0, pi, 0.0, pi + 0.5, 0.5, pi, 0.0, pi, 0.0}};

constexpr FamilyTemplate kWave{
    1.2,
    {0.05, 0.05, 0.05, 0.04, 0.05, 0.05, 0.04, 0.02, 0.02, 0.04, 0.02, 0.02,
     0.05, 0.02, 0.10, 0.08, 0.08, 0.60, 0.08, 0.80, 0.05, 0.30, 0.02, 0.20},
    {0.0, 0.0, pi, 0.3, 0.0, pi, 0.6, 0.0, pi, 0.9, 0.0, pi,
     1.2, 0.0, 0.0, 1.5, pi, 0.0, pi, pi / 2, pi, pi, 0.0, 3 * pi / 2}};

constexpr FamilyTemplate kIdleSway{
    0.4,
    {0.06, 0.08, 0.08, 0.08, 0.06, 0.06, 0.08, 0.04, 0.04, 0.08, 0.02, 0.02,
     0.06, 0.04, 0.04, 0.10, 0.12, 0.12, 0.12, 0.12, 0.06, 0.06, 0.04, 0.04},
    {0.0, 0.0, pi, 0.2, 0.0, pi, 0.4, pi, 0.0, 0.6, pi, 0.0,
     0.8, 0.0, pi, 1.0, 0.0, pi, 0.5, pi + 0.5, 1.0, pi + 1.0, 0.0, pi}};

const FamilyTemplate& family_template(MotionFamily f) {
  switch (f) {
    case MotionFamily::walk: return kWalk;
    case MotionFamily::wave: return kWave;
    case MotionFamily::idle_sway: return kIdleSway;
  }
  throw ConfigError("unknown motion family " + std::to_string(static_cast<int>(f)));
}

// Config draws and clip draws (camera, noise) use separate streams of the
// same seed so that changing one never shifts the other.
std::mt19937_64 stream(std::uint64_t seed, std::uint64_t tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(tag)};
  return std::mt19937_64(seq);
}

}  // namespace

std::string_view family_name(MotionFamily f) {
  switch (f) {
    case MotionFamily::walk: return "walk";
    case MotionFamily::wave: return "wave";
    case MotionFamily::idle_sway: return "idle_sway";
  }
  return "unknown";
}

const std::array<Vec3, kNumJoints>& anatomical_axes() {
  static const std::array<Vec3, kNumJoints> axes = [] {
    std::array<Vec3, kNumJoints> a;
    a.fill(Vec3::UnitX());
    a[kPelvis] = Vec3::UnitY();
    for (int j : {kLeftCollar, kRightCollar, kLeftShoulder, kRightShoulder, kLeftWrist, kRightWrist,
                  kLeftHand, kRightHand}) {
      a[j] = Vec3::UnitZ();
    }
    a[kLeftElbow] = Vec3::UnitY();
    a[kRightElbow] = Vec3::UnitY();
    return a;
  }();
  return axes;
}

void MotionFamilyConfig::validate() const {
  if (!(frame_rate > 0.0)) throw ConfigError("frame_rate must be positive");
  for (int j = 0; j < kNumJoints; ++j) {
    if (!(amplitude[j] >= 0.0 && amplitude[j] <= pi / 2)) {
      throw ConfigError("amplitude of joint " + std::to_string(j) + " outside [0, pi/2]");
    }
    if (!(frequency[j] > 0.0 && frequency[j] <= frame_rate / 4.0)) {
      throw ConfigError("frequency of joint " + std::to_string(j) + " outside (0, fps/4]");
    }
  }
}

MotionFamilyConfig random_config(MotionFamily family, std::uint64_t seed, double frame_rate) {
  const FamilyTemplate& tpl = family_template(family);
  std::mt19937_64 rng = stream(seed, 0);
  std::uniform_real_distribution<double> amp_scale(0.7, 1.3), freq_scale(0.8, 1.2),
      global_phase(0.0, 2 * pi), jitter(-0.2, 0.2), beta(-1.5, 1.5), speed(0.2, 0.5), unit(0.0, 1.0);

  MotionFamilyConfig cfg;
  cfg.family = family;
  cfg.frame_rate = frame_rate;
  cfg.seed = seed;
  const double freq = std::min(tpl.base_freq * freq_scale(rng), frame_rate / 4.0);
  const double phi = global_phase(rng);
  for (int j = 0; j < kNumJoints; ++j) {
    cfg.amplitude[j] = std::min(tpl.amp[j] * amp_scale(rng), pi / 2);
    cfg.frequency[j] = freq;
    cfg.phase[j] = phi + tpl.phase[j] + jitter(rng);
  }
  for (int k = 0; k < kNumShape; ++k) cfg.shape.beta[k] = beta(rng);
  if (family == MotionFamily::walk) {
    const double v = speed(rng);
    cfg.root_velocity = Vec3(unit(rng) < 0.5 ? -v : v, 0.0, 0.0);
  }
  cfg.validate();
  return cfg;
}

MotionSequence sample_motion(const MotionFamilyConfig& cfg, std::ptrdiff_t frames) {
  cfg.validate();
  const auto& axes = anatomical_axes();
  MotionSequence seq;
  seq.frame_rate = cfg.frame_rate;
  seq.shape = cfg.shape;
  seq.frames.resize(static_cast<std::size_t>(std::max<std::ptrdiff_t>(frames, 0)));
  for (std::size_t t = 0; t < seq.frames.size(); ++t) {
    const double time = static_cast<double>(t) / cfg.frame_rate;
    PoseFrame& f = seq.frames[t];
    for (int j = 0; j < kNumJoints; ++j) {
      const double angle = cfg.amplitude[j] * std::sin(2 * pi * cfg.frequency[j] * time + cfg.phase[j]);
      f.joints[j].v = axes[j] * angle;
    }
    f.trans = cfg.root_velocity * time;
  }
  return seq;
}

TrainingClip synthesize_clip(const MotionFamilyConfig& cfg, const camera::CameraIntrinsics& intr,
                             double noise_px, std::uint64_t seed, std::ptrdiff_t frames) {
  if (!(noise_px >= 0.0)) throw ConfigError("noise_px must be non-negative");
  TrainingClip clip;
  clip.seed = seed;
  clip.intrinsics = intr;
  clip.gt_motion = sample_motion(cfg, frames);

  std::mt19937_64 rng = stream(seed, 1);
  std::uniform_real_distribution<double> scale(0.7, 1.0), offset(-0.15, 0.15);
  const double s = scale(rng);
  const double tx = offset(rng);
  const double ty = offset(rng);
  const Vec3 trans0 = camera::recover_translation({s, tx, ty}, intr);

  const KinematicTree& tree = default_tree();
  const std::ptrdiff_t T = clip.gt_motion.length();
  clip.gt_camera.resize(static_cast<std::size_t>(T));
  clip.gt_keypoints_3d.resize(3 * kNumJoints, T);
  clip.gt_keypoints_2d.resize(2 * kNumJoints, T);
  clip.observations.resize(3 * kNumJoints, T);

  std::normal_distribution<double> noise(0.0, noise_px > 0.0 ? noise_px : 1.0);
  for (std::ptrdiff_t t = 0; t < T; ++t) {
    PoseFrame& f = clip.gt_motion.frames[static_cast<std::size_t>(t)];
    f.trans += trans0;
    clip.gt_camera[static_cast<std::size_t>(t)] = {camera::scale_for_depth(f.trans.z(), intr), f.trans.x(),
                                                   f.trans.y()};
    PoseFrame local = f;
    local.trans.setZero();
    const JointPositions pos = forward_kinematics(tree, local, clip.gt_motion.shape);
    const std::vector<camera::Vec2> px = camera::project(pos, intr, f.trans);
    for (int j = 0; j < kNumJoints; ++j) {
      clip.gt_keypoints_3d.col(t).segment<3>(3 * j) = 1000.0 * pos[j];
      clip.gt_keypoints_2d.col(t).segment<2>(2 * j) = px[j];
      camera::Vec2 n = camera::Vec2::Zero();
      double conf = 1.0;
      if (noise_px > 0.0) {
        n = {noise(rng), noise(rng)};
        conf = std::exp(-n.squaredNorm() / (2 * noise_px * noise_px));
      }
      clip.observations.col(t).segment<2>(3 * j) = px[j] + n;
      clip.observations(3 * j + 2, t) = conf;
    }
  }
  return clip;
}

Dataset make_dataset(std::ptrdiff_t n_clips, std::uint64_t split_seed, const DatasetOptions& opts,
                     ExecPolicy policy) {
  if (n_clips < 2) throw ConfigError("make_dataset needs at least 2 clips");
  const std::ptrdiff_t n_train = n_clips * 8 / 10 < 1 ? 1 : n_clips * 8 / 10;
  const std::ptrdiff_t n_eval = n_clips - n_train;
  const std::ptrdiff_t n_real = opts.real_pool > 0 ? opts.real_pool : 4 * n_train;

  Dataset ds;
  std::mt19937_64 rng(split_seed);
  std::unordered_set<std::uint64_t> used;
  auto draw = [&](std::vector<std::uint64_t>& out, std::ptrdiff_t n) {
    while (static_cast<std::ptrdiff_t>(out.size()) < n) {
      const std::uint64_t s = rng();
      if (used.insert(s).second) out.push_back(s);
    }
  };
  draw(ds.train_seeds, n_train);
  draw(ds.eval_seeds, n_eval);
  draw(ds.real_seeds, n_real);

  auto build = [&](const std::vector<std::uint64_t>& seeds, std::vector<TrainingClip>& out) {
    out.resize(seeds.size());
    const auto n = static_cast<std::ptrdiff_t>(seeds.size());
#pragma omp parallel for schedule(static) if (policy == ExecPolicy::parallel)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const auto k = static_cast<std::size_t>(i);
      const auto family = static_cast<MotionFamily>(i % kNumFamilies);
      const MotionFamilyConfig cfg = random_config(family, seeds[k], opts.frame_rate);
      out[k] = synthesize_clip(cfg, opts.intrinsics, opts.noise_px, seeds[k], opts.frames);
    }
  };
  build(ds.train_seeds, ds.train);
  build(ds.eval_seeds, ds.eval);

  ds.real.resize(ds.real_seeds.size());
  for (std::size_t i = 0; i < ds.real_seeds.size(); ++i) {
    const auto family = static_cast<MotionFamily>(i % kNumFamilies);
    ds.real[i] = sample_motion(random_config(family, ds.real_seeds[i], opts.frame_rate), opts.frames);
  }
  return ds;
}

Matrix motion_rotmats(const MotionSequence& m) {
  Matrix out(9 * kNumJoints, m.length());
  for (std::ptrdiff_t t = 0; t < m.length(); ++t) {
    const PoseFrame& f = m.frames[static_cast<std::size_t>(t)];
    for (int j = 0; j < kNumJoints; ++j) {
      const rot3::Mat3 r = rot3::axis_angle_to_rotmat(f.joints[j]).m;
      out.col(t).segment<9>(9 * j) = Eigen::Map<const Eigen::Matrix<double, 9, 1>>(r.data());
    }
  }
  return out;
}

Matrix motion_sixd_batch(std::span<const MotionSequence* const> motions) {
  if (motions.empty()) return Matrix(6 * kNumJoints, 0);
  const std::ptrdiff_t B = static_cast<std::ptrdiff_t>(motions.size());
  const std::ptrdiff_t T = motions[0]->length();
  const SeqLayout layout{T, B};
  Matrix out(6 * kNumJoints, layout.cols());
  for (std::ptrdiff_t b = 0; b < B; ++b) {
    const MotionSequence& m = *motions[static_cast<std::size_t>(b)];
    if (m.length() != T) throw ShapeMismatch("motion batch needs equal lengths");
    const Matrix r = motion_rotmats(m);
    for (std::ptrdiff_t t = 0; t < T; ++t) {
      for (int j = 0; j < kNumJoints; ++j) {
        out.col(layout.col(t, b)).segment<6>(6 * j) = r.col(t).segment<6>(9 * j);
      }
    }
  }
  return out;
}

ClipBatch make_batch(std::span<const TrainingClip* const> clips) {
  if (clips.empty()) throw ShapeMismatch("empty clip batch");
  const std::ptrdiff_t B = static_cast<std::ptrdiff_t>(clips.size());
  const std::ptrdiff_t T = clips[0]->frames();
  ClipBatch batch;
  batch.layout = {T, B};
  const std::ptrdiff_t N = batch.layout.cols();
  batch.obs.resize(3 * kNumJoints, N);
  batch.gt3d.resize(3 * kNumJoints, N);
  batch.gt2d.resize(2 * kNumJoints, N);
  batch.gt_rotmats.resize(9 * kNumJoints, N);
  batch.gt_beta.resize(kNumShape, B);
  for (std::ptrdiff_t b = 0; b < B; ++b) {
    const TrainingClip& c = *clips[static_cast<std::size_t>(b)];
    if (c.frames() != T) throw ShapeMismatch("clip batch needs equal lengths");
    const double center = c.intrinsics.center();
    const Matrix rot = motion_rotmats(c.gt_motion);
    for (std::ptrdiff_t t = 0; t < T; ++t) {
      const auto col = batch.layout.col(t, b);
      batch.obs.col(col) = c.observations.col(t);
      batch.gt3d.col(col) = c.gt_keypoints_3d.col(t) / 1000.0;
      batch.gt2d.col(col) = (c.gt_keypoints_2d.col(t).array() - center) / center;
      batch.gt_rotmats.col(col) = rot.col(t);
    }
    batch.gt_beta.col(b) = c.gt_motion.shape.beta;
  }
  return batch;
}

}  // namespace dmp::synth
