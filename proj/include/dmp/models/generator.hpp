#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "dmp/camera.hpp"
#include "dmp/exec.hpp"
#include "dmp/grad/tape.hpp"
#include "dmp/models/temporal_bank.hpp"
#include "dmp/rot3.hpp"
#include "dmp/skeleton.hpp"

namespace dmp::models {

inline constexpr Eigen::Index kObsDim = 3;  // u, v (px), confidence

struct GeneratorConfig {
  Eigen::Index feature_dim = 128;
  Eigen::Index cam_dim = 32;
  Eigen::Index hidden_dim = 64;
  // Frame-wise baseline: the regressor heads read the encoder features
  // directly and the temporal encoders are left unused.
  bool temporal = true;
  // Initial weak-camera scale, used as the camera head's bias.
  double init_scale = 0.85;
  camera::CameraIntrinsics intrinsics;

  nlohmann::json to_json() const;
  static GeneratorConfig from_json(const nlohmann::json& j);
};

// Handles to one recorded generator pass over a batch laid out per SeqLayout.
struct GeneratorGraph {
  SeqLayout layout;
  Var features;      // (J * feature_dim) x N, f_i stacked by joint
  Var cam_features;  // (J * cam_dim) x N, c_i stacked by joint
  Var ftilde;        // (J * feature_dim) x N; equals `features` for the baseline
  Var pose6d;        // 6J x N raw head outputs
  Var rotmats;       // 9J x N
  Var weak_cam;      // 3 x N, rows s, t_x, t_y
  Var trans;         // 3 x N
  Var beta;          // 10 x B, averaged over each clip's frames
};

// Plain values for one clip.
struct GeneratorOutput {
  std::vector<std::array<rot3::RotationSixD, skeleton::kNumJoints>> pose6d;
  std::vector<std::array<rot3::RotMat, skeleton::kNumJoints>> pose_rotmats;
  std::vector<std::array<rot3::AxisAngle, skeleton::kNumJoints>> pose_axis_angle;
  std::vector<camera::WeakCamera> weak_cam;
  skeleton::ShapeParams shape;
  std::vector<rot3::Vec3> trans;
  Matrix tilde_features;  // (J * feature_dim) x T

  skeleton::MotionSequence to_motion(double frame_rate) const;
};

class Generator {
 public:
  explicit Generator(GeneratorConfig cfg);
  Generator(const Generator&) = delete;
  Generator& operator=(const Generator&) = delete;

  // Weights uniform +-1/sqrt(fan_in), biases zero, except the regressor head
  // bias (identity 6D) and the camera bias (init_scale, 0, 0).
  void init(std::uint64_t seed);

  const GeneratorConfig& config() const { return cfg_; }
  grad::ParamStore& params() { return params_; }
  const grad::ParamStore& params() const { return params_; }

  // Per-joint observation encoder: pixel coordinates are mapped to [-1, 1],
  // then a linear map and tanh give f_i and c_i. obs is (3J) x N.
  void encode(grad::Tape& tape, const Matrix& obs, GeneratorGraph& g) const;

  GeneratorGraph forward(grad::Tape& tape, const Matrix& obs, SeqLayout layout,
                         ExecPolicy policy = ExecPolicy::parallel) const;

  GeneratorOutput output(const GeneratorGraph& g, Eigen::Index clip) const;

  // Parameter names reachable from joint j's temporal encoder.
  std::vector<std::string> temporal_param_names(int joint) const;

 private:
  GeneratorConfig cfg_;
  grad::ParamStore params_;
  std::vector<grad::ParamBlock*> enc_w_, enc_b_;
  std::vector<TemporalEncoder> temporal_;
  std::vector<grad::ParamBlock*> head_w_, head_b_;
  grad::ParamBlock* cam_w_ = nullptr;
  grad::ParamBlock* cam_b_ = nullptr;
  grad::ParamBlock* shape_w_ = nullptr;
  grad::ParamBlock* shape_b_ = nullptr;
};

std::string joint_prefix(int joint);

}  // namespace dmp::models
