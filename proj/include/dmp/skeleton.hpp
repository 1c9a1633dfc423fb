#pragma once

#include <array>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "dmp/rot3.hpp"

namespace dmp::skeleton {

using rot3::Mat3;
using rot3::Vec3;

inline constexpr int kNumJoints = 24;
inline constexpr int kNumShape = 10;

using ShapeVec = Eigen::Matrix<double, kNumShape, 1>;
using ShapeBlock = Eigen::Matrix<double, 3, kNumShape>;
using JointPositions = std::array<Vec3, kNumJoints>;

// SMPL joint order. Parents always precede their children.
enum Joint : int {
  kPelvis = 0,
  kLeftHip,
  kRightHip,
  kSpine1,
  kLeftKnee,
  kRightKnee,
  kSpine2,
  kLeftAnkle,
  kRightAnkle,
  kSpine3,
  kLeftFoot,
  kRightFoot,
  kNeck,
  kLeftCollar,
  kRightCollar,
  kHead,
  kLeftShoulder,
  kRightShoulder,
  kLeftElbow,
  kRightElbow,
  kLeftWrist,
  kRightWrist,
  kLeftHand,
  kRightHand,
};

std::string_view joint_name(int j);

// Skeleton-only linear body model. Coordinates follow the camera frame:
// x to the subject's left, y down, z away from the camera. Lengths in meters.
struct KinematicTree {
  std::array<int, kNumJoints> parent{};
  std::array<Vec3, kNumJoints> rest_offset{};
  std::array<ShapeBlock, kNumJoints> shape_basis{};

  int depth() const;
  // Throws ShapeMismatch if the parent table is not a rooted tree in
  // topological order or a non-root offset is zero.
  void validate() const;
};

struct ShapeParams {
  ShapeVec beta = ShapeVec::Zero();
};

struct PoseFrame {
  std::array<rot3::AxisAngle, kNumJoints> joints{};
  Vec3 trans = Vec3::Zero();
};

struct MotionSequence {
  std::vector<PoseFrame> frames;
  ShapeParams shape;
  double frame_rate = 25.0;

  std::ptrdiff_t length() const { return static_cast<std::ptrdiff_t>(frames.size()); }
};

const KinematicTree& default_tree();

// Bone vector of joint j (offset from its parent in the parent's frame).
Vec3 bone(const KinematicTree& tree, int j, const ShapeParams& shape);

JointPositions forward_kinematics(const KinematicTree& tree, const PoseFrame& frame,
                                  const ShapeParams& shape);

// Same chain evaluated from local rotation matrices.
JointPositions forward_kinematics(const KinematicTree& tree,
                                  const std::array<Mat3, kNumJoints>& local,
                                  const ShapeParams& shape, const Vec3& trans);

std::vector<JointPositions> sequence_keypoints(const KinematicTree& tree,
                                               const MotionSequence& seq);

}  // namespace dmp::skeleton
