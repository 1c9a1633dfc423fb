#include "dmp/skeleton.hpp"

#include <sstream>

#include "dmp/error.hpp"

namespace dmp::skeleton {
namespace {

constexpr std::array<std::string_view, kNumJoints> kJointNames = {
    "pelvis",         "left_hip",       "right_hip",   "spine1",      "left_knee",
    "right_knee",     "spine2",         "left_ankle",  "right_ankle", "spine3",
    "left_foot",      "right_foot",     "neck",        "left_collar", "right_collar",
    "head",           "left_shoulder",  "right_shoulder", "left_elbow", "right_elbow",
    "left_wrist",     "right_wrist",    "left_hand",   "right_hand"};

constexpr std::array<int, kNumJoints> kParents = {
    -1, 0, 0, 0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 9, 9, 12, 13, 14, 16, 17, 18, 19, 20, 21};

// Rest offsets in meters (T-pose). Rest height, foot to head, is 1.64 m.
constexpr double kRestOffsets[kNumJoints][3] = {
    {0.00, 0.00, 0.00},    // pelvis
    {0.09, 0.08, 0.00},    // left_hip
    {-0.09, 0.08, 0.00},   // right_hip
    {0.00, -0.11, 0.00},   // spine1
    {0.00, 0.40, 0.00},    // left_knee
    {0.00, 0.40, 0.00},    // right_knee
    {0.00, -0.14, 0.00},   // spine2
    {0.00, 0.42, 0.00},    // left_ankle
    {0.00, 0.42, 0.00},    // right_ankle
    {0.00, -0.06, 0.00},   // spine3
    {0.00, 0.06, -0.12},   // left_foot
    {0.00, 0.06, -0.12},   // right_foot
    {0.00, -0.22, 0.00},   // neck
    {0.07, -0.15, 0.00},   // left_collar
    {-0.07, -0.15, 0.00},  // right_collar
    {0.00, -0.15, 0.00},   // head
    {0.11, 0.03, 0.00},    // left_shoulder
    {-0.11, 0.03, 0.00},   // right_shoulder
    {0.26, 0.00, 0.00},    // left_elbow
    {-0.26, 0.00, 0.00},   // right_elbow
    {0.25, 0.00, 0.00},    // left_wrist
    {-0.25, 0.00, 0.00},   // right_wrist
    {0.08, 0.00, 0.00},    // left_hand
    {-0.08, 0.00, 0.00},   // right_hand
};

constexpr double kShapeTable[kNumJoints - 1][8][3] = {
#include "shape_basis_table.inc"
};

bool is_leg_bone(int j) {
  switch (j) {
    case kLeftKnee: case kRightKnee: case kLeftAnkle: case kRightAnkle:
    case kLeftFoot: case kRightFoot:
      return true;
    default:
      return false;
  }
}

KinematicTree build_default_tree() {
  KinematicTree tree;
  tree.parent = kParents;
  for (int j = 0; j < kNumJoints; ++j) {
    tree.rest_offset[j] = Vec3(kRestOffsets[j][0], kRestOffsets[j][1], kRestOffsets[j][2]);
    ShapeBlock& basis = tree.shape_basis[j];
    basis.setZero();
    if (j == kPelvis) continue;
    // Component 0: uniform +5% per unit on every bone.
    basis.col(0) = 0.05 * tree.rest_offset[j];
    // Component 1: +5% per unit on the legs only.
    if (is_leg_bone(j)) basis.col(1) = 0.05 * tree.rest_offset[j];
    for (int k = 0; k < 8; ++k) {
      basis.col(2 + k) = Vec3(kShapeTable[j - 1][k][0], kShapeTable[j - 1][k][1],
                              kShapeTable[j - 1][k][2]);
    }
  }
  tree.validate();
  return tree;
}

}  // namespace

std::string_view joint_name(int j) { return kJointNames.at(static_cast<std::size_t>(j)); }

int KinematicTree::depth() const {
  std::array<int, kNumJoints> d{};
  int best = 0;
  for (int j = 0; j < kNumJoints; ++j) {
    d[j] = parent[j] < 0 ? 0 : d[parent[j]] + 1;
    best = std::max(best, d[j]);
  }
  return best;
}

void KinematicTree::validate() const {
  if (parent[0] != -1) throw ShapeMismatch("joint 0 must be the root");
  for (int j = 1; j < kNumJoints; ++j) {
    if (parent[j] < 0 || parent[j] >= j) {
      std::ostringstream os;
      os << "joint " << j << " has parent " << parent[j] << "; parents must precede children";
      throw ShapeMismatch(os.str());
    }
    if (rest_offset[j].norm() == 0.0) {
      throw ShapeMismatch("zero rest offset on joint " + std::string(joint_name(j)));
    }
  }
}

const KinematicTree& default_tree() {
  static const KinematicTree tree = build_default_tree();
  return tree;
}

Vec3 bone(const KinematicTree& tree, int j, const ShapeParams& shape) {
  return tree.rest_offset[j] + tree.shape_basis[j] * shape.beta;
}

JointPositions forward_kinematics(const KinematicTree& tree,
                                  const std::array<Mat3, kNumJoints>& local,
                                  const ShapeParams& shape, const Vec3& trans) {
  JointPositions pos;
  std::array<Mat3, kNumJoints> global;
  pos[0] = trans;
  global[0] = local[0];
  for (int j = 1; j < kNumJoints; ++j) {
    const int p = tree.parent[j];
    pos[j] = pos[p] + global[p] * bone(tree, j, shape);
    global[j] = global[p] * local[j];
  }
  return pos;
}

JointPositions forward_kinematics(const KinematicTree& tree, const PoseFrame& frame,
                                  const ShapeParams& shape) {
  std::array<Mat3, kNumJoints> local;
  for (int j = 0; j < kNumJoints; ++j) {
    local[j] = rot3::axis_angle_to_rotmat(frame.joints[j]).m;
  }
  return forward_kinematics(tree, local, shape, frame.trans);
}

std::vector<JointPositions> sequence_keypoints(const KinematicTree& tree,
                                               const MotionSequence& seq) {
  std::vector<JointPositions> out(seq.frames.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t t = 0; t < seq.length(); ++t) {
    out[static_cast<std::size_t>(t)] =
        forward_kinematics(tree, seq.frames[static_cast<std::size_t>(t)], seq.shape);
  }
  return out;
}

}  // namespace dmp::skeleton
