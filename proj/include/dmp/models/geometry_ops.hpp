#pragma once

#include "dmp/camera.hpp"
#include "dmp/exec.hpp"
#include "dmp/grad/tape.hpp"
#include "dmp/skeleton.hpp"

// Differentiable versions of the rotation, kinematics and camera maps.
// Each column of the batched matrices is one frame of one clip.
namespace dmp::models {

using grad::Matrix;
using grad::Var;

// (6 J) x N raw 6D -> (9 J) x N rotation matrices, column-major per joint.
// Throws DegenerateSixD naming the first offending joint and column.
Var sixd_to_rotmat(Var pose6d);

// (9 J) x N rotation matrices -> (6 J) x N, the first two columns.
Var rotmat_to_sixd(Var rotmats);

// 3 x N weak cameras [s, t_x, t_y] -> 3 x N translations [t_x, t_y, 2f/(res s)].
// Throws NonPositiveScale.
Var weak_camera_translation(Var cam, const camera::CameraIntrinsics& intr);

// Root-relative joint positions (3 J) x N from local rotations (9 J) x N and
// per-clip shape (10 x B).
Var forward_kinematics(Var rotmats, Var beta, SeqLayout layout, const skeleton::KinematicTree& tree);

// Pinhole projection of (3 J) x N points translated by 3 x N, returned in
// normalized image coordinates (2 J) x N. Throws BehindCamera.
Var project_normalized(Var points, Var trans, const camera::CameraIntrinsics& intr);

}  // namespace dmp::models
