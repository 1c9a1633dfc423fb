#pragma once

#include <filesystem>
#include <iosfwd>

#include "dmp/synth.hpp"

// Text formats. Numbers are written with 17 significant digits, so reading a
// file back reproduces every double exactly.
//
//   MSEQ v1 T=<n> J=24 fps=<r>
//   <72 axis-angle values> <3 translation values>      one line per frame
//   BETA <10 values>
//
//   OBS v1 T=<n> J=24 focal=<f> res=<r> seed=<s>
//   <72 values: u v confidence per joint> <48 values: clean u v per joint>
namespace dmp::harness {

void write_motion(std::ostream& out, const skeleton::MotionSequence& m);
skeleton::MotionSequence read_motion(std::istream& in);
void write_motion(const std::filesystem::path& path, const skeleton::MotionSequence& m);
skeleton::MotionSequence read_motion(const std::filesystem::path& path);

void write_observations(std::ostream& out, const synth::TrainingClip& clip);
// Fills observations, gt_keypoints_2d, intrinsics and seed.
void read_observations(std::istream& in, synth::TrainingClip& clip);

// <stem>.mseq plus <stem>.obs.
void write_clip(const std::filesystem::path& stem, const synth::TrainingClip& clip);
// Recomputes the 3D keypoints and weak cameras from the motion.
synth::TrainingClip read_clip(const std::filesystem::path& stem);

// DIR/train/clip_NNNN.*, DIR/eval/clip_NNNN.*, DIR/real/motion_NNNN.mseq.
void save_dataset(const std::filesystem::path& dir, const synth::Dataset& data);
synth::Dataset load_dataset(const std::filesystem::path& dir);

}  // namespace dmp::harness
