#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace dmp::harness {

struct GradCheckOptions {
  std::int64_t frames = 4;
  std::int64_t batch = 2;
  int samples_per_block = 6;
  double step = 1e-5;
  std::uint64_t seed = 11;
  // Model size; the code path is the same as at production size.
  std::int64_t feature_dim = 12;
  std::int64_t cam_dim = 4;
  std::int64_t hidden_dim = 8;
  double jitter = 0.2;
  bool lsgan_literal = false;
};

struct GradCheckEntry {
  std::string loss;   // "generator" or "discriminator"
  std::string block;  // parameter name
  Eigen::Index row = 0, col = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  double rel_err = 0.0;
};

// Per (loss, block): normwise relative error over the sampled entries,
// max |a - n| / max |n|. A single entry whose true derivative is near zero
// has no meaningful relative error at a fixed step, because the central
// difference carries roundoff of order eps * |L| / h; the normwise figure
// measures the block's gradient as a vector instead.
struct GradCheckBlock {
  std::string loss;
  std::string block;
  double max_abs_err = 0.0;
  double max_abs_numeric = 0.0;
  double rel_err = 0.0;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> entries;
  std::vector<GradCheckBlock> blocks;
  // Max normwise error over the blocks of the full generator loss and the
  // discriminator loss.
  double max_rel_err = 0.0;
  // Diagnostics: per-term generator blocks ("generator.<term>") and the
  // entrywise maximum.
  double max_term_rel_err = 0.0;
  double max_entry_rel_err = 0.0;
};

// |a - n| / max(|a|, |n|, floor). The floor keeps entries whose true
// gradient is zero from dividing roundoff by roundoff.
double relative_error(double analytic, double numeric, double floor = 1e-7);

// Central differences of the full generator loss (all six terms, through
// 6D -> rotation matrix, kinematics and projection) and of the
// discriminator loss, at randomly sampled entries of one parameter block
// per component.
GradCheckReport check_gradients(const GradCheckOptions& opts = {});

}  // namespace dmp::harness
