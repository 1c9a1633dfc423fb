#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"

#include "dmp/camera.hpp"

namespace dmp::harness {

struct LossWeights {
  double w3d = 300.0;
  double w2d = 300.0;
  double pose = 60.0;
  double beta = 0.06;
  double reg = 60.0;
  double adv = 2.0;

  void validate() const;
};

enum class Variant { baseline, sep_t, sep_t_reg };

std::string_view variant_name(Variant v);
Variant parse_variant(std::string_view s);
inline constexpr Variant kAllVariants[] = {Variant::baseline, Variant::sep_t, Variant::sep_t_reg};

// Everything a run depends on. Serialized as flat `key = value` lines.
struct TrainConfig {
  // data
  std::int64_t clips = 80;  // 80/20 split, so 64 training clips
  std::int64_t frames = 16;
  double noise_px = 3.0;
  double frame_rate = 25.0;
  std::uint64_t data_seed = 7;
  camera::CameraIntrinsics intrinsics;

  // optimization
  std::int64_t iterations = 1000;
  std::int64_t batch = 4;
  std::int64_t real_batch = 4;
  std::int64_t disc_update_every = 5;
  double lr = 1e-4;
  double weight_decay = 1e-4;
  std::uint64_t seed = 1;
  LossWeights weights;
  // Discriminator targets swapped (real toward 0, fake toward 1).
  bool lsgan_literal = false;

  // model
  std::int64_t feature_dim = 128;
  std::int64_t cam_dim = 32;
  std::int64_t hidden_dim = 64;
  double init_scale = 0.85;

  // Worker threads for the parallel kernels; 0 leaves the OpenMP default.
  std::int64_t threads = 0;

  void validate() const;
  // Canonical text: every key in a fixed order, doubles at 17 significant digits.
  std::string to_text() const;
  nlohmann::json to_json() const;
  // FNV-1a of to_text().
  std::uint64_t hash() const;

  // Applies `key = value` lines on top of the current values. Blank lines and
  // lines starting with '#' are skipped. Throws ConfigError on unknown keys,
  // repeated keys or unparsable values.
  void apply_text(std::string_view text);
  void set(std::string_view key, std::string_view value);

  static TrainConfig from_text(std::string_view text);
  static TrainConfig from_file(const std::filesystem::path& path);
};

std::string hex64(std::uint64_t v);

}  // namespace dmp::harness
