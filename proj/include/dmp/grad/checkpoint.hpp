#pragma once

#include <filesystem>

#include "json.hpp"

#include "dmp/grad/param.hpp"

namespace dmp::grad {

// Binary checkpoint layout:
//   8 bytes   magic "DMPCKPT1"
//   8 bytes   manifest length N, little-endian u64
//   N bytes   manifest JSON: {"meta": {...}, "blocks": [{"name", "rows", "cols"}, ...]}
//   payload   every block's values in manifest order, column-major,
//             little-endian IEEE-754 binary64
// Writing the same store and metadata twice yields identical bytes.
void save_checkpoint(const std::filesystem::path& path, const ParamStore& params,
                     const nlohmann::json& meta);

// Reads metadata only.
nlohmann::json read_checkpoint_meta(const std::filesystem::path& path);

// Fills `params`, whose names and shapes must match the manifest exactly.
// Returns the metadata. Throws FormatError.
nlohmann::json load_checkpoint(const std::filesystem::path& path, ParamStore& params);

}  // namespace dmp::grad
