#include "dmp/grad/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>

#include "dmp/error.hpp"

namespace dmp::grad {
namespace {

constexpr std::array<char, 8> kMagic = {'D', 'M', 'P', 'C', 'K', 'P', 'T', '1'};

void put_u64(std::ostream& os, std::uint64_t v) {
  std::array<char, 8> b{};
  for (int i = 0; i < 8; ++i) b[static_cast<std::size_t>(i)] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(b.data(), 8);
}

std::uint64_t get_u64(std::istream& is) {
  std::array<unsigned char, 8> b{};
  is.read(reinterpret_cast<char*>(b.data()), 8);
  if (!is) throw FormatError("truncated checkpoint");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[static_cast<std::size_t>(i)];
  return v;
}

nlohmann::json read_manifest(std::istream& is) {
  std::array<char, 8> magic{};
  is.read(magic.data(), 8);
  if (!is || magic != kMagic) throw FormatError("not a checkpoint file");
  const std::uint64_t n = get_u64(is);
  std::string text(n, '\0');
  is.read(text.data(), static_cast<std::streamsize>(n));
  if (!is) throw FormatError("truncated manifest");
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad manifest: ") + e.what());
  }
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open " + path.string());
  return is;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const ParamStore& params,
                     const nlohmann::json& meta) {
  nlohmann::json manifest;
  manifest["meta"] = meta;
  manifest["blocks"] = nlohmann::json::array();
  for (std::size_t i = 0; i < params.size(); ++i) {
    manifest["blocks"].push_back({{"name", params[i].name},
                                  {"rows", params[i].values.rows()},
                                  {"cols", params[i].values.cols()}});
  }
  const std::string text = manifest.dump();

  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw FormatError("cannot write " + path.string());
  os.write(kMagic.data(), 8);
  put_u64(os, text.size());
  os.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Matrix& v = params[i].values;
    for (Eigen::Index k = 0; k < v.size(); ++k) put_u64(os, std::bit_cast<std::uint64_t>(v.data()[k]));
  }
  if (!os) throw FormatError("write failed for " + path.string());
}

nlohmann::json read_checkpoint_meta(const std::filesystem::path& path) {
  std::ifstream is = open_in(path);
  return read_manifest(is).at("meta");
}

nlohmann::json load_checkpoint(const std::filesystem::path& path, ParamStore& params) {
  std::ifstream is = open_in(path);
  const nlohmann::json manifest = read_manifest(is);
  const auto& blocks = manifest.at("blocks");
  if (blocks.size() != params.size()) throw FormatError("block count mismatch");
  for (std::size_t i = 0; i < params.size(); ++i) {
    ParamBlock& p = params[i];
    const auto& b = blocks[i];
    if (b.at("name").get<std::string>() != p.name || b.at("rows").get<Eigen::Index>() != p.values.rows() ||
        b.at("cols").get<Eigen::Index>() != p.values.cols()) {
      throw FormatError("block " + std::to_string(i) + " does not match " + p.name);
    }
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    Matrix& v = params[i].values;
    for (Eigen::Index k = 0; k < v.size(); ++k) v.data()[k] = std::bit_cast<double>(get_u64(is));
  }
  return manifest.at("meta");
}

}  // namespace dmp::grad
