#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace dmp::grad {

using Matrix = Eigen::MatrixXd;

// A named learnable tensor and its gradient accumulator.
struct ParamBlock {
  std::string name;
  Matrix values;
  Matrix grad;

  void zero_grad() { grad.setZero(); }
};

// Owns ParamBlocks with stable addresses, in insertion order. The order is
// part of the checkpoint format.
class ParamStore {
 public:
  ParamBlock& add(std::string name, Eigen::Index rows, Eigen::Index cols);

  ParamBlock& at(std::string_view name);
  const ParamBlock& at(std::string_view name) const;
  bool contains(std::string_view name) const;

  std::size_t size() const { return blocks_.size(); }
  ParamBlock& operator[](std::size_t i) { return *blocks_[i]; }
  const ParamBlock& operator[](std::size_t i) const { return *blocks_[i]; }

  void zero_grad();
  std::size_t scalar_count() const;

  // FNV-1a over names, shapes and value bytes.
  std::uint64_t checksum() const;

  // Copies values from another store with identical names and shapes.
  void copy_values_from(const ParamStore& other);

 private:
  std::vector<std::unique_ptr<ParamBlock>> blocks_;
};

// Uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)].
void init_uniform_fan_in(ParamBlock& p, std::mt19937_64& rng);

std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace dmp::grad
