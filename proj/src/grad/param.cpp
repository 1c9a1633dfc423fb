#include "dmp/grad/param.hpp"

#include <cmath>

#include "dmp/error.hpp"

namespace dmp::grad {

std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t seed) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

ParamBlock& ParamStore::add(std::string name, Eigen::Index rows, Eigen::Index cols) {
  if (contains(name)) throw ShapeMismatch("duplicate parameter " + name);
  auto p = std::make_unique<ParamBlock>();
  p->name = std::move(name);
  p->values = Matrix::Zero(rows, cols);
  p->grad = Matrix::Zero(rows, cols);
  blocks_.push_back(std::move(p));
  return *blocks_.back();
}

ParamBlock& ParamStore::at(std::string_view name) {
  for (auto& p : blocks_) {
    if (p->name == name) return *p;
  }
  throw ShapeMismatch("no parameter named " + std::string(name));
}

const ParamBlock& ParamStore::at(std::string_view name) const {
  return const_cast<ParamStore*>(this)->at(name);
}

bool ParamStore::contains(std::string_view name) const {
  for (const auto& p : blocks_) {
    if (p->name == name) return true;
  }
  return false;
}

void ParamStore::zero_grad() {
  for (auto& p : blocks_) p->zero_grad();
}

std::size_t ParamStore::scalar_count() const {
  std::size_t n = 0;
  for (const auto& p : blocks_) n += static_cast<std::size_t>(p->values.size());
  return n;
}

std::uint64_t ParamStore::checksum() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& p : blocks_) {
    h = fnv1a(p->name.data(), p->name.size(), h);
    const std::int64_t shape[2] = {p->values.rows(), p->values.cols()};
    h = fnv1a(shape, sizeof(shape), h);
    h = fnv1a(p->values.data(), sizeof(double) * static_cast<std::size_t>(p->values.size()), h);
  }
  return h;
}

void ParamStore::copy_values_from(const ParamStore& other) {
  if (other.size() != size()) throw ShapeMismatch("parameter stores differ in size");
  for (std::size_t i = 0; i < size(); ++i) {
    ParamBlock& dst = *blocks_[i];
    const ParamBlock& src = other[i];
    if (dst.name != src.name || dst.values.rows() != src.values.rows() ||
        dst.values.cols() != src.values.cols()) {
      throw ShapeMismatch("parameter mismatch at " + dst.name + " / " + src.name);
    }
    dst.values = src.values;
  }
}

void init_uniform_fan_in(ParamBlock& p, std::mt19937_64& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(p.values.cols()));
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (Eigen::Index i = 0; i < p.values.size(); ++i) p.values.data()[i] = dist(rng);
}

}  // namespace dmp::grad
