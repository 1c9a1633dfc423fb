#pragma once

#include <cstddef>

namespace dmp {

// Selects between the OpenMP kernels and their serial counterparts. Both
// produce bitwise-identical results; the serial path exists for testing and
// benchmarking.
enum class ExecPolicy { serial, parallel };

// Column layout for batched sequences: a (rows x frames*batch) matrix stores
// frame t of clip b in column t * batch + b, so one time step is a contiguous
// block of `batch` columns.
struct SeqLayout {
  std::ptrdiff_t frames = 1;
  std::ptrdiff_t batch = 1;

  constexpr std::ptrdiff_t cols() const { return frames * batch; }
  constexpr std::ptrdiff_t col(std::ptrdiff_t t, std::ptrdiff_t b) const {
    return t * batch + b;
  }
};

int max_threads();
void set_threads(int n);

}  // namespace dmp
