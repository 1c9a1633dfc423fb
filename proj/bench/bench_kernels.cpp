// Fused temporal bank (serial and OpenMP) against the tape-composed
// reference, and the per-frame Procrustes kernel in both policies.

#include <benchmark/benchmark.h>

#include <random>

#include "dmp/grad/ops.hpp"
#include "dmp/metrics.hpp"
#include "dmp/models/temporal_bank.hpp"
#include "dmp/skeleton.hpp"

using namespace dmp;
using grad::Matrix;
using grad::Tape;
using grad::Var;

namespace {

constexpr int kJoints = skeleton::kNumJoints;

struct BankFixture {
  grad::ParamStore store;
  std::vector<models::TemporalEncoder> enc;
  Matrix x, w;
  SeqLayout layout;

  BankFixture(Eigen::Index fd, Eigen::Index hd, SeqLayout l) : layout(l) {
    std::mt19937_64 rng(1);
    for (int j = 0; j < kJoints; ++j) {
      enc.push_back(models::TemporalEncoder::create(store, "j" + std::to_string(j), fd, hd));
      enc.back().init(rng);
    }
    std::normal_distribution<double> n;
    x = Matrix::NullaryExpr(kJoints * fd, l.cols(), [&] { return n(rng); });
    w = Matrix::NullaryExpr(kJoints * fd, l.cols(), [&] { return n(rng); });
  }
};

// Forward plus backward through all 24 encoders.
void run_bank(benchmark::State& state, int mode) {
  const Eigen::Index fd = state.range(0), hd = state.range(1);
  BankFixture f(fd, hd, {16, 4});
  for (auto _ : state) {
    Tape tape;
    const Var in = tape.leaf(f.x);
    Var out;
    if (mode == 0) {
      std::vector<Var> parts;
      for (int j = 0; j < kJoints; ++j) {
        parts.push_back(models::temporal_reference(tape, f.enc[j], grad::rows(in, j * fd, fd), f.layout));
      }
      out = grad::vconcat(parts);
    } else {
      out = models::temporal_bank(tape, f.enc, in, f.layout, mode == 1 ? ExecPolicy::serial : ExecPolicy::parallel);
    }
    tape.backward(grad::sum(grad::hadamard(out, tape.constant(f.w))));
    benchmark::DoNotOptimize(tape.grad(in).data());
    f.store.zero_grad();
  }
}

void BM_TemporalTapeReference(benchmark::State& s) { run_bank(s, 0); }
void BM_TemporalFusedSerial(benchmark::State& s) { run_bank(s, 1); }
void BM_TemporalFusedParallel(benchmark::State& s) { run_bank(s, 2); }

metrics::JointTrajectory random_traj(std::mt19937_64& rng, std::ptrdiff_t T) {
  std::normal_distribution<double> n(0.0, 300.0);
  metrics::JointTrajectory out(T, kJoints);
  for (std::ptrdiff_t t = 0; t < T; ++t)
    for (int j = 0; j < kJoints; ++j) out.at(t, j) = Eigen::Vector3d(n(rng), n(rng), n(rng));
  return out;
}

void run_pa(benchmark::State& state, ExecPolicy policy) {
  std::mt19937_64 rng(2);
  const auto p = random_traj(rng, state.range(0)), g = random_traj(rng, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(metrics::pa_mpjpe(p, g, policy));
}

void BM_PaMpjpeSerial(benchmark::State& s) { run_pa(s, ExecPolicy::serial); }
void BM_PaMpjpeParallel(benchmark::State& s) { run_pa(s, ExecPolicy::parallel); }

}  // namespace

BENCHMARK(BM_TemporalTapeReference)->Args({32, 16})->Args({128, 64})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TemporalFusedSerial)->Args({32, 16})->Args({128, 64})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TemporalFusedParallel)->Args({32, 16})->Args({128, 64})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PaMpjpeSerial)->Arg(16)->Arg(256)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_PaMpjpeParallel)->Arg(16)->Arg(256)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
