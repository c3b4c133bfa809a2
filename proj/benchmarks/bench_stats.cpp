#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "hfuv/kernel.hpp"
#include "hfuv/law_sampler.hpp"
#include "hfuv/limits.hpp"
#include "hfuv/path.hpp"
#include "hfuv/stats.hpp"

using namespace hfuv;

namespace {

std::vector<double> gaussian_increments(std::size_t n) {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> g(0.0, 1.0 / std::sqrt(static_cast<double>(n)));
  std::vector<double> dx(n);
  for (auto& x : dx) x = g(rng);
  return dx;
}

ModelConfig jump_model() {
  ModelConfig m;
  m.jumps.intensity = 5.0;
  m.jumps.max_abs = 1.5;
  m.jumps.size = AtomList{{{1.0, 0.25}, {-1.0, 0.25}, {1.5, 0.25}, {-1.5, 0.25}}};
  return m;
}

void BM_VStat(benchmark::State& state, const KernelSpec& k, Strategy s) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto dx = gaussian_increments(n);
  for (auto _ : state) benchmark::DoNotOptimize(v_stat(IncrementData{dx, n}, k, 1.0, s).value);
  state.SetComplexityN(state.range(0));
}

const KernelSpec kPower2 = power_kernel(Regime::JumpCLT, 2, {4.0, 4.0});
const KernelSpec kGrid = grid_test_kernel(1.0);
const KernelSpec kPower3 = power_kernel(Regime::JumpCLT, 3, {4.0, 4.0, 4.0});

void BM_Power2_Factorized(benchmark::State& s) { BM_VStat(s, kPower2, Strategy::Factorized); }
void BM_Power2_Nested(benchmark::State& s) { BM_VStat(s, kPower2, Strategy::Nested); }
void BM_Grid_Factorized(benchmark::State& s) { BM_VStat(s, kGrid, Strategy::Factorized); }
void BM_Grid_Nested(benchmark::State& s) { BM_VStat(s, kGrid, Strategy::Nested); }
void BM_Power3_Factorized(benchmark::State& s) { BM_VStat(s, kPower3, Strategy::Factorized); }
void BM_Power3_Nested(benchmark::State& s) { BM_VStat(s, kPower3, Strategy::Nested); }

void BM_SimulatePath(benchmark::State& state) {
  const auto cfg = jump_model();
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(simulate_path(cfg, static_cast<std::size_t>(state.range(0)), 1.0, ++seed));
}

void BM_SampleUJump(benchmark::State& state) {
  auto cfg = jump_model();
  cfg.jumps.fixed_count = static_cast<std::size_t>(state.range(0));
  const auto path = simulate_path(cfg, 4096, 1.0, 3);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    const auto aug = augment(path, ++seed);
    benchmark::DoNotOptimize(sample_u_jump(path, kPower2, aug, 1.0).value);
  }
}

}  // namespace

BENCHMARK(BM_Power2_Factorized)->RangeMultiplier(4)->Range(64, 1 << 20)->Complexity();
BENCHMARK(BM_Power2_Nested)->RangeMultiplier(4)->Range(64, 4096)->Complexity();
BENCHMARK(BM_Grid_Factorized)->RangeMultiplier(4)->Range(64, 1 << 20)->Complexity();
BENCHMARK(BM_Grid_Nested)->RangeMultiplier(4)->Range(64, 4096)->Complexity();
BENCHMARK(BM_Power3_Factorized)->RangeMultiplier(4)->Range(64, 1 << 16)->Complexity();
BENCHMARK(BM_Power3_Nested)->Arg(64)->Arg(128);
BENCHMARK(BM_SimulatePath)->Arg(4096)->Arg(65536);
BENCHMARK(BM_SampleUJump)->Arg(5)->Arg(20);
BENCHMARK_MAIN();
