#include <benchmark/benchmark.h>

#include <random>

#include <rwrp/chain.hpp>
#include <rwrp/instances.hpp>
#include <rwrp/transfer.hpp>
#include <rwrp/variational.hpp>

namespace {

// Period L x L torus with the four nearest-neighbour steps and memory l.
rwrp::ChainStateSpace torus(std::int64_t L, int memory) {
  std::vector<int> cells(static_cast<std::size_t>(L * L));
  for (std::size_t i = 0; i < cells.size(); ++i) cells[i] = static_cast<int>(i);
  const rwrp::StepSet R(2, {rwrp::Point{1, 0}, rwrp::Point{-1, 0}, rwrp::Point{0, 1}, rwrp::Point{0, -1}});
  return rwrp::ChainStateSpace(rwrp::PeriodicEnvironment({L, L}, cells), R, memory);
}

std::vector<double> random_g(std::size_t n) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<double> g(n);
  for (double& x : g) x = u(rng);
  return g;
}

void BM_PerronRoot(benchmark::State& state) {
  const auto sp = torus(state.range(0), static_cast<int>(state.range(1)));
  const auto g = random_g(sp.size());
  for (auto _ : state) benchmark::DoNotOptimize(rwrp::free_energy_periodic(sp, g).value);
  state.counters["states"] = static_cast<double>(sp.size());
}
BENCHMARK(BM_PerronRoot)->Args({4, 0})->Args({4, 1})->Args({8, 1})->Args({16, 1})->Args({8, 2})->Unit(benchmark::kMillisecond);

void BM_KbarMinimize(benchmark::State& state) {
  const auto sp = torus(state.range(0), 1);
  const auto g = random_g(sp.size());
  for (auto _ : state) benchmark::DoNotOptimize(rwrp::Kbar_minimize(sp, g).value);
  state.counters["states"] = static_cast<double>(sp.size());
}
BENCHMARK(BM_KbarMinimize)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_DualHsharp(benchmark::State& state) {
  const auto sp = torus(state.range(0), 1);
  const auto g = random_g(sp.size());
  for (auto _ : state) benchmark::DoNotOptimize(rwrp::dual_Hsharp(sp, g).value);
  state.counters["states"] = static_cast<double>(sp.size());
}
BENCHMARK(BM_DualHsharp)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_FreeEnergySequence(benchmark::State& state) {
  const auto sp = torus(4, 1);
  const auto g = random_g(sp.size());
  for (auto _ : state) benchmark::DoNotOptimize(rwrp::free_energy_sequence(sp, g, 0, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_FreeEnergySequence)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_LatticeDp(benchmark::State& state) {
  const rwrp::IidEnvironment env(2, {{1.0, 0.5}, {-1.0, 0.5}}, 3);
  const rwrp::StepSet R(2, {rwrp::Point{1, 0}, rwrp::Point{0, 1}});
  const auto V = rwrp::polymer_potential(1.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(rwrp::log_partition(env, R, V.negated(), static_cast<int>(state.range(0))).value());
}
BENCHMARK(BM_LatticeDp)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
