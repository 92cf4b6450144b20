#include <benchmark/benchmark.h>

#include <rwrp/sampler.hpp>

namespace {

const rwrp::IidEnvironment kEnv(2, {{1.0, 0.5}, {-1.0, 0.5}}, 11);
const rwrp::StepSet kDirected(2, {rwrp::Point{1, 0}, rwrp::Point{1, 1}});

void BM_SamplePaths(benchmark::State& state) {
  const auto V = rwrp::polymer_potential(1.0);
  rwrp::SamplerOptions opts;
  opts.threads = static_cast<std::size_t>(state.range(1));
  for (auto _ : state) {
    auto batch = rwrp::sample_paths(kEnv, kDirected, V, static_cast<int>(state.range(0)), 10000, 5, opts);
    benchmark::DoNotOptimize(batch.flat.data());
  }
  state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(BM_SamplePaths)->Args({50, 1})->Args({200, 1})->Args({200, 4})->Unit(benchmark::kMillisecond);

void BM_McFreeEnergy(benchmark::State& state) {
  const auto V = rwrp::polymer_potential(1.0);
  rwrp::McOptions opts;
  opts.threads = static_cast<std::size_t>(state.range(1));
  for (auto _ : state)
    benchmark::DoNotOptimize(rwrp::mc_free_energy(kEnv, kDirected, V, static_cast<int>(state.range(0)), 20, 9, opts).mean);
}
BENCHMARK(BM_McFreeEnergy)->Args({200, 1})->Args({200, 4})->Unit(benchmark::kMillisecond);

}  // namespace
