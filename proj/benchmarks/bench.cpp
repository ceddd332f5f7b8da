#include <benchmark/benchmark.h>

#include "glauber/path_process.hpp"
#include "glauber/point_process.hpp"
#include "glauber/transition_kernel.hpp"

using namespace glauber;

namespace {

IntensityMeasure measure(double z) { return IntensityMeasure::uniform(Window::unit(1)).scaled(z); }

void BM_SamplePoisson(benchmark::State& state) {
  const auto m = measure(static_cast<double>(state.range(0)));
  RngStream rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(sample_poisson(m, rng));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SamplePoisson)->Arg(1)->Arg(100)->Arg(10000);

void BM_KernelSample(benchmark::State& state) {
  const auto m = measure(static_cast<double>(state.range(0)));
  RngStream seed_rng(2);
  const auto gamma = sample_poisson(m, seed_rng);
  const KernelParams params(0.7, m);
  RngStream rng(3);
  for (auto _ : state) benchmark::DoNotOptimize(kernel_sample(gamma, params, rng));
}
BENCHMARK(BM_KernelSample)->Arg(1)->Arg(100)->Arg(10000);

void BM_SimulatePath(benchmark::State& state) {
  const auto m = measure(static_cast<double>(state.range(0)));
  RngStream seed_rng(4);
  const auto gamma = sample_poisson(m, seed_rng);
  RngStream rng(5);
  for (auto _ : state) benchmark::DoNotOptimize(simulate_path(gamma, 2.0, m, rng));
}
BENCHMARK(BM_SimulatePath)->Arg(1)->Arg(100)->Arg(10000);

void BM_CountPmf(benchmark::State& state) {
  const auto m = measure(static_cast<double>(state.range(0)));
  const KernelParams params(0.7, m);
  const auto n0 = static_cast<std::size_t>(state.range(0));
  const std::size_t n_max = minimal_n_max(n0, params, m.window());
  for (auto _ : state) benchmark::DoNotOptimize(count_pmf(n0, params, m.window(), n_max));
}
BENCHMARK(BM_CountPmf)->Arg(1)->Arg(100)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
