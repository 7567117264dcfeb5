// Serial reference vs OpenMP kernels.
#include <benchmark/benchmark.h>

#include <vector>

#include "cidlab/harness.hpp"
#include "cidlab/limits.hpp"
#include "cidlab/statistics.hpp"

using namespace cidlab;

namespace {

Execution exec_of(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::serial : Execution::parallel;
}

std::vector<double> unit_grid(std::size_t m) {
  std::vector<double> g(m);
  for (std::size_t i = 0; i < m; ++i) g[i] = double(i) / double(m - 1);
  return g;
}

void BM_MapReplicas(benchmark::State& state) {
  const ProcessSpec spec = CompensatedGaussianSpec{1.0, ClosedFormSchedule{0.5}};
  for (auto _ : state) {
    auto v = map_replicas<double>(spec, 1000, 256, 1, exec_of(state),
                                  [](const PathSample& p, Stream&, std::size_t) {
                                    return centered_stat(p, FunctionDescriptor::identity(), Centering::C);
                                  });
    benchmark::DoNotOptimize(v.data());
  }
}
BENCHMARK(BM_MapReplicas)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_CumulativePredictiveCdf(benchmark::State& state) {
  Stream s = open_stream({2, 0, 0});
  const auto path = generate(CompensatedGaussianSpec{1.0, ClosedFormSchedule{0.5}}, 2000, s);
  const auto grid = unit_grid(256);
  for (auto _ : state) {
    auto v = cumulative_predictive_cdf(path, grid, exec_of(state));
    benchmark::DoNotOptimize(v.data());
  }
}
BENCHMARK(BM_CumulativePredictiveCdf)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_GfBridge(benchmark::State& state) {
  const auto F = RandomDistributionFunction::bernoulli_beta(1.0, 1.0);
  std::vector<double> grid(static_cast<std::size_t>(state.range(1)));
  for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = -0.5 + 2.0 * double(i) / double(grid.size() - 1);
  const auto method = state.range(0) == 0 ? BridgeMethod::cholesky : BridgeMethod::markov;
  Stream s = open_stream({3, 0, 0});
  for (auto _ : state) benchmark::DoNotOptimize(sample_gf_supnorm(F, grid, s, method));
}
BENCHMARK(BM_GfBridge)->ArgsProduct({{0, 1}, {64, 512}})->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
