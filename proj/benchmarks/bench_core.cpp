#include <benchmark/benchmark.h>

#include "sbp/energy.hpp"
#include "sbp/fibering.hpp"
#include "sbp/profiles.hpp"
#include "sbp/radial.hpp"

namespace {

using namespace sbp;

void BM_PotentialSolve(benchmark::State& state) {
  const auto grid = make_grid(RadialGrid::default_r_max, static_cast<std::size_t>(state.range(0)));
  const PotentialOperator op(grid, 1.0);
  const auto u = gaussian_profile(grid, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(op.solve(u));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_PotentialSolve)->RangeMultiplier(2)->Range(512, 8192)->Complexity(benchmark::oN);

void BM_PhiValues(benchmark::State& state) {
  const auto grid = make_grid(RadialGrid::default_r_max, static_cast<std::size_t>(state.range(0)));
  const PotentialOperator op(grid, state.range(1) ? 1.0 : 0.0);
  const auto u = gaussian_profile(grid, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(op.phi_values(u));
}
BENCHMARK(BM_PhiValues)->ArgsProduct({{2048}, {0, 1}});

void BM_EnergyWithGradient(benchmark::State& state) {
  const auto grid = make_grid(RadialGrid::default_r_max, static_cast<std::size_t>(state.range(0)));
  const EnergyModel model(grid, ProblemParams{2.5, 1.0, 1.0});
  const auto u = gaussian_profile(grid, 0.5, 3.0);
  for (auto _ : state) benchmark::DoNotOptimize(model.parts(u, state.range(1) != 0));
}
BENCHMARK(BM_EnergyWithGradient)->ArgsProduct({{512, 2048, 8192}, {0, 1}});

void BM_ClassifyFiber(benchmark::State& state) {
  const FiberCoeffs c{1.0, 1.0, 1.0, 2.5};
  const double q = 0.9 * q_of_u(c);
  for (auto _ : state) benchmark::DoNotOptimize(classify_fiber(c, q));
}
BENCHMARK(BM_ClassifyFiber);

}  // namespace

BENCHMARK_MAIN();
