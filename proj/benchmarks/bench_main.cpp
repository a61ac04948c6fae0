#include <benchmark/benchmark.h>

#include "l1qr/diagnostics.hpp"
#include "l1qr/estimators.hpp"
#include "l1qr/lp_solver.hpp"
#include "l1qr/penalty.hpp"
#include "l1qr/simulation.hpp"

namespace {

using namespace l1qr;

Dataset design(Index n, Index p, double rho = 0.0) {
  DesignSpec spec;
  spec.n = n;
  spec.p = p;
  spec.rho = rho;
  spec.seed = 17;
  return generate_design(spec, 0).data;
}

// args: n, p
void BM_SolveCalibrated(benchmark::State& state) {
  const Dataset d = design(state.range(0), state.range(1));
  const auto u = QuantileIndex(0.5);
  const double lambda = calibrate_penalty(d, QuantileGrid::single(0.5), 0.1, 1.0, 200, 3).lambda0;
  for (auto _ : state) {
    QuantileFit fit = solve_qr_lp(d, u, lambda);
    benchmark::DoNotOptimize(fit.beta.beta.data());
  }
}
BENCHMARK(BM_SolveCalibrated)->Args({100, 200})->Args({200, 500})->Args({200, 1000})->Unit(benchmark::kMillisecond);

void BM_SolveSmallLambda(benchmark::State& state) {
  const Dataset d = design(state.range(0), state.range(1));
  for (auto _ : state) {
    QuantileFit fit = solve_qr_lp(d, QuantileIndex(0.5), 1.0);
    benchmark::DoNotOptimize(fit.beta.beta.data());
  }
}
BENCHMARK(BM_SolveSmallLambda)->Args({100, 200})->Unit(benchmark::kMillisecond);

// Single u takes the matrix-product path, a range takes the sweep.
void BM_PivotalSingle(benchmark::State& state) {
  const Dataset d = design(state.range(0), state.range(1));
  for (auto _ : state) {
    auto s = simulate_pivotal_lambda(d, QuantileGrid::single(0.5), 200, 1, 1);
    benchmark::DoNotOptimize(s.data());
  }
}
BENCHMARK(BM_PivotalSingle)->Args({200, 1000})->Unit(benchmark::kMillisecond);

void BM_PivotalRange(benchmark::State& state) {
  const Dataset d = design(state.range(0), state.range(1));
  const QuantileGrid grid({0.1, 0.5, 0.9}, 0.1, 0.9);
  for (auto _ : state) {
    auto s = simulate_pivotal_lambda(d, grid, 50, 1, 1);
    benchmark::DoNotOptimize(s.data());
  }
}
BENCHMARK(BM_PivotalRange)->Args({100, 200})->Unit(benchmark::kMillisecond);

void BM_ProcessFit(benchmark::State& state) {
  const Dataset d = design(100, 200);
  const QuantileGrid grid({0.25, 0.5, 0.75});
  for (auto _ : state) {
    ProcessFit f = fit_l1_qr_process(d, grid, 40.0, {}, 1);
    benchmark::DoNotOptimize(f.fits.data());
  }
}
BENCHMARK(BM_ProcessFit)->Unit(benchmark::kMillisecond);

void BM_SparseEigenExact(benchmark::State& state) {
  const Dataset d = design(200, 40, 0.5);
  const Matrix G = empirical_gram(d);
  for (auto _ : state) {
    auto r = max_sparse_eigenvalue(G, state.range(0));
    benchmark::DoNotOptimize(r.value);
  }
}
BENCHMARK(BM_SparseEigenExact)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
