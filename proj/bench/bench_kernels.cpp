#include <benchmark/benchmark.h>

#include "carath/bounds.hpp"
#include "carath/field.hpp"
#include "carath/kernels.hpp"
#include "carath/topology.hpp"

using namespace carath;

namespace {

// F_{4k} - G from the ramp example on I = [0, 4], j = 3, theta(s) = 2s.
FieldDescriptor ramp_gap() {
  const auto ex = ramp_example();
  return difference(translate(ex.F, 8.0), ex.G);
}

void BM_CurveDp(benchmark::State& state, bool parallel) {
  const FieldDescriptor f = ramp_gap();
  const Resolution res{static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1))};
  const auto pb = make_curve_problem(f, {0.0, 4.0}, 3, Modulus::linear(2.0), res);
  for (auto _ : state) {
    auto r = parallel ? kernels::omp::curve_dp(pb) : kernels::serial::curve_dp(pb);
    benchmark::DoNotOptimize(r.best_cost);
  }
}

void BM_LatticeSup(benchmark::State& state, bool parallel) {
  // Product of two shifts: no structural sup, so the lattice path runs.
  const FieldDescriptor f(expr::product(expr::shift(ScalarFunction::ramp_wave(), {0.5}),
                                        expr::shift(ScalarFunction::ramp_integral(), {-0.25})),
                          1, 1.0, ClassClaim::SC);
  std::vector<double> times(static_cast<std::size_t>(state.range(0)));
  for (std::size_t k = 0; k < times.size(); ++k) times[k] = 8.0 * static_cast<double>(k) / static_cast<double>(times.size());
  const auto lattice = ball_lattice(1, 3.0, 256);
  for (auto _ : state) {
    auto v = parallel ? kernels::omp::lattice_sup(f, times, lattice) : kernels::serial::lattice_sup(f, times, lattice);
    benchmark::DoNotOptimize(v.data());
  }
}

}  // namespace

BENCHMARK_CAPTURE(BM_CurveDp, serial, false)->Args({32, 31})->Args({64, 61})->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_CurveDp, omp, true)->Args({32, 31})->Args({64, 61})->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_LatticeSup, serial, false)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_LatticeSup, omp, true)->Arg(1024)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
