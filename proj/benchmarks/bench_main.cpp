#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "lemnika/atomizer.hpp"
#include "lemnika/classical1d.hpp"
#include "lemnika/cpoly.hpp"
#include "lemnika/equipartition.hpp"
#include "lemnika/homlift.hpp"
#include "lemnika/mamass.hpp"
#include "lemnika/measure.hpp"

using namespace lemnika;

namespace {

FactoredPoly ring(int n, double r) {
  FactoredPoly f;
  for (int j = 0; j < n; ++j) f.zeros.push_back({std::polar(r, 2.0 * std::numbers::pi * (j + 0.3) / n), 1});
  return f;
}

void BM_log_abs_eval(benchmark::State& state) {
  const FactoredPoly f = ring(static_cast<int>(state.range(0)), 1.3);
  for (auto _ : state) benchmark::DoNotOptimize(log_abs_eval(f, cplx{0.4, 0.7}));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_log_abs_eval)->RangeMultiplier(4)->Range(16, 4096)->Complexity();

void BM_roots(benchmark::State& state) {
  const CoeffPoly p = expand(ring(static_cast<int>(state.range(0)), 1.1));
  for (auto _ : state) benchmark::DoNotOptimize(roots(p));
}
BENCHMARK(BM_roots)->Arg(20)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_potential_eval(benchmark::State& state) {
  const PlanarMeasure mu = ball_slice_measure();
  double x = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(potential_eval(mu, cplx{x, 0.37}));
    x = x > 3.0 ? 0.1 : x + 0.013;
  }
}
BENCHMARK(BM_potential_eval)->Unit(benchmark::kMicrosecond);

void BM_partition(benchmark::State& state) {
  const PlanarMeasure mu = ball_slice_measure();
  const int k = static_cast<int>(state.range(0));
  const TailParameters t = tail_parameters_for_pieces(mu, 11);
  for (auto _ : state) benchmark::DoNotOptimize(partition(mu, t.R, k, 11));
}
BENCHMARK(BM_partition)->Arg(8)->Arg(40)->Arg(160)->Unit(benchmark::kMillisecond);

void BM_atomize_fixed(benchmark::State& state) {
  const PlanarMeasure mu = ball_slice_measure();
  for (auto _ : state) benchmark::DoNotOptimize(atomize_fixed(mu, 8, 41));
}
BENCHMARK(BM_atomize_fixed)->Unit(benchmark::kMillisecond);

void BM_solve_common_level_sets(benchmark::State& state) {
  const ModelPair mp = model_pair(CircledSetModel::ball(), static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(solve_common_level_sets(mp.lifted));
}
BENCHMARK(BM_solve_common_level_sets)->Arg(6)->Arg(12)->Arg(24)->Unit(benchmark::kMillisecond);

void BM_sandwich_check(benchmark::State& state) {
  const ModelPair mp = model_pair(CircledSetModel::ball(), 12);
  for (auto _ : state) benchmark::DoNotOptimize(sandwich_check(CircledSetModel::ball(), mp.lifted, 0.25));
}
BENCHMARK(BM_sandwich_check)->Unit(benchmark::kMillisecond);

void BM_fekete(benchmark::State& state) {
  const auto I = CompactSet1D::interval(-1.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(fekete_points(I, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_fekete)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
