#include <benchmark/benchmark.h>

#include "eprenorm/charpoly.hpp"
#include "eprenorm/embedcheck.hpp"
#include "eprenorm/epsolver.hpp"
#include "eprenorm/grid.hpp"
#include "eprenorm/response.hpp"
#include "eprenorm/spectral.hpp"
#include "eprenorm/units.hpp"

using namespace eprenorm;

namespace {

const SystemParams& params() {
  static const SystemParams p = representative_params();
  return p;
}

const DriveParams& ep_drive() {
  static const DriveParams d = solve_exact_ep(params()).drive();
  return d;
}

void BM_CubicRoots(benchmark::State& state) {
  const CubicPoly c = char_cubic(params(), ep_drive());
  for (auto _ : state) benchmark::DoNotOptimize(cubic_roots(c));
}
BENCHMARK(BM_CubicRoots);

void BM_SolveExactEp(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(solve_exact_ep(params()));
}
BENCHMARK(BM_SolveExactEp);

void BM_Eigensystem(benchmark::State& state) {
  const DriftMatrix m = drift_nonmarkovian(params(), markovian_ep(params()).drive());
  for (auto _ : state) benchmark::DoNotOptimize(eigensystem(m));
}
BENCHMARK(BM_Eigensystem);

void BM_SweepEigs(benchmark::State& state) {
  const auto g = LinearGrid(units::khz_to_angular(40.0), units::khz_to_angular(60.0), 401).values();
  for (auto _ : state) benchmark::DoNotOptimize(sweep_eigs(params(), ep_drive().delta(), g, {.threads = 1}));
}
BENCHMARK(BM_SweepEigs)->Unit(benchmark::kMillisecond);

void BM_Spectrum(benchmark::State& state) {
  const SystemParams& p = params();
  const auto w = LinearGrid(p.omega_m() - 25 * p.gamma(), p.omega_m() + 25 * p.gamma(), 4001).values();
  for (auto _ : state) benchmark::DoNotOptimize(spectrum(p, ep_drive(), w, MechanicalModel::NonMarkovian, 1));
}
BENCHMARK(BM_Spectrum)->Unit(benchmark::kMillisecond);

void BM_DipMetrics(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(dip_metrics(params(), ep_drive(), MechanicalModel::NonMarkovian));
}
BENCHMARK(BM_DipMetrics)->Unit(benchmark::kMillisecond);

void BM_CompareEmbeddings(benchmark::State& state) {
  const SystemParams& p = params();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        compare_embeddings(p, ep_drive(), {cplx{1.0, 0.0}, cplx{}}, 20.0 / p.kappa(), 1.0 / (100 * p.omega_m())));
  }
}
BENCHMARK(BM_CompareEmbeddings)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
