#include <benchmark/benchmark.h>

#include "wcons/barycenter.hpp"
#include "wcons/simulation.hpp"
#include "wcons/trimming.hpp"

namespace {

using namespace wcons;

void BM_SymEigen(benchmark::State& state) {
  Rng rng(1);
  const SpdMatrix m = random_spd(static_cast<std::size_t>(state.range(0)), 1e3, rng);
  for (auto _ : state) benchmark::DoNotOptimize(sym_eigen(m.sym()));
}
BENCHMARK(BM_SymEigen)->Arg(2)->Arg(5)->Arg(10)->Arg(30);

void BM_FixedPointBarycenter(benchmark::State& state) {
  Rng rng(2);
  const auto d = static_cast<std::size_t>(state.range(0));
  const auto k = static_cast<std::size_t>(state.range(1));
  const WeightedEnsemble ens = random_ensemble(k, d, 1e4, 1.0, false, rng);
  for (auto _ : state) benchmark::DoNotOptimize(fixed_point_barycenter(ens));
}
BENCHMARK(BM_FixedPointBarycenter)->Args({2, 10})->Args({5, 50})->Args({10, 50})->Unit(benchmark::kMillisecond);

void BM_TrimmedBarycenter(benchmark::State& state) {
  Rng rng(3);
  const auto k = static_cast<std::size_t>(state.range(0));
  const WeightedEnsemble ens = random_ensemble(k, 2, 10.0, 2.0, true, rng);
  TrimConfig cfg;
  cfg.alpha = 0.2;
  cfg.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(trimmed_barycenter(ens, cfg));
}
BENCHMARK(BM_TrimmedBarycenter)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_HospitalExperiment(benchmark::State& state) {
  HospitalConfig cfg;
  cfg.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(hospital_experiment(cfg));
}
BENCHMARK(BM_HospitalExperiment)->Unit(benchmark::kMillisecond)->Iterations(3);

}  // namespace
BENCHMARK_MAIN();
