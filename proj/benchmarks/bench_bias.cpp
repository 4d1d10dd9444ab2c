#include <benchmark/benchmark.h>

#include "bpreg/bias.hpp"
#include "bpreg/fit.hpp"
#include "bpreg/simulate.hpp"

namespace {

bpreg::ModelSpec study_spec(int n) {
  bpreg::McConfig cfg;
  cfg.n = n;
  const bpreg::McDesign d = bpreg::make_design(cfg);
  const bpreg::ModelSpec design(Eigen::VectorXd::Ones(n), d.X, d.Z);
  bpreg::RandomStream rng(1);
  return design.with_response(
      bpreg::simulate_response(design, cfg.truth(), rng));
}

void BM_CoxSnellBias(benchmark::State& state) {
  const auto spec = study_spec(static_cast<int>(state.range(0)));
  const Eigen::VectorXd theta = Eigen::VectorXd::Ones(4);
  for (auto _ : state) benchmark::DoNotOptimize(bpreg::cox_snell_bias(spec, theta));
}
BENCHMARK(BM_CoxSnellBias)->Arg(30)->Arg(60)->Arg(500);

void BM_FitMle(benchmark::State& state) {
  const auto spec = study_spec(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(bpreg::fit_mle(spec, {}));
}
BENCHMARK(BM_FitMle)->Arg(30)->Arg(60)->Arg(500);

void BM_FitFirth(benchmark::State& state) {
  const auto spec = study_spec(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(bpreg::fit_firth(spec, {}));
}
BENCHMARK(BM_FitFirth)->Arg(30)->Arg(60);

void BM_Replicates(benchmark::State& state) {
  bpreg::McConfig cfg;
  cfg.m = 50;
  for (auto _ : state) benchmark::DoNotOptimize(bpreg::run_study(cfg));
}
BENCHMARK(BM_Replicates)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
