#include "hvi/pipeline.hpp"

#include <benchmark/benchmark.h>

namespace {

hvi::SolverConfig config_with(std::size_t n_trunc) {
  hvi::SolverConfig cfg;
  cfg.n_trunc = n_trunc;
  return cfg;
}

void BM_BuildBasis(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(hvi::build_basis(hvi::DomainSpec::interval(hvi::kPi), n));
}
BENCHMARK(BM_BuildBasis)->Arg(66)->Arg(258);

void BM_BuildBasisRectangle(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(hvi::build_basis(hvi::DomainSpec::rectangle(hvi::kPi, 2.0), n));
}
BENCHMARK(BM_BuildBasisRectangle)->Arg(64)->Arg(256);

void BM_Reduce(benchmark::State& state) {
  const auto ctx = hvi::make_context(config_with(static_cast<std::size_t>(state.range(0))));
  hvi::SpectralVector u = ctx->zero();
  u[ctx->decomposition().hbar0[0]] = 0.3;
  u[ctx->decomposition().hbar0[1]] = -4.6;
  for (auto _ : state) benchmark::DoNotOptimize(hvi::reduce(*ctx, u));
}
BENCHMARK(BM_Reduce)->Arg(16)->Arg(64)->Arg(256)->Unit(benchmark::kMicrosecond);

void BM_ReducedEvalWarm(benchmark::State& state) {
  const auto ctx = hvi::make_context(config_with(64));
  hvi::SpectralVector u = ctx->zero();
  u[ctx->decomposition().hbar0[1]] = -4.6;
  const auto warm = hvi::reduce(*ctx, u).theta;
  u[ctx->decomposition().hbar0[0]] = 1e-3;
  for (auto _ : state) benchmark::DoNotOptimize(hvi::reduced_eval(*ctx, u, {}, &warm));
}
BENCHMARK(BM_ReducedEvalWarm)->Unit(benchmark::kMicrosecond);

void BM_SolveDefault(benchmark::State& state) {
  const hvi::SolverConfig cfg = config_with(64);
  for (auto _ : state) benchmark::DoNotOptimize(hvi::solve_hvi(cfg));
}
BENCHMARK(BM_SolveDefault)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
