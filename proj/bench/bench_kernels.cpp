#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "keyguess/compression.hpp"
#include "keyguess/kernels.hpp"
#include "keyguess/sources.hpp"

using namespace keyguess;

namespace {

std::vector<double> random_pmf(std::size_t size) {
  std::mt19937_64 rng(7);
  std::gamma_distribution<double> gamma(1.0, 1.0);
  std::vector<double> p(size);
  double z = 0.0;
  for (double& v : p) z += (v = gamma(rng) + 1e-3);
  for (double& v : p) v /= z;
  return p;
}

void BM_SumSerial(benchmark::State& state) {
  const auto p = random_pmf(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(kernels::serial::sum(p.size(), [&](std::size_t i) { return std::sqrt(p[i]); }));
}

void BM_SumOmp(benchmark::State& state) {
  const auto p = random_pmf(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(kernels::omp::sum(p.size(), [&](std::size_t i) { return std::sqrt(p[i]); }));
}

void BM_LogSumExpSerial(benchmark::State& state) {
  const auto p = random_pmf(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(
        kernels::serial::log_sum_exp(p.size(), [&](std::size_t i) { return 0.5 * std::log(p[i]); }));
}

void BM_LogSumExpOmp(benchmark::State& state) {
  const auto p = random_pmf(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(
        kernels::omp::log_sum_exp(p.size(), [&](std::size_t i) { return 0.5 * std::log(p[i]); }));
}

void BM_Materialize(benchmark::State& state) {
  const SourceModel m = IidSource{Pmf({0.7, 0.2, 0.1})};
  for (auto _ : state) benchmark::DoNotOptimize(materialize(m, static_cast<unsigned>(state.range(0))));
}

void BM_RelaxedOptimum(benchmark::State& state) {
  const auto p = random_pmf(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(relaxed_optimum(p, 12, 1.0, 0.5));
}

}  // namespace

BENCHMARK(BM_SumSerial)->Range(1 << 12, 1 << 22);
BENCHMARK(BM_SumOmp)->Range(1 << 12, 1 << 22);
BENCHMARK(BM_LogSumExpSerial)->Range(1 << 12, 1 << 22);
BENCHMARK(BM_LogSumExpOmp)->Range(1 << 12, 1 << 22);
BENCHMARK(BM_Materialize)->DenseRange(8, 16, 4);
BENCHMARK(BM_RelaxedOptimum)->Range(1 << 12, 1 << 20);

BENCHMARK_MAIN();
