// Copyright 2026 The llns authors
// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "llns/diffusivity.hpp"
#include "llns/fock_operators.hpp"
#include "llns/simulator.hpp"

using namespace llns;

namespace {

ModelParams d3(double N) { return ModelParams::make(3, 1.0, N, 3).with_norm(MollifierNorm::euclidean); }

void BM_RaiseSigma(benchmark::State& st) {
  const auto p = d3(double(st.range(0)) + 0.5);
  const auto s = fock::sigma_kernel(WaveVector(1, 0, 0), 1);
  for (auto _ : st) benchmark::DoNotOptimize(fock::apply_Aplus(s, p));
}
BENCHMARK(BM_RaiseSigma)->DenseRange(2, 8, 2)->Unit(benchmark::kMillisecond);

void BM_RaiseDegreeTwo(benchmark::State& st) {
  const auto p = d3(double(st.range(0)) + 0.5);
  const auto f = fock::apply_Aplus(fock::sigma_kernel(WaveVector(1, 0, 0), 1), p);
  for (auto _ : st) benchmark::DoNotOptimize(fock::apply_Aplus(f, p));
  st.counters["input_tuples"] = double(f.size());
}
BENCHMARK(BM_RaiseDegreeTwo)->DenseRange(2, 6, 2)->Unit(benchmark::kMillisecond);

void BM_LowerDegreeTwo(benchmark::State& st) {
  const auto p = d3(double(st.range(0)) + 0.5);
  const auto f = fock::apply_Aplus(fock::sigma_kernel(WaveVector(1, 0, 0), 1), p);
  for (auto _ : st) benchmark::DoNotOptimize(fock::apply_Aminus(f, p));
}
BENCHMARK(BM_LowerDegreeTwo)->DenseRange(2, 8, 2)->Unit(benchmark::kMillisecond);

void BM_Nonlinearity(benchmark::State& st) {
  sim::SimConfig cfg;
  cfg.model = ModelParams::make(3, 1.0, double(st.range(0)) + 0.5);
  const auto s = sim::sample_invariant_state(cfg, 1);
  sim::Nonlinearity nl(s.layout, st.range(1) ? sim::Convolution::pseudospectral
                                              : sim::Convolution::direct);
  for (auto _ : st) benchmark::DoNotOptimize(nl(s));
  st.counters["modes"] = double(s.layout->size());
}
BENCHMARK(BM_Nonlinearity)
    ->ArgsProduct({{2, 4, 6}, {0, 1}})
    ->ArgNames({"N", "fft"})
    ->Unit(benchmark::kMillisecond);

void BM_ReplacementKernel(benchmark::State& st) {
  const auto p = ModelParams::make(2, 1.0, double(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(diffusivity::replacement_kernel_PN({WaveVector(1, 0)}, p));
}
BENCHMARK(BM_ReplacementKernel)->RangeMultiplier(2)->Range(64, 512)->Unit(benchmark::kMillisecond);

void BM_F2Samples(benchmark::State& st) {
  diffusivity::MonteCarloOptions o;
  o.accepted_samples = 100000;
  o.batches = 10;
  for (auto _ : st) benchmark::DoNotOptimize(diffusivity::f2_d3(o));
  st.SetItemsProcessed(st.iterations() * 100000);
}
BENCHMARK(BM_F2Samples)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
