// Copyright 2026 The chaosrc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "chaosrc/dynamics.hpp"
#include "chaosrc/esn.hpp"
#include "chaosrc/metrics.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace chaosrc;

ReservoirConfig config(std::size_t n) {
  ReservoirConfig c;
  c.nodes = n;
  c.seed = 7;
  return c;
}

SampledSeries lorenz(double si, std::size_t count) {
  std::mt19937_64 rng(1);
  const auto sys = OdeSystem::lorenz();
  return sample(sys, random_initial_state(sys, rng), si, count);
}

void BM_ReservoirStep(benchmark::State& state) {
  auto r = Reservoir::build(config(static_cast<std::size_t>(state.range(0))));
  const Vec3 u(1.0, -2.0, 20.0);
  for (auto _ : state) {
    r.step(u);
    benchmark::DoNotOptimize(r.state().data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ReservoirStep)->Arg(500)->Arg(1500);

void BM_FitReadout(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto series = lorenz(0.02, 5000);
  for (auto _ : state) {
    auto r = Reservoir::build(config(n));
    benchmark::DoNotOptimize(fit_readout(r, series, 1000, 0.01).w_out().data());
  }
}
BENCHMARK(BM_FitReadout)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_SpectralRadius(benchmark::State& state) {
  auto r = Reservoir::build(config(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(spectral_radius(r.w_esn()));
}
BENCHMARK(BM_SpectralRadius)->Arg(500)->Arg(1500)->Unit(benchmark::kMillisecond);

void BM_Sample(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(lorenz(0.02, 5000).points().data());
}
BENCHMARK(BM_Sample)->Unit(benchmark::kMillisecond);

void BM_Metrics(benchmark::State& state) {
  const auto real = lorenz(0.02, 2000);
  std::mt19937_64 rng(9);
  const auto sys = OdeSystem::lorenz();
  const auto other = sample(sys, random_initial_state(sys, rng), 0.02, 2000);
  for (auto _ : state) {
    const auto grid = GridSpec::covering(real);
    benchmark::DoNotOptimize(kl_divergence(density(real, grid), density(other, grid)));
    benchmark::DoNotOptimize(inner_product(other, sys).value);
    benchmark::DoNotOptimize(amplitude_spectrum(other, Component::Chi).amplitude.data());
  }
}
BENCHMARK(BM_Metrics)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
