// Copyright 2026 The Surplus Auctions Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include "surplus/experiments.hpp"

namespace {

using namespace surplus;

void BM_UnitDemandMatching(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  CounterRng rng(1);
  const Instance inst = random_instance_unit_demand(n, 4, rng);
  const auto profile = as_unit_demand(inst);
  for (auto _ : state) {
    benchmark::DoNotOptimize(max_welfare_unit_demand(profile, 2).welfare);
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_UnitDemandMatching)->RangeMultiplier(2)->Range(2, 32)->Complexity();

void BM_UnitDemandVcg(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  CounterRng rng(2);
  const Instance inst = random_instance_unit_demand(n, 4, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_vcg(inst, SupplyParams{4, 1.0}).welfare);
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_UnitDemandVcg)->RangeMultiplier(2)->Range(2, 32)->Complexity();

void BM_MultiUnitGreedy(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  CounterRng rng(3);
  const Instance inst = random_instance_multi_unit(n, 8, rng);
  const auto profile = as_multi_unit(inst);
  for (auto _ : state) {
    benchmark::DoNotOptimize(max_welfare_multiunit(profile, 8 * 4, 8).welfare);
  }
}
BENCHMARK(BM_MultiUnitGreedy)->RangeMultiplier(2)->Range(2, 32);

void BM_DivisibleSlopeFill(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  CounterRng rng(4);
  const Instance inst = random_instance_divisible(n, 4, rng);
  const auto profile = as_divisible(inst);
  for (auto _ : state) {
    benchmark::DoNotOptimize(max_welfare_divisible(profile, 0.25).welfare);
  }
}
BENCHMARK(BM_DivisibleSlopeFill)->RangeMultiplier(2)->Range(2, 32);

void BM_CopiesMechanism(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  CounterRng rng(5);
  const Instance inst = random_instance_unit_demand(n, 4, rng);
  for (auto _ : state) {
    const MechanismDistribution dist =
        vcg_with_copies(inst, default_copies_rounds(n), SubroutineKind::unit_demand);
    benchmark::DoNotOptimize(dist.branches.size());
  }
}
BENCHMARK(BM_CopiesMechanism)->RangeMultiplier(2)->Range(2, 16);

void BM_MonteCarloTrials(benchmark::State& state) {
  MechanismConfig config;
  config.mechanism = MechanismKind::two_agent_optimal;
  GeneratorSpec spec;
  spec.family = Family::exp_single_item;
  spec.n = 2;
  spec.seed = 6;
  for (auto _ : state) {
    benchmark::DoNotOptimize(monte_carlo(config, spec, state.range(0)).mean_surplus);
  }
}
BENCHMARK(BM_MonteCarloTrials)->Range(256, 4096);

}  // namespace

BENCHMARK_MAIN();
