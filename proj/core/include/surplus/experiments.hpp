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

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "surplus/analysis.hpp"
#include "surplus/rng.hpp"

namespace surplus {

enum class Family {
  exp_single_item,        // n agents, one item, values Exp(1)
  iid_unit_demand,        // n x m i.i.d. values (default Exp(1))
  additive_divisible_lb,  // linear curves; grand-bundle value Exp(1) per agent
  single_item_interest_lb,  // Exp(1) weight on item 0, zero elsewhere
};

Family family_from_name(const std::string& name);
std::string family_name(Family family);

enum class ValueDistribution { exponential, uniform };

struct GeneratorSpec {
  Family family{Family::exp_single_item};
  int n{2};
  int m{1};
  std::uint64_t seed{0};
  ValueDistribution values{ValueDistribution::exponential};
};

/// Deterministic given (spec.seed, trial); trials derive their stream as
/// seed xor trial index.
Instance gen_instance(const GeneratorSpec& spec, std::uint64_t trial);

/// Random-instance helpers shared by verifiers, audits and tests. Divisible
/// curves keep breakpoints on the 1/64 grid so grid oracles are exact.
UnitDemand random_unit_demand(int m, CounterRng& rng, double scale = 1.0);
MultiUnit random_multi_unit(int m, CounterRng& rng, double scale = 1.0);
Explicit random_explicit_monotone(int m, CounterRng& rng, double scale = 1.0);
DivisibleSeparable random_divisible(int m, CounterRng& rng, double scale = 1.0);

Instance random_instance_unit_demand(int n, int m, CounterRng& rng);
Instance random_instance_multi_unit(int n, int m, CounterRng& rng);
Instance random_instance_explicit(int n, int m, CounterRng& rng);
Instance random_instance_divisible(int n, int m, CounterRng& rng);

// ---------------------------------------------------------------------------
// Monte-Carlo estimation
// ---------------------------------------------------------------------------

/// Sample statistics over trials. Surplus and welfare are exact per trial
/// (the mechanism distribution is enumerated, never sampled), so all noise
/// comes from the value draws. G statistics are filled for the two-agent
/// single-item family.
struct ExperimentReport {
  long long trials{0};
  double mean_surplus{0.0};
  double se_surplus{0.0};
  double mean_welfare{0.0};  // first-best welfare of the drawn instances
  double se_welfare{0.0};
  double mean_G{0.0};
  double se_G{0.0};
  bool has_G{false};
  double ratio{0.0};  // mean_welfare / mean_surplus

  double ci_surplus() const { return 1.96 * se_surplus; }
  double ci_welfare() const { return 1.96 * se_welfare; }
  double ci_G() const { return 1.96 * se_G; }
};

/// Runs `trials` independent draws; per trial the mechanism distribution is
/// computed exactly and aggregated. Trials run on a thread pool capped by
/// SURPLUS_AUCTIONS_THREADS; block-structured accumulation with a pairwise
/// reduction keeps the output bit-identical for any thread count.
ExperimentReport monte_carlo(const MechanismConfig& config, const GeneratorSpec& spec,
                             long long trials);

/// CSV header "n,m,trials,mean_surplus,se_surplus,mean_welfare,se_welfare,ratio".
std::string experiment_csv_header();
std::string experiment_csv_row(int n, int m, const ExperimentReport& report);

/// One CSV row per entry of n_list; the qualitative growth data for the
/// first-best/surplus ratio.
std::string ratio_sweep(const MechanismConfig& config, Family family,
                        const std::vector<int>& n_list, int m, long long trials,
                        std::uint64_t seed);

/// Effective worker count: hardware concurrency capped by the
/// SURPLUS_AUCTIONS_THREADS environment variable.
int max_threads();

}  // namespace surplus
