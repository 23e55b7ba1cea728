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
#include <variant>
#include <vector>

#include "surplus/valuations.hpp"

namespace surplus {

/// Per-agent bundles of (copied) items; pairwise disjoint.
struct SetAllocation {
  std::vector<CopiedItemSet> bundles;
};

/// Per-agent unit counts for multi-unit profiles.
struct UnitAllocation {
  std::vector<int> counts;
};

/// Per-agent fraction vectors; column sums stay within each item's supply.
struct FractionalAllocation {
  std::vector<FractionVector> fractions;
};

using Allocation = std::variant<SetAllocation, UnitAllocation, FractionalAllocation>;

struct WelfareResult {
  Allocation allocation;
  double welfare{0.0};
};

// ---------------------------------------------------------------------------
// Exact welfare maximization, one solver per valuation class.
// ---------------------------------------------------------------------------

/// Maximum-weight assignment where each agent receives at most one item and
/// item j serves at most item_caps[j] agents. Solved exactly as a min-cost
/// flow; ties broken toward the lexicographically smallest assignment vector
/// (agent-major, lower item index first, any item before none). Copy indices
/// within an item are handed out in agent order.
WelfareResult max_welfare_unit_demand(const std::vector<UnitDemand>& profile,
                                      const std::vector<int>& item_caps);
WelfareResult max_welfare_unit_demand(const std::vector<UnitDemand>& profile,
                                      int copies_per_item);

/// Welfare value only, optionally skipping one agent. Used by VCG terms.
double unit_demand_welfare(const std::vector<UnitDemand>& profile,
                           const std::vector<int>& item_caps, int skip_agent = -1);

/// Greedy over the pooled marginals: optimal for nonincreasing marginals.
/// Ties go to the lower agent index; zero marginals are never allocated.
/// Throws if any agent's marginals increase.
WelfareResult max_welfare_multiunit(const std::vector<MultiUnit>& profile,
                                    long long total_units, int per_agent_cap);

double multiunit_welfare(const std::vector<MultiUnit>& profile, long long total_units,
                         int per_agent_cap, int skip_agent = -1);

/// Exhaustive enumeration over assignments of each available item to an
/// agent or to nobody; exact and deterministic (first maximizer in
/// enumeration order, which makes the assignment lexicographically smallest
/// item-major). Guarded against blowup.
WelfareResult max_welfare_explicit(const std::vector<Explicit>& profile);
WelfareResult max_welfare_explicit(const std::vector<Explicit>& profile,
                                   std::uint32_t item_mask);

double explicit_welfare(const std::vector<Explicit>& profile, std::uint32_t item_mask,
                        int skip_agent = -1);

/// Per item, fills supply by descending segment slope across the q-capped
/// curves; exact for separable concave piecewise-linear valuations. Slope
/// ties go to the lower agent index; zero slopes are never allocated.
WelfareResult max_welfare_divisible(const std::vector<DivisibleSeparable>& profile, double q);
WelfareResult max_welfare_divisible(const std::vector<DivisibleSeparable>& profile, double q,
                                    const FractionVector& supply);

double divisible_welfare(const std::vector<DivisibleSeparable>& profile, double q,
                         const FractionVector& supply, int skip_agent = -1);

// ---------------------------------------------------------------------------
// Profile extraction and benchmarks
// ---------------------------------------------------------------------------

/// Extract a homogeneous profile from an instance; throws on mixed classes.
std::vector<UnitDemand> as_unit_demand(const Instance& inst);
std::vector<MultiUnit> as_multi_unit(const Instance& inst);
std::vector<Explicit> as_explicit(const Instance& inst);
std::vector<DivisibleSeparable> as_divisible(const Instance& inst);

/// Translate an indivisible profile into explicit tables (for oracle
/// cross-checks); m must stay within the explicit-table limit.
Explicit to_explicit(const Valuation& v);

/// Maximum social welfare of the plain instance (single copy of each item,
/// full divisible supply). Dispatches to the class solver; explicit tables
/// serve any remaining indivisible class.
double first_best(const Instance& inst);

/// Welfare with each item duplicated `copies` times (indivisible classes).
double copied_welfare(const Instance& inst, int copies);

/// Re-evaluates an allocation under a profile and returns total value.
double allocation_value(const Instance& inst, const Allocation& alloc);

}  // namespace surplus
