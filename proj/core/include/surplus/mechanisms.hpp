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

#include <optional>
#include <string>
#include <vector>

#include "surplus/rational.hpp"
#include "surplus/vcg.hpp"

namespace surplus {

/// A bundle a lottery can serve: an indivisible item set or a fraction
/// vector, matching the instance kind.
using LotteryBundle = std::variant<ItemSet, FractionVector>;

/// One (probability, bundle, payment) triple; the payment is charged only
/// when the bundle is served. The complement (empty bundle, zero payment)
/// is implicit.
struct LotteryTriple {
  Rational prob;
  LotteryBundle bundle;
  double payment{0.0};
};

/// Marginal lottery of a single agent. Marginals fully determine surplus,
/// welfare and utilities, which are all linear in the lottery.
struct AgentLottery {
  std::vector<LotteryTriple> triples;

  Rational total_probability() const;
};

/// One branch of mechanism randomness (a draw of the copy level, or a
/// top-level coin), with its per-agent lotteries.
struct Branch {
  Rational prob;
  std::vector<AgentLottery> lotteries;
};

/// Exact finite-support randomized outcome, per agent. Outer probabilities
/// sum to one exactly.
struct MechanismDistribution {
  std::vector<Branch> branches;

  Rational total_probability() const;
  /// Per-agent lotteries with outer branch weights multiplied through.
  std::vector<AgentLottery> flatten(int n_agents) const;
};

enum class SubroutineKind { unit_demand, multi_unit };

// ---------------------------------------------------------------------------
// Mechanism 1 family: VCG over the instance with 2^level copies of each
// item, rounded back to the single-copy instance by a subroutine that
// serves each allocated agent its projected bundle at its copies-VCG price
// with probability exactly q / 2^level.
// ---------------------------------------------------------------------------

/// Default level range for the prior-free guarantee: ceil(2 * log2(n)).
int default_copies_rounds(int n_agents);

/// Level range for i.i.d.-style priors where each agent's favorite item is
/// uniform: ceil(log2((2e/(e-1)) * max(1, n/m))).
int bayesian_copies_rounds(int n_agents, int n_items);

/// Enumerates every level in {0..r} with weight 1/(r+1). q defaults to 1
/// for the unit-demand subroutine and 1/2 for the multi-unit one.
MechanismDistribution vcg_with_copies(const Instance& inst, int r, const Rational& q,
                                      SubroutineKind subroutine);
MechanismDistribution vcg_with_copies(const Instance& inst, int r, SubroutineKind subroutine);

/// Unit-demand rounding: a uniformly random copy of each item is drawn, and
/// the holder of the drawn copy is served. Expressed analytically: the agent
/// holding a copy is served with probability q / 2^level. The copies
/// outcome must be trimmed with at most one item per agent.
std::vector<AgentLottery> subroutine_unit_demand(const Outcome& copies_outcome, int level,
                                                 const Rational& q);

/// Per-copy groups used by the multi-unit rounding: full_in_copy[t] holds
/// agents whose interval sits entirely inside copy t; spanning[t] the (at
/// most one) agent crossing from copy t into t+1.
struct CopyGroups {
  std::vector<std::vector<int>> full_in_copy;
  std::vector<std::optional<int>> spanning;
};

CopyGroups copy_groups(const IntervalAllocation& intervals, int m, int level);

/// Multi-unit rounding: draw a uniform copy t, then serve all of
/// full_in_copy[t] with probability q, or the spanning agent of copy t with
/// probability q. Every allocated agent's marginal serving probability is
/// q / 2^level. Requires q <= 1/2.
std::vector<AgentLottery> subroutine_multiunit(const MultiUnitSequentialResult& seq, int m,
                                               int level, const Rational& q);

// ---------------------------------------------------------------------------
// Mechanism 2: restricted-capacity VCG for divisible goods. Each branch
// draws a capacity q = 2^-level and runs capped VCG; branches are
// deterministic outcomes, so the mix is universally truthful.
// ---------------------------------------------------------------------------

MechanismDistribution restricted_capacity_vcg(const Instance& inst, int r);

/// Default level range ceil(log2(n)) matching the divisible guarantee.
int default_capacity_rounds(int n_agents);

// ---------------------------------------------------------------------------
// Mechanism 3: two agents, any monotone indivisible valuations. One third
// VCG, one third grand bundle to each agent free of charge. Expected
// surplus equals exactly 2/3 of the first-best welfare.
// ---------------------------------------------------------------------------

MechanismDistribution two_agent_grand_bundle(const Instance& inst);

// ---------------------------------------------------------------------------
// Mechanism 4: two agents, one item, optimal against the anonymous-prior
// benchmark max{v1 - v2, (v1+v2)/2}. Prices are the threshold payments, so
// the mechanism is truthful in expectation.
// ---------------------------------------------------------------------------

MechanismDistribution two_agent_single_item_optimal(double v1, double v2);

// ---------------------------------------------------------------------------
// Reference mechanisms used by experiments and audits.
// ---------------------------------------------------------------------------

/// Grand bundle to a uniformly random agent, free of charge.
MechanismDistribution random_allocation(const Instance& inst);

/// Deliberately non-truthful control: grand bundle to the highest reporter
/// at its own reported value.
MechanismDistribution first_price_grand_bundle(const Instance& inst);

// ---------------------------------------------------------------------------
// Configuration (JSON wire format)
// ---------------------------------------------------------------------------

enum class MechanismKind {
  vcg_copies,
  restricted_capacity,
  two_agent_bundle,
  two_agent_optimal,
  random_alloc,
  first_price,
};

struct MechanismConfig {
  MechanismKind mechanism{MechanismKind::vcg_copies};
  std::optional<int> r;
  std::optional<Rational> q;
  std::optional<SubroutineKind> subroutine;
  bool bayesian_preset{false};
};

MechanismConfig parse_mechanism_config(const std::string& json_text);
std::string mechanism_config_json(const MechanismConfig& config);
std::string mechanism_kind_name(MechanismKind kind);

/// Runs the configured mechanism, filling defaults from the instance.
MechanismDistribution run_mechanism(const MechanismConfig& config, const Instance& inst);

/// Distribution serialized with exact rational probabilities.
std::string distribution_json(const MechanismDistribution& dist);

}  // namespace surplus
