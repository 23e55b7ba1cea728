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

#include "surplus/mechanisms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace surplus {

using nlohmann::json;

Rational AgentLottery::total_probability() const {
  Rational total{0, 1};
  for (const auto& t : triples) total = total + t.prob;
  return total;
}

Rational MechanismDistribution::total_probability() const {
  Rational total{0, 1};
  for (const auto& b : branches) total = total + b.prob;
  return total;
}

std::vector<AgentLottery> MechanismDistribution::flatten(int n_agents) const {
  std::vector<AgentLottery> out(n_agents);
  for (const Branch& b : branches) {
    for (std::size_t i = 0; i < b.lotteries.size(); ++i) {
      for (const LotteryTriple& t : b.lotteries[i].triples) {
        out[i].triples.push_back(LotteryTriple{b.prob * t.prob, t.bundle, t.payment});
      }
    }
  }
  return out;
}

int default_copies_rounds(int n_agents) {
  if (n_agents <= 1) return 0;
  return static_cast<int>(std::ceil(2.0 * std::log2(static_cast<double>(n_agents))));
}

int bayesian_copies_rounds(int n_agents, int n_items) {
  const double e = std::exp(1.0);
  const double factor = 2.0 * e / (e - 1.0);
  const double ratio = std::max(1.0, static_cast<double>(n_agents) / n_items);
  return std::max(0, static_cast<int>(std::ceil(std::log2(factor * ratio))));
}

int default_capacity_rounds(int n_agents) {
  if (n_agents <= 1) return 0;
  return static_cast<int>(std::ceil(std::log2(static_cast<double>(n_agents))));
}

std::vector<AgentLottery> subroutine_unit_demand(const Outcome& copies_outcome, int level,
                                                 const Rational& q) {
  if (q.num < 0 || q > Rational(1, 1))
    throw std::invalid_argument("unit-demand subroutine needs q in [0,1]");
  const auto& bundles = std::get<SetAllocation>(copies_outcome.allocation).bundles;
  const Rational serve = q * Rational(1, std::int64_t{1} << level);
  std::vector<AgentLottery> lotteries(bundles.size());
  for (std::size_t i = 0; i < bundles.size(); ++i) {
    if (bundles[i].empty()) continue;
    if (bundles[i].size() > 1)
      throw std::invalid_argument("unit-demand rounding needs at most one item per agent");
    lotteries[i].triples.push_back(
        LotteryTriple{serve, project_g(bundles[i]), copies_outcome.payments[i]});
  }
  return lotteries;
}

CopyGroups copy_groups(const IntervalAllocation& intervals, int m, int level) {
  const long long copies = 1ll << level;
  CopyGroups groups;
  groups.full_in_copy.resize(copies);
  groups.spanning.resize(copies);
  for (std::size_t i = 0; i < intervals.spans.size(); ++i) {
    const auto& s = intervals.spans[i];
    if (s.hi <= s.lo) continue;
    const long long first_copy = s.lo / m;
    const long long last_copy = (s.hi - 1) / m;
    if (first_copy == last_copy) {
      groups.full_in_copy[first_copy].push_back(static_cast<int>(i));
    } else {
      if (last_copy != first_copy + 1)
        throw std::invalid_argument("interval crosses more than two copies");
      if (groups.spanning[first_copy].has_value())
        throw std::invalid_argument("two agents span the same copy boundary");
      groups.spanning[first_copy] = static_cast<int>(i);
    }
  }
  return groups;
}

std::vector<AgentLottery> subroutine_multiunit(const MultiUnitSequentialResult& seq, int m,
                                               int level, const Rational& q) {
  if (q.num < 0 || q > Rational(1, 2))
    throw std::invalid_argument("multi-unit subroutine needs q in [0,1/2]");
  // Validates the interval structure; throws if a copy boundary is crossed
  // by more than one agent.
  copy_groups(seq.intervals, m, level);
  const Rational serve = q * Rational(1, std::int64_t{1} << level);
  std::vector<AgentLottery> lotteries(seq.intervals.spans.size());
  for (std::size_t i = 0; i < seq.intervals.spans.size(); ++i) {
    const CopiedItemSet bundle = seq.intervals.bundle_of(static_cast<int>(i), m);
    if (bundle.empty()) continue;
    lotteries[i].triples.push_back(LotteryTriple{serve, project_g(bundle), seq.payments[i]});
  }
  return lotteries;
}

MechanismDistribution vcg_with_copies(const Instance& inst, int r, const Rational& q,
                                      SubroutineKind subroutine) {
  validate_shape(inst);
  if (inst.kind != Kind::indivisible)
    throw std::invalid_argument("copies mechanism needs an indivisible instance");
  if (r < 0 || r > 20) throw std::invalid_argument("level range must be in [0, 20]");
  MechanismDistribution dist;
  const Rational branch_prob(1, r + 1);
  for (int level = 0; level <= r; ++level) {
    Branch branch;
    branch.prob = branch_prob;
    if (subroutine == SubroutineKind::unit_demand) {
      const Outcome outcome = run_vcg(inst, SupplyParams{1 << level, 1.0});
      if (!std::holds_alternative<SetAllocation>(outcome.allocation))
        throw std::invalid_argument("unit-demand subroutine needs unit-demand agents");
      branch.lotteries = subroutine_unit_demand(outcome, level, q);
    } else {
      const MultiUnitSequentialResult seq = run_vcg_multiunit_sequential(inst, level);
      branch.lotteries = subroutine_multiunit(seq, inst.m, level, q);
    }
    dist.branches.push_back(std::move(branch));
  }
  return dist;
}

MechanismDistribution vcg_with_copies(const Instance& inst, int r, SubroutineKind subroutine) {
  const Rational q = subroutine == SubroutineKind::unit_demand ? Rational(1, 1) : Rational(1, 2);
  return vcg_with_copies(inst, r, q, subroutine);
}

MechanismDistribution restricted_capacity_vcg(const Instance& inst, int r) {
  validate_shape(inst);
  if (inst.kind != Kind::divisible)
    throw std::invalid_argument("restricted-capacity VCG needs a divisible instance");
  if (r < 0 || r > 20) throw std::invalid_argument("level range must be in [0, 20]");
  MechanismDistribution dist;
  const Rational branch_prob(1, r + 1);
  for (int level = 0; level <= r; ++level) {
    const double q = std::ldexp(1.0, -level);
    const Outcome outcome = run_vcg(inst, SupplyParams{1, q});
    const auto& fractions = std::get<FractionalAllocation>(outcome.allocation).fractions;
    Branch branch;
    branch.prob = branch_prob;
    branch.lotteries.resize(inst.n());
    for (int i = 0; i < inst.n(); ++i) {
      const FractionVector& x = fractions[i];
      if (std::all_of(x.begin(), x.end(), [](double f) { return f <= kTol; })) continue;
      branch.lotteries[i].triples.push_back(
          LotteryTriple{Rational(1, 1), x, outcome.payments[i]});
    }
    dist.branches.push_back(std::move(branch));
  }
  return dist;
}

MechanismDistribution two_agent_grand_bundle(const Instance& inst) {
  validate_shape(inst);
  if (inst.n() != 2) throw std::invalid_argument("grand-bundle mix is a two-agent mechanism");
  if (inst.kind != Kind::indivisible)
    throw std::invalid_argument("grand-bundle mix needs an indivisible instance");
  ItemSet grand(inst.m);
  for (int j = 0; j < inst.m; ++j) grand[j] = j;

  MechanismDistribution dist;
  const Rational third(1, 3);

  Branch vcg_branch;
  vcg_branch.prob = third;
  const Outcome outcome = run_vcg(inst);
  const auto& bundles = std::get<SetAllocation>(outcome.allocation).bundles;
  vcg_branch.lotteries.resize(2);
  for (int i = 0; i < 2; ++i) {
    if (bundles[i].empty()) continue;
    vcg_branch.lotteries[i].triples.push_back(
        LotteryTriple{Rational(1, 1), project_g(bundles[i]), outcome.payments[i]});
  }
  dist.branches.push_back(std::move(vcg_branch));

  for (int winner = 0; winner < 2; ++winner) {
    Branch b;
    b.prob = third;
    b.lotteries.resize(2);
    b.lotteries[winner].triples.push_back(LotteryTriple{Rational(1, 1), grand, 0.0});
    dist.branches.push_back(std::move(b));
  }
  return dist;
}

MechanismDistribution two_agent_single_item_optimal(double v1, double v2) {
  if (v1 < 0.0 || v2 < 0.0) throw std::invalid_argument("reported values must be nonnegative");
  const int hi = v1 >= v2 ? 0 : 1;  // ties stay on the original order
  const int lo = 1 - hi;
  const double vh = std::max(v1, v2);
  const double vl = std::min(v1, v2);
  const ItemSet item{0};

  Branch branch;
  branch.prob = Rational(1, 1);
  branch.lotteries.resize(2);
  if (vh > 3.0 * vl) {
    branch.lotteries[hi].triples.push_back(LotteryTriple{Rational(4, 5), item, 5.0 * vl / 4.0});
    branch.lotteries[lo].triples.push_back(LotteryTriple{Rational(1, 5), item, 0.0});
  } else {
    branch.lotteries[hi].triples.push_back(LotteryTriple{Rational(1, 2), item, vl / 5.0});
    branch.lotteries[lo].triples.push_back(LotteryTriple{Rational(1, 2), item, vh / 5.0});
  }
  MechanismDistribution dist;
  dist.branches.push_back(std::move(branch));
  return dist;
}

namespace {

LotteryBundle grand_bundle_of(const Instance& inst) {
  if (inst.kind == Kind::divisible) return FractionVector(inst.m, 1.0);
  ItemSet grand(inst.m);
  for (int j = 0; j < inst.m; ++j) grand[j] = j;
  return grand;
}

double grand_value(const Instance& inst, int agent) {
  const LotteryBundle grand = grand_bundle_of(inst);
  if (inst.kind == Kind::divisible) return eval(inst.agents[agent], std::get<FractionVector>(grand));
  return eval(inst.agents[agent], std::get<ItemSet>(grand));
}

}  // namespace

MechanismDistribution random_allocation(const Instance& inst) {
  validate_shape(inst);
  const LotteryBundle grand = grand_bundle_of(inst);
  Branch branch;
  branch.prob = Rational(1, 1);
  branch.lotteries.resize(inst.n());
  for (int i = 0; i < inst.n(); ++i)
    branch.lotteries[i].triples.push_back(LotteryTriple{Rational(1, inst.n()), grand, 0.0});
  MechanismDistribution dist;
  dist.branches.push_back(std::move(branch));
  return dist;
}

MechanismDistribution first_price_grand_bundle(const Instance& inst) {
  validate_shape(inst);
  int winner = 0;
  double best = -1.0;
  for (int i = 0; i < inst.n(); ++i) {
    const double v = grand_value(inst, i);
    if (v > best + kTol) {
      winner = i;
      best = v;
    }
  }
  Branch branch;
  branch.prob = Rational(1, 1);
  branch.lotteries.resize(inst.n());
  branch.lotteries[winner].triples.push_back(
      LotteryTriple{Rational(1, 1), grand_bundle_of(inst), best});
  MechanismDistribution dist;
  dist.branches.push_back(std::move(branch));
  return dist;
}

// ---------------------------------------------------------------------------
// Config and serialization
// ---------------------------------------------------------------------------

std::string mechanism_kind_name(MechanismKind kind) {
  switch (kind) {
    case MechanismKind::vcg_copies: return "vcg_copies";
    case MechanismKind::restricted_capacity: return "restricted_capacity";
    case MechanismKind::two_agent_bundle: return "two_agent_bundle";
    case MechanismKind::two_agent_optimal: return "two_agent_G";
    case MechanismKind::random_alloc: return "random_allocation";
    case MechanismKind::first_price: return "first_price";
  }
  return "unknown";
}

namespace {

MechanismKind kind_from_name(const std::string& name) {
  if (name == "vcg_copies") return MechanismKind::vcg_copies;
  if (name == "restricted_capacity") return MechanismKind::restricted_capacity;
  if (name == "two_agent_bundle") return MechanismKind::two_agent_bundle;
  if (name == "two_agent_G") return MechanismKind::two_agent_optimal;
  if (name == "random_allocation") return MechanismKind::random_alloc;
  if (name == "first_price") return MechanismKind::first_price;
  throw std::invalid_argument("unknown mechanism: " + name);
}

}  // namespace

MechanismConfig parse_mechanism_config(const std::string& json_text) {
  const json j = json::parse(json_text);
  MechanismConfig config;
  config.mechanism = kind_from_name(j.at("mechanism").get<std::string>());
  if (j.contains("r")) config.r = j.at("r").get<int>();
  if (j.contains("q")) config.q = parse_rational(j.at("q").get<std::string>());
  if (j.contains("subroutine")) {
    const std::string s = j.at("subroutine").get<std::string>();
    if (s == "unit_demand") {
      config.subroutine = SubroutineKind::unit_demand;
    } else if (s == "multi_unit") {
      config.subroutine = SubroutineKind::multi_unit;
    } else {
      throw std::invalid_argument("unknown subroutine: " + s);
    }
  }
  if (j.contains("preset")) {
    const std::string p = j.at("preset").get<std::string>();
    if (p == "bayesian") {
      config.bayesian_preset = true;
    } else if (p != "prior_free") {
      throw std::invalid_argument("unknown preset: " + p);
    }
  }
  return config;
}

std::string mechanism_config_json(const MechanismConfig& config) {
  json j;
  j["mechanism"] = mechanism_kind_name(config.mechanism);
  if (config.r) j["r"] = *config.r;
  if (config.q) j["q"] = config.q->str();
  if (config.subroutine) {
    j["subroutine"] =
        *config.subroutine == SubroutineKind::unit_demand ? "unit_demand" : "multi_unit";
  }
  if (config.bayesian_preset) j["preset"] = "bayesian";
  return j.dump();
}

MechanismDistribution run_mechanism(const MechanismConfig& config, const Instance& inst) {
  switch (config.mechanism) {
    case MechanismKind::vcg_copies: {
      SubroutineKind sub;
      if (config.subroutine) {
        sub = *config.subroutine;
      } else if (std::all_of(inst.agents.begin(), inst.agents.end(), [](const Valuation& v) {
                   return std::holds_alternative<MultiUnit>(v);
                 })) {
        sub = SubroutineKind::multi_unit;
      } else {
        sub = SubroutineKind::unit_demand;
      }
      int r;
      if (config.r) {
        r = *config.r;
      } else if (config.bayesian_preset) {
        r = bayesian_copies_rounds(inst.n(), inst.m);
      } else {
        r = default_copies_rounds(inst.n());
      }
      if (config.q) return vcg_with_copies(inst, r, *config.q, sub);
      return vcg_with_copies(inst, r, sub);
    }
    case MechanismKind::restricted_capacity:
      return restricted_capacity_vcg(inst,
                                     config.r ? *config.r : default_capacity_rounds(inst.n()));
    case MechanismKind::two_agent_bundle:
      return two_agent_grand_bundle(inst);
    case MechanismKind::two_agent_optimal: {
      if (inst.n() != 2 || inst.m != 1)
        throw std::invalid_argument("two_agent_G needs two agents and one item");
      const ItemSet item{0};
      return two_agent_single_item_optimal(eval(inst.agents[0], item),
                                           eval(inst.agents[1], item));
    }
    case MechanismKind::random_alloc:
      return random_allocation(inst);
    case MechanismKind::first_price:
      return first_price_grand_bundle(inst);
  }
  throw std::invalid_argument("unhandled mechanism kind");
}

namespace {

json rational_json(const Rational& x) { return json{{"num", x.num}, {"den", x.den}}; }

json bundle_json(const LotteryBundle& b) {
  if (const auto* items = std::get_if<ItemSet>(&b)) return json(*items);
  return json{{"fractions", std::get<FractionVector>(b)}};
}

}  // namespace

std::string distribution_json(const MechanismDistribution& dist) {
  json branches = json::array();
  for (const Branch& b : dist.branches) {
    json lotteries = json::array();
    for (const AgentLottery& lot : b.lotteries) {
      json triples = json::array();
      for (const LotteryTriple& t : lot.triples) {
        triples.push_back(json{{"prob", rational_json(t.prob)},
                               {"bundle", bundle_json(t.bundle)},
                               {"payment", t.payment}});
      }
      lotteries.push_back(std::move(triples));
    }
    branches.push_back(json{{"prob", rational_json(b.prob)}, {"agents", std::move(lotteries)}});
  }
  return json{{"branches", std::move(branches)}}.dump();
}

}  // namespace surplus
