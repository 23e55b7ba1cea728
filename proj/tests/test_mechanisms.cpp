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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <stdexcept>

#include "surplus/analysis.hpp"
#include "surplus/experiments.hpp"
#include "surplus/mechanisms.hpp"

using namespace surplus;

namespace {

Instance ud_instance(const std::vector<std::vector<double>>& rows) {
  Instance inst;
  inst.kind = Kind::indivisible;
  inst.m = static_cast<int>(rows.front().size());
  for (const auto& r : rows) inst.agents.push_back(UnitDemand{r});
  return inst;
}

Instance mu_instance(const std::vector<std::vector<double>>& rows) {
  Instance inst;
  inst.kind = Kind::indivisible;
  inst.m = static_cast<int>(rows.front().size());
  for (const auto& r : rows) inst.agents.push_back(MultiUnit{r});
  return inst;
}

Instance linear_divisible(const std::vector<double>& slopes) {
  Instance inst;
  inst.kind = Kind::divisible;
  inst.m = 1;
  for (double s : slopes) inst.agents.push_back(DivisibleSeparable{{linear_curve(s)}});
  return inst;
}

}  // namespace

TEST_CASE("copies mechanism enumerates both branches of the worked example") {
  const Instance inst = ud_instance({{4.0}, {1.0}});
  const MechanismDistribution dist =
      vcg_with_copies(inst, 1, Rational(1, 1), SubroutineKind::unit_demand);
  REQUIRE(dist.branches.size() == 2);
  CHECK(dist.total_probability() == Rational(1, 1));

  // one copy: agent 0 served with probability 1 at the second price
  const Branch& plain = dist.branches[0];
  REQUIRE(plain.lotteries[0].triples.size() == 1);
  CHECK(plain.lotteries[0].triples[0].prob == Rational(1, 1));
  CHECK(plain.lotteries[0].triples[0].payment == doctest::Approx(1.0));
  CHECK(plain.lotteries[1].triples.empty());

  // two copies: both agents served with probability 1/2 at price 0
  const Branch& doubled = dist.branches[1];
  REQUIRE(doubled.lotteries[0].triples.size() == 1);
  REQUIRE(doubled.lotteries[1].triples.size() == 1);
  CHECK(doubled.lotteries[0].triples[0].prob == Rational(1, 2));
  CHECK(doubled.lotteries[1].triples[0].prob == Rational(1, 2));
  CHECK(doubled.lotteries[0].triples[0].payment == doctest::Approx(0.0));
  CHECK(doubled.lotteries[1].triples[0].payment == doctest::Approx(0.0));

  CHECK(expected_surplus(dist, inst).expected_surplus == doctest::Approx(2.75));
}

TEST_CASE("copies mechanism with r=0 is plain VCG served with probability q") {
  const Instance inst = ud_instance({{3.0, 2.0}, {2.0, 0.0}});
  const MechanismDistribution dist =
      vcg_with_copies(inst, 0, Rational(1, 2), SubroutineKind::unit_demand);
  REQUIRE(dist.branches.size() == 1);
  int triples = 0;
  for (const AgentLottery& lot : dist.branches[0].lotteries) {
    for (const LotteryTriple& t : lot.triples) {
      CHECK(t.prob == Rational(1, 2));
      ++triples;
    }
  }
  CHECK(triples == 2);
}

TEST_CASE("serving probabilities are exactly q over the copy count") {
  CounterRng rng(3001);
  for (int round = 0; round < 30; ++round) {
    const int n = rng.uniform_int(1, 4);
    const int m = rng.uniform_int(1, 3);
    const bool ud = round % 2 == 0;
    const Instance inst =
        ud ? random_instance_unit_demand(n, m, rng) : random_instance_multi_unit(n, m, rng);
    const int r = rng.uniform_int(0, 3);
    const Rational q = ud ? Rational(1, 1) : Rational(1, 2);
    const MechanismDistribution dist =
        vcg_with_copies(inst, r, q, ud ? SubroutineKind::unit_demand : SubroutineKind::multi_unit);
    CHECK(dist.total_probability() == Rational(1, 1));
    for (int level = 0; level <= r; ++level) {
      const Rational expected = q * Rational(1, std::int64_t{1} << level);
      for (const AgentLottery& lot : dist.branches[level].lotteries) {
        CHECK(lot.total_probability() <= Rational(1, 1));
        for (const LotteryTriple& t : lot.triples) CHECK(t.prob == expected);
      }
    }
  }
}

TEST_CASE("unit-demand rounding rejects agents holding two items") {
  Outcome outcome;
  SetAllocation alloc;
  alloc.bundles = {{{0, 0}, {1, 0}}};
  outcome.allocation = alloc;
  outcome.payments = {0.0};
  CHECK_THROWS_AS(subroutine_unit_demand(outcome, 0, Rational(1, 1)), std::invalid_argument);
}

TEST_CASE("unit-demand rounding serves a held copy with probability 1/2^level") {
  Outcome outcome;
  SetAllocation alloc;
  alloc.bundles = {{{3, 1}}, {}};  // copy 1 of item 3; second agent empty
  outcome.allocation = alloc;
  outcome.payments = {0.5, 0.0};
  const auto lotteries = subroutine_unit_demand(outcome, 2, Rational(1, 1));
  REQUIRE(lotteries[0].triples.size() == 1);
  CHECK(lotteries[0].triples[0].prob == Rational(1, 4));
  CHECK(std::get<ItemSet>(lotteries[0].triples[0].bundle) == ItemSet{3});
  CHECK(lotteries[0].triples[0].payment == doctest::Approx(0.5));
  CHECK(lotteries[1].triples.empty());
}

TEST_CASE("multi-unit copy groups reproduce the interval picture") {
  // Six items, four copies; counts chosen so one agent spans the first copy
  // boundary and a later copy holds a single full-width agent.
  const std::vector<int> counts{3, 2, 3, 3, 1, 6};
  const IntervalAllocation intervals = layout_intervals(counts, 6, 2);
  const CopyGroups groups = copy_groups(intervals, 6, 2);
  CHECK(groups.full_in_copy[0] == std::vector<int>{0, 1});
  REQUIRE(groups.spanning[0].has_value());
  CHECK(*groups.spanning[0] == 2);
  CHECK(groups.full_in_copy[1] == std::vector<int>{3, 4});
  CHECK_FALSE(groups.spanning[1].has_value());
  CHECK(groups.full_in_copy[2] == std::vector<int>{5});
  CHECK_FALSE(groups.spanning[2].has_value());
  CHECK(groups.full_in_copy[3].empty());
}

TEST_CASE("copy groups reject a second agent on the same boundary") {
  IntervalAllocation bad;
  bad.total = 4;
  bad.spans = {{1, 3}, {1, 3}};  // both cross the copy-0/copy-1 boundary
  CHECK_THROWS_AS(copy_groups(bad, 2, 1), std::invalid_argument);
}

TEST_CASE("multi-unit rounding at level zero serves everyone with probability q") {
  const Instance inst = mu_instance({{3.0, 1.0}, {2.0, 1.0}});
  const MultiUnitSequentialResult seq = run_vcg_multiunit_sequential(inst, 0);
  const auto lotteries = subroutine_multiunit(seq, inst.m, 0, Rational(1, 2));
  int triples = 0;
  for (const AgentLottery& lot : lotteries) {
    for (const LotteryTriple& t : lot.triples) {
      CHECK(t.prob == Rational(1, 2));
      ++triples;
    }
  }
  CHECK(triples == 2);
  CHECK_THROWS_AS(subroutine_multiunit(seq, inst.m, 0, Rational(2, 3)), std::invalid_argument);
}

TEST_CASE("multi-unit rounding serves the projected interval bundle") {
  const Instance inst = mu_instance({{3.0, 1.0}, {2.0, 1.0}});
  const MultiUnitSequentialResult seq = run_vcg_multiunit_sequential(inst, 1);
  REQUIRE(seq.counts.counts == std::vector<int>{2, 2});
  const auto lotteries = subroutine_multiunit(seq, inst.m, 1, Rational(1, 2));
  REQUIRE(lotteries[0].triples.size() == 1);
  REQUIRE(lotteries[1].triples.size() == 1);
  CHECK(lotteries[0].triples[0].prob == Rational(1, 4));
  CHECK(std::get<ItemSet>(lotteries[0].triples[0].bundle) == ItemSet{0, 1});
  CHECK(std::get<ItemSet>(lotteries[1].triples[0].bundle) == ItemSet{0, 1});
}

TEST_CASE("restricted-capacity VCG enumerates the worked branches") {
  const Instance inst = linear_divisible({4.0, 1.0});
  const MechanismDistribution dist = restricted_capacity_vcg(inst, 1);
  REQUIRE(dist.branches.size() == 2);
  CHECK(dist.total_probability() == Rational(1, 1));

  {  // full capacity: winner takes all, pays the runner-up slope
    const Branch& b = dist.branches[0];
    REQUIRE(b.lotteries[0].triples.size() == 1);
    const auto& t = b.lotteries[0].triples[0];
    CHECK(std::get<FractionVector>(t.bundle)[0] == doctest::Approx(1.0));
    CHECK(t.payment == doctest::Approx(1.0));
    CHECK(b.lotteries[1].triples.empty());
  }
  {  // capacity 1/2: split, no externality, no payments
    const Branch& b = dist.branches[1];
    REQUIRE(b.lotteries[0].triples.size() == 1);
    REQUIRE(b.lotteries[1].triples.size() == 1);
    CHECK(std::get<FractionVector>(b.lotteries[0].triples[0].bundle)[0] == doctest::Approx(0.5));
    CHECK(b.lotteries[0].triples[0].payment == doctest::Approx(0.0));
    CHECK(b.lotteries[1].triples[0].payment == doctest::Approx(0.0));
  }
  CHECK(expected_surplus(dist, inst).expected_surplus == doctest::Approx(2.75));

  CHECK_THROWS_AS(restricted_capacity_vcg(ud_instance({{1.0}}), 1), std::invalid_argument);
}

TEST_CASE("identical linear agents pay nothing once capacity reaches 1/n") {
  const Instance inst = linear_divisible({2.0, 2.0, 2.0});
  const MechanismDistribution dist = restricted_capacity_vcg(inst, 2);
  for (int level = 0; level <= 2; ++level) {
    const double q = 1.0 / (1 << level);
    if (q > 1.0 / 3.0 + kTol) continue;
    for (const AgentLottery& lot : dist.branches[level].lotteries) {
      for (const LotteryTriple& t : lot.triples) CHECK(t.payment == doctest::Approx(0.0));
    }
  }
}

TEST_CASE("every restricted-capacity branch is itself truthful") {
  // each capped branch is maximal-in-range, so fixing the branch must
  // already remove every profitable deviation
  CounterRng rng(3002);
  for (int round = 0; round < 20; ++round) {
    const Instance truth = random_instance_divisible(rng.uniform_int(2, 3), 1, rng);
    for (int level = 0; level <= 1; ++level) {
      const double q = 1.0 / (1 << level);
      const Outcome honest = run_vcg(truth, SupplyParams{1, q});
      for (int i = 0; i < truth.n(); ++i) {
        Instance deviated = truth;
        deviated.agents[i] = random_divisible(1, rng);
        const Outcome lie = run_vcg(deviated, SupplyParams{1, q});
        const auto utility = [&](const Outcome& o) {
          const auto& x = std::get<FractionalAllocation>(o.allocation).fractions[i];
          return eval(truth.agents[i], x) - o.payments[i];
        };
        CHECK(utility(honest) >= utility(lie) - kTol);
      }
    }
  }
}

TEST_CASE("two-agent grand-bundle mix hits exactly two thirds of first best") {
  {  // single item, values 2 and 1
    const Instance inst = ud_instance({{2.0}, {1.0}});
    const SurplusReport report = expected_surplus(two_agent_grand_bundle(inst), inst);
    CHECK(report.expected_surplus == doctest::Approx(4.0 / 3.0));
    CHECK(report.first_best == doctest::Approx(2.0));
  }
  {  // an agent with zero value contributes nothing but keeps the ratio
    Instance inst;
    inst.kind = Kind::indivisible;
    inst.m = 2;
    Explicit a{2, {0.0, 1.0, 2.0, 3.0}};
    Explicit zero{2, {0.0, 0.0, 0.0, 0.0}};
    inst.agents = {Valuation{a}, Valuation{zero}};
    const SurplusReport report = expected_surplus(two_agent_grand_bundle(inst), inst);
    CHECK(report.expected_surplus == doctest::Approx(2.0));
    CHECK(report.expected_surplus == doctest::Approx(2.0 / 3.0 * report.first_best));
  }
  CounterRng rng(3003);
  for (int round = 0; round < 40; ++round) {
    const Instance inst = random_instance_explicit(2, rng.uniform_int(1, 3), rng);
    const SurplusReport report = expected_surplus(two_agent_grand_bundle(inst), inst);
    CHECK(report.expected_surplus == doctest::Approx(2.0 / 3.0 * report.first_best).epsilon(1e-10));
  }
  CHECK_THROWS_AS(two_agent_grand_bundle(ud_instance({{1.0}, {1.0}, {1.0}})),
                  std::invalid_argument);
}

TEST_CASE("two-agent single-item mechanism follows the threshold rule") {
  {  // separated values: 4 > 3*1
    const MechanismDistribution dist = two_agent_single_item_optimal(4.0, 1.0);
    const auto& lot = dist.branches[0].lotteries;
    REQUIRE(lot[0].triples.size() == 1);
    REQUIRE(lot[1].triples.size() == 1);
    CHECK(lot[0].triples[0].prob == Rational(4, 5));
    CHECK(lot[0].triples[0].payment == doctest::Approx(1.25));
    CHECK(lot[1].triples[0].prob == Rational(1, 5));
    CHECK(lot[1].triples[0].payment == doctest::Approx(0.0));
  }
  {  // close values: 2 <= 3*1
    const MechanismDistribution dist = two_agent_single_item_optimal(2.0, 1.0);
    const auto& lot = dist.branches[0].lotteries;
    CHECK(lot[0].triples[0].prob == Rational(1, 2));
    CHECK(lot[0].triples[0].payment == doctest::Approx(0.2));
    CHECK(lot[1].triples[0].prob == Rational(1, 2));
    CHECK(lot[1].triples[0].payment == doctest::Approx(0.4));
  }
  {  // reported order does not matter; payments follow the original index
    const MechanismDistribution dist = two_agent_single_item_optimal(1.0, 4.0);
    const auto& lot = dist.branches[0].lotteries;
    CHECK(lot[1].triples[0].prob == Rational(4, 5));
    CHECK(lot[0].triples[0].prob == Rational(1, 5));
  }
  CHECK_THROWS_AS(two_agent_single_item_optimal(-1.0, 2.0), std::invalid_argument);
}

TEST_CASE("two-agent single-item surplus is 4/5 of the benchmark") {
  auto surplus_of = [](double v1, double v2) {
    Instance inst;
    inst.kind = Kind::indivisible;
    inst.m = 1;
    inst.agents = {Valuation{UnitDemand{{v1}}}, Valuation{UnitDemand{{v2}}}};
    return expected_surplus(two_agent_single_item_optimal(v1, v2), inst).expected_surplus;
  };
  CHECK(surplus_of(4.0, 1.0) == doctest::Approx(2.4));
  CHECK(surplus_of(4.0, 1.0) == doctest::Approx(0.8 * benchmark_G(4.0, 1.0)));
  CHECK(surplus_of(2.0, 1.0) == doctest::Approx(1.2));
  CHECK(surplus_of(3.0, 1.0) == doctest::Approx(0.8 * benchmark_G(3.0, 1.0)));  // boundary
  CHECK(surplus_of(0.0, 0.0) == doctest::Approx(0.0));
}

TEST_CASE("two-agent single-item serving probability is monotone in the report") {
  const double other = 3.0;
  const auto prob_of = [&](double own) {
    const MechanismDistribution dist = two_agent_single_item_optimal(own, other);
    const AgentLottery& lot = dist.branches[0].lotteries[0];
    return lot.triples.empty() ? Rational(0, 1) : lot.triples[0].prob;
  };
  CHECK(prob_of(0.5) == Rational(1, 5));  // below other/3
  CHECK(prob_of(1.0) == Rational(1, 2));  // at other/3, the close branch
  CHECK(prob_of(2.0) == Rational(1, 2));
  CHECK(prob_of(9.0) == Rational(1, 2));  // at 3*other still close
  CHECK(prob_of(9.1) == Rational(4, 5));  // strictly above
  Rational prev(0, 1);
  for (double own = 0.0; own <= 12.0; own += 0.25) {
    const Rational p = prob_of(own);
    CHECK(prev <= p);
    prev = p;
  }
}

TEST_CASE("bundles in every lottery satisfy per-triple individual rationality") {
  CounterRng rng(3004);
  for (int round = 0; round < 30; ++round) {
    const int n = rng.uniform_int(1, 4);
    const int m = rng.uniform_int(1, 3);
    Instance inst;
    MechanismDistribution dist;
    switch (round % 3) {
      case 0:
        inst = random_instance_unit_demand(n, m, rng);
        dist = vcg_with_copies(inst, 2, SubroutineKind::unit_demand);
        break;
      case 1:
        inst = random_instance_multi_unit(n, m, rng);
        dist = vcg_with_copies(inst, 2, SubroutineKind::multi_unit);
        break;
      default:
        inst = random_instance_divisible(n, m, rng);
        dist = restricted_capacity_vcg(inst, 2);
        break;
    }
    CHECK(audit_epir(dist, inst));
    CHECK(dist.total_probability() == Rational(1, 1));
  }
}

TEST_CASE("flattened lotteries fold branch weights into the marginals") {
  const Instance inst = ud_instance({{4.0}, {1.0}});
  const MechanismDistribution dist =
      vcg_with_copies(inst, 1, Rational(1, 1), SubroutineKind::unit_demand);
  const std::vector<AgentLottery> flat = dist.flatten(2);
  // agent 0: served in both branches, 1/2 * 1 and 1/2 * 1/2
  REQUIRE(flat[0].triples.size() == 2);
  CHECK(flat[0].triples[0].prob == Rational(1, 2));
  CHECK(flat[0].triples[1].prob == Rational(1, 4));
  CHECK(flat[0].total_probability() == Rational(3, 4));
  // agent 1 only appears in the duplicated branch
  REQUIRE(flat[1].triples.size() == 1);
  CHECK(flat[1].triples[0].prob == Rational(1, 4));
  for (const AgentLottery& lot : flat) CHECK(lot.total_probability() <= Rational(1, 1));
}

TEST_CASE("mechanism configs round-trip through JSON") {
  MechanismConfig config;
  config.mechanism = MechanismKind::vcg_copies;
  config.r = 3;
  config.q = Rational(1, 2);
  config.subroutine = SubroutineKind::multi_unit;
  const MechanismConfig back = parse_mechanism_config(mechanism_config_json(config));
  CHECK(back.mechanism == MechanismKind::vcg_copies);
  CHECK(*back.r == 3);
  CHECK(*back.q == Rational(1, 2));
  CHECK(*back.subroutine == SubroutineKind::multi_unit);

  const MechanismConfig g = parse_mechanism_config(R"({"mechanism":"two_agent_G"})");
  CHECK(g.mechanism == MechanismKind::two_agent_optimal);
  CHECK_THROWS_AS(parse_mechanism_config(R"({"mechanism":"nope"})"), std::invalid_argument);

  const MechanismConfig bayes =
      parse_mechanism_config(R"({"mechanism":"vcg_copies","preset":"bayesian"})");
  CHECK(bayes.bayesian_preset);
}

TEST_CASE("default level ranges match the guarantees") {
  CHECK(default_copies_rounds(1) == 0);
  CHECK(default_copies_rounds(2) == 2);
  CHECK(default_copies_rounds(4) == 4);
  CHECK(default_capacity_rounds(8) == 3);
  CHECK(bayesian_copies_rounds(8, 2) == 4);
  CHECK(bayesian_copies_rounds(16, 4) == 4);
  CHECK(bayesian_copies_rounds(2, 4) == 2);
}

TEST_CASE("distribution JSON carries exact rationals") {
  const MechanismDistribution dist = two_agent_single_item_optimal(4.0, 1.0);
  const std::string text = distribution_json(dist);
  CHECK(text.find("\"num\":4") != std::string::npos);
  CHECK(text.find("\"den\":5") != std::string::npos);
}
