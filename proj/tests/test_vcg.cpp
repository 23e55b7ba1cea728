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

#include "internal_assignment.hpp"
#include "support/oracles.hpp"
#include "surplus/experiments.hpp"
#include "surplus/vcg.hpp"

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

}  // namespace

TEST_CASE("unit-demand VCG computes the worked payments") {
  const Instance inst = ud_instance({{3.0, 2.0}, {2.0, 0.0}});
  const Outcome outcome = run_vcg(inst);
  CHECK(outcome.welfare == doctest::Approx(4.0));
  const auto& bundles = std::get<SetAllocation>(outcome.allocation).bundles;
  CHECK(bundles[0][0].item == 1);
  CHECK(bundles[1][0].item == 0);
  // p_0 = SW({1},{0,1}) - SW({1},{0}) computed by the brute-force oracle
  CHECK(oracles::assignment_welfare({{2.0, 0.0}}, {1, 1}) == doctest::Approx(2.0));
  CHECK(oracles::assignment_welfare({{2.0, 0.0}}, {1, 0}) == doctest::Approx(2.0));
  CHECK(outcome.payments[0] == doctest::Approx(0.0));
  CHECK(oracles::assignment_welfare({{3.0, 2.0}}, {1, 1}) == doctest::Approx(3.0));
  CHECK(oracles::assignment_welfare({{3.0, 2.0}}, {0, 1}) == doctest::Approx(2.0));
  CHECK(outcome.payments[1] == doctest::Approx(1.0));
}

TEST_CASE("single agent pays nothing") {
  const Outcome outcome = run_vcg(ud_instance({{5.0, 1.0}}));
  CHECK(outcome.payments[0] == doctest::Approx(0.0));
  CHECK(outcome.surplus() == doctest::Approx(5.0));
}

TEST_CASE("multi-unit VCG computes the worked payments") {
  const Instance inst = mu_instance({{3.0, 1.0}, {2.0, 1.0}});
  const Outcome outcome = run_vcg(inst);
  CHECK(outcome.welfare == doctest::Approx(5.0));
  CHECK(std::get<UnitAllocation>(outcome.allocation).counts == std::vector<int>{1, 1});
  CHECK(outcome.payments[0] == doctest::Approx(1.0));  // 3 - 2
  CHECK(outcome.payments[1] == doctest::Approx(1.0));  // 4 - 3
}

TEST_CASE("payment crosscheck holds on the worked examples") {
  const Instance ud = ud_instance({{3.0, 2.0}, {2.0, 0.0}});
  CHECK(clarke_payment_crosscheck(ud, SupplyParams{}, run_vcg(ud)));
  const Instance single = ud_instance({{5.0}});
  CHECK(clarke_payment_crosscheck(single, SupplyParams{}, run_vcg(single)));
  const Instance mu = mu_instance({{3.0, 1.0}, {2.0, 1.0}});
  CHECK(clarke_payment_crosscheck(mu, SupplyParams{}, run_vcg(mu)));
}

TEST_CASE("trimming drops redundant copies and zero marginals") {
  {
    Instance inst = ud_instance({{4.0, 0.0}});
    SetAllocation alloc;
    alloc.bundles = {{{0, 0}, {0, 1}}};
    const auto trimmed = std::get<SetAllocation>(trim_redundant(Allocation{alloc}, inst));
    REQUIRE(trimmed.bundles[0].size() == 1);
    CHECK(trimmed.bundles[0][0] == CopiedItem{0, 0});  // lowest copy survives
  }
  {
    Instance inst = mu_instance({{3.0, 0.0}});
    UnitAllocation alloc{{2}};
    const auto trimmed = std::get<UnitAllocation>(trim_redundant(Allocation{alloc}, inst));
    CHECK(trimmed.counts[0] == 1);
  }
  {
    Instance inst = mu_instance({{3.0, 2.0}});
    UnitAllocation alloc{{2}};
    const auto trimmed = std::get<UnitAllocation>(trim_redundant(Allocation{alloc}, inst));
    CHECK(trimmed.counts[0] == 2);  // strictly positive marginals stay
  }
}

TEST_CASE("trimming is idempotent and preserves value on random bundles") {
  CounterRng rng(2001);
  for (int round = 0; round < 60; ++round) {
    const int m = rng.uniform_int(1, 3);
    Instance inst = random_instance_explicit(1, m, rng);
    SetAllocation alloc;
    CopiedItemSet bundle;
    for (int j = 0; j < m; ++j)
      if (rng.bernoulli(0.7)) bundle.push_back({j, 0});
    alloc.bundles = {bundle};
    const Allocation once = trim_redundant(Allocation{alloc}, inst);
    const Allocation twice = trim_redundant(once, inst);
    CHECK(allocation_value(inst, once) ==
          doctest::Approx(allocation_value(inst, Allocation{alloc})).epsilon(1e-12));
    CHECK(std::get<SetAllocation>(once).bundles == std::get<SetAllocation>(twice).bundles);
  }
}

TEST_CASE("interval layout follows the counts") {
  {
    const IntervalAllocation iv = layout_intervals({2, 2}, 2, 1);
    CHECK(iv.spans[0].lo == 0);
    CHECK(iv.spans[0].hi == 2);
    CHECK(iv.spans[1].lo == 2);
    CHECK(iv.spans[1].hi == 4);
    CHECK(iv.total == 4);
  }
  {
    const IntervalAllocation iv = layout_intervals({1, 1}, 2, 0);
    CHECK(iv.spans[0].hi == 1);
    CHECK(iv.spans[1].lo == 1);
    CHECK(iv.spans[1].hi == 2);
  }
  {
    const IntervalAllocation iv = layout_intervals({0, 0}, 2, 0);
    CHECK(iv.spans[0].lo == iv.spans[0].hi);
    CHECK(iv.spans[1].lo == iv.spans[1].hi);
  }
}

TEST_CASE("sequential multi-unit VCG lays out intervals and keeps payments") {
  const Instance inst = mu_instance({{3.0, 1.0}, {2.0, 1.0}});
  const MultiUnitSequentialResult seq = run_vcg_multiunit_sequential(inst, 1);
  CHECK(seq.counts.counts == std::vector<int>{2, 2});
  CHECK(seq.welfare == doctest::Approx(7.0));
  CHECK(seq.intervals.spans[0].lo == 0);
  CHECK(seq.intervals.spans[0].hi == 2);
  CHECK(seq.intervals.spans[1].lo == 2);
  CHECK(seq.intervals.spans[1].hi == 4);
  // same counts, same payments as the generic wrapper with two copies
  const Outcome generic = run_vcg(inst, SupplyParams{2, 1.0});
  CHECK(seq.payments == generic.payments);
  // no interval may hold two copies of one item
  for (int agent = 0; agent < 2; ++agent) {
    const CopiedItemSet bundle = seq.intervals.bundle_of(agent, inst.m);
    CHECK(project_g(bundle).size() == bundle.size());
  }
}

TEST_CASE("VCG outcomes are individually rational and never pay above welfare") {
  CounterRng rng(2002);
  for (int round = 0; round < 120; ++round) {
    const int n = rng.uniform_int(1, 4);
    const int m = rng.uniform_int(1, 4);
    Instance inst;
    SupplyParams supply;
    switch (round % 4) {
      case 0:
        inst = random_instance_unit_demand(n, m, rng);
        supply.copies = rng.uniform_int(1, 3);
        break;
      case 1:
        inst = random_instance_multi_unit(n, m, rng);
        supply.copies = rng.uniform_int(1, 3);
        break;
      case 2:
        inst = random_instance_explicit(n, std::min(m, 3), rng);
        break;
      default:
        inst = random_instance_divisible(n, std::min(m, 2), rng);
        supply.capacity = 1.0 / (1 << rng.uniform_int(0, 2));
        break;
    }
    const Outcome outcome = run_vcg(inst, supply);
    double total_value = 0.0;
    for (int i = 0; i < inst.n(); ++i) {
      double value = 0.0;
      if (const auto* sets = std::get_if<SetAllocation>(&outcome.allocation)) {
        value = eval_copied(inst.agents[i], sets->bundles[i]);
      } else if (const auto* units = std::get_if<UnitAllocation>(&outcome.allocation)) {
        value = std::get<MultiUnit>(inst.agents[i]).value_of_count(units->counts[i]);
      } else {
        value =
            eval(inst.agents[i], std::get<FractionalAllocation>(outcome.allocation).fractions[i]);
      }
      CHECK(outcome.payments[i] >= -kTol);
      CHECK(value - outcome.payments[i] >= -kTol);  // individually rational per realization
      total_value += value;
    }
    CHECK(total_value == doctest::Approx(outcome.welfare).epsilon(1e-9));
    CHECK(outcome.total_payments() <= outcome.welfare + kTol);
    CHECK(clarke_payment_crosscheck(inst, supply, outcome));
  }
}

TEST_CASE("warm-started assignment payments equal full re-solves") {
  CounterRng rng(2003);
  for (int round = 0; round < 300; ++round) {
    const int n = rng.uniform_int(1, 6);
    const int m = rng.uniform_int(1, 4);
    std::vector<UnitDemand> profile(n);
    for (auto& v : profile) {
      v.weights.resize(m);
      // small integer weights on odd rounds make exact ties common, which
      // is where the warm path earns its keep
      for (double& w : v.weights)
        w = round % 2 == 0 ? rng.uniform(0.0, 5.0)
                           : static_cast<double>(rng.uniform_int(0, 3));
    }
    const int c = rng.uniform_int(1, 3);
    const std::vector<int> caps(m, c);
    const WelfareResult solved = max_welfare_unit_demand(profile, caps);
    const auto& bundles = std::get<SetAllocation>(solved.allocation).bundles;
    std::vector<int> assigned(n, -1);
    for (int i = 0; i < n; ++i)
      if (!bundles[i].empty()) assigned[i] = bundles[i].front().item;
    const auto warm = internal::assignment_clarke_payments(profile, caps, assigned, true);
    const auto cold = internal::assignment_clarke_payments(profile, caps, assigned, false);
    for (int i = 0; i < n; ++i) CHECK(warm[i] == doctest::Approx(cold[i]).epsilon(1e-9));
  }
}

TEST_CASE("deterministic VCG is truthful against unilateral misreports") {
  CounterRng rng(2004);
  int checked = 0;
  for (int round = 0; round < 80; ++round) {
    const int n = rng.uniform_int(2, 4);
    const int m = rng.uniform_int(1, 4);
    const bool ud = round % 2 == 0;
    const Instance truth =
        ud ? random_instance_unit_demand(n, m, rng) : random_instance_multi_unit(n, m, rng);
    const Outcome honest = run_vcg(truth);
    for (int i = 0; i < n; ++i) {
      Instance deviated = truth;
      deviated.agents[i] =
          ud ? Valuation{random_unit_demand(m, rng)} : Valuation{random_multi_unit(m, rng)};
      const Outcome lie = run_vcg(deviated);
      const auto utility = [&](const Outcome& o) {
        double value = 0.0;
        if (const auto* sets = std::get_if<SetAllocation>(&o.allocation)) {
          value = eval_copied(truth.agents[i], sets->bundles[i]);
        } else {
          value = std::get<MultiUnit>(truth.agents[i])
                      .value_of_count(std::get<UnitAllocation>(o.allocation).counts[i]);
        }
        return value - o.payments[i];
      };
      CHECK(utility(honest) >= utility(lie) - kTol);
      ++checked;
    }
  }
  CHECK(checked > 100);
}

TEST_CASE("copies are rejected for explicit profiles") {
  CounterRng rng(9);
  Instance inst = random_instance_explicit(2, 2, rng);
  CHECK_THROWS_AS(run_vcg(inst, SupplyParams{2, 1.0}), std::invalid_argument);
}

TEST_CASE("interval machinery rejects malformed inputs") {
  CHECK_THROWS_AS(layout_intervals({3}, 2, 1), std::invalid_argument);  // longer than a block
  CHECK_THROWS_AS(layout_intervals({2, 2, 2}, 2, 0), std::invalid_argument);  // over supply
  const Instance ud = ud_instance({{1.0, 2.0}});
  CHECK_THROWS_AS(run_vcg_multiunit_sequential(ud, 1), std::invalid_argument);
}
