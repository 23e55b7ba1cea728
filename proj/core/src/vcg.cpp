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

#include "surplus/vcg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "internal_assignment.hpp"

namespace surplus {

double Outcome::total_payments() const {
  return std::accumulate(payments.begin(), payments.end(), 0.0);
}

namespace {

bool all_unit_demand(const Instance& inst) {
  return std::all_of(inst.agents.begin(), inst.agents.end(),
                     [](const Valuation& v) { return std::holds_alternative<UnitDemand>(v); });
}

bool all_multi_unit(const Instance& inst) {
  return std::all_of(inst.agents.begin(), inst.agents.end(),
                     [](const Valuation& v) { return std::holds_alternative<MultiUnit>(v); });
}

CopiedItemSet without(const CopiedItemSet& bundle, std::size_t drop) {
  CopiedItemSet out;
  out.reserve(bundle.size() - 1);
  for (std::size_t k = 0; k < bundle.size(); ++k)
    if (k != drop) out.push_back(bundle[k]);
  return out;
}

CopiedItemSet trim_bundle(const Valuation& v, CopiedItemSet bundle) {
  std::sort(bundle.begin(), bundle.end());
  bool changed = true;
  while (changed) {
    changed = false;
    // Descending scan keeps the lowest copy of a duplicated item.
    for (std::size_t k = bundle.size(); k-- > 0;) {
      const double with = eval_copied(v, bundle);
      CopiedItemSet reduced = without(bundle, k);
      if (std::abs(eval_copied(v, reduced) - with) <= kTol) {
        bundle = std::move(reduced);
        changed = true;
      }
    }
  }
  return bundle;
}

std::uint32_t mask_of(const CopiedItemSet& bundle) {
  std::uint32_t mask = 0;
  for (const CopiedItem& c : bundle) mask |= (1u << c.item);
  return mask;
}

Outcome vcg_unit_demand(const Instance& inst, int copies) {
  const std::vector<UnitDemand> profile = as_unit_demand(inst);
  const std::vector<int> caps(inst.m, copies);
  WelfareResult solved = max_welfare_unit_demand(profile, caps);
  Allocation trimmed = trim_redundant(solved.allocation, inst);
  const auto& bundles = std::get<SetAllocation>(trimmed).bundles;
  std::vector<int> assigned(inst.n(), -1);
  for (int i = 0; i < inst.n(); ++i)
    if (!bundles[i].empty()) assigned[i] = bundles[i].front().item;
  std::vector<double> payments =
      internal::assignment_clarke_payments(profile, caps, assigned, /*warm=*/true);
  return Outcome{std::move(trimmed), std::move(payments), solved.welfare};
}

Outcome vcg_multi_unit(const Instance& inst, int copies) {
  const std::vector<MultiUnit> profile = as_multi_unit(inst);
  const long long units = static_cast<long long>(inst.m) * copies;
  WelfareResult solved = max_welfare_multiunit(profile, units, inst.m);
  const std::vector<int>& counts = std::get<UnitAllocation>(solved.allocation).counts;
  std::vector<double> payments(inst.n(), 0.0);
  for (int i = 0; i < inst.n(); ++i) {
    if (counts[i] == 0) continue;
    const double without_i = multiunit_welfare(profile, units, inst.m, i);
    const double without_bundle = multiunit_welfare(profile, units - counts[i], inst.m, i);
    payments[i] = without_i - without_bundle;
  }
  return Outcome{std::move(solved.allocation), std::move(payments), solved.welfare};
}

Outcome vcg_explicit(const Instance& inst) {
  std::vector<Explicit> tables;
  tables.reserve(inst.agents.size());
  for (const Valuation& v : inst.agents) tables.push_back(to_explicit(v));
  const std::uint32_t full = (1u << inst.m) - 1u;
  WelfareResult solved = max_welfare_explicit(tables, full);
  Allocation trimmed = trim_redundant(solved.allocation, inst);
  const auto& bundles = std::get<SetAllocation>(trimmed).bundles;
  std::vector<double> payments(inst.n(), 0.0);
  for (int i = 0; i < inst.n(); ++i) {
    if (bundles[i].empty()) continue;
    const double without_i = explicit_welfare(tables, full, i);
    const double without_bundle = explicit_welfare(tables, full & ~mask_of(bundles[i]), i);
    payments[i] = without_i - without_bundle;
  }
  return Outcome{std::move(trimmed), std::move(payments), solved.welfare};
}

Outcome vcg_divisible(const Instance& inst, double q) {
  const std::vector<DivisibleSeparable> profile = as_divisible(inst);
  const FractionVector ones(inst.m, 1.0);
  WelfareResult solved = max_welfare_divisible(profile, q, ones);
  const auto& fractions = std::get<FractionalAllocation>(solved.allocation).fractions;
  std::vector<double> payments(inst.n(), 0.0);
  for (int i = 0; i < inst.n(); ++i) {
    const FractionVector& x = fractions[i];
    if (std::all_of(x.begin(), x.end(), [](double f) { return f <= kTol; })) continue;
    FractionVector reduced = ones;
    for (int j = 0; j < inst.m; ++j) reduced[j] = std::max(0.0, reduced[j] - x[j]);
    const double without_i = divisible_welfare(profile, q, ones, i);
    const double without_bundle = divisible_welfare(profile, q, reduced, i);
    payments[i] = without_i - without_bundle;
  }
  return Outcome{std::move(solved.allocation), std::move(payments), solved.welfare};
}

}  // namespace

Allocation trim_redundant(const Allocation& alloc, const Instance& inst) {
  if (const auto* sets = std::get_if<SetAllocation>(&alloc)) {
    SetAllocation out;
    out.bundles.reserve(sets->bundles.size());
    for (std::size_t i = 0; i < sets->bundles.size(); ++i)
      out.bundles.push_back(trim_bundle(inst.agents[i], sets->bundles[i]));
    return out;
  }
  if (const auto* units = std::get_if<UnitAllocation>(&alloc)) {
    UnitAllocation out = *units;
    for (std::size_t i = 0; i < out.counts.size(); ++i) {
      const auto& v = std::get<MultiUnit>(inst.agents[i]);
      while (out.counts[i] > 0 &&
             std::abs(v.value_of_count(out.counts[i]) - v.value_of_count(out.counts[i] - 1)) <=
                 kTol)
        --out.counts[i];
    }
    return out;
  }
  return alloc;  // fractional allocations are already non-redundant
}

Outcome run_vcg(const Instance& inst, const SupplyParams& supply) {
  validate_shape(inst);
  if (inst.kind == Kind::divisible) return vcg_divisible(inst, supply.capacity);
  if (all_unit_demand(inst)) return vcg_unit_demand(inst, supply.copies);
  if (all_multi_unit(inst)) return vcg_multi_unit(inst, supply.copies);
  if (supply.copies != 1)
    throw std::invalid_argument("copies supported for unit-demand and multi-unit only");
  return vcg_explicit(inst);
}

Outcome run_vcg(const Instance& inst) { return run_vcg(inst, SupplyParams{}); }

bool clarke_payment_crosscheck(const Instance& inst, const SupplyParams& supply,
                               const Outcome& outcome) {
  const int n = inst.n();
  for (int i = 0; i < n; ++i) {
    double bundle_value = 0.0;
    double without_i = 0.0;
    if (const auto* sets = std::get_if<SetAllocation>(&outcome.allocation)) {
      bundle_value = eval_copied(inst.agents[i], sets->bundles[i]);
      if (all_unit_demand(inst)) {
        without_i = unit_demand_welfare(as_unit_demand(inst),
                                        std::vector<int>(inst.m, supply.copies), i);
      } else {
        std::vector<Explicit> tables;
        for (const Valuation& v : inst.agents) tables.push_back(to_explicit(v));
        without_i = explicit_welfare(tables, (1u << inst.m) - 1u, i);
      }
    } else if (const auto* units = std::get_if<UnitAllocation>(&outcome.allocation)) {
      bundle_value = std::get<MultiUnit>(inst.agents[i]).value_of_count(units->counts[i]);
      without_i = multiunit_welfare(as_multi_unit(inst),
                                    static_cast<long long>(inst.m) * supply.copies, inst.m, i);
    } else {
      const auto& fr = std::get<FractionalAllocation>(outcome.allocation);
      bundle_value = eval(inst.agents[i], fr.fractions[i]);
      without_i = divisible_welfare(as_divisible(inst), supply.capacity,
                                    FractionVector(inst.m, 1.0), i);
    }
    const double pivot = without_i - (outcome.welfare - bundle_value);
    if (std::abs(pivot - outcome.payments[i]) > kTol) return false;
  }
  return true;
}

CopiedItemSet IntervalAllocation::bundle_of(int agent, int m) const {
  CopiedItemSet out;
  const Span& s = spans[agent];
  for (long long p = s.lo; p < s.hi; ++p)
    out.push_back(CopiedItem{static_cast<int>(p % m), static_cast<int>(p / m)});
  std::sort(out.begin(), out.end());
  return out;
}

IntervalAllocation layout_intervals(const std::vector<int>& counts, int m, int level) {
  IntervalAllocation out;
  out.total = static_cast<long long>(m) << level;
  long long cursor = 0;
  for (int k : counts) {
    if (k > m) throw std::invalid_argument("interval longer than one copy block");
    out.spans.push_back({cursor, cursor + k});
    cursor += k;
  }
  if (cursor > out.total) throw std::invalid_argument("interval layout exceeds supply");
  return out;
}

MultiUnitSequentialResult run_vcg_multiunit_sequential(const Instance& inst, int level) {
  validate_shape(inst);
  if (!all_multi_unit(inst)) throw std::invalid_argument("sequential VCG needs multi-unit agents");
  if (level < 0 || level > 20) throw std::invalid_argument("copy level must be in [0, 20]");
  Outcome outcome = vcg_multi_unit(inst, 1 << level);
  MultiUnitSequentialResult result;
  result.counts = std::get<UnitAllocation>(outcome.allocation);
  result.intervals = layout_intervals(result.counts.counts, inst.m, level);
  result.payments = std::move(outcome.payments);
  result.welfare = outcome.welfare;
  return result;
}

}  // namespace surplus
