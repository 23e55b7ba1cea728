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

#include "surplus/welfare.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "internal_assignment.hpp"
#include "mcmf.hpp"

namespace surplus {

namespace {

// Lexicographic penalty scale for agent `i` of `n`: base-(m+1) place value so
// that earlier agents dominate. Clamped to keep the integer arithmetic exact
// in doubles; past the clamp ties between far-apart agents collapse, which
// only matters for instances far beyond desk scale.
double tie_scale(int i, int n, int m) {
  const double base = static_cast<double>(m + 1);
  const int max_exp = static_cast<int>(51.0 / std::log2(base));
  const int e = std::min(n - 1 - i, max_exp);
  double scale = 1.0;
  for (int k = 0; k < e; ++k) scale *= base;
  return scale;
}

struct AssignmentSolve {
  double welfare{0.0};
  std::vector<int> assigned_item;  // -1 when unmatched
};

// The layered assignment network: source -> agents -> items -> sink.
struct AssignmentNetwork {
  internal::MinCostFlow flow;
  int source;
  int sink;
  int m;
  std::vector<int> active;            // original agent indices in network order
  std::vector<int> agent_source_edge;  // [a]
  std::vector<int> agent_item_edge;    // [a * m + j], -1 when absent
  std::vector<int> item_sink_edge;     // [j], -1 when absent

  explicit AssignmentNetwork(int nodes) : flow(nodes), source(0), sink(nodes - 1), m(0) {}

  void read_assignment(const std::vector<UnitDemand>& profile, AssignmentSolve* out) const {
    for (std::size_t a = 0; a < active.size(); ++a) {
      for (int j = 0; j < m; ++j) {
        const int e = agent_item_edge[a * m + j];
        if (e >= 0 && flow.flow_on(e) > 0) {
          out->assigned_item[active[a]] = j;
          out->welfare += profile[active[a]].weights[j];
        }
      }
    }
  }
};

AssignmentNetwork build_assignment_network(const std::vector<UnitDemand>& profile,
                                           const std::vector<int>& item_caps, int skip_agent) {
  const int n = static_cast<int>(profile.size());
  const int m = static_cast<int>(item_caps.size());
  std::vector<int> active;
  active.reserve(n);
  for (int i = 0; i < n; ++i)
    if (i != skip_agent) active.push_back(i);
  const int na = static_cast<int>(active.size());

  AssignmentNetwork net(1 + na + m + 1);
  net.m = m;
  net.active = std::move(active);
  net.agent_item_edge.assign(static_cast<std::size_t>(na) * m, -1);
  net.item_sink_edge.assign(m, -1);
  net.agent_source_edge.reserve(na);
  for (int a = 0; a < na; ++a)
    net.agent_source_edge.push_back(net.flow.add_edge(net.source, 1 + a, 1, {0.0, 0.0}));
  for (int a = 0; a < na; ++a) {
    const auto& w = profile[net.active[a]].weights;
    const double scale = tie_scale(a, na, m);
    for (int j = 0; j < m; ++j) {
      if (item_caps[j] <= 0) continue;
      net.agent_item_edge[static_cast<std::size_t>(a) * m + j] =
          net.flow.add_edge(1 + a, 1 + na + j, 1, {-w[j], (j - m) * scale});
    }
  }
  for (int j = 0; j < m; ++j) {
    if (item_caps[j] > 0)
      net.item_sink_edge[j] = net.flow.add_edge(1 + na + j, net.sink, item_caps[j], {0.0, 0.0});
  }
  net.flow.finalize();
  std::vector<int> topo{net.source};
  for (int a = 0; a < na; ++a) topo.push_back(1 + a);
  for (int j = 0; j < m; ++j) topo.push_back(1 + na + j);
  topo.push_back(net.sink);
  net.flow.init_potentials_topological(topo);
  return net;
}

// Min-cost-flow assignment with per-item capacities. When `want_allocation`
// is false only the welfare value is computed (no tie-break augmentations).
AssignmentSolve solve_assignment(const std::vector<UnitDemand>& profile,
                                 const std::vector<int>& item_caps, int skip_agent,
                                 bool want_allocation) {
  AssignmentNetwork net = build_assignment_network(profile, item_caps, skip_agent);
  net.flow.run(net.source, net.sink, want_allocation);
  AssignmentSolve out;
  out.assigned_item.assign(profile.size(), -1);
  net.read_assignment(profile, &out);
  return out;
}

void require_unit_demand(const std::vector<UnitDemand>& profile, const std::vector<int>& caps) {
  for (const auto& v : profile) {
    if (v.weights.size() != caps.size())
      throw std::invalid_argument("unit-demand profile dimension mismatch");
  }
}

}  // namespace

WelfareResult max_welfare_unit_demand(const std::vector<UnitDemand>& profile,
                                      const std::vector<int>& item_caps) {
  require_unit_demand(profile, item_caps);
  const AssignmentSolve s = solve_assignment(profile, item_caps, -1, true);
  SetAllocation alloc;
  alloc.bundles.resize(profile.size());
  std::vector<int> next_copy(item_caps.size(), 0);
  for (std::size_t i = 0; i < profile.size(); ++i) {
    const int j = s.assigned_item[i];
    if (j >= 0) alloc.bundles[i].push_back(CopiedItem{j, next_copy[j]++});
  }
  return WelfareResult{std::move(alloc), s.welfare};
}

WelfareResult max_welfare_unit_demand(const std::vector<UnitDemand>& profile,
                                      int copies_per_item) {
  if (copies_per_item < 1) throw std::invalid_argument("at least one copy per item required");
  const int m = profile.empty() ? 0 : static_cast<int>(profile.front().weights.size());
  return max_welfare_unit_demand(profile, std::vector<int>(m, copies_per_item));
}

double unit_demand_welfare(const std::vector<UnitDemand>& profile,
                           const std::vector<int>& item_caps, int skip_agent) {
  require_unit_demand(profile, item_caps);
  return solve_assignment(profile, item_caps, skip_agent, false).welfare;
}

// ---------------------------------------------------------------------------

namespace {

void require_multiunit(const std::vector<MultiUnit>& profile) {
  for (const auto& v : profile) {
    for (std::size_t t = 1; t < v.marginals.size(); ++t) {
      if (v.marginals[t] > v.marginals[t - 1] + kTol)
        throw std::invalid_argument("multi-unit marginals must be nonincreasing");
    }
  }
}

std::vector<int> greedy_counts(const std::vector<MultiUnit>& profile, long long total_units,
                               int per_agent_cap, int skip_agent, double* welfare) {
  const int n = static_cast<int>(profile.size());
  std::vector<int> counts(n, 0);
  double total = 0.0;
  long long remaining = total_units;
  while (remaining > 0) {
    int best = -1;
    double best_marginal = 0.0;
    for (int i = 0; i < n; ++i) {
      if (i == skip_agent || counts[i] >= per_agent_cap) continue;
      if (counts[i] >= static_cast<int>(profile[i].marginals.size())) continue;
      const double d = profile[i].marginals[counts[i]];
      // strict improvement keeps ties on the lower agent index; zero
      // marginals are never worth allocating
      if (d > best_marginal + kTol) {
        best = i;
        best_marginal = d;
      }
    }
    if (best < 0) break;
    ++counts[best];
    total += best_marginal;
    --remaining;
  }
  if (welfare != nullptr) *welfare = total;
  return counts;
}

}  // namespace

WelfareResult max_welfare_multiunit(const std::vector<MultiUnit>& profile, long long total_units,
                                    int per_agent_cap) {
  require_multiunit(profile);
  if (total_units < 0) throw std::invalid_argument("negative unit supply");
  double welfare = 0.0;
  UnitAllocation alloc{greedy_counts(profile, total_units, per_agent_cap, -1, &welfare)};
  return WelfareResult{std::move(alloc), welfare};
}

double multiunit_welfare(const std::vector<MultiUnit>& profile, long long total_units,
                         int per_agent_cap, int skip_agent) {
  require_multiunit(profile);
  double welfare = 0.0;
  greedy_counts(profile, total_units, per_agent_cap, skip_agent, &welfare);
  return welfare;
}

// ---------------------------------------------------------------------------

namespace {

struct ExplicitSolve {
  double welfare{0.0};
  std::vector<std::uint32_t> masks;
};

ExplicitSolve solve_explicit(const std::vector<Explicit>& profile, std::uint32_t item_mask,
                             int skip_agent, bool want_allocation) {
  const int n = static_cast<int>(profile.size());
  const int m = profile.empty() ? 0 : profile.front().items;
  for (const auto& v : profile) {
    if (v.items != m) throw std::invalid_argument("explicit profile dimension mismatch");
  }
  std::vector<int> items;
  for (int j = 0; j < m; ++j)
    if ((item_mask >> j) & 1u) items.push_back(j);
  std::vector<int> active;
  for (int i = 0; i < n; ++i)
    if (i != skip_agent) active.push_back(i);
  const int na = static_cast<int>(active.size());
  const int digits = na + 1;  // each item goes to an active agent or to nobody
  double combos = 1.0;
  for (std::size_t k = 0; k < items.size(); ++k) combos *= digits;
  if (combos > 1e7) throw std::invalid_argument("explicit enumeration size guard exceeded");

  ExplicitSolve best;
  best.welfare = -1.0;
  std::vector<int> digit(items.size(), 0);
  std::vector<std::uint32_t> masks(n, 0);
  for (;;) {
    std::fill(masks.begin(), masks.end(), 0u);
    for (std::size_t k = 0; k < items.size(); ++k) {
      if (digit[k] < na) masks[active[digit[k]]] |= (1u << items[k]);
    }
    double welfare = 0.0;
    for (int i : active) welfare += profile[i].value(masks[i]);
    if (welfare > best.welfare) {
      best.welfare = welfare;
      if (want_allocation) best.masks = masks;
    }
    // Advance the item-major counter; first maximizer found is the
    // lexicographically smallest assignment.
    std::size_t k = items.size();
    while (k > 0) {
      --k;
      if (++digit[k] < digits) break;
      digit[k] = 0;
      if (k == 0) return best;
    }
    if (items.empty()) return best;
  }
}

}  // namespace

WelfareResult max_welfare_explicit(const std::vector<Explicit>& profile,
                                   std::uint32_t item_mask) {
  const ExplicitSolve s = solve_explicit(profile, item_mask, -1, true);
  SetAllocation alloc;
  alloc.bundles.resize(profile.size());
  for (std::size_t i = 0; i < profile.size(); ++i) {
    for (int j = 0; j < profile[i].items; ++j) {
      if ((s.masks[i] >> j) & 1u) alloc.bundles[i].push_back(CopiedItem{j, 0});
    }
  }
  return WelfareResult{std::move(alloc), s.welfare};
}

WelfareResult max_welfare_explicit(const std::vector<Explicit>& profile) {
  const int m = profile.empty() ? 0 : profile.front().items;
  return max_welfare_explicit(profile, (1u << m) - 1u);
}

double explicit_welfare(const std::vector<Explicit>& profile, std::uint32_t item_mask,
                        int skip_agent) {
  return solve_explicit(profile, item_mask, skip_agent, false).welfare;
}

// ---------------------------------------------------------------------------

namespace {

struct Piece {
  double slope;
  double width;
  int agent;
};

void fill_item(const std::vector<DivisibleSeparable>& profile, int item, double q,
               double supply, int skip_agent, std::vector<FractionVector>* fractions,
               double* welfare) {
  std::vector<Piece> pieces;
  for (std::size_t i = 0; i < profile.size(); ++i) {
    if (static_cast<int>(i) == skip_agent) continue;
    const Curve& c = profile[i].curves[item];
    for (int k = 0; k < c.segments(); ++k) {
      // truncate the segment at the capacity q
      const double width = std::min(c.breakpoints[k + 1], q) - c.breakpoints[k];
      if (width <= kTol) continue;
      if (c.slopes[k] > kTol)
        pieces.push_back(Piece{c.slopes[k], width, static_cast<int>(i)});
    }
  }
  // stable: ties keep agent-major generation order, i.e. lower agent first
  std::stable_sort(pieces.begin(), pieces.end(),
                   [](const Piece& a, const Piece& b) { return a.slope > b.slope; });
  double remaining = supply;
  for (const Piece& p : pieces) {
    if (remaining <= kTol) break;
    const double take = std::min(p.width, remaining);
    if (fractions != nullptr) (*fractions)[p.agent][item] += take;
    *welfare += p.slope * take;
    remaining -= take;
  }
}

}  // namespace

WelfareResult max_welfare_divisible(const std::vector<DivisibleSeparable>& profile, double q,
                                    const FractionVector& supply) {
  if (q <= 0.0 || q > 1.0 + kTol) throw std::invalid_argument("capacity q must be in (0,1]");
  const int m = profile.empty() ? 0 : static_cast<int>(profile.front().curves.size());
  for (const auto& v : profile) {
    if (static_cast<int>(v.curves.size()) != m)
      throw std::invalid_argument("divisible profile dimension mismatch");
  }
  if (static_cast<int>(supply.size()) != m)
    throw std::invalid_argument("supply dimension mismatch");
  FractionalAllocation alloc;
  alloc.fractions.assign(profile.size(), FractionVector(m, 0.0));
  double welfare = 0.0;
  for (int j = 0; j < m; ++j) fill_item(profile, j, q, supply[j], -1, &alloc.fractions, &welfare);
  return WelfareResult{std::move(alloc), welfare};
}

WelfareResult max_welfare_divisible(const std::vector<DivisibleSeparable>& profile, double q) {
  const int m = profile.empty() ? 0 : static_cast<int>(profile.front().curves.size());
  return max_welfare_divisible(profile, q, FractionVector(m, 1.0));
}

double divisible_welfare(const std::vector<DivisibleSeparable>& profile, double q,
                         const FractionVector& supply, int skip_agent) {
  if (q <= 0.0 || q > 1.0 + kTol) throw std::invalid_argument("capacity q must be in (0,1]");
  double welfare = 0.0;
  for (std::size_t j = 0; j < supply.size(); ++j)
    fill_item(profile, static_cast<int>(j), q, supply[j], skip_agent, nullptr, &welfare);
  return welfare;
}

// ---------------------------------------------------------------------------

namespace {

template <typename T>
std::vector<T> extract_profile(const Instance& inst, const char* what) {
  std::vector<T> out;
  out.reserve(inst.agents.size());
  for (const Valuation& v : inst.agents) {
    const T* p = std::get_if<T>(&v);
    if (p == nullptr) throw std::invalid_argument(std::string("instance is not uniformly ") + what);
    out.push_back(*p);
  }
  return out;
}

}  // namespace

std::vector<UnitDemand> as_unit_demand(const Instance& inst) {
  return extract_profile<UnitDemand>(inst, "unit-demand");
}
std::vector<MultiUnit> as_multi_unit(const Instance& inst) {
  return extract_profile<MultiUnit>(inst, "multi-unit");
}
std::vector<Explicit> as_explicit(const Instance& inst) {
  return extract_profile<Explicit>(inst, "explicit");
}
std::vector<DivisibleSeparable> as_divisible(const Instance& inst) {
  return extract_profile<DivisibleSeparable>(inst, "divisible");
}

Explicit to_explicit(const Valuation& v) {
  if (is_divisible(v)) throw std::invalid_argument("cannot tabulate a divisible valuation");
  const int m = item_count(v);
  if (m > kMaxExplicitItems) throw std::invalid_argument("explicit valuation limited to 12 items");
  Explicit e;
  e.items = m;
  e.table.resize(1u << m);
  for (std::uint32_t mask = 0; mask < e.table.size(); ++mask) {
    ItemSet bundle;
    for (int j = 0; j < m; ++j)
      if ((mask >> j) & 1u) bundle.push_back(j);
    e.table[mask] = eval(v, bundle);
  }
  return e;
}

double first_best(const Instance& inst) {
  validate_shape(inst);
  if (inst.kind == Kind::divisible) {
    return max_welfare_divisible(as_divisible(inst), 1.0).welfare;
  }
  if (std::all_of(inst.agents.begin(), inst.agents.end(),
                  [](const Valuation& v) { return std::holds_alternative<UnitDemand>(v); })) {
    return max_welfare_unit_demand(as_unit_demand(inst), 1).welfare;
  }
  if (std::all_of(inst.agents.begin(), inst.agents.end(),
                  [](const Valuation& v) { return std::holds_alternative<MultiUnit>(v); })) {
    return max_welfare_multiunit(as_multi_unit(inst), inst.m, inst.m).welfare;
  }
  std::vector<Explicit> tables;
  tables.reserve(inst.agents.size());
  for (const Valuation& v : inst.agents) tables.push_back(to_explicit(v));
  return max_welfare_explicit(tables).welfare;
}

double copied_welfare(const Instance& inst, int copies) {
  if (inst.kind == Kind::divisible)
    throw std::invalid_argument("copied welfare applies to indivisible instances");
  if (copies < 1) throw std::invalid_argument("at least one copy required");
  if (std::all_of(inst.agents.begin(), inst.agents.end(),
                  [](const Valuation& v) { return std::holds_alternative<UnitDemand>(v); })) {
    return unit_demand_welfare(as_unit_demand(inst), std::vector<int>(inst.m, copies));
  }
  if (std::all_of(inst.agents.begin(), inst.agents.end(),
                  [](const Valuation& v) { return std::holds_alternative<MultiUnit>(v); })) {
    return multiunit_welfare(as_multi_unit(inst),
                             static_cast<long long>(inst.m) * copies, inst.m);
  }
  throw std::invalid_argument("copied welfare supports unit-demand and multi-unit profiles");
}

namespace internal {

std::vector<double> assignment_clarke_payments(const std::vector<UnitDemand>& profile,
                                               const std::vector<int>& item_caps,
                                               const std::vector<int>& assigned_item,
                                               bool warm) {
  const int n = static_cast<int>(profile.size());
  const int m = static_cast<int>(item_caps.size());
  std::vector<double> payments(n, 0.0);
  if (!warm) {
    for (int i = 0; i < n; ++i) {
      const int j = assigned_item[i];
      if (j < 0) continue;
      const double without = solve_assignment(profile, item_caps, i, false).welfare;
      std::vector<int> reduced = item_caps;
      --reduced[j];
      const double without_minus = solve_assignment(profile, reduced, i, false).welfare;
      payments[i] = without - without_minus;
    }
    return payments;
  }

  // Warm path: solve once with the exact tie-breaking of the allocation
  // pass, then per agent cancel its unit of flow and resume augmenting.
  AssignmentNetwork net = build_assignment_network(profile, item_caps, -1);
  net.flow.run(net.source, net.sink, true);
  const auto welfare_of_flow = [&]() {
    double total = 0.0;
    for (int a = 0; a < n; ++a) {
      for (int j = 0; j < m; ++j) {
        const int e = net.agent_item_edge[static_cast<std::size_t>(a) * m + j];
        if (e >= 0 && net.flow.flow_on(e) > 0) total += profile[a].weights[j];
      }
    }
    return total;
  };
  const internal::MinCostFlow::Snapshot base = net.flow.save();
  for (int i = 0; i < n; ++i) {
    const int j = assigned_item[i];
    if (j < 0) continue;
    const int via = net.agent_item_edge[static_cast<std::size_t>(i) * m + j];
    // SW(N\{i}, caps): drop i's unit, close i's source edge so it cannot
    // re-enter. The freed capacity on item j can leave a negative-reduced
    // residual arc; repair it before resuming, falling back to a cold solve
    // when the repair cannot certify optimality.
    net.flow.cancel_unit_path(net.source, net.sink, via);
    net.flow.reduce_capacity(net.agent_source_edge[i], 1);
    double without;
    if (net.flow.repair_entering_arc(net.sink, net.item_sink_edge[j])) {
      net.flow.run(net.source, net.sink, false);
      without = welfare_of_flow();
    } else {
      without = solve_assignment(profile, item_caps, i, false).welfare;
    }
    net.flow.restore(base);
    // SW(N\{i}, caps minus i's bundle): the canceled unit exactly offsets
    // the capacity reduction, so the flow stays optimal for its value and
    // the plain resume is enough.
    net.flow.cancel_unit_path(net.source, net.sink, via);
    net.flow.reduce_capacity(net.agent_source_edge[i], 1);
    net.flow.reduce_capacity(net.item_sink_edge[j], 1);
    net.flow.run(net.source, net.sink, false);
    const double without_minus = welfare_of_flow();
    net.flow.restore(base);
    payments[i] = without - without_minus;
  }
  return payments;
}

}  // namespace internal

double allocation_value(const Instance& inst, const Allocation& alloc) {
  double total = 0.0;
  if (const auto* sets = std::get_if<SetAllocation>(&alloc)) {
    for (std::size_t i = 0; i < sets->bundles.size(); ++i)
      total += eval_copied(inst.agents[i], sets->bundles[i]);
  } else if (const auto* units = std::get_if<UnitAllocation>(&alloc)) {
    for (std::size_t i = 0; i < units->counts.size(); ++i)
      total += std::get<MultiUnit>(inst.agents[i]).value_of_count(units->counts[i]);
  } else {
    const auto& fr = std::get<FractionalAllocation>(alloc);
    for (std::size_t i = 0; i < fr.fractions.size(); ++i)
      total += eval(inst.agents[i], fr.fractions[i]);
  }
  return total;
}

}  // namespace surplus
