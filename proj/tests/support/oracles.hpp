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

// Brute-force oracles for the solver tests. Deliberately naive and written
// against the definitions only, so they share no code path with the library
// solvers they check.

#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "surplus/valuations.hpp"

namespace oracles {

// Max-weight assignment: each agent at most one item, item j at most caps[j]
// agents. Plain recursion over agents.
inline double assignment_welfare(const std::vector<std::vector<double>>& weights,
                                 std::vector<int> caps, std::size_t agent = 0) {
  if (agent == weights.size()) return 0.0;
  double best = assignment_welfare(weights, caps, agent + 1);  // unassigned
  for (std::size_t j = 0; j < caps.size(); ++j) {
    if (caps[j] == 0) continue;
    --caps[j];
    best = std::max(best, weights[agent][j] + assignment_welfare(weights, caps, agent + 1));
    ++caps[j];
  }
  return best;
}

// Multi-unit counts: enumerate every split of the unit supply.
inline double multiunit_welfare(const std::vector<std::vector<double>>& marginals,
                                long long units, int cap, std::size_t agent = 0) {
  if (agent == marginals.size()) return 0.0;
  double best = 0.0;
  const int upto = std::min<long long>(cap, std::min<long long>(units,
                                       static_cast<long long>(marginals[agent].size())));
  for (int k = 0; k <= upto; ++k) {
    double value = 0.0;
    for (int t = 0; t < k; ++t) value += marginals[agent][t];
    best = std::max(best, value + multiunit_welfare(marginals, units - k, cap, agent + 1));
  }
  return best;
}

// Explicit tables: recurse over agents, each picking a subset of what is
// left.
inline double explicit_welfare(const std::vector<surplus::Explicit>& tables,
                               std::uint32_t remaining, std::size_t agent = 0) {
  if (agent == tables.size()) return 0.0;
  double best = 0.0;
  // iterate subsets of `remaining`
  std::uint32_t sub = remaining;
  for (;;) {
    best = std::max(best,
                    tables[agent].value(sub) + explicit_welfare(tables, remaining & ~sub, agent + 1));
    if (sub == 0) break;
    sub = (sub - 1) & remaining;
  }
  return best;
}

// Divisible separable curves on the 1/64 grid: per item, dynamic program
// over agents and grid units. Exact when all breakpoints sit on the grid.
inline double grid_divisible_welfare(const std::vector<surplus::DivisibleSeparable>& profile,
                                     double q, const std::vector<double>& supply,
                                     int grid = 64) {
  if (profile.empty()) return 0.0;
  const int m = static_cast<int>(profile.front().curves.size());
  const int cap_units = static_cast<int>(q * grid + 0.5);
  double total = 0.0;
  for (int j = 0; j < m; ++j) {
    const int units = static_cast<int>(supply[j] * grid + 0.5);
    std::vector<double> best(units + 1, 0.0);
    for (const auto& agent : profile) {
      std::vector<double> next = best;
      for (int used = 0; used <= units; ++used) {
        for (int take = 1; take <= std::min(cap_units, units - used); ++take) {
          const double value = agent.curves[j].value(static_cast<double>(take) / grid);
          next[used + take] = std::max(next[used + take], best[used] + value);
        }
      }
      best = std::move(next);
    }
    total += *std::max_element(best.begin(), best.end());
  }
  return total;
}

}  // namespace oracles
