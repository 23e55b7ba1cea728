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

#include <vector>

#include "surplus/welfare.hpp"

namespace surplus {

/// Deterministic auction outcome: allocation plus per-agent payments.
/// Every realization is individually rational: value minus payment >= 0.
struct Outcome {
  Allocation allocation;
  std::vector<double> payments;
  double welfare{0.0};

  double total_payments() const;
  double surplus() const { return welfare - total_payments(); }
};

/// Supply description handed to the VCG wrapper: `copies` per item for
/// indivisible instances, per-agent `capacity` for divisible ones.
struct SupplyParams {
  int copies{1};
  double capacity{1.0};
};

/// Efficient allocation with Clarke payments:
///   p_i = SW(N\{i}, full supply) - SW(N\{i}, supply minus i's bundle).
/// The allocation is non-redundancy-trimmed before payments. All welfare
/// terms reuse the same deterministic solver and tie-breaking.
Outcome run_vcg(const Instance& inst);
Outcome run_vcg(const Instance& inst, const SupplyParams& supply);

/// True iff the Clarke formula agrees with the pivot form
/// SW(N\{i}, full) - (SW(N, full) - v_i(A_i)) for every agent, within
/// tolerance.
bool clarke_payment_crosscheck(const Instance& inst, const SupplyParams& supply,
                               const Outcome& outcome);

/// Drops items whose removal leaves the holder's value unchanged. Bundles
/// are scanned in descending (item, copy) order until stable, so duplicate
/// copies keep the lowest copy index. Welfare is unchanged; idempotent.
Allocation trim_redundant(const Allocation& alloc, const Instance& inst);

/// Consecutive per-agent intervals over the copy-major global order
/// (position p holds copy p / m of item p % m). Interval length never
/// exceeds m, so no agent holds two copies of the same item.
struct IntervalAllocation {
  struct Span {
    long long lo{0};
    long long hi{0};  // half-open
  };
  std::vector<Span> spans;  // per agent, in service (index) order
  long long total{0};       // m * 2^level; [last hi, total) is the idle tail

  CopiedItemSet bundle_of(int agent, int m) const;
};

/// Lays out unit counts as consecutive intervals in agent-index order.
IntervalAllocation layout_intervals(const std::vector<int>& counts, int m, int level);

struct MultiUnitSequentialResult {
  UnitAllocation counts;
  IntervalAllocation intervals;
  std::vector<double> payments;
  double welfare{0.0};
};

/// Multi-unit VCG over the instance with 2^level copies of each item,
/// realized as the sequential-interval implementation. Payments equal the
/// generic Clarke payments on the same unit counts.
MultiUnitSequentialResult run_vcg_multiunit_sequential(const Instance& inst, int level);

}  // namespace surplus
