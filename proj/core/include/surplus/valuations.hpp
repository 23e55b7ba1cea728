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

#include <compare>
#include <cstdint>
#include <variant>
#include <vector>

namespace surplus {

/// Absolute tolerance used for every floating-point comparison in the
/// library. All quantities of interest are desk-scale closed forms, so
/// 1e-9 separates distinct values comfortably.
inline constexpr double kTol = 1e-9;

using ItemId = int;

/// One of the 2^level copies of an original item.
struct CopiedItem {
  ItemId item{0};
  int copy{0};
  friend auto operator<=>(const CopiedItem&, const CopiedItem&) = default;
};

using ItemSet = std::vector<ItemId>;           // sorted, distinct
using CopiedItemSet = std::vector<CopiedItem>;  // sorted, distinct
using FractionVector = std::vector<double>;     // one fraction in [0,1] per item

// ---------------------------------------------------------------------------
// Valuation classes
// ---------------------------------------------------------------------------

/// Value of a bundle is the single best item in it.
struct UnitDemand {
  std::vector<double> weights;  // per item, >= 0
};

/// Value depends only on the number of (distinct) items held; marginals are
/// nonincreasing, which is exactly submodularity for this class.
struct MultiUnit {
  std::vector<double> marginals;  // d_1 >= d_2 >= ... >= d_m >= 0

  double value_of_count(int k) const;
};

/// Full table over item subsets, indexed by bitmask. Capped at 12 items;
/// beyond that only brute-force oracles would want it anyway.
struct Explicit {
  int items{0};
  std::vector<double> table;  // size 1 << items

  double value(std::uint32_t mask) const { return table[mask]; }
};

inline constexpr int kMaxExplicitItems = 12;

/// Concave piecewise-linear curve on [0,1]:
/// breakpoints 0 = b_0 < b_1 < ... < b_K = 1, slopes s_1 > ... > s_K >= 0.
struct Curve {
  std::vector<double> breakpoints;  // K+1 entries, first 0, last 1
  std::vector<double> slopes;       // K entries

  double value(double x) const;
  int segments() const { return static_cast<int>(slopes.size()); }
};

/// Builds a curve, merging adjacent segments whose slopes agree within
/// tolerance. Throws on structural problems (sizes, non-increasing
/// breakpoints, not spanning [0,1]); slope-order violations are left for
/// check_class to flag.
Curve make_curve(std::vector<double> breakpoints, std::vector<double> slopes);

Curve linear_curve(double slope);

/// Separable concave valuation over divisible goods: one curve per item.
struct DivisibleSeparable {
  std::vector<Curve> curves;
};

using Valuation = std::variant<UnitDemand, MultiUnit, Explicit, DivisibleSeparable>;

enum class Kind { indivisible, divisible };

/// Item universe plus one valuation per agent. Valuations are immutable
/// after construction and safe to share across threads.
struct Instance {
  Kind kind{Kind::indivisible};
  int m{0};
  std::vector<Valuation> agents;

  int n() const { return static_cast<int>(agents.size()); }
};

/// Validates that all agent valuations have the instance's kind and match
/// the item count m. Throws std::invalid_argument otherwise.
void validate_shape(const Instance& inst);

int item_count(const Valuation& v);
bool is_divisible(const Valuation& v);

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

/// Value of an indivisible bundle. The bundle must be sorted, distinct, and
/// within [0, m); throws std::out_of_range / std::invalid_argument otherwise.
double eval(const Valuation& v, const ItemSet& bundle);

/// Value of a fractional allocation (divisible valuations only). Fractions
/// must lie in [0, 1] up to tolerance.
double eval(const Valuation& v, const FractionVector& x);

/// Distinct original items appearing in a set of copies.
ItemSet project_g(const CopiedItemSet& s);

/// Convenience: eval(v, project_g(s)).
double eval_copied(const Valuation& v, const CopiedItemSet& s);

/// Valuation over copied-item sets that evaluates the base valuation on the
/// projection to original items. Keeps the base class visible so solvers
/// can specialize.
struct CopiesValuation {
  Valuation base;
  int copies{1};  // 2^level

  double eval_copies(const CopiedItemSet& s) const { return eval_copied(base, s); }
};

/// Lifts an indivisible valuation to the instance with 2^level copies.
CopiesValuation lift_to_copies(const Valuation& v, int level);

// ---------------------------------------------------------------------------
// Capacity cap
// ---------------------------------------------------------------------------

/// Curve capped at q: identical below q, constant above. Stays concave
/// piecewise-linear. q must lie in (0, 1].
Curve cap(const Curve& c, double q);
DivisibleSeparable cap(const DivisibleSeparable& v, double q);

// ---------------------------------------------------------------------------
// Diagnostics
// ---------------------------------------------------------------------------

struct ClassDiagnostics {
  bool normalized{true};
  bool monotone{true};
  bool submodular_marginals{true};
  bool concave_curve{true};

  bool ok() const { return normalized && monotone && submodular_marginals && concave_curve; }
};

/// Checks the class invariants of a valuation. Diagnostics only, never
/// throws. Explicit monotonicity is checked over all subset pairs differing
/// in one element.
ClassDiagnostics check_class(const Valuation& v);

}  // namespace surplus
