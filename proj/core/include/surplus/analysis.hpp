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

#include <functional>
#include <string>

#include "surplus/mechanisms.hpp"

namespace surplus {

/// Exact surplus accounting of a finite-support distribution against the
/// true valuations, with the first-best welfare as benchmark.
struct SurplusReport {
  double expected_welfare{0.0};
  double expected_payments{0.0};
  double expected_surplus{0.0};
  double first_best{0.0};
  double ratio{1.0};  // first_best / expected_surplus
};

SurplusReport expected_surplus(const MechanismDistribution& dist, const Instance& truth);

/// Expected utility of one agent under its true valuation.
double expected_utility(const MechanismDistribution& dist, const Instance& truth, int agent);

/// Two-agent single-item benchmark: max{v1 - v2, (v1 + v2) / 2} after
/// reindexing so the first value is the larger one.
double benchmark_G(double v1, double v2);

// ---------------------------------------------------------------------------
// Incentive audits
// ---------------------------------------------------------------------------

using MechanismFn = std::function<MechanismDistribution(const Instance&)>;

struct AuditReport {
  std::string mechanism_id;
  std::string instance_digest;
  int deviations_tried{0};
  double max_gain{0.0};
  bool pass{true};
};

/// Probes truthfulness in expectation: for each agent, rebuilds the
/// distribution under a family of misreports (per-parameter scalings by
/// {0, 1/4, 1/2, 2, 4}, then random same-class draws) and reports the
/// largest utility gain found. A finite family falsifies, it does not
/// prove.
AuditReport audit_tie(const MechanismFn& mechanism, const std::string& mechanism_id,
                      const Instance& truth, int deviation_count, std::uint64_t seed);

/// True iff every support triple gives its holder nonnegative utility.
bool audit_epir(const MechanismDistribution& dist, const Instance& truth);

// ---------------------------------------------------------------------------
// Inequality verifiers. Each returns both sides so failures localize.
// ---------------------------------------------------------------------------

struct CheckResult {
  double lhs{0.0};
  double rhs{0.0};
  bool pass{false};

  double margin() const { return lhs - rhs; }
};

/// With K = 2^level copies of each item:
///   SW(N, 2K copies) - SW(N, K copies) >= total VCG payments(2K copies)/2.
CheckResult verify_copies_payment_claim(const Instance& inst, int level);

/// Exact expected surplus of the copies mechanism is at least
///   (q/(r+1)) * (SW(1 copy) - SW(2^r copies)/2^r).
CheckResult verify_surplus_lower_bound(const Instance& inst, int r, const Rational& q,
                                       SubroutineKind subroutine);

/// For divisible instances and q <= 1/2:
///   SW(cap q) - SW(cap 2q)/2 >= total capped-VCG payments(cap q)/2.
CheckResult verify_divisible_payment_claim(const Instance& inst, double q);

/// Closed form (m/n) * (1 - (1 - 1/m)^n) for the expected reciprocal of
/// 1 + Binomial(n-1, 1/m).
double binomial_inverse_expectation(int n, int m);

/// Highest-weight item of a unit-demand valuation; exact ties resolved by
/// the agent's fixed preference permutation.
ItemId favorite_item(const UnitDemand& v, const std::vector<int>& tiebreak_permutation);

/// FNV-1a digest of the canonical instance serialization; used to key audit
/// and verifier log lines.
std::string instance_digest(const Instance& inst);

}  // namespace surplus
