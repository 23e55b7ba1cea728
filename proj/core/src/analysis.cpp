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

#include "surplus/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "surplus/rng.hpp"

namespace surplus {

namespace {

double triple_value(const Instance& truth, int agent, const LotteryBundle& bundle) {
  if (const auto* items = std::get_if<ItemSet>(&bundle))
    return eval(truth.agents[agent], *items);
  return eval(truth.agents[agent], std::get<FractionVector>(bundle));
}

}  // namespace

SurplusReport expected_surplus(const MechanismDistribution& dist, const Instance& truth) {
  SurplusReport report;
  for (const Branch& b : dist.branches) {
    const double pb = b.prob.to_double();
    if (static_cast<int>(b.lotteries.size()) > truth.n())
      throw std::invalid_argument("distribution has more agents than the instance");
    for (std::size_t i = 0; i < b.lotteries.size(); ++i) {
      for (const LotteryTriple& t : b.lotteries[i].triples) {
        const double pt = pb * t.prob.to_double();
        report.expected_welfare += pt * triple_value(truth, static_cast<int>(i), t.bundle);
        report.expected_payments += pt * t.payment;
      }
    }
  }
  report.expected_surplus = report.expected_welfare - report.expected_payments;
  report.first_best = first_best(truth);
  if (report.first_best <= kTol && report.expected_surplus <= kTol) {
    report.ratio = 1.0;
  } else {
    report.ratio = report.first_best / report.expected_surplus;
  }
  return report;
}

double expected_utility(const MechanismDistribution& dist, const Instance& truth, int agent) {
  double utility = 0.0;
  for (const Branch& b : dist.branches) {
    if (agent >= static_cast<int>(b.lotteries.size())) continue;
    const double pb = b.prob.to_double();
    for (const LotteryTriple& t : b.lotteries[agent].triples)
      utility += pb * t.prob.to_double() * (triple_value(truth, agent, t.bundle) - t.payment);
  }
  return utility;
}

double benchmark_G(double v1, double v2) {
  if (v1 < 0.0 || v2 < 0.0) throw std::invalid_argument("benchmark needs nonnegative values");
  const double hi = std::max(v1, v2);
  const double lo = std::min(v1, v2);
  return std::max(hi - lo, (hi + lo) / 2.0);
}

// ---------------------------------------------------------------------------
// Audits
// ---------------------------------------------------------------------------

namespace {

constexpr double kScaleFactors[] = {0.0, 0.25, 0.5, 2.0, 4.0};

// Number of scalable parameters of a valuation.
int parameter_count(const Valuation& v) {
  return std::visit(
      [](const auto& arg) -> int {
        using T = std::decay_t<decltype(arg)>;
        if constexpr (std::is_same_v<T, UnitDemand>) {
          return static_cast<int>(arg.weights.size());
        } else if constexpr (std::is_same_v<T, MultiUnit>) {
          return static_cast<int>(arg.marginals.size());
        } else if constexpr (std::is_same_v<T, Explicit>) {
          return static_cast<int>(arg.table.size()) - 1;  // empty set stays 0
        } else {
          int total = 0;
          for (const Curve& c : arg.curves) total += c.segments();
          return total;
        }
      },
      v);
}

// Restores the class invariants a mechanism expects from a report.
Valuation sanitize(Valuation v) {
  std::visit(
      [](auto& arg) {
        using T = std::decay_t<decltype(arg)>;
        if constexpr (std::is_same_v<T, UnitDemand>) {
          for (double& w : arg.weights) w = std::max(0.0, w);
        } else if constexpr (std::is_same_v<T, MultiUnit>) {
          for (double& d : arg.marginals) d = std::max(0.0, d);
          std::sort(arg.marginals.begin(), arg.marginals.end(), std::greater<>());
        } else if constexpr (std::is_same_v<T, Explicit>) {
          arg.table[0] = 0.0;
          for (std::uint32_t mask = 1; mask < arg.table.size(); ++mask) {
            for (int j = 0; j < arg.items; ++j) {
              if ((mask >> j) & 1u)
                arg.table[mask] = std::max(arg.table[mask], arg.table[mask & ~(1u << j)]);
            }
          }
        } else {
          for (Curve& c : arg.curves) {
            std::vector<double> slopes = c.slopes;
            for (double& s : slopes) s = std::max(0.0, s);
            std::sort(slopes.begin(), slopes.end(), std::greater<>());
            c = make_curve(c.breakpoints, slopes);
          }
        }
      },
      v);
  return v;
}

Valuation scale_parameter(const Valuation& v, int param, double factor) {
  Valuation out = v;
  std::visit(
      [&](auto& arg) {
        using T = std::decay_t<decltype(arg)>;
        if constexpr (std::is_same_v<T, UnitDemand>) {
          arg.weights[param] *= factor;
        } else if constexpr (std::is_same_v<T, MultiUnit>) {
          arg.marginals[param] *= factor;
        } else if constexpr (std::is_same_v<T, Explicit>) {
          arg.table[param + 1] *= factor;
        } else {
          int k = param;
          for (Curve& c : arg.curves) {
            if (k < c.segments()) {
              c.slopes[k] *= factor;
              break;
            }
            k -= c.segments();
          }
        }
      },
      out);
  return sanitize(std::move(out));
}

double max_parameter(const Valuation& v) {
  double best = 1.0;
  std::visit(
      [&](const auto& arg) {
        using T = std::decay_t<decltype(arg)>;
        if constexpr (std::is_same_v<T, UnitDemand>) {
          for (double w : arg.weights) best = std::max(best, w);
        } else if constexpr (std::is_same_v<T, MultiUnit>) {
          for (double d : arg.marginals) best = std::max(best, d);
        } else if constexpr (std::is_same_v<T, Explicit>) {
          for (double x : arg.table) best = std::max(best, x);
        } else {
          for (const Curve& c : arg.curves)
            for (double s : c.slopes) best = std::max(best, s);
        }
      },
      v);
  return best;
}

Valuation random_same_class(const Valuation& v, CounterRng& rng) {
  const double scale = 2.0 * max_parameter(v);
  Valuation out = v;
  std::visit(
      [&](auto& arg) {
        using T = std::decay_t<decltype(arg)>;
        if constexpr (std::is_same_v<T, UnitDemand>) {
          for (double& w : arg.weights) w = rng.uniform(0.0, scale);
        } else if constexpr (std::is_same_v<T, MultiUnit>) {
          for (double& d : arg.marginals) d = rng.uniform(0.0, scale);
        } else if constexpr (std::is_same_v<T, Explicit>) {
          for (std::uint32_t mask = 1; mask < arg.table.size(); ++mask)
            arg.table[mask] = rng.uniform(0.0, scale);
        } else {
          for (Curve& c : arg.curves)
            for (double& s : c.slopes) s = rng.uniform(0.0, scale);
        }
      },
      out);
  return sanitize(std::move(out));
}

}  // namespace

AuditReport audit_tie(const MechanismFn& mechanism, const std::string& mechanism_id,
                      const Instance& truth, int deviation_count, std::uint64_t seed) {
  AuditReport report;
  report.mechanism_id = mechanism_id;
  report.instance_digest = instance_digest(truth);
  const MechanismDistribution truthful = mechanism(truth);
  for (int i = 0; i < truth.n(); ++i) {
    const double truthful_utility = expected_utility(truthful, truth, i);
    const int params = parameter_count(truth.agents[i]);
    constexpr int kNumFactors = static_cast<int>(std::size(kScaleFactors));
    CounterRng rng(seed ^ (0x9e3779b97f4a7c15ull * static_cast<std::uint64_t>(i + 1)));
    for (int d = 0; d < deviation_count; ++d) {
      Valuation misreport;
      const int structured = params * kNumFactors;
      if (d < structured && params > 0) {
        misreport = scale_parameter(truth.agents[i], d / kNumFactors, kScaleFactors[d % kNumFactors]);
      } else {
        misreport = random_same_class(truth.agents[i], rng);
      }
      Instance deviated = truth;
      deviated.agents[i] = std::move(misreport);
      const MechanismDistribution dist = mechanism(deviated);
      const double gain = expected_utility(dist, truth, i) - truthful_utility;
      report.max_gain = std::max(report.max_gain, gain);
      ++report.deviations_tried;
    }
  }
  report.pass = report.max_gain <= kTol;
  return report;
}

bool audit_epir(const MechanismDistribution& dist, const Instance& truth) {
  for (const Branch& b : dist.branches) {
    for (std::size_t i = 0; i < b.lotteries.size(); ++i) {
      for (const LotteryTriple& t : b.lotteries[i].triples) {
        if (triple_value(truth, static_cast<int>(i), t.bundle) - t.payment < -kTol) return false;
      }
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Verifiers
// ---------------------------------------------------------------------------

CheckResult verify_copies_payment_claim(const Instance& inst, int level) {
  const int base_copies = 1 << level;
  const double sw_double = copied_welfare(inst, 2 * base_copies);
  const double sw_base = copied_welfare(inst, base_copies);
  const Outcome outcome = run_vcg(inst, SupplyParams{2 * base_copies, 1.0});
  CheckResult r;
  r.lhs = sw_double - sw_base;
  r.rhs = outcome.total_payments() / 2.0;
  r.pass = r.lhs >= r.rhs - kTol;
  return r;
}

CheckResult verify_surplus_lower_bound(const Instance& inst, int r, const Rational& q,
                                       SubroutineKind subroutine) {
  const MechanismDistribution dist = vcg_with_copies(inst, r, q, subroutine);
  const SurplusReport report = expected_surplus(dist, inst);
  const double sw_one = copied_welfare(inst, 1);
  const double sw_top = copied_welfare(inst, 1 << r);
  CheckResult out;
  out.lhs = report.expected_surplus;
  out.rhs = q.to_double() / (r + 1) * (sw_one - sw_top / std::ldexp(1.0, r));
  out.pass = out.lhs >= out.rhs - kTol;
  return out;
}

CheckResult verify_divisible_payment_claim(const Instance& inst, double q) {
  if (q > 0.5 + kTol) throw std::invalid_argument("claim requires q <= 1/2");
  const auto profile = as_divisible(inst);
  const FractionVector ones(inst.m, 1.0);
  const double sw_q = max_welfare_divisible(profile, q, ones).welfare;
  const double sw_2q = max_welfare_divisible(profile, 2.0 * q, ones).welfare;
  const Outcome outcome = run_vcg(inst, SupplyParams{1, q});
  CheckResult r;
  r.lhs = sw_q - sw_2q / 2.0;
  r.rhs = outcome.total_payments() / 2.0;
  r.pass = r.lhs >= r.rhs - kTol;
  return r;
}

double binomial_inverse_expectation(int n, int m) {
  if (n < 1 || m < 1) throw std::invalid_argument("need n >= 1 and m >= 1");
  const double p = 1.0 / m;
  return (static_cast<double>(m) / n) * (1.0 - std::pow(1.0 - p, n));
}

ItemId favorite_item(const UnitDemand& v, const std::vector<int>& tiebreak_permutation) {
  if (v.weights.empty()) throw std::invalid_argument("unit-demand valuation with no items");
  std::vector<int> order = tiebreak_permutation;
  if (order.empty()) {
    order.resize(v.weights.size());
    for (std::size_t j = 0; j < order.size(); ++j) order[j] = static_cast<int>(j);
  }
  if (order.size() != v.weights.size())
    throw std::invalid_argument("tiebreak permutation dimension mismatch");
  ItemId best = order.front();
  for (int j : order) {
    if (v.weights[j] > v.weights[best]) best = j;
  }
  return best;
}

std::string instance_digest(const Instance& inst) {
  // Canonical flat rendering, hashed with FNV-1a 64.
  std::string text = inst.kind == Kind::divisible ? "d" : "i";
  text += ":" + std::to_string(inst.m);
  char buf[32];
  const auto append = [&](double x) {
    std::snprintf(buf, sizeof buf, ",%.17g", x);
    text += buf;
  };
  for (const Valuation& v : inst.agents) {
    std::visit(
        [&](const auto& arg) {
          using T = std::decay_t<decltype(arg)>;
          if constexpr (std::is_same_v<T, UnitDemand>) {
            text += "|u";
            for (double w : arg.weights) append(w);
          } else if constexpr (std::is_same_v<T, MultiUnit>) {
            text += "|m";
            for (double d : arg.marginals) append(d);
          } else if constexpr (std::is_same_v<T, Explicit>) {
            text += "|e";
            for (double x : arg.table) append(x);
          } else {
            text += "|c";
            for (const Curve& c : arg.curves) {
              for (double b : c.breakpoints) append(b);
              text += ";";
              for (double s : c.slopes) append(s);
            }
          }
        },
        v);
  }
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

}  // namespace surplus
