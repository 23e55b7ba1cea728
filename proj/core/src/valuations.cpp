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

#include "surplus/valuations.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "surplus/rational.hpp"

namespace surplus {

Rational parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  if (slash != std::string::npos) {
    const std::int64_t num = std::stoll(text.substr(0, slash));
    const std::int64_t den = std::stoll(text.substr(slash + 1));
    return Rational(num, den);
  }
  const auto dot = text.find('.');
  if (dot == std::string::npos) return Rational(std::stoll(text), 1);
  // Decimal strings: scale by a power of ten and reduce.
  const std::string digits = text.substr(0, dot) + text.substr(dot + 1);
  std::int64_t den = 1;
  for (std::size_t i = dot + 1; i < text.size(); ++i) den *= 10;
  return Rational(std::stoll(digits), den);
}

double MultiUnit::value_of_count(int k) const {
  double total = 0.0;
  const int upto = std::min<int>(k, static_cast<int>(marginals.size()));
  for (int t = 0; t < upto; ++t) total += marginals[t];
  return total;
}

double Curve::value(double x) const {
  if (x < -kTol || x > 1.0 + kTol) throw std::invalid_argument("fraction outside [0,1]");
  x = std::clamp(x, 0.0, 1.0);
  double total = 0.0;
  for (std::size_t k = 0; k < slopes.size(); ++k) {
    const double lo = breakpoints[k];
    const double hi = breakpoints[k + 1];
    if (x <= lo) break;
    total += slopes[k] * (std::min(x, hi) - lo);
  }
  return total;
}

Curve make_curve(std::vector<double> breakpoints, std::vector<double> slopes) {
  if (breakpoints.size() != slopes.size() + 1 || slopes.empty())
    throw std::invalid_argument("curve needs K segments and K+1 breakpoints");
  if (std::abs(breakpoints.front()) > kTol || std::abs(breakpoints.back() - 1.0) > kTol)
    throw std::invalid_argument("curve breakpoints must span [0,1]");
  breakpoints.front() = 0.0;
  breakpoints.back() = 1.0;
  for (std::size_t k = 0; k + 1 < breakpoints.size(); ++k) {
    if (breakpoints[k + 1] <= breakpoints[k] + kTol)
      throw std::invalid_argument("curve breakpoints must be strictly increasing");
  }
  // Merge adjacent segments with equal slopes so slope-greedy solvers never
  // see degenerate ties between pieces of the same curve.
  Curve out;
  out.breakpoints.push_back(0.0);
  for (std::size_t k = 0; k < slopes.size(); ++k) {
    if (!out.slopes.empty() && std::abs(out.slopes.back() - slopes[k]) <= kTol) {
      out.breakpoints.back() = breakpoints[k + 1];
    } else {
      out.slopes.push_back(slopes[k]);
      out.breakpoints.push_back(breakpoints[k + 1]);
    }
  }
  return out;
}

Curve linear_curve(double slope) { return make_curve({0.0, 1.0}, {slope}); }

int item_count(const Valuation& v) {
  return std::visit(
      [](const auto& arg) -> int {
        using T = std::decay_t<decltype(arg)>;
        if constexpr (std::is_same_v<T, UnitDemand>) {
          return static_cast<int>(arg.weights.size());
        } else if constexpr (std::is_same_v<T, MultiUnit>) {
          return static_cast<int>(arg.marginals.size());
        } else if constexpr (std::is_same_v<T, Explicit>) {
          return arg.items;
        } else {
          return static_cast<int>(arg.curves.size());
        }
      },
      v);
}

bool is_divisible(const Valuation& v) {
  return std::holds_alternative<DivisibleSeparable>(v);
}

namespace {

void require_finite(const std::vector<double>& values) {
  for (double x : values) {
    if (!std::isfinite(x)) throw std::invalid_argument("non-finite valuation parameter");
  }
}

}  // namespace

void validate_shape(const Instance& inst) {
  if (inst.m < 0) throw std::invalid_argument("negative item count");
  for (const Valuation& v : inst.agents) {
    if (item_count(v) != inst.m)
      throw std::invalid_argument("valuation dimension does not match instance m");
    if (is_divisible(v) != (inst.kind == Kind::divisible))
      throw std::invalid_argument("valuation kind does not match instance kind");
    if (const auto* u = std::get_if<UnitDemand>(&v)) require_finite(u->weights);
    if (const auto* mu = std::get_if<MultiUnit>(&v)) require_finite(mu->marginals);
    if (const auto* e = std::get_if<Explicit>(&v)) {
      if (e->items > kMaxExplicitItems)
        throw std::invalid_argument("explicit valuation limited to 12 items");
      if (e->table.size() != (1u << e->items))
        throw std::invalid_argument("explicit table size must be 2^m");
      require_finite(e->table);
    }
    if (const auto* d = std::get_if<DivisibleSeparable>(&v)) {
      for (const Curve& c : d->curves) {
        if (c.breakpoints.size() != c.slopes.size() + 1)
          throw std::invalid_argument("malformed curve");
        require_finite(c.slopes);
      }
    }
  }
}

namespace {

void validate_bundle(const ItemSet& bundle, int m) {
  for (std::size_t i = 0; i < bundle.size(); ++i) {
    if (bundle[i] < 0 || bundle[i] >= m) throw std::out_of_range("bundle item out of range");
    if (i > 0 && bundle[i] <= bundle[i - 1])
      throw std::invalid_argument("bundle must be sorted and distinct");
  }
}

std::uint32_t bundle_mask(const ItemSet& bundle) {
  std::uint32_t mask = 0;
  for (ItemId j : bundle) mask |= (1u << j);
  return mask;
}

}  // namespace

double eval(const Valuation& v, const ItemSet& bundle) {
  return std::visit(
      [&](const auto& arg) -> double {
        using T = std::decay_t<decltype(arg)>;
        if constexpr (std::is_same_v<T, UnitDemand>) {
          validate_bundle(bundle, static_cast<int>(arg.weights.size()));
          double best = 0.0;
          for (ItemId j : bundle) best = std::max(best, arg.weights[j]);
          return bundle.empty() ? 0.0 : best;
        } else if constexpr (std::is_same_v<T, MultiUnit>) {
          validate_bundle(bundle, static_cast<int>(arg.marginals.size()));
          return arg.value_of_count(static_cast<int>(bundle.size()));
        } else if constexpr (std::is_same_v<T, Explicit>) {
          validate_bundle(bundle, arg.items);
          return arg.value(bundle_mask(bundle));
        } else {
          throw std::invalid_argument("divisible valuation takes a fraction vector");
        }
      },
      v);
}

double eval(const Valuation& v, const FractionVector& x) {
  const auto* d = std::get_if<DivisibleSeparable>(&v);
  if (d == nullptr) throw std::invalid_argument("indivisible valuation takes an item set");
  if (x.size() != d->curves.size()) throw std::out_of_range("fraction vector dimension mismatch");
  double total = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) total += d->curves[j].value(x[j]);
  return total;
}

ItemSet project_g(const CopiedItemSet& s) {
  ItemSet items;
  items.reserve(s.size());
  for (const CopiedItem& c : s) items.push_back(c.item);
  std::sort(items.begin(), items.end());
  items.erase(std::unique(items.begin(), items.end()), items.end());
  return items;
}

double eval_copied(const Valuation& v, const CopiedItemSet& s) {
  return eval(v, project_g(s));
}

CopiesValuation lift_to_copies(const Valuation& v, int level) {
  if (level < 0) throw std::invalid_argument("copy level must be nonnegative");
  if (is_divisible(v)) throw std::invalid_argument("cannot lift a divisible valuation to copies");
  return CopiesValuation{v, 1 << level};
}

Curve cap(const Curve& c, double q) {
  if (q <= 0.0) throw std::invalid_argument("capacity must be positive");
  if (q > 1.0 + kTol) throw std::invalid_argument("capacity above 1");
  q = std::min(q, 1.0);
  std::vector<double> bps{0.0};
  std::vector<double> slopes;
  for (std::size_t k = 0; k < c.slopes.size(); ++k) {
    const double hi = c.breakpoints[k + 1];
    if (c.breakpoints[k] >= q - kTol) break;
    slopes.push_back(c.slopes[k]);
    bps.push_back(std::min(hi, q));
  }
  if (bps.back() < 1.0 - kTol) {
    slopes.push_back(0.0);
    bps.push_back(1.0);
  } else {
    bps.back() = 1.0;
  }
  return make_curve(std::move(bps), std::move(slopes));
}

DivisibleSeparable cap(const DivisibleSeparable& v, double q) {
  DivisibleSeparable out;
  out.curves.reserve(v.curves.size());
  for (const Curve& c : v.curves) out.curves.push_back(cap(c, q));
  return out;
}

ClassDiagnostics check_class(const Valuation& v) {
  ClassDiagnostics d;
  std::visit(
      [&](const auto& arg) {
        using T = std::decay_t<decltype(arg)>;
        if constexpr (std::is_same_v<T, UnitDemand>) {
          for (double w : arg.weights)
            if (w < -kTol) d.monotone = false;
        } else if constexpr (std::is_same_v<T, MultiUnit>) {
          const auto& ms = arg.marginals;
          for (std::size_t t = 0; t < ms.size(); ++t) {
            if (ms[t] < -kTol) d.monotone = false;
            if (t > 0 && ms[t] > ms[t - 1] + kTol) d.submodular_marginals = false;
          }
        } else if constexpr (std::is_same_v<T, Explicit>) {
          if (std::abs(arg.table[0]) > kTol) d.normalized = false;
          const std::uint32_t size = 1u << arg.items;
          for (std::uint32_t mask = 0; mask < size; ++mask) {
            for (int j = 0; j < arg.items; ++j) {
              if ((mask >> j) & 1u) {
                if (arg.table[mask] < arg.table[mask & ~(1u << j)] - kTol) d.monotone = false;
              }
            }
          }
        } else {
          for (const Curve& c : arg.curves) {
            for (std::size_t k = 0; k < c.slopes.size(); ++k) {
              if (c.slopes[k] < -kTol) d.monotone = false;
              if (k > 0 && c.slopes[k] > c.slopes[k - 1] + kTol) d.concave_curve = false;
            }
          }
        }
      },
      v);
  return d;
}

}  // namespace surplus
