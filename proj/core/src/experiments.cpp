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

#include "surplus/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <thread>

namespace surplus {

Family family_from_name(const std::string& name) {
  if (name == "exp_single_item") return Family::exp_single_item;
  if (name == "iid_unit_demand") return Family::iid_unit_demand;
  if (name == "additive_divisible_lb") return Family::additive_divisible_lb;
  if (name == "single_item_interest_lb") return Family::single_item_interest_lb;
  throw std::invalid_argument("unknown generator family: " + name);
}

std::string family_name(Family family) {
  switch (family) {
    case Family::exp_single_item: return "exp_single_item";
    case Family::iid_unit_demand: return "iid_unit_demand";
    case Family::additive_divisible_lb: return "additive_divisible_lb";
    case Family::single_item_interest_lb: return "single_item_interest_lb";
  }
  return "unknown";
}

namespace {

double draw_value(ValueDistribution dist, CounterRng& rng) {
  return dist == ValueDistribution::exponential ? rng.exponential() : rng.uniform01();
}

}  // namespace

Instance gen_instance(const GeneratorSpec& spec, std::uint64_t trial) {
  if (spec.n < 1) throw std::invalid_argument("generator needs at least one agent");
  if (spec.m < 1) throw std::invalid_argument("generator needs at least one item");
  CounterRng rng(spec.seed ^ trial);
  Instance inst;
  switch (spec.family) {
    case Family::exp_single_item: {
      inst.kind = Kind::indivisible;
      inst.m = 1;
      for (int i = 0; i < spec.n; ++i)
        inst.agents.push_back(UnitDemand{{draw_value(spec.values, rng)}});
      break;
    }
    case Family::iid_unit_demand: {
      inst.kind = Kind::indivisible;
      inst.m = spec.m;
      for (int i = 0; i < spec.n; ++i) {
        UnitDemand v;
        v.weights.resize(spec.m);
        for (double& w : v.weights) w = draw_value(spec.values, rng);
        inst.agents.push_back(std::move(v));
      }
      break;
    }
    case Family::additive_divisible_lb: {
      inst.kind = Kind::divisible;
      inst.m = spec.m;
      for (int i = 0; i < spec.n; ++i) {
        // One Exp(1) scale per agent; the grand bundle is worth exactly that.
        const double grand = draw_value(spec.values, rng);
        DivisibleSeparable v;
        for (int j = 0; j < spec.m; ++j) v.curves.push_back(linear_curve(grand / spec.m));
        inst.agents.push_back(std::move(v));
      }
      break;
    }
    case Family::single_item_interest_lb: {
      inst.kind = Kind::indivisible;
      inst.m = spec.m;
      for (int i = 0; i < spec.n; ++i) {
        UnitDemand v;
        v.weights.assign(spec.m, 0.0);
        v.weights[0] = draw_value(spec.values, rng);
        inst.agents.push_back(std::move(v));
      }
      break;
    }
  }
  return inst;
}

UnitDemand random_unit_demand(int m, CounterRng& rng, double scale) {
  UnitDemand v;
  v.weights.resize(m);
  for (double& w : v.weights) w = scale * rng.uniform01();
  return v;
}

MultiUnit random_multi_unit(int m, CounterRng& rng, double scale) {
  MultiUnit v;
  v.marginals.resize(m);
  for (double& d : v.marginals) d = scale * rng.uniform01();
  std::sort(v.marginals.begin(), v.marginals.end(), std::greater<>());
  return v;
}

Explicit random_explicit_monotone(int m, CounterRng& rng, double scale) {
  Explicit v;
  v.items = m;
  v.table.assign(1u << m, 0.0);
  for (std::uint32_t mask = 1; mask < v.table.size(); ++mask)
    v.table[mask] = scale * rng.uniform01();
  // Monotone closure: each set is worth at least any subset.
  for (std::uint32_t mask = 1; mask < v.table.size(); ++mask) {
    for (int j = 0; j < m; ++j) {
      if ((mask >> j) & 1u)
        v.table[mask] = std::max(v.table[mask], v.table[mask & ~(1u << j)]);
    }
  }
  return v;
}

DivisibleSeparable random_divisible(int m, CounterRng& rng, double scale) {
  DivisibleSeparable v;
  for (int j = 0; j < m; ++j) {
    const int segments = rng.uniform_int(1, 3);
    // Breakpoints on the 1/64 grid, distinct, ending at 1.
    std::vector<int> ticks;
    while (static_cast<int>(ticks.size()) < segments - 1) {
      const int t = rng.uniform_int(1, 63);
      if (std::find(ticks.begin(), ticks.end(), t) == ticks.end()) ticks.push_back(t);
    }
    std::sort(ticks.begin(), ticks.end());
    std::vector<double> bps{0.0};
    for (int t : ticks) bps.push_back(t / 64.0);
    bps.push_back(1.0);
    std::vector<double> slopes(segments);
    for (double& s : slopes) s = scale * rng.uniform01();
    std::sort(slopes.begin(), slopes.end(), std::greater<>());
    // Spread near-equal slopes so the merged curve keeps its segment count.
    for (int k = 1; k < segments; ++k)
      slopes[k] = std::min(slopes[k], slopes[k - 1] * 0.75);
    v.curves.push_back(make_curve(std::move(bps), std::move(slopes)));
  }
  return v;
}

namespace {

template <typename F>
Instance assemble(int n, int m, Kind kind, F&& make) {
  Instance inst;
  inst.kind = kind;
  inst.m = m;
  for (int i = 0; i < n; ++i) inst.agents.push_back(make());
  return inst;
}

}  // namespace

Instance random_instance_unit_demand(int n, int m, CounterRng& rng) {
  return assemble(n, m, Kind::indivisible, [&] { return random_unit_demand(m, rng); });
}
Instance random_instance_multi_unit(int n, int m, CounterRng& rng) {
  return assemble(n, m, Kind::indivisible, [&] { return random_multi_unit(m, rng); });
}
Instance random_instance_explicit(int n, int m, CounterRng& rng) {
  return assemble(n, m, Kind::indivisible, [&] { return random_explicit_monotone(m, rng); });
}
Instance random_instance_divisible(int n, int m, CounterRng& rng) {
  return assemble(n, m, Kind::divisible, [&] { return random_divisible(m, rng); });
}

// ---------------------------------------------------------------------------
// Monte-Carlo harness
// ---------------------------------------------------------------------------

int max_threads() {
  int limit = static_cast<int>(std::thread::hardware_concurrency());
  if (limit < 1) limit = 1;
  if (const char* env = std::getenv("SURPLUS_AUCTIONS_THREADS")) {
    const int requested = std::atoi(env);
    if (requested >= 1) limit = std::min(limit, requested);
  }
  return limit;
}

namespace {

struct BlockStats {
  double sum_surplus{0.0};
  double sq_surplus{0.0};
  double sum_welfare{0.0};
  double sq_welfare{0.0};
  double sum_G{0.0};
  double sq_G{0.0};

  BlockStats& operator+=(const BlockStats& o) {
    sum_surplus += o.sum_surplus;
    sq_surplus += o.sq_surplus;
    sum_welfare += o.sum_welfare;
    sq_welfare += o.sq_welfare;
    sum_G += o.sum_G;
    sq_G += o.sq_G;
    return *this;
  }
};

constexpr long long kBlockSize = 256;

// Fixed-shape pairwise reduction: independent of thread scheduling.
BlockStats pairwise_sum(std::vector<BlockStats>& blocks, std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return blocks[lo];
  const std::size_t mid = lo + (hi - lo) / 2;
  BlockStats left = pairwise_sum(blocks, lo, mid);
  left += pairwise_sum(blocks, mid, hi);
  return left;
}

double stderr_of(double sum, double sq, long long count) {
  if (count < 2) return 0.0;
  const double mean = sum / count;
  const double var = std::max(0.0, (sq - count * mean * mean) / (count - 1));
  return std::sqrt(var / count);
}

}  // namespace

ExperimentReport monte_carlo(const MechanismConfig& config, const GeneratorSpec& spec,
                             long long trials) {
  if (trials < 1) throw std::invalid_argument("need at least one trial");
  const bool track_G = spec.n == 2 && (spec.family == Family::exp_single_item ||
                                       (spec.family == Family::iid_unit_demand && spec.m == 1));
  const long long n_blocks = (trials + kBlockSize - 1) / kBlockSize;
  std::vector<BlockStats> blocks(n_blocks);

  const auto run_block = [&](long long block) {
    BlockStats stats;
    const long long lo = block * kBlockSize;
    const long long hi = std::min(trials, lo + kBlockSize);
    for (long long trial = lo; trial < hi; ++trial) {
      const Instance inst = gen_instance(spec, static_cast<std::uint64_t>(trial));
      const MechanismDistribution dist = run_mechanism(config, inst);
      const SurplusReport report = expected_surplus(dist, inst);
      stats.sum_surplus += report.expected_surplus;
      stats.sq_surplus += report.expected_surplus * report.expected_surplus;
      stats.sum_welfare += report.first_best;
      stats.sq_welfare += report.first_best * report.first_best;
      if (track_G) {
        const ItemSet item{0};
        const double g =
            benchmark_G(eval(inst.agents[0], item), eval(inst.agents[1], item));
        stats.sum_G += g;
        stats.sq_G += g * g;
      }
    }
    blocks[block] = stats;
  };

  const int workers = std::min<long long>(max_threads(), n_blocks);
  if (workers <= 1) {
    for (long long b = 0; b < n_blocks; ++b) run_block(b);
  } else {
    std::atomic<long long> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          const long long b = next.fetch_add(1);
          if (b >= n_blocks) return;
          run_block(b);
        }
      });
    }
    for (std::thread& t : pool) t.join();
  }

  const BlockStats total = pairwise_sum(blocks, 0, blocks.size());
  ExperimentReport report;
  report.trials = trials;
  report.mean_surplus = total.sum_surplus / trials;
  report.se_surplus = stderr_of(total.sum_surplus, total.sq_surplus, trials);
  report.mean_welfare = total.sum_welfare / trials;
  report.se_welfare = stderr_of(total.sum_welfare, total.sq_welfare, trials);
  report.has_G = track_G;
  if (track_G) {
    report.mean_G = total.sum_G / trials;
    report.se_G = stderr_of(total.sum_G, total.sq_G, trials);
  }
  report.ratio = report.mean_surplus > kTol ? report.mean_welfare / report.mean_surplus : 0.0;
  return report;
}

std::string experiment_csv_header() {
  return "n,m,trials,mean_surplus,se_surplus,mean_welfare,se_welfare,ratio";
}

std::string experiment_csv_row(int n, int m, const ExperimentReport& report) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%d,%d,%lld,%.12g,%.12g,%.12g,%.12g,%.12g", n, m, report.trials,
                report.mean_surplus, report.se_surplus, report.mean_welfare, report.se_welfare,
                report.ratio);
  return buf;
}

std::string ratio_sweep(const MechanismConfig& config, Family family,
                        const std::vector<int>& n_list, int m, long long trials,
                        std::uint64_t seed) {
  std::string csv = experiment_csv_header() + "\n";
  for (int n : n_list) {
    GeneratorSpec spec;
    spec.family = family;
    spec.n = n;
    spec.m = m;
    spec.seed = seed;
    const ExperimentReport report = monte_carlo(config, spec, trials);
    csv += experiment_csv_row(n, spec.family == Family::exp_single_item ? 1 : m, report) + "\n";
  }
  return csv;
}

}  // namespace surplus
