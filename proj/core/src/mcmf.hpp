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

#include <cassert>
#include <cstdint>
#include <limits>
#include <vector>

namespace surplus::internal {

// Two-channel edge cost. `main` carries negated welfare; `tie` carries an
// integer-valued lexicographic preference that only matters between flows of
// equal welfare. Ordering is lexicographic, addition componentwise.
struct CostPair {
  double main{0.0};
  double tie{0.0};

  friend CostPair operator+(const CostPair& a, const CostPair& b) {
    return {a.main + b.main, a.tie + b.tie};
  }
  friend CostPair operator-(const CostPair& a, const CostPair& b) {
    return {a.main - b.main, a.tie - b.tie};
  }
  friend bool operator<(const CostPair& a, const CostPair& b) {
    if (a.main != b.main) return a.main < b.main;
    return a.tie < b.tie;
  }
  friend bool operator==(const CostPair& a, const CostPair& b) {
    return a.main == b.main && a.tie == b.tie;
  }
};

// Successive-shortest-path min-cost flow over CostPair costs, Dijkstra with
// potentials, linear-scan extraction (graphs here have a few dozen nodes).
// Augments while an improving path exists: strictly better welfare, or equal
// welfare with a better tie value. Supports snapshot/restore and single-path
// cancellation so VCG payment terms can warm-start from the solved flow.
class MinCostFlow {
 public:
  explicit MinCostFlow(int nodes)
      : nodes_(nodes),
        adj_(nodes),
        potential_(nodes),
        dist_(nodes),
        prev_edge_(nodes),
        done_(nodes) {}

  int add_edge(int from, int to, int capacity, CostPair cost) {
    const int id = static_cast<int>(to_.size());
    to_.push_back(to);
    cap_.push_back(capacity);
    cost_.push_back(cost);
    head_.push_back(from);
    adj_[from].push_back(id);
    to_.push_back(from);
    cap_.push_back(0);
    cost_.push_back(CostPair{-cost.main, -cost.tie});
    head_.push_back(to);
    adj_[to].push_back(id + 1);
    return id;
  }

  // Call once after all edges are added and before the first run().
  void finalize() { flow_.assign(to_.size(), 0); }

  int residual(int e) const { return cap_[e] - flow_[e]; }
  int flow_on(int e) const { return flow_[e]; }

  // Augments from `source` to `sink` while the true path cost is improving.
  // With tie_breaks=false, zero-welfare augmentations are skipped (payment
  // evaluations only need the welfare value).
  void run(int source, int sink, bool tie_breaks) {
    while (augment_once(source, sink, tie_breaks)) {
    }
  }

  // Removes one unit of flow along the unique source->...->sink path through
  // `via_edge` (a saturated unit edge).
  void cancel_unit_path(int source, int sink, int via_edge) {
    assert(flow_[via_edge] == 1);
    // Walk backward from the edge head to the source, forward to the sink,
    // following unit flow. Graphs here are layered (source/agents/items/sink)
    // so each node on the path has exactly one flow-carrying edge each way.
    std::vector<int> path{via_edge};
    int node = head_[via_edge];
    while (node != source) {
      const int e = find_flow_edge_into(node);
      path.push_back(e);
      node = head_[e];
    }
    node = to_[via_edge];
    while (node != sink) {
      const int e = find_flow_edge_out_of(node);
      path.push_back(e);
      node = to_[e];
    }
    for (int e : path) {
      flow_[e] -= 1;
      flow_[e ^ 1] += 1;
    }
  }

  // After a cancellation, `arc` (into `sink`) may have turned residual with
  // negative reduced cost, meaning the flow is no longer optimal for its
  // value. Cancels improving cycles through the arc (shortest path from the
  // sink back to its head, closed by the arc) and restores the potential
  // invariant. Returns false when it cannot certify optimality; callers then
  // fall back to a cold solve.
  bool repair_entering_arc(int sink, int arc) {
    for (;;) {
      const int u = head_[arc];
      if (residual(arc) <= 0) return true;  // saturated arcs may stay negative
      const CostPair reduced = cost_[arc] + potential_[u] - potential_[sink];
      if (!(reduced.main < -kEps)) return true;
      // Paths must not re-enter the sink; the suspect arc is the cycle
      // closer, never an interior hop.
      dijkstra(sink, /*skip_into=*/sink, /*main_only=*/true);
      if (dist_[u] == kUnreachable) return false;
      const CostPair cycle = dist_[u] + reduced;
      // Potential update capped at dist(u) keeps every other residual arc
      // nonnegative and turns this arc's reduced cost into `cycle`.
      for (int v = 0; v < nodes_; ++v) {
        if (!(dist_[v] == kUnreachable))
          potential_[v] = potential_[v] + (dist_[v] < dist_[u] ? dist_[v] : dist_[u]);
      }
      if (!(cycle.main < -kEps)) return true;
      for (int v = u; v != sink; v = head_[prev_edge_[v]]) {
        flow_[prev_edge_[v]] += 1;
        flow_[prev_edge_[v] ^ 1] -= 1;
      }
      flow_[arc] += 1;
      flow_[arc ^ 1] -= 1;
    }
  }

  void reduce_capacity(int edge, int by) { cap_[edge] -= by; }

  struct Snapshot {
    std::vector<int> flow;
    std::vector<int> cap;
    std::vector<CostPair> potential;
  };

  Snapshot save() const { return Snapshot{flow_, cap_, potential_}; }

  void restore(const Snapshot& s) {
    flow_ = s.flow;
    cap_ = s.cap;
    potential_ = s.potential;
  }

  // Exact initial potentials for the layered assignment network; avoids a
  // Bellman-Ford pass. `topo_order` lists nodes in topological order.
  void init_potentials_topological(const std::vector<int>& topo_order) {
    for (int v = 0; v < nodes_; ++v) potential_[v] = kUnreachable;
    potential_[topo_order.front()] = CostPair{0.0, 0.0};
    for (int v : topo_order) {
      if (potential_[v] == kUnreachable) continue;
      for (int e : adj_[v]) {
        if (residual(e) <= 0) continue;
        const CostPair cand = potential_[v] + cost_[e];
        if (cand < potential_[to_[e]]) potential_[to_[e]] = cand;
      }
    }
    for (int v = 0; v < nodes_; ++v)
      if (potential_[v] == kUnreachable) potential_[v] = CostPair{0.0, 0.0};
  }

 private:
  static constexpr CostPair kUnreachable{std::numeric_limits<double>::infinity(), 0.0};
  // Drift guard: welfare improvements below this are rounding noise, far
  // under the library tolerance.
  static constexpr double kEps = 1e-12;

  int find_flow_edge_into(int node) const {
    for (int e : adj_[node]) {
      // adj_ holds both directions; an incoming forward edge with flow shows
      // up as the paired (odd) residual edge at `node`.
      if ((e & 1) == 1 && flow_[e ^ 1] > 0) return e ^ 1;
    }
    assert(false && "no flow edge into node");
    return -1;
  }

  int find_flow_edge_out_of(int node) const {
    for (int e : adj_[node]) {
      if ((e & 1) == 0 && flow_[e] > 0) return e;
    }
    assert(false && "no flow edge out of node");
    return -1;
  }

  // Label-setting shortest paths over reduced costs from `from`, filling
  // dist_ and prev_edge_. Arcs into `skip_into` are not relaxed. With
  // main_only the tie channel is ignored: after cancellations the tie
  // component of a reduced cost may be legitimately negative even though
  // the welfare component is certified, and value-mode runs do not care.
  // Finalized nodes are never relaxed again, which keeps predecessor
  // chains acyclic no matter what rounding does.
  void dijkstra(int from, int skip_into, bool main_only) {
    for (int v = 0; v < nodes_; ++v) {
      dist_[v] = kUnreachable;
      done_[v] = false;
    }
    dist_[from] = CostPair{0.0, 0.0};
    for (;;) {
      int best = -1;
      for (int v = 0; v < nodes_; ++v) {
        if (!done_[v] && !(dist_[v] == kUnreachable) && (best < 0 || dist_[v] < dist_[best]))
          best = v;
      }
      if (best < 0) break;
      done_[best] = true;
      for (int e : adj_[best]) {
        if (residual(e) <= 0) continue;
        const int w = to_[e];
        if (done_[w] || w == from) continue;
        if (w == skip_into) continue;
        CostPair reduced = cost_[e] + potential_[best] - potential_[w];
        if (reduced.main < 0.0) reduced.main = 0.0;  // clamp fp drift
        if (main_only) reduced.tie = 0.0;
        const CostPair cand = dist_[best] + reduced;
        if (cand < dist_[w]) {
          dist_[w] = cand;
          prev_edge_[w] = e;
        }
      }
    }
  }

  bool augment_once(int source, int sink, bool tie_breaks) {
    dijkstra(source, /*skip_into=*/-1, /*main_only=*/!tie_breaks);
    if (dist_[sink] == kUnreachable) return false;
    const CostPair true_cost = dist_[sink] + potential_[sink] - potential_[source];
    const bool improving =
        true_cost.main < -kEps || (tie_breaks && true_cost.main <= kEps && true_cost.tie < -0.5);
    if (!improving) return false;
    for (int v = 0; v < nodes_; ++v) {
      if (!(dist_[v] == kUnreachable)) potential_[v] = potential_[v] + dist_[v];
    }
    int bottleneck = std::numeric_limits<int>::max();
    for (int v = sink; v != source; v = head_[prev_edge_[v]])
      bottleneck = std::min(bottleneck, residual(prev_edge_[v]));
    for (int v = sink; v != source; v = head_[prev_edge_[v]]) {
      flow_[prev_edge_[v]] += bottleneck;
      flow_[prev_edge_[v] ^ 1] -= bottleneck;
    }
    return true;
  }

  int nodes_;
  std::vector<int> to_;
  std::vector<int> head_;
  std::vector<int> cap_;
  std::vector<int> flow_;
  std::vector<CostPair> cost_;
  std::vector<std::vector<int>> adj_;
  std::vector<CostPair> potential_;
  std::vector<CostPair> dist_;
  std::vector<int> prev_edge_;
  std::vector<bool> done_;
};

}  // namespace surplus::internal
