// Copyright 2026 The SPCG Authors
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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <utility>

#include <fmt/format.h>

#include "spcg/graph.hpp"

namespace spcg {
namespace {

double distance(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

// Mutable adjacency used while pruning the grid.
class EdgeSet {
 public:
  explicit EdgeSet(int n) : adj_(static_cast<std::size_t>(n)) {}

  void add(NodeId u, NodeId v) {
    adj_[static_cast<std::size_t>(u)].insert(v);
    adj_[static_cast<std::size_t>(v)].insert(u);
  }
  void remove(NodeId u, NodeId v) {
    adj_[static_cast<std::size_t>(u)].erase(v);
    adj_[static_cast<std::size_t>(v)].erase(u);
  }
  int degree(NodeId u) const { return static_cast<int>(adj_[static_cast<std::size_t>(u)].size()); }
  const std::set<NodeId>& neighbors(NodeId u) const { return adj_[static_cast<std::size_t>(u)]; }

  bool connected() const {
    std::vector<bool> seen(adj_.size(), false);
    std::vector<NodeId> stack{0};
    seen[0] = true;
    std::size_t count = 1;
    while (!stack.empty()) {
      const NodeId u = stack.back();
      stack.pop_back();
      for (NodeId v : neighbors(u)) {
        if (!seen[static_cast<std::size_t>(v)]) {
          seen[static_cast<std::size_t>(v)] = true;
          ++count;
          stack.push_back(v);
        }
      }
    }
    return count == adj_.size();
  }

  int count_degree_one() const {
    return static_cast<int>(std::count_if(adj_.begin(), adj_.end(),
                                          [](const auto& s) { return s.size() == 1; }));
  }

  std::vector<Edge> edges(double weight) const {
    std::vector<Edge> out;
    for (std::size_t u = 0; u < adj_.size(); ++u) {
      for (NodeId v : adj_[u]) {
        if (static_cast<NodeId>(u) < v) out.push_back({static_cast<NodeId>(u), v, weight});
      }
    }
    return out;
  }

 private:
  std::vector<std::set<NodeId>> adj_;
};

// Removes edges at `v` until it has degree 1 without disconnecting the
// graph. Rolls back and returns false when that is impossible.
bool make_dead_end(EdgeSet& edges, NodeId v, Rng& rng) {
  std::vector<NodeId> incident(edges.neighbors(v).begin(), edges.neighbors(v).end());
  std::shuffle(incident.begin(), incident.end(), rng);
  std::vector<NodeId> removed;
  for (NodeId w : incident) {
    if (edges.degree(v) <= 1) break;
    edges.remove(v, w);
    if (edges.connected()) {
      removed.push_back(w);
    } else {
      edges.add(v, w);
    }
  }
  if (edges.degree(v) == 1) return true;
  for (NodeId w : removed) edges.add(v, w);
  return false;
}

}  // namespace

WeightFn constant_weight(double w) {
  return [w](NodeId, NodeId) { return w; };
}

WeightFn euclidean_weight(std::vector<Point> points) {
  return [points = std::move(points)](NodeId u, NodeId v) {
    return distance(points.at(static_cast<std::size_t>(u)), points.at(static_cast<std::size_t>(v)));
  };
}

Graph make_complete(int n_nodes, const WeightFn& weight_fn, std::vector<NodeId> terminals) {
  if (n_nodes < 2) throw GraphError(fmt::format("complete graph needs >= 2 nodes, got {}", n_nodes));
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(n_nodes * (n_nodes - 1) / 2));
  for (NodeId u = 0; u < n_nodes; ++u) {
    for (NodeId v = u + 1; v < n_nodes; ++v) edges.push_back({u, v, weight_fn(u, v)});
  }
  if (terminals.empty()) terminals.push_back(n_nodes - 1);
  return Graph(n_nodes, std::move(edges), std::move(terminals), GraphKind::kComplete);
}

Graph make_complete(std::vector<Point> points, std::vector<NodeId> terminals) {
  const int n = static_cast<int>(points.size());
  if (n < 2) throw GraphError(fmt::format("complete graph needs >= 2 nodes, got {}", n));
  Graph base = make_complete(n, euclidean_weight(points), std::move(terminals));
  return Graph(n, base.edges(), {base.terminals().begin(), base.terminals().end()},
               GraphKind::kComplete, std::nullopt, std::move(points));
}

Graph make_star(int n_leaves, std::span<const double> leaf_weights,
                std::optional<NodeId> terminal_leaf) {
  if (n_leaves < 1) throw GraphError("star graph needs at least one leaf");
  if (leaf_weights.size() != static_cast<std::size_t>(n_leaves)) {
    throw GraphError(fmt::format("star graph has {} leaves but {} leaf weights", n_leaves,
                                 leaf_weights.size()));
  }
  std::vector<Edge> edges;
  for (int i = 0; i < n_leaves; ++i) {
    edges.push_back({0, i + 1, leaf_weights[static_cast<std::size_t>(i)]});
  }
  const NodeId terminal = terminal_leaf.value_or(n_leaves);
  if (terminal < 1 || terminal > n_leaves) {
    throw GraphError(fmt::format("terminal {} is not a leaf", terminal));
  }
  return Graph(n_leaves + 1, std::move(edges), {terminal}, GraphKind::kStar, NodeId{0});
}

Graph make_grid_with_deadends(int rows, int cols, double deadend_fraction, std::uint64_t seed) {
  if (rows < 1 || cols < 1 || rows * cols < 4) {
    throw GraphError(fmt::format("grid needs rows*cols >= 4, got {}x{}", rows, cols));
  }
  if (!(deadend_fraction >= 0.0 && deadend_fraction <= 1.0)) {
    throw GraphError(fmt::format("dead-end fraction {} outside [0,1]", deadend_fraction));
  }
  const int n = rows * cols;
  auto id = [cols](int r, int c) { return r * cols + c; };

  EdgeSet edges(n);
  std::vector<Point> coords;
  coords.reserve(static_cast<std::size_t>(n));
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      coords.push_back({static_cast<double>(c), static_cast<double>(r)});
      if (c + 1 < cols) edges.add(id(r, c), id(r, c + 1));
      if (r + 1 < rows) edges.add(id(r, c), id(r + 1, c));
    }
  }

  Rng rng = make_rng(seed);
  std::vector<NodeId> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);

  const int target = static_cast<int>(std::lround(deadend_fraction * n));
  for (NodeId v : order) {
    if (edges.count_degree_one() >= target) break;
    if (edges.degree(v) >= 2) make_dead_end(edges, v, rng);
  }
  if (edges.count_degree_one() == 0) {
    for (NodeId v : order) {
      if (make_dead_end(edges, v, rng)) break;
    }
  }

  std::vector<NodeId> terminals;
  for (NodeId v = 0; v < n; ++v) {
    if (edges.degree(v) == 1) terminals.push_back(v);
  }
  return Graph(n, edges.edges(1.0), std::move(terminals), GraphKind::kGridWithDeadEnds,
               std::nullopt, std::move(coords));
}

Graph make_random_geometric(int n_nodes, double radius, int n_terminals, std::uint64_t seed) {
  if (n_nodes < 2) throw GraphError("random geometric graph needs >= 2 nodes");
  if (n_terminals < 1 || n_terminals >= n_nodes) {
    throw GraphError(fmt::format("terminal count {} must be in 1..{}", n_terminals, n_nodes - 1));
  }
  Rng rng = make_rng(seed);
  std::uniform_real_distribution<double> coord(-10.0, 10.0);
  std::vector<Point> pts(static_cast<std::size_t>(n_nodes));
  for (auto& p : pts) {
    p.x = coord(rng);
    p.y = coord(rng);
  }
  auto at = [&](NodeId u) -> const Point& { return pts[static_cast<std::size_t>(u)]; };

  std::set<std::pair<NodeId, NodeId>> pairs;
  for (NodeId u = 0; u < n_nodes; ++u) {
    for (NodeId v = u + 1; v < n_nodes; ++v) {
      if (distance(at(u), at(v)) < radius) pairs.insert({u, v});
    }
  }
  // Prim's algorithm for the spanning tree that guarantees connectivity.
  std::vector<bool> in_tree(static_cast<std::size_t>(n_nodes), false);
  std::vector<double> best(static_cast<std::size_t>(n_nodes), std::numeric_limits<double>::infinity());
  std::vector<NodeId> parent(static_cast<std::size_t>(n_nodes), kNoNode);
  best[0] = 0.0;
  for (int iter = 0; iter < n_nodes; ++iter) {
    NodeId u = kNoNode;
    for (NodeId v = 0; v < n_nodes; ++v) {
      if (!in_tree[static_cast<std::size_t>(v)] &&
          (u == kNoNode || best[static_cast<std::size_t>(v)] < best[static_cast<std::size_t>(u)])) {
        u = v;
      }
    }
    in_tree[static_cast<std::size_t>(u)] = true;
    if (parent[static_cast<std::size_t>(u)] != kNoNode) {
      pairs.insert(std::minmax(u, parent[static_cast<std::size_t>(u)]));
    }
    for (NodeId v = 0; v < n_nodes; ++v) {
      const double d = distance(at(u), at(v));
      if (!in_tree[static_cast<std::size_t>(v)] && d < best[static_cast<std::size_t>(v)]) {
        best[static_cast<std::size_t>(v)] = d;
        parent[static_cast<std::size_t>(v)] = u;
      }
    }
  }

  std::vector<Edge> edges;
  for (const auto& [u, v] : pairs) edges.push_back({u, v, distance(at(u), at(v))});

  Point centroid;
  for (const auto& p : pts) {
    centroid.x += p.x / n_nodes;
    centroid.y += p.y / n_nodes;
  }
  std::vector<NodeId> by_distance(static_cast<std::size_t>(n_nodes));
  std::iota(by_distance.begin(), by_distance.end(), 0);
  std::stable_sort(by_distance.begin(), by_distance.end(), [&](NodeId a, NodeId b) {
    return distance(at(a), centroid) > distance(at(b), centroid);
  });
  std::vector<NodeId> terminals(by_distance.begin(), by_distance.begin() + n_terminals);
  return Graph(n_nodes, std::move(edges), std::move(terminals), GraphKind::kRandomGeometric,
               std::nullopt, std::move(pts));
}

Counterexample make_counterexample(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidArgument(fmt::format("alpha must lie in (0,1), got {}", alpha));
  }
  // s=0, 1, 2, 3, d=4; unit weights.
  std::vector<Edge> edges = {{0, 1, 1.0}, {0, 2, 1.0}, {0, 3, 1.0},
                             {1, 2, 1.0}, {2, 4, 1.0}, {3, 4, 1.0}};
  Graph graph(5, std::move(edges), {Counterexample::kTerminal});
  std::vector<double> prizes = {0.0, 1.0, 2.0 + alpha, 2.0 - alpha, Counterexample::kTerminalPrize};
  return Counterexample{std::move(graph), std::move(prizes), alpha};
}

}  // namespace spcg
