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

#include "spcg/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <utility>

#include <fmt/format.h>

namespace spcg {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

std::string_view to_string(GraphKind kind) {
  switch (kind) {
    case GraphKind::kComplete: return "complete";
    case GraphKind::kStar: return "star";
    case GraphKind::kRandomGeometric: return "random_geometric";
    case GraphKind::kGridWithDeadEnds: return "grid";
    case GraphKind::kExplicit: return "explicit";
  }
  return "explicit";
}

GraphKind graph_kind_from_string(std::string_view name) {
  for (auto kind : {GraphKind::kComplete, GraphKind::kStar, GraphKind::kRandomGeometric,
                    GraphKind::kGridWithDeadEnds, GraphKind::kExplicit}) {
    if (to_string(kind) == name) return kind;
  }
  throw GraphError(fmt::format("unknown graph kind '{}'", name));
}

Graph::Graph(int node_count, std::vector<Edge> edges, std::vector<NodeId> terminals, GraphKind kind,
             std::optional<NodeId> staging, std::vector<Point> coordinates)
    : node_count_(node_count),
      kind_(kind),
      staging_(staging),
      coordinates_(std::move(coordinates)) {
  if (node_count_ < 1) throw GraphError("node count must be positive");
  const auto n = static_cast<std::size_t>(node_count_);
  auto in_range = [&](NodeId u) { return u >= 0 && u < node_count_; };

  // Collapse both orientations of an edge, detecting asymmetric weights.
  std::map<std::pair<NodeId, NodeId>, double> canonical;
  std::map<std::pair<NodeId, NodeId>, bool> seen_oriented;
  for (const Edge& e : edges) {
    if (!in_range(e.u) || !in_range(e.v)) {
      throw GraphError(fmt::format("edge ({},{}) references a node outside 0..{}", e.u, e.v,
                                   node_count_ - 1));
    }
    if (e.u == e.v) throw GraphError(fmt::format("self-loop at node {}", e.u));
    if (!std::isfinite(e.weight)) {
      throw GraphError(fmt::format("edge ({},{}) has a non-finite weight", e.u, e.v));
    }
    if (e.weight < 0.0) {
      throw GraphError(fmt::format("edge ({},{}) has negative weight {}", e.u, e.v, e.weight));
    }
    if (seen_oriented[{e.u, e.v}]) {
      throw GraphError(fmt::format("duplicate edge ({},{}): multigraphs are not supported", e.u, e.v));
    }
    seen_oriented[{e.u, e.v}] = true;
    const auto key = std::minmax(e.u, e.v);
    auto [it, inserted] = canonical.emplace(key, e.weight);
    if (!inserted && it->second != e.weight) {
      throw GraphError(fmt::format("asymmetric weights: weight({},{}) != weight({},{})", e.u, e.v,
                                   e.v, e.u));
    }
  }

  weights_.assign(n * n, kInf);
  adjacency_.assign(n, {});
  edges_.reserve(canonical.size());
  for (const auto& [key, w] : canonical) {
    edges_.push_back({key.first, key.second, w});
    weights_[static_cast<std::size_t>(key.first) * n + static_cast<std::size_t>(key.second)] = w;
    weights_[static_cast<std::size_t>(key.second) * n + static_cast<std::size_t>(key.first)] = w;
    adjacency_[static_cast<std::size_t>(key.first)].push_back(key.second);
    adjacency_[static_cast<std::size_t>(key.second)].push_back(key.first);
  }
  for (auto& list : adjacency_) std::sort(list.begin(), list.end());

  for (std::size_t u = 0; u < n; ++u) {
    if (adjacency_[u].empty()) throw GraphError(fmt::format("node {} has degree 0", u));
  }

  std::sort(terminals.begin(), terminals.end());
  terminals.erase(std::unique(terminals.begin(), terminals.end()), terminals.end());
  if (terminals.empty()) throw GraphError("terminal set is empty");
  is_terminal_.assign(n, false);
  for (NodeId t : terminals) {
    if (!in_range(t)) throw GraphError(fmt::format("terminal {} is not a node", t));
    is_terminal_[static_cast<std::size_t>(t)] = true;
  }
  terminals_ = std::move(terminals);

  if (staging_ && !in_range(*staging_)) {
    throw GraphError(fmt::format("staging node {} is not a node", *staging_));
  }
  if (kind_ == GraphKind::kStar) {
    if (!staging_) throw GraphError("star graph requires a staging node");
    if (degree(*staging_) != node_count_ - 1 ||
        edges_.size() != static_cast<std::size_t>(node_count_ - 1)) {
      throw GraphError("star graph must connect the staging node to every other node and nothing else");
    }
  }
  if (!coordinates_.empty() && coordinates_.size() != n) {
    throw GraphError(fmt::format("expected {} coordinates, got {}", n, coordinates_.size()));
  }
}

std::size_t Graph::check(NodeId u) const {
  if (u < 0 || u >= node_count_) throw GraphError(fmt::format("node {} out of range", u));
  return static_cast<std::size_t>(u);
}

bool Graph::has_edge(NodeId u, NodeId v) const {
  const auto n = static_cast<std::size_t>(node_count_);
  return std::isfinite(weights_[check(u) * n + check(v)]);
}

double Graph::weight(NodeId u, NodeId v) const {
  const auto n = static_cast<std::size_t>(node_count_);
  const double w = weights_[check(u) * n + check(v)];
  if (!std::isfinite(w)) throw GraphError(fmt::format("no edge ({},{})", u, v));
  return w;
}

std::vector<NodeId> Graph::non_terminals() const {
  std::vector<NodeId> out;
  for (NodeId u = 0; u < node_count_; ++u) {
    if (!is_terminal(u)) out.push_back(u);
  }
  return out;
}

double Graph::min_edge_weight() const {
  double m = kInf;
  for (const Edge& e : edges_) m = std::min(m, e.weight);
  return m;
}

std::optional<double> Graph::min_positive_edge_weight() const {
  std::optional<double> m;
  for (const Edge& e : edges_) {
    if (e.weight > 0.0 && (!m || e.weight < *m)) m = e.weight;
  }
  return m;
}

double Graph::max_edge_weight() const {
  double m = 0.0;
  for (const Edge& e : edges_) m = std::max(m, e.weight);
  return m;
}

bool Graph::has_zero_weight_edges() const {
  return std::any_of(edges_.begin(), edges_.end(), [](const Edge& e) { return e.weight == 0.0; });
}

bool Graph::is_connected() const {
  std::vector<bool> seen(static_cast<std::size_t>(node_count_), false);
  std::vector<NodeId> stack{0};
  seen[0] = true;
  int count = 1;
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
  return count == node_count_;
}

bool Graph::operator==(const Graph& other) const {
  return node_count_ == other.node_count_ && kind_ == other.kind_ && edges_ == other.edges_ &&
         terminals_ == other.terminals_ && staging_ == other.staging_ &&
         coordinates_ == other.coordinates_;
}

ShortestPaths::ShortestPaths(const Graph& graph) : n_(graph.node_count()) {
  const auto n = static_cast<std::size_t>(n_);
  dist_.assign(n * n, kInf);
  for (std::size_t u = 0; u < n; ++u) dist_[u * n + u] = 0.0;
  for (const Edge& e : graph.edges()) {
    dist_[index(e.u, e.v)] = e.weight;
    dist_[index(e.v, e.u)] = e.weight;
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      const double dik = dist_[i * n + k];
      if (!std::isfinite(dik)) continue;
      for (std::size_t j = 0; j < n; ++j) {
        const double cand = dik + dist_[k * n + j];
        if (cand < dist_[i * n + j]) dist_[i * n + j] = cand;
      }
    }
  }

  to_terminal_.assign(n, kInf);
  next_to_terminal_.assign(n, kNoNode);
  for (NodeId u = 0; u < n_; ++u) {
    for (NodeId t : graph.terminals()) {
      to_terminal_[static_cast<std::size_t>(u)] =
          std::min(to_terminal_[static_cast<std::size_t>(u)], distance(u, t));
    }
  }
  for (NodeId u = 0; u < n_; ++u) {
    if (graph.is_terminal(u) || !std::isfinite(to_terminal(u))) continue;
    double best = kInf;
    for (NodeId v : graph.neighbors(u)) {
      const double via = graph.weight(u, v) + to_terminal(v);
      if (via < best) {
        best = via;
        next_to_terminal_[static_cast<std::size_t>(u)] = v;
      }
    }
  }
}

}  // namespace spcg
