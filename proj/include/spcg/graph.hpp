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

#ifndef SPCG_GRAPH_HPP_
#define SPCG_GRAPH_HPP_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spcg/common.hpp"

namespace spcg {

enum class GraphKind { kComplete, kStar, kRandomGeometric, kGridWithDeadEnds, kExplicit };

std::string_view to_string(GraphKind kind);
GraphKind graph_kind_from_string(std::string_view name);

struct Point {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point&) const = default;
};

struct Edge {
  NodeId u = kNoNode;
  NodeId v = kNoNode;
  double weight = 0.0;
  bool operator==(const Edge&) const = default;
};

// Raised when graph data violates one of the Graph invariants. The message
// names the violated invariant.
class GraphError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// Weighted undirected graph with node roles. Immutable after construction,
// so a Graph can be shared read-only across threads.
//
// Invariants checked by the constructor:
//   * no self-loops, no multi-edges, weights finite and >= 0;
//   * symmetric weights (an edge listed in both orientations must agree);
//   * terminals non-empty and in range, every node has degree >= 1;
//   * a Star graph has one staging node adjacent to every other node and
//     no other edges.
class Graph {
 public:
  Graph(int node_count, std::vector<Edge> edges, std::vector<NodeId> terminals,
        GraphKind kind = GraphKind::kExplicit, std::optional<NodeId> staging = std::nullopt,
        std::vector<Point> coordinates = {});

  int node_count() const { return node_count_; }
  GraphKind kind() const { return kind_; }

  // Neighbors sorted by ascending node id.
  std::span<const NodeId> neighbors(NodeId u) const { return adjacency_[check(u)]; }
  int degree(NodeId u) const { return static_cast<int>(adjacency_[check(u)].size()); }

  bool has_edge(NodeId u, NodeId v) const;
  // Travel cost of edge (u, v). Throws GraphError if the edge does not exist.
  double weight(NodeId u, NodeId v) const;

  // Canonical edge list: u < v, sorted lexicographically.
  const std::vector<Edge>& edges() const { return edges_; }

  std::span<const NodeId> terminals() const { return terminals_; }
  bool is_terminal(NodeId u) const { return is_terminal_[check(u)]; }
  std::vector<NodeId> non_terminals() const;

  std::optional<NodeId> staging() const { return staging_; }

  bool has_coordinates() const { return !coordinates_.empty(); }
  const std::vector<Point>& coordinates() const { return coordinates_; }

  double min_edge_weight() const;
  // Smallest strictly positive edge weight, or nullopt if all weights are 0.
  std::optional<double> min_positive_edge_weight() const;
  double max_edge_weight() const;
  bool has_zero_weight_edges() const;
  bool is_connected() const;

  bool operator==(const Graph& other) const;

 private:
  std::size_t check(NodeId u) const;

  int node_count_;
  GraphKind kind_;
  std::vector<Edge> edges_;
  std::vector<std::vector<NodeId>> adjacency_;
  // Dense |V| x |V| weight matrix, +inf where no edge exists.
  std::vector<double> weights_;
  std::vector<NodeId> terminals_;
  std::vector<bool> is_terminal_;
  std::optional<NodeId> staging_;
  std::vector<Point> coordinates_;
};

// All-pairs shortest travel costs (Floyd-Warshall). Graphs here are small,
// so the dense O(|V|^3) table is precomputed once per graph.
class ShortestPaths {
 public:
  explicit ShortestPaths(const Graph& graph);

  double distance(NodeId u, NodeId v) const { return dist_[index(u, v)]; }
  // Cost of the cheapest path from u to any terminal.
  double to_terminal(NodeId u) const { return to_terminal_[static_cast<std::size_t>(u)]; }
  // Neighbor of u on a cheapest path to the nearest terminal (lowest id on
  // ties), or kNoNode if u is itself a terminal or no terminal is reachable.
  NodeId next_hop_to_terminal(NodeId u) const {
    return next_to_terminal_[static_cast<std::size_t>(u)];
  }

 private:
  std::size_t index(NodeId u, NodeId v) const {
    return static_cast<std::size_t>(u) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(v);
  }

  int n_;
  std::vector<double> dist_;
  std::vector<double> to_terminal_;
  std::vector<NodeId> next_to_terminal_;
};

// --- Generators -----------------------------------------------------------

using WeightFn = std::function<double(NodeId, NodeId)>;

WeightFn constant_weight(double w);
WeightFn euclidean_weight(std::vector<Point> points);

// Complete graph on n nodes. When `terminals` is empty the last node is the
// terminal.
Graph make_complete(int n_nodes, const WeightFn& weight_fn, std::vector<NodeId> terminals = {});
// Complete graph with Euclidean weights; coordinates are kept on the graph.
Graph make_complete(std::vector<Point> points, std::vector<NodeId> terminals = {});

// Star graph: node 0 is the staging node, leaves are 1..n_leaves. Leaf i+1
// has edge weight leaf_weights[i]. When `terminal_leaf` is unset the last
// leaf is the terminal.
Graph make_star(int n_leaves, std::span<const double> leaf_weights,
                std::optional<NodeId> terminal_leaf = std::nullopt);

// rows x cols unit-weight 4-neighbour grid with random edges pruned to
// create dead-ends, keeping the graph connected. Every degree-1 node is a
// terminal; if none exists after pruning one is forced.
// `deadend_fraction` is the target share of nodes that end up with degree 1.
Graph make_grid_with_deadends(int rows, int cols, double deadend_fraction, std::uint64_t seed);

// n nodes uniform in [-10, 10]^2, edges between nodes closer than `radius`
// plus the edges of a Euclidean minimum spanning tree (so the graph is always
// connected). Weights are Euclidean distances. The `n_terminals` nodes
// furthest from the centroid are terminals.
Graph make_random_geometric(int n_nodes, double radius, int n_terminals, std::uint64_t seed);

// The five-node game without a pure Nash equilibrium.
struct Counterexample {
  static constexpr NodeId kStart = 0;
  static constexpr NodeId kTerminal = 4;
  static constexpr double kTerminalPrize = 100.0;
  static constexpr double kBudget = 3.0;

  Graph graph;
  // Prize per node: s=0, 1, 2+alpha, 2-alpha, terminal.
  std::vector<double> prizes;
  double alpha;
};

Counterexample make_counterexample(double alpha);

// --- File I/O -------------------------------------------------------------
//
// Line-oriented text format:
//   nodes N terminals t1,t2,...      (header, first non-comment line)
//   kind <complete|star|...>         (optional)
//   staging w                        (optional)
//   coord u x y                      (optional, one per node)
//   u v weight                       (one per edge)
//   prize u mean [sd]                (optional, read by the prizes module)
// '#' starts a comment. All numbers are decimal ASCII.

class ParseError : public InvalidArgument {
 public:
  ParseError(int line, const std::string& what);
  int line() const { return line_; }

 private:
  int line_;
};

struct PrizeLine {
  NodeId node = kNoNode;
  double mean = 0.0;
  std::optional<double> sd;
  bool operator==(const PrizeLine&) const = default;
};

struct GraphDocument {
  Graph graph;
  std::vector<PrizeLine> prizes;
};

void write_graph(std::ostream& out, const Graph& graph, std::span<const PrizeLine> prizes = {});
GraphDocument parse_graph(std::istream& in);

void save_graph(const Graph& graph, const std::string& path, std::span<const PrizeLine> prizes = {});
Graph load_graph(const std::string& path);
GraphDocument load_graph_document(const std::string& path);

}  // namespace spcg

#endif  // SPCG_GRAPH_HPP_
