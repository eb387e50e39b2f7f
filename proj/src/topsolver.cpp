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

#include "spcg/topsolver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <thread>

#include <fmt/format.h>

#include "json.hpp"

namespace spcg {

void TopInstance::validate() const {
  if (!graph) throw InvalidArgument("TOP instance has no graph");
  if (prizes.size() != static_cast<std::size_t>(graph->node_count())) {
    throw InvalidArgument("TOP prize vector size does not match the graph");
  }
  if (starts.empty()) throw InvalidArgument("TOP instance needs at least one agent");
  for (NodeId s : starts) {
    if (s < 0 || s >= graph->node_count()) throw InvalidArgument(fmt::format("start {} is not a node", s));
  }
  for (double p : prizes) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw InvalidArgument("TOP prizes must be finite and >= 0");
  }
  if (!(l_max >= 0.0) || !std::isfinite(l_max)) throw InvalidArgument("L_max must be finite and >= 0");
  if (!(terminal_prize >= 0.0)) throw InvalidArgument("terminal prize must be >= 0");
}

namespace {

// Prize vector with starts and terminals zeroed.
PrizeVector effective_prizes(const TopInstance& inst) {
  PrizeVector p = inst.prizes;
  for (NodeId s : inst.starts) p[static_cast<std::size_t>(s)] = 0.0;
  for (NodeId d : inst.graph->terminals()) p[static_cast<std::size_t>(d)] = 0.0;
  return p;
}

RouteStrategy route_cost(const Graph& g, NodeId start, std::vector<NodeId> route) {
  RouteStrategy r{std::move(route), 0.0};
  NodeId at = start;
  for (NodeId v : r.route) {
    r.cost += g.weight(at, v);
    at = v;
  }
  return r;
}

void atomic_max(std::atomic<double>& target, double value) {
  double cur = target.load();
  while (value > cur && !target.compare_exchange_weak(cur, value)) {
  }
}

using Clock = std::chrono::steady_clock;

class Search {
 public:
  Search(const TopInstance& inst, const TopOptions& opts, std::atomic<double>& incumbent,
         std::optional<Clock::time_point> deadline)
      : inst_(inst), g_(*inst.graph), sp_(g_), opts_(opts), prizes_(effective_prizes(inst)),
        n_(inst.starts.size()), incumbent_(incumbent), deadline_(deadline) {
    const auto nv = static_cast<std::size_t>(g_.node_count());
    collected_.assign(nv, 0);
    on_route_.assign(n_, std::vector<bool>(nv, false));
    routes_.resize(n_);
    // future_reach_[k][u]: some agent after k could collect u.
    future_reach_.assign(n_ + 1, std::vector<bool>(nv, false));
    for (std::size_t k = n_; k-- > 0;) {
      future_reach_[k] = future_reach_[k + 1];
      const NodeId s = inst_.starts[k];
      if (g_.is_terminal(s)) continue;
      for (NodeId u = 0; u < g_.node_count(); ++u) {
        if (affordable(inst_.l_max, sp_.distance(s, u) + sp_.to_terminal(u))) {
          future_reach_[k][static_cast<std::size_t>(u)] = true;
        }
      }
    }
    // future_pay_[k]: terminal payments available to agents k..n-1.
    future_pay_.assign(n_ + 1, 0.0);
    for (std::size_t k = n_; k-- > 0;) {
      future_pay_[k] = future_pay_[k + 1] + (g_.is_terminal(inst_.starts[k]) ? 0.0 : inst_.terminal_prize);
    }
    // Neighbours ordered by prize, richest first, to find good incumbents early.
    order_.resize(nv);
    for (NodeId u = 0; u < g_.node_count(); ++u) {
      auto& o = order_[static_cast<std::size_t>(u)];
      o.assign(g_.neighbors(u).begin(), g_.neighbors(u).end());
      std::stable_sort(o.begin(), o.end(), [&](NodeId a, NodeId b) {
        return prizes_[static_cast<std::size_t>(a)] > prizes_[static_cast<std::size_t>(b)];
      });
    }
  }

  // Searches the subtree where agent 0 first moves to `first` (kNoNode for
  // the whole tree).
  void run(NodeId first) {
    const NodeId s0 = inst_.starts[0];
    if (first == kNoNode || g_.is_terminal(s0)) {
      start_agent(0, 0.0);
      return;
    }
    mark(0, s0, true);
    expand_to(0, s0, inst_.l_max, 0.0, first);
    mark(0, s0, false);
  }

  double root_bound() const { return bound(0, inst_.starts[0], inst_.l_max, 0.0); }

  bool found() const { return found_; }
  double best_value() const { return best_value_; }
  const std::vector<std::vector<NodeId>>& best_routes() const { return best_routes_; }
  std::uint64_t expanded() const { return expanded_; }
  bool aborted() const { return aborted_; }

 private:
  void mark(std::size_t k, NodeId u, bool on) { on_route_[k][static_cast<std::size_t>(u)] = on; }

  void start_agent(std::size_t k, double value) {
    if (k == n_) {
      leaf();
      return;
    }
    routes_[k].clear();
    const NodeId s = inst_.starts[k];
    if (g_.is_terminal(s)) {
      start_agent(k + 1, value);
      return;
    }
    mark(k, s, true);
    dfs(k, s, inst_.l_max, value);
    mark(k, s, false);
  }

  double bound(std::size_t k, NodeId u, double budget, double value) const {
    double b = value + future_pay_[k];
    for (NodeId x = 0; x < g_.node_count(); ++x) {
      const auto ux = static_cast<std::size_t>(x);
      if (collected_[ux] > 0 || !(prizes_[ux] > 0.0)) continue;
      if (future_reach_[k + 1][ux] || affordable(budget, sp_.distance(u, x) + sp_.to_terminal(x))) b += prizes_[ux];
    }
    return b;
  }

  bool timed_out() {
    if (aborted_) return true;
    if (deadline_ && (expanded_ & 1023u) == 0 && Clock::now() >= *deadline_) aborted_ = true;
    return aborted_;
  }

  void dfs(std::size_t k, NodeId u, double budget, double value) {
    ++expanded_;
    if (timed_out()) return;
    if (bound(k, u, budget, value) < incumbent_.load() - 1e-9) return;
    for (NodeId v : order_[static_cast<std::size_t>(u)]) {
      expand_to(k, u, budget, value, v);
      if (aborted_) return;
    }
  }

  void expand_to(std::size_t k, NodeId u, double budget, double value, NodeId v) {
    const auto uv = static_cast<std::size_t>(v);
    const double w = g_.weight(u, v);
    if (!affordable(budget, w + sp_.to_terminal(v))) return;
    if (on_route_[k][uv]) return;
    routes_[k].push_back(v);
    if (g_.is_terminal(v)) {
      start_agent(k + 1, value + inst_.terminal_prize);
    } else {
      const double gain = collected_[uv] == 0 ? prizes_[uv] : 0.0;
      ++collected_[uv];
      mark(k, v, true);
      dfs(k, v, budget - w, value + gain);
      mark(k, v, false);
      --collected_[uv];
    }
    routes_[k].pop_back();
  }

  void leaf() {
    std::vector<RouteStrategy> rs;
    for (std::size_t k = 0; k < n_; ++k) rs.push_back(route_cost(g_, inst_.starts[k], routes_[k]));
    const double v = team_reward(inst_, rs);
    if (!found_ || v > best_value_) {
      found_ = true;
      best_value_ = v;
      best_routes_ = routes_;
      atomic_max(incumbent_, v);
    }
  }

  const TopInstance& inst_;
  const Graph& g_;
  ShortestPaths sp_;
  const TopOptions& opts_;
  PrizeVector prizes_;
  std::size_t n_;
  std::atomic<double>& incumbent_;
  std::optional<Clock::time_point> deadline_;

  std::vector<int> collected_;
  std::vector<std::vector<bool>> on_route_;
  std::vector<std::vector<NodeId>> routes_;
  std::vector<std::vector<bool>> future_reach_;
  std::vector<double> future_pay_;
  std::vector<std::vector<NodeId>> order_;

  bool found_ = false;
  double best_value_ = -std::numeric_limits<double>::infinity();
  std::vector<std::vector<NodeId>> best_routes_;
  std::uint64_t expanded_ = 0;
  bool aborted_ = false;
};

// Every agent on a cheapest path to its nearest terminal.
TopSolution shortest_path_incumbent(const TopInstance& inst) {
  const Graph& g = *inst.graph;
  const ShortestPaths sp(g);
  TopSolution sol;
  for (std::size_t k = 0; k < inst.starts.size(); ++k) {
    const NodeId s = inst.starts[k];
    std::vector<NodeId> route;
    if (!g.is_terminal(s)) {
      if (!affordable(inst.l_max, sp.to_terminal(s))) {
        throw InvalidArgument(
            fmt::format("TOP instance infeasible: agent {} cannot reach a terminal from node {} within L_max {}",
                        k + 1, s, inst.l_max));
      }
      for (NodeId at = s; !g.is_terminal(at);) {
        at = sp.next_hop_to_terminal(at);
        route.push_back(at);
      }
    }
    sol.routes.push_back(route_cost(g, s, std::move(route)));
  }
  sol.team_reward = team_reward(inst, sol.routes);
  return sol;
}

TopSolution run_search(const TopInstance& inst, const TopOptions& opts, std::optional<Clock::time_point> deadline) {
  TopSolution incumbent = shortest_path_incumbent(inst);
  std::atomic<double> shared(incumbent.team_reward);

  const Graph& g = *inst.graph;
  const NodeId s0 = inst.starts[0];
  std::vector<NodeId> roots;
  if (g.is_terminal(s0)) {
    roots.push_back(kNoNode);
  } else {
    for (NodeId v : g.neighbors(s0)) roots.push_back(v);
  }

  struct RootResult {
    bool found = false;
    double value = 0.0;
    std::vector<std::vector<NodeId>> routes;
    std::uint64_t expanded = 0;
    bool aborted = false;
  };
  std::vector<RootResult> results(roots.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < roots.size(); i = next++) {
      Search search(inst, opts, shared, deadline);
      search.run(roots[i]);
      results[i] = {search.found(), search.best_value(), search.best_routes(), search.expanded(), search.aborted()};
    }
  };
  unsigned threads = opts.threads > 0 ? static_cast<unsigned>(opts.threads)
                                      : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, roots.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  TopSolution sol = incumbent;
  bool aborted = false;
  for (const RootResult& r : results) {
    sol.nodes_expanded += r.expanded;
    aborted = aborted || r.aborted;
    if (r.found && r.value > sol.team_reward) {
      sol.team_reward = r.value;
      sol.routes.clear();
      for (std::size_t k = 0; k < r.routes.size(); ++k) {
        sol.routes.push_back(route_cost(g, inst.starts[k], r.routes[k]));
      }
    }
  }
  sol.completed = !aborted;
  if (sol.completed) {
    sol.upper_bound = sol.team_reward;
  } else {
    std::atomic<double> none(-std::numeric_limits<double>::infinity());
    Search root(inst, opts, none, std::nullopt);
    sol.upper_bound = std::max(sol.team_reward, root.root_bound());
  }
  return sol;
}

// Walks reduce to simple routes on the shortest-path closure: an edge u-v
// per pair, weighted by the cheapest path whose inner nodes are not
// terminals (agents stop on arrival there).
struct WalkClosure {
  TopInstance instance;
  int n = 0;
  std::vector<NodeId> next;

  std::vector<NodeId> expand(NodeId start, const std::vector<NodeId>& route) const {
    std::vector<NodeId> walk;
    NodeId at = start;
    for (NodeId v : route) {
      while (at != v) {
        at = next[static_cast<std::size_t>(at) * static_cast<std::size_t>(n) + static_cast<std::size_t>(v)];
        walk.push_back(at);
      }
    }
    return walk;
  }
};

WalkClosure walk_closure(const TopInstance& inst) {
  const Graph& g = *inst.graph;
  const int n = g.node_count();
  const auto nn = static_cast<std::size_t>(n);
  auto at = [nn](NodeId i, NodeId j) { return static_cast<std::size_t>(i) * nn + static_cast<std::size_t>(j); };
  std::vector<double> dist(nn * nn, std::numeric_limits<double>::infinity());
  WalkClosure c;
  c.n = n;
  c.next.assign(nn * nn, kNoNode);
  for (NodeId u = 0; u < n; ++u) dist[at(u, u)] = 0.0;
  for (const Edge& e : g.edges()) {
    dist[at(e.u, e.v)] = dist[at(e.v, e.u)] = e.weight;
    c.next[at(e.u, e.v)] = e.v;
    c.next[at(e.v, e.u)] = e.u;
  }
  for (NodeId m = 0; m < n; ++m) {
    if (g.is_terminal(m)) continue;
    for (NodeId i = 0; i < n; ++i) {
      for (NodeId j = 0; j < n; ++j) {
        if (dist[at(i, m)] + dist[at(m, j)] < dist[at(i, j)]) {
          dist[at(i, j)] = dist[at(i, m)] + dist[at(m, j)];
          c.next[at(i, j)] = c.next[at(i, m)];
        }
      }
    }
  }
  std::vector<Edge> edges;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = u + 1; v < n; ++v) {
      if (std::isfinite(dist[at(u, v)])) edges.push_back({u, v, dist[at(u, v)]});
    }
  }
  std::vector<NodeId> terminals(g.terminals().begin(), g.terminals().end());
  c.instance = inst;
  c.instance.graph = std::make_shared<const Graph>(n, std::move(edges), std::move(terminals));
  return c;
}

// Solves on the closure and maps the routes back to walks on the graph.
template <typename SolveFn>
TopSolution solve_walks(const TopInstance& inst, const TopOptions& options, const SolveFn& solve) {
  const WalkClosure c = walk_closure(inst);
  TopOptions simple = options;
  simple.allow_revisits = false;
  TopSolution sol = solve(c.instance, simple);
  for (std::size_t k = 0; k < sol.routes.size(); ++k) {
    sol.routes[k] = route_cost(*inst.graph, inst.starts[k], c.expand(inst.starts[k], sol.routes[k].route));
  }
  sol.team_reward = team_reward(inst, sol.routes);
  sol.upper_bound = std::max(sol.upper_bound, sol.team_reward);
  return sol;
}

}  // namespace

double team_reward(const TopInstance& instance, std::span<const RouteStrategy> routes) {
  const Graph& g = *instance.graph;
  const PrizeVector prizes = effective_prizes(instance);
  std::vector<bool> seen(prizes.size(), false);
  double total = 0.0;
  for (const RouteStrategy& r : routes) {
    for (NodeId v : r.route) seen[static_cast<std::size_t>(v)] = true;
  }
  for (std::size_t u = 0; u < prizes.size(); ++u) {
    if (seen[u]) total += prizes[u];
  }
  for (const RouteStrategy& r : routes) {
    if (!r.route.empty() && g.is_terminal(r.route.back())) total += instance.terminal_prize;
  }
  return total;
}

double estimate_profiles(const TopInstance& instance, bool allow_revisits, double cap) {
  double product = 1.0;
  const auto limit = static_cast<std::size_t>(std::min(cap, 1e18)) + 1;
  for (NodeId s : instance.starts) {
    product *= static_cast<double>(
        std::max<std::size_t>(1, count_strategies(*instance.graph, s, instance.l_max, limit, allow_revisits)));
    if (product > cap) return product;
  }
  return product;
}

TopSolution solve_exact(const TopInstance& instance, const TopOptions& options) {
  instance.validate();
  if (options.allow_revisits) {
    return solve_walks(instance, options, [](const TopInstance& i, const TopOptions& o) { return solve_exact(i, o); });
  }
  const double estimate = std::isinf(options.profile_budget)
                              ? 0.0
                              : estimate_profiles(instance, false, options.profile_budget);
  if (estimate > options.profile_budget) {
    throw InvalidArgument(fmt::format(
        "TOP search space estimate {:.3g} exceeds the guard of {:.3g} joint profiles; use solve_bound", estimate,
        options.profile_budget));
  }
  TopSolution sol = run_search(instance, options, std::nullopt);
  sol.optimal = true;
  return sol;
}

TopSolution solve_bound(const TopInstance& instance, std::chrono::duration<double> time_limit,
                        const TopOptions& options) {
  instance.validate();
  if (options.allow_revisits) {
    return solve_walks(instance, options,
                       [&](const TopInstance& i, const TopOptions& o) { return solve_bound(i, time_limit, o); });
  }
  if (time_limit.count() <= 0.0) {
    TopSolution sol = shortest_path_incumbent(instance);
    std::atomic<double> none(-std::numeric_limits<double>::infinity());
    Search root(instance, options, none, std::nullopt);
    sol.upper_bound = std::max(sol.team_reward, root.root_bound());
    return sol;
  }
  const auto deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(time_limit);
  TopSolution sol = run_search(instance, options, deadline);
  sol.optimal = false;
  return sol;
}

void write_top(std::ostream& out, const TopInstance& instance, const TopSolution& solution) {
  using nlohmann::json;
  json edges = json::array();
  for (const Edge& e : instance.graph->edges()) edges.push_back({e.u, e.v, e.weight});
  std::vector<NodeId> terminals(instance.graph->terminals().begin(), instance.graph->terminals().end());
  out << json{{"type", "instance"},
              {"nodes", instance.graph->node_count()},
              {"edges", edges},
              {"terminals", terminals},
              {"prizes", instance.prizes},
              {"starts", instance.starts},
              {"l_max", instance.l_max},
              {"terminal_prize", instance.terminal_prize}}
             .dump()
      << '\n';
  json routes = json::array();
  for (const RouteStrategy& r : solution.routes) routes.push_back(r.route);
  out << json{{"type", "solution"},
              {"routes", routes},
              {"team_reward", solution.team_reward},
              {"optimal", solution.optimal},
              {"upper_bound", solution.upper_bound},
              {"completed", solution.completed},
              {"nodes_expanded", solution.nodes_expanded}}
             .dump()
      << '\n';
}

}  // namespace spcg
