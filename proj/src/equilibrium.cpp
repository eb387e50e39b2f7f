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

#include "spcg/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <thread>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "spcg/ordinal.hpp"

namespace spcg {

std::vector<NodeId> RouteStrategy::intermediates() const {
  if (route.empty()) return {};
  return {route.begin(), route.end() - 1};
}

std::string RouteStrategy::to_string() const {
  return fmt::format("({})", fmt::join(intermediates(), ","));
}

namespace {

class RouteWalker {
 public:
  RouteWalker(const Graph& graph, double l_max, bool allow_revisits, std::size_t limit)
      : graph_(graph), l_max_(l_max), allow_revisits_(allow_revisits), limit_(limit),
        visited_(static_cast<std::size_t>(graph.node_count()), false) {
    if (allow_revisits_ && graph_.has_zero_weight_edges()) {
      throw InvalidArgument("route enumeration with revisits requires strictly positive edge weights");
    }
  }

  // Calls `emit(path, cost)` for each route; stops once `limit` routes were
  // seen. Returns the number of routes seen.
  template <typename Emit>
  std::size_t run(NodeId start, Emit&& emit) {
    count_ = 0;
    if (graph_.is_terminal(start)) {
      path_.clear();
      emit(path_, 0.0);
      return 1;
    }
    visited_[static_cast<std::size_t>(start)] = true;
    walk(start, 0.0, emit);
    visited_[static_cast<std::size_t>(start)] = false;
    return count_;
  }

 private:
  template <typename Emit>
  void walk(NodeId u, double spent, Emit& emit) {
    for (NodeId v : graph_.neighbors(u)) {
      if (count_ >= limit_) return;
      const double cost = spent + graph_.weight(u, v);
      if (!affordable(l_max_, cost)) continue;
      if (!allow_revisits_ && visited_[static_cast<std::size_t>(v)]) continue;
      path_.push_back(v);
      if (graph_.is_terminal(v)) {
        ++count_;
        emit(path_, cost);
      } else {
        const bool was = visited_[static_cast<std::size_t>(v)];
        visited_[static_cast<std::size_t>(v)] = true;
        walk(v, cost, emit);
        visited_[static_cast<std::size_t>(v)] = was;
      }
      path_.pop_back();
    }
  }

  const Graph& graph_;
  double l_max_;
  bool allow_revisits_;
  std::size_t limit_;
  std::size_t count_ = 0;
  std::vector<bool> visited_;
  std::vector<NodeId> path_;
};

void check_start(const Graph& graph, NodeId start) {
  if (start < 0 || start >= graph.node_count()) throw InvalidArgument(fmt::format("start {} is not a node", start));
}

}  // namespace

std::vector<RouteStrategy> enumerate_strategies(const Graph& graph, NodeId start, double l_max,
                                                const EnumerationOptions& options) {
  check_start(graph, start);
  std::vector<RouteStrategy> out;
  RouteWalker walker(graph, l_max, options.allow_revisits, options.max_routes + 1);
  walker.run(start, [&](const std::vector<NodeId>& path, double cost) { out.push_back({path, cost}); });
  if (out.size() > options.max_routes) {
    throw InvalidArgument(fmt::format("more than {} routes from node {}; lower L_max or raise max_routes",
                                      options.max_routes, start));
  }
  return out;
}

std::size_t count_strategies(const Graph& graph, NodeId start, double l_max, std::size_t limit,
                             bool allow_revisits) {
  check_start(graph, start);
  RouteWalker walker(graph, l_max, allow_revisits, limit);
  return walker.run(start, [](const std::vector<NodeId>&, double) {});
}

// --- PayoffMatrix -----------------------------------------------------------

PayoffMatrix::PayoffMatrix(std::vector<NodeId> starts, std::vector<std::vector<RouteStrategy>> strategies)
    : starts_(std::move(starts)), strategies_(std::move(strategies)) {
  if (starts_.size() != strategies_.size()) throw InvalidArgument("one strategy list per agent required");
  if (strategies_.empty()) throw InvalidArgument("payoff matrix needs at least one agent");
  cells_ = 1;
  for (const auto& s : strategies_) {
    if (s.empty()) throw InvalidArgument("every agent needs at least one strategy");
    cells_ *= s.size();
  }
  payoffs_.assign(cells_ * strategies_.size(), 0.0);
}

std::vector<std::size_t> PayoffMatrix::dims() const {
  std::vector<std::size_t> d;
  for (const auto& s : strategies_) d.push_back(s.size());
  return d;
}

std::size_t PayoffMatrix::flat_index(std::span<const std::size_t> profile) const {
  if (profile.size() != agents()) throw InvalidArgument("profile length does not match the agent count");
  std::size_t flat = 0;
  for (std::size_t k = 0; k < agents(); ++k) {
    if (profile[k] >= strategies_[k].size()) throw InvalidArgument("strategy index out of range");
    flat = flat * strategies_[k].size() + profile[k];
  }
  return flat;
}

std::vector<std::size_t> PayoffMatrix::profile(std::size_t flat) const {
  std::vector<std::size_t> p(agents());
  for (std::size_t k = agents(); k-- > 0;) {
    p[k] = flat % strategies_[k].size();
    flat /= strategies_[k].size();
  }
  return p;
}

std::span<const double> PayoffMatrix::payoffs(std::size_t flat) const {
  return std::span<const double>(payoffs_).subspan(flat * agents(), agents());
}

std::span<double> PayoffMatrix::mutable_payoffs(std::size_t flat) {
  return std::span<double>(payoffs_).subspan(flat * agents(), agents());
}

double PayoffMatrix::payoff(std::span<const std::size_t> profile, std::size_t agent) const {
  return payoffs(flat_index(profile))[agent];
}

double PayoffMatrix::team_payoff(std::span<const std::size_t> profile) const {
  double total = 0.0;
  for (double p : payoffs(flat_index(profile))) total += p;
  return total;
}

void PayoffMatrix::write_csv(std::ostream& out) const {
  const std::size_t n = agents();
  std::vector<std::string> header;
  for (std::size_t k = 1; k <= n; ++k) header.push_back(fmt::format("strategy_{}", k));
  for (std::size_t k = 1; k <= n; ++k) header.push_back(fmt::format("route_{}", k));
  for (std::size_t k = 1; k <= n; ++k) header.push_back(fmt::format("payoff_{}", k));
  out << fmt::format("{}\n", fmt::join(header, ","));
  for (std::size_t c = 0; c < cells_; ++c) {
    const auto prof = profile(c);
    std::vector<std::string> row;
    for (std::size_t k = 0; k < n; ++k) row.push_back(std::to_string(prof[k]));
    for (std::size_t k = 0; k < n; ++k) {
      row.push_back(fmt::format("\"{}\"", fmt::join(strategies_[k][prof[k]].intermediates(), "-")));
    }
    for (double p : payoffs(c)) row.push_back(fmt::format("{}", p));
    out << fmt::format("{}\n", fmt::join(row, ","));
  }
}

PayoffMatrix payoff_matrix(const std::shared_ptr<const Graph>& graph, const PrizeVector& prizes,
                           std::span<const NodeId> starts, const GameConfig& config, const PayoffOptions& options) {
  if (starts.empty() || starts.size() > 4) {
    throw InvalidArgument(fmt::format("payoff matrices support 1 to 4 agents, got {}", starts.size()));
  }
  std::vector<std::vector<RouteStrategy>> strategies;
  double cells = 1.0;
  for (NodeId s : starts) {
    strategies.push_back(enumerate_strategies(*graph, s, config.l_max, options.enumeration));
    if (strategies.back().empty()) {
      throw InvalidArgument(fmt::format("no feasible route from node {} within L_max {}", s, config.l_max));
    }
    cells *= static_cast<double>(strategies.back().size());
  }
  if (cells > static_cast<double>(options.max_cells)) {
    throw InvalidArgument(fmt::format(
        "payoff tensor would have {} cells, above the guard of {}; sample profiles instead", cells,
        options.max_cells));
  }

  GameConfig cfg = config;
  cfg.prize_mode = PrizeMode::kStationary;
  auto game = std::make_shared<const Game>(
      graph, PrizeModel::fixed(*graph, prizes, cfg.terminal_prize, PrizeMode::kStationary), cfg);

  PayoffMatrix matrix(std::vector<NodeId>(starts.begin(), starts.end()), std::move(strategies));
  const std::size_t n = starts.size();
  const RolloutOptions rollout_options{std::vector<NodeId>(starts.begin(), starts.end()), prizes, 0};

  auto eval_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t c = begin; c < end; ++c) {
      const auto prof = matrix.profile(c);
      std::vector<RouteController> routes;
      routes.reserve(n);
      for (std::size_t k = 0; k < n; ++k) routes.emplace_back(matrix.strategies(k)[prof[k]].route);
      std::vector<Controller*> ptrs;
      for (auto& r : routes) ptrs.push_back(&r);
      const EpisodeLog log = rollout(game, ptrs, rollout_options, derive_seed(0, c));
      auto cell = matrix.mutable_payoffs(c);
      for (std::size_t k = 0; k < n; ++k) {
        cell[k] = options.include_terminal ? log.returns[k] : log.prize_returns[k];
      }
    }
  };

  unsigned threads = options.threads > 0 ? static_cast<unsigned>(options.threads)
                                         : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, matrix.cells() / 256)));
  if (threads <= 1) {
    eval_range(0, matrix.cells());
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (matrix.cells() + threads - 1) / threads;
    for (unsigned w = 0; w < threads; ++w) {
      const std::size_t b = w * chunk;
      const std::size_t e = std::min(matrix.cells(), b + chunk);
      if (b < e) pool.emplace_back(eval_range, b, e);
    }
    for (auto& th : pool) th.join();
  }
  return matrix;
}

PneResult find_pure_nash(const PayoffMatrix& matrix, double tolerance) {
  const std::size_t n = matrix.agents();
  const auto dims = matrix.dims();
  // Stride of each agent's index in the flat layout.
  std::vector<std::size_t> stride(n, 1);
  for (std::size_t k = n - 1; k-- > 0;) stride[k] = stride[k + 1] * dims[k + 1];

  PneResult result;
  for (std::size_t c = 0; c < matrix.cells(); ++c) {
    const auto prof = matrix.profile(c);
    bool stable = true;
    for (std::size_t k = 0; k < n && stable; ++k) {
      const double current = matrix.payoffs(c)[k];
      const std::size_t base = c - prof[k] * stride[k];
      for (std::size_t alt = 0; alt < dims[k]; ++alt) {
        if (matrix.payoffs(base + alt * stride[k])[k] > current + tolerance) {
          stable = false;
          break;
        }
      }
    }
    if (stable) result.equilibria.push_back(prof);
  }
  result.exists = !result.equilibria.empty();
  return result;
}

double worst_equilibrium_team_payoff(const PayoffMatrix& matrix, const PneResult& pne) {
  if (pne.equilibria.empty()) throw InvalidArgument("no equilibria to evaluate");
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& prof : pne.equilibria) worst = std::min(worst, matrix.team_payoff(prof));
  return worst;
}

double price_of_anarchy(double equilibrium_team_reward, double top_optimum) {
  if (!(top_optimum > 0.0)) throw InvalidArgument(fmt::format("TOP optimum must be > 0, got {}", top_optimum));
  return equilibrium_team_reward / top_optimum;
}

// --- Greedy ------------------------------------------------------------------

namespace {

NodeId fallback_move(const Game& game, const AgentState& a) {
  const Graph& g = game.graph();
  NodeId best = kNoNode;
  double best_w = std::numeric_limits<double>::infinity();
  for (NodeId v : g.neighbors(a.node)) {
    const double w = g.weight(a.node, v);
    if (g.is_terminal(v) && affordable(a.budget, w) && w < best_w) {
      best = v;
      best_w = w;
    }
  }
  if (best != kNoNode) return best;
  const NodeId hop = game.paths().next_hop_to_terminal(a.node);
  if (hop != kNoNode && affordable(a.budget, g.weight(a.node, hop))) return hop;
  for (NodeId v : g.neighbors(a.node)) {
    const double w = g.weight(a.node, v);
    if (affordable(a.budget, w) && w < best_w) {
      best = v;
      best_w = w;
    }
  }
  return best;
}

}  // namespace

std::vector<NodeId> greedy_joint_actions(const GameState& state) {
  const Game& game = *state.game;
  const Graph& g = game.graph();
  const ShortestPaths& sp = game.paths();
  std::vector<NodeId> actions(state.agents.size(), kNoNode);

  auto candidates = [&](const AgentState& a) {
    std::vector<NodeId> out;
    for (NodeId v : g.neighbors(a.node)) {
      if (g.is_terminal(v) || !(state.prizes[static_cast<std::size_t>(v)] > 0.0)) continue;
      if (affordable(a.budget, g.weight(a.node, v) + sp.to_terminal(v))) out.push_back(v);
    }
    return out;
  };

  for (const auto& part : ors(build_separating_graph(state)).parts) {
    std::vector<bool> taken(static_cast<std::size_t>(g.node_count()), false);
    std::vector<AgentId> pending(part.begin(), part.end());
    while (!pending.empty()) {
      const AgentState& lead = state.agent(pending.front());
      std::vector<NodeId> open;
      for (NodeId v : candidates(lead)) {
        if (!taken[static_cast<std::size_t>(v)]) open.push_back(v);
      }
      if (open.empty()) {
        actions[static_cast<std::size_t>(lead.id - 1)] = fallback_move(game, lead);
        pending.erase(pending.begin());
        continue;
      }
      double top = 0.0;
      for (NodeId v : open) top = std::max(top, state.prizes[static_cast<std::size_t>(v)]);
      std::vector<NodeId> tied;
      for (NodeId v : open) {
        if (state.prizes[static_cast<std::size_t>(v)] == top) tied.push_back(v);
      }
      // The next |tied| agents share the tied prizes; juniors choose first,
      // each taking its cheapest move.
      const std::size_t group = std::min(tied.size(), pending.size());
      std::vector<AgentId> assigned;
      for (std::size_t k = group; k-- > 0;) {
        const AgentState& a = state.agent(pending[k]);
        const auto mine = candidates(a);
        NodeId pick = kNoNode;
        double pick_w = std::numeric_limits<double>::infinity();
        for (NodeId v : tied) {
          if (taken[static_cast<std::size_t>(v)]) continue;
          if (std::find(mine.begin(), mine.end(), v) == mine.end()) continue;
          const double w = g.weight(a.node, v);
          if (w < pick_w) {
            pick = v;
            pick_w = w;
          }
        }
        if (pick == kNoNode) continue;
        taken[static_cast<std::size_t>(pick)] = true;
        actions[static_cast<std::size_t>(a.id - 1)] = pick;
        assigned.push_back(a.id);
      }
      std::erase_if(pending, [&](AgentId id) {
        return std::find(assigned.begin(), assigned.end(), id) != assigned.end();
      });
    }
  }
  return actions;
}

NodeId GreedyController::act(const GameState& state, AgentId agent, Rng&) {
  const NodeId a = greedy_joint_actions(state)[static_cast<std::size_t>(agent - 1)];
  if (a == kNoNode) throw InfeasibleAction(fmt::format("greedy agent {} has no affordable move", agent));
  return a;
}

std::unique_ptr<GreedyController> greedy_pne_policy(const Game& game) {
  const GraphKind kind = game.graph().kind();
  if (kind != GraphKind::kComplete && kind != GraphKind::kStar) {
    throw InvalidArgument(fmt::format("greedy equilibrium policy needs a complete or star graph, got {}",
                                      to_string(kind)));
  }
  if (game.config().prize_mode != PrizeMode::kStationary) {
    throw InvalidArgument("greedy equilibrium policy needs stationary prizes");
  }
  return std::make_unique<GreedyController>();
}

EpisodeLog greedy_rollout(const std::shared_ptr<const Game>& game, std::span<const NodeId> starts,
                          const PrizeVector& prizes) {
  std::vector<GreedyController> greedy(starts.size());
  std::vector<Controller*> ptrs;
  for (auto& c : greedy) ptrs.push_back(&c);
  return rollout(game, ptrs, {std::vector<NodeId>(starts.begin(), starts.end()), prizes, 0}, 0);
}

StageDeviationReport verify_stage_equilibrium(const std::shared_ptr<const Game>& game,
                                              std::span<const NodeId> starts, const PrizeVector& prizes,
                                              double tolerance) {
  const Graph& g = game->graph();
  const ShortestPaths& sp = game->paths();
  Rng rng = make_rng(0);
  StageDeviationReport report;
  GameState state = initial_state(game, starts, prizes);
  const int cap = game->step_cap();
  while (state.any_active() && state.t < cap) {
    const auto actions = greedy_joint_actions(state);
    StepOutcome base = step(state, actions, rng);
    for (const AgentState& a : state.agents) {
      if (!a.active) continue;
      const auto k = static_cast<std::size_t>(a.id - 1);
      const double base_reward = base.rewards[k] - base.terminal_rewards[k];
      for (NodeId v : g.neighbors(a.node)) {
        if (v == actions[k]) continue;
        if (!affordable(a.budget, g.weight(a.node, v) + sp.to_terminal(v))) continue;
        auto deviated = actions;
        deviated[k] = v;
        const StepOutcome dev = step(state, deviated, rng);
        const double gain = dev.rewards[k] - dev.terminal_rewards[k] - base_reward;
        if (gain > report.max_gain) {
          report.max_gain = gain;
          report.worst_stage = state.t;
          report.worst_agent = a.id;
          report.worst_action = v;
        }
      }
    }
    ++report.stages;
    state = std::move(base.new_state);
  }
  report.equilibrium = report.max_gain <= tolerance;
  return report;
}

RouteDeviationReport best_route_deviation(const std::shared_ptr<const Game>& game, std::span<const NodeId> starts,
                                          const PrizeVector& prizes, const EnumerationOptions& options) {
  const EpisodeLog baseline = greedy_rollout(game, starts, prizes);
  const std::size_t n = starts.size();
  const RolloutOptions ro{std::vector<NodeId>(starts.begin(), starts.end()), prizes, 0};
  RouteDeviationReport report;
  report.max_gain = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    for (const RouteStrategy& r : enumerate_strategies(game->graph(), starts[k], game->config().l_max, options)) {
      std::vector<GreedyController> greedy(n);
      RouteController deviator(r.route);
      std::vector<Controller*> ptrs;
      for (std::size_t i = 0; i < n; ++i) ptrs.push_back(i == k ? static_cast<Controller*>(&deviator) : &greedy[i]);
      const EpisodeLog log = rollout(game, ptrs, ro, 0);
      const double gain = log.returns[k] - baseline.returns[k];
      if (gain > report.max_gain) {
        report.max_gain = gain;
        report.agent = static_cast<AgentId>(k + 1);
        report.route = r;
      }
    }
  }
  return report;
}

}  // namespace spcg
