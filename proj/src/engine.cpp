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

#include "spcg/engine.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

namespace spcg {

std::string_view to_string(TerminalConflict rule) {
  return rule == TerminalConflict::kSeniorOnly ? "senior_only" : "pay_all";
}

TerminalConflict terminal_conflict_from_string(std::string_view name) {
  if (name == "pay_all") return TerminalConflict::kPayAll;
  if (name == "senior_only") return TerminalConflict::kSeniorOnly;
  throw InvalidArgument(fmt::format("unknown terminal conflict rule '{}'", name));
}

void GameConfig::validate() const {
  if (!(l_max > 0.0 && std::isfinite(l_max))) throw InvalidArgument(fmt::format("L_max must be > 0, got {}", l_max));
  if (!(gamma > 0.0 && gamma <= 1.0)) throw InvalidArgument(fmt::format("gamma must lie in (0,1], got {}", gamma));
  if (!(terminal_prize >= 0.0 && std::isfinite(terminal_prize))) {
    throw InvalidArgument("terminal prize must be finite and >= 0");
  }
  if (step_cap < 0) throw InvalidArgument("step cap must be >= 0");
}

Game::Game(std::shared_ptr<const Graph> graph, PrizeModel prize_model, GameConfig config)
    : graph_(std::move(graph)), prize_model_(std::move(prize_model)), config_(config), paths_(*graph_) {
  config_.validate();
  if (prize_model_.node_count() != static_cast<std::size_t>(graph_->node_count())) {
    throw InvalidArgument("prize model size does not match the graph");
  }
  if (prize_model_.mode() != config_.prize_mode) {
    throw InvalidArgument("prize model mode disagrees with the game config");
  }
  if (prize_model_.terminal_value() != config_.terminal_prize) {
    throw InvalidArgument("prize model terminal value disagrees with the game config");
  }
}

int Game::step_cap() const {
  if (config_.step_cap > 0) return config_.step_cap;
  const double min_w = graph_->min_positive_edge_weight().value_or(1.0);
  return std::max(1, static_cast<int>(std::ceil(4.0 * config_.l_max / min_w)));
}

bool GameState::any_active() const {
  return std::any_of(agents.begin(), agents.end(), [](const AgentState& a) { return a.active; });
}

bool is_available(const Game& game, NodeId node, double budget) {
  if (!(budget > 0.0) || game.graph().is_terminal(node)) return false;
  for (NodeId v : game.graph().neighbors(node)) {
    if (affordable(budget, game.graph().weight(node, v))) return true;
  }
  return false;
}

GameState initial_state(std::shared_ptr<const Game> game, std::span<const NodeId> starts, PrizeVector prizes) {
  const Graph& g = game->graph();
  if (starts.empty()) throw InvalidArgument("team must have at least one agent");
  if (prizes.size() != static_cast<std::size_t>(g.node_count())) {
    throw InvalidArgument(fmt::format("prize vector has {} entries for {} nodes", prizes.size(), g.node_count()));
  }
  for (std::size_t u = 0; u < prizes.size(); ++u) {
    if (!(prizes[u] >= 0.0)) throw InvalidArgument(fmt::format("negative prize at node {}", u));
    if (g.is_terminal(static_cast<NodeId>(u))) prizes[u] = game->config().terminal_prize;
  }
  GameState state;
  state.agents.reserve(starts.size());
  for (std::size_t k = 0; k < starts.size(); ++k) {
    const NodeId s = starts[k];
    if (s < 0 || s >= g.node_count()) throw InvalidArgument(fmt::format("start node {} is not a node", s));
    if (!g.is_terminal(s)) prizes[static_cast<std::size_t>(s)] = 0.0;
    const double budget = game->config().l_max;
    state.agents.push_back({static_cast<AgentId>(k + 1), s, budget, is_available(*game, s, budget)});
  }
  state.prizes = std::move(prizes);
  state.game = std::move(game);
  return state;
}

std::vector<NodeId> reachable_set(const GameState& state, AgentId agent) {
  const AgentState& a = state.agent(agent);
  if (!a.active) return {};
  const auto nbrs = state.game->graph().neighbors(a.node);
  return {nbrs.begin(), nbrs.end()};
}

std::vector<std::uint8_t> action_mask(const GameState& state, AgentId agent) {
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(state.game->graph().node_count()), 0);
  for (NodeId v : reachable_set(state, agent)) mask[static_cast<std::size_t>(v)] = 1;
  return mask;
}

StepOutcome step(const GameState& state, std::span<const NodeId> actions, Rng& rng) {
  const Game& game = *state.game;
  const Graph& g = game.graph();
  const std::size_t n = state.agents.size();
  if (actions.size() != n) {
    throw InvalidArgument(fmt::format("expected {} actions, got {}", n, actions.size()));
  }

  StepOutcome out;
  out.rewards.assign(n, 0.0);
  out.terminal_rewards.assign(n, 0.0);
  out.new_state = state;
  GameState& next = out.new_state;

  // Validate and move every active agent simultaneously.
  std::vector<std::vector<AgentId>> arrivals(static_cast<std::size_t>(g.node_count()));
  std::vector<NodeId> occupied;
  for (std::size_t k = 0; k < n; ++k) {
    const AgentState& a = state.agents[k];
    if (!a.active) continue;
    const NodeId to = actions[k];
    if (to < 0 || to >= g.node_count() || !g.has_edge(a.node, to)) {
      throw InfeasibleAction(fmt::format("agent {} at node {} cannot move to {}: not adjacent", a.id, a.node, to));
    }
    const double cost = g.weight(a.node, to);
    if (!affordable(a.budget, cost)) {
      throw InfeasibleAction(fmt::format("agent {} cannot afford edge ({},{}) of cost {} with budget {}", a.id,
                                         a.node, to, cost, a.budget));
    }
    AgentState& moved = next.agents[k];
    moved.node = to;
    moved.budget = a.budget - cost < kBudgetEps ? 0.0 : a.budget - cost;
    arrivals[static_cast<std::size_t>(to)].push_back(a.id);
    occupied.push_back(to);
  }

  // Rank-priority allocation: the most senior arrival takes the prize.
  for (NodeId v = 0; v < g.node_count(); ++v) {
    const auto& here = arrivals[static_cast<std::size_t>(v)];
    if (here.empty()) continue;
    const AgentId senior = here.front();  // ids were pushed in ascending order
    out.conflicts += static_cast<int>(here.size()) - 1;
    if (g.is_terminal(v)) {
      const double p = game.config().terminal_prize;
      for (AgentId id : here) {
        if (id == senior || game.config().terminal_conflict == TerminalConflict::kPayAll) {
          out.rewards[static_cast<std::size_t>(id - 1)] = p;
          out.terminal_rewards[static_cast<std::size_t>(id - 1)] = p;
        }
      }
      continue;
    }
    double& prize = next.prizes[static_cast<std::size_t>(v)];
    if (prize > 0.0) {
      out.rewards[static_cast<std::size_t>(senior - 1)] = prize;
      out.collected[v] = senior;
      prize = 0.0;
    }
  }

  for (std::size_t k = 0; k < n; ++k) {
    AgentState& a = next.agents[k];
    if (a.active) a.active = is_available(game, a.node, a.budget);
  }

  if (game.config().prize_mode == PrizeMode::kDynamic) {
    repopulate(game.prize_model(), next.prizes, occupied, rng);
  }
  ++next.t;
  return out;
}

double EpisodeLog::team_return() const { return std::accumulate(returns.begin(), returns.end(), 0.0); }

double EpisodeLog::team_prize_return() const {
  return std::accumulate(prize_returns.begin(), prize_returns.end(), 0.0);
}

std::vector<NodeId> random_starts(const Graph& graph, int team_size, Rng& rng) {
  const auto candidates = graph.non_terminals();
  if (candidates.empty()) throw InvalidArgument("graph has no non-terminal start nodes");
  std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
  std::vector<NodeId> starts(static_cast<std::size_t>(team_size));
  for (auto& s : starts) s = candidates[pick(rng)];
  return starts;
}

std::string prize_digest(const PrizeVector& prizes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (double p : prizes) {
    const auto bits = std::bit_cast<std::uint64_t>(p);
    for (int byte = 0; byte < 8; ++byte) {
      h ^= (bits >> (8 * byte)) & 0xFFu;
      h *= 0x100000001b3ULL;
    }
  }
  return fmt::format("{:016x}", h);
}

EpisodeLog rollout(const std::shared_ptr<const Game>& game, std::span<Controller* const> controllers,
                   const RolloutOptions& options, std::uint64_t seed) {
  Rng setup_rng = make_rng(derive_seed(seed, 0));
  Rng policy_rng = make_rng(derive_seed(seed, 1));
  Rng env_rng = make_rng(derive_seed(seed, 2));

  std::vector<NodeId> starts;
  if (options.starts) {
    starts = *options.starts;
  } else {
    const int team = options.team_size > 0 ? options.team_size : static_cast<int>(controllers.size());
    starts = random_starts(game->graph(), team, setup_rng);
  }
  if (controllers.size() != starts.size()) {
    throw InvalidArgument(fmt::format("{} controllers for {} agents", controllers.size(), starts.size()));
  }
  PrizeVector prizes = options.prizes ? *options.prizes : sample_initial(game->prize_model(), setup_rng);

  GameState state = initial_state(game, starts, std::move(prizes));
  const std::size_t n = starts.size();

  EpisodeLog log;
  log.starts = starts;
  log.initial_prizes = state.prizes;
  log.returns.assign(n, 0.0);
  log.discounted_returns.assign(n, 0.0);
  log.prize_returns.assign(n, 0.0);
  log.trajectories.resize(n);
  for (std::size_t k = 0; k < n; ++k) log.trajectories[k].push_back(starts[k]);

  for (Controller* c : controllers) c->reset(state);

  const int cap = game->step_cap();
  double discount = 1.0;
  while (state.any_active() && state.t < cap) {
    std::vector<NodeId> actions(n, kNoNode);
    for (std::size_t k = 0; k < n; ++k) {
      if (state.agents[k].active) actions[k] = controllers[k]->act(state, static_cast<AgentId>(k + 1), policy_rng);
    }
    StepOutcome out = step(state, actions, env_rng);

    StepRecord rec;
    rec.t = state.t;
    rec.actions = actions;
    rec.rewards = out.rewards;
    for (std::size_t k = 0; k < n; ++k) {
      const AgentState& a = out.new_state.agents[k];
      rec.nodes.push_back(a.node);
      rec.budgets.push_back(a.budget);
      rec.active.push_back(a.active);
      log.returns[k] += out.rewards[k];
      log.discounted_returns[k] += discount * out.rewards[k];
      log.prize_returns[k] += out.rewards[k] - out.terminal_rewards[k];
      if (state.agents[k].active) log.trajectories[k].push_back(a.node);
    }
    rec.prize_digest = prize_digest(out.new_state.prizes);
    log.steps.push_back(std::move(rec));
    log.conflicts += out.conflicts;
    discount *= game->config().gamma;
    state = std::move(out.new_state);
  }
  log.truncated = state.any_active();
  return log;
}

NodeId RouteController::act(const GameState& state, AgentId agent, Rng&) {
  if (cursor_ >= route_.size()) {
    throw InfeasibleAction(fmt::format("agent {} exhausted its route of {} nodes while still active", agent,
                                       route_.size()));
  }
  (void)state;
  return route_[cursor_++];
}

NodeId UniformController::act(const GameState& state, AgentId agent, Rng& rng) {
  const AgentState& a = state.agent(agent);
  const Graph& g = state.game->graph();
  std::vector<NodeId> options;
  for (NodeId v : g.neighbors(a.node)) {
    if (affordable(a.budget, g.weight(a.node, v))) options.push_back(v);
  }
  if (options.empty()) throw InfeasibleAction(fmt::format("agent {} has no affordable move", agent));
  std::uniform_int_distribution<std::size_t> pick(0, options.size() - 1);
  return options[pick(rng)];
}

}  // namespace spcg
