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

#ifndef SPCG_ENGINE_HPP_
#define SPCG_ENGINE_HPP_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spcg/common.hpp"
#include "spcg/graph.hpp"
#include "spcg/prizes.hpp"

namespace spcg {

// How the terminal prize is paid when several agents reach a terminal in
// the same step. kPayAll exempts terminals from conflict resolution; kSeniorOnly
// applies the seniority rule there as well.
enum class TerminalConflict { kPayAll, kSeniorOnly };

std::string_view to_string(TerminalConflict rule);
TerminalConflict terminal_conflict_from_string(std::string_view name);

struct GameConfig {
  double l_max = 1.0;
  double terminal_prize = 15.0;
  PrizeMode prize_mode = PrizeMode::kStationary;
  double gamma = 1.0;
  TerminalConflict terminal_conflict = TerminalConflict::kPayAll;
  // Overrides the default episode step cap when positive.
  int step_cap = 0;

  void validate() const;
};

// The immutable definition of a game: graph, prize process and rules.
class Game {
 public:
  Game(std::shared_ptr<const Graph> graph, PrizeModel prize_model, GameConfig config);

  const Graph& graph() const { return *graph_; }
  const std::shared_ptr<const Graph>& graph_ptr() const { return graph_; }
  const PrizeModel& prize_model() const { return prize_model_; }
  const GameConfig& config() const { return config_; }
  const ShortestPaths& paths() const { return paths_; }

  // ceil(4 L_max / smallest positive edge weight), or config.step_cap.
  int step_cap() const;

 private:
  std::shared_ptr<const Graph> graph_;
  PrizeModel prize_model_;
  GameConfig config_;
  ShortestPaths paths_;
};

struct AgentState {
  AgentId id = 0;
  NodeId node = kNoNode;
  double budget = 0.0;
  bool active = false;

  bool operator==(const AgentState&) const = default;
};

struct GameState {
  std::shared_ptr<const Game> game;
  // agents[k].id == k + 1.
  std::vector<AgentState> agents;
  PrizeVector prizes;
  int t = 0;

  const AgentState& agent(AgentId id) const { return agents.at(static_cast<std::size_t>(id - 1)); }
  int team_size() const { return static_cast<int>(agents.size()); }
  bool any_active() const;
};

// Agents start with the full budget. The prize at every start node is set
// to 0 before play: occupants do not collect their start node.
GameState initial_state(std::shared_ptr<const Game> game, std::span<const NodeId> starts, PrizeVector prizes);

// An agent is available when it has budget left, is not on a terminal and
// can afford at least one move.
bool is_available(const Game& game, NodeId node, double budget);

// One-hop neighbours of the agent's node; empty for inactive agents.
std::vector<NodeId> reachable_set(const GameState& state, AgentId agent);

// mask[u] == 1 iff u is in the agent's reachable set.
std::vector<std::uint8_t> action_mask(const GameState& state, AgentId agent);

// Raised for an action outside the reachable set or over budget.
class InfeasibleAction : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

struct StepOutcome {
  std::vector<double> rewards;
  // Portion of each reward that is a terminal payment.
  std::vector<double> terminal_rewards;
  GameState new_state;
  std::map<NodeId, AgentId> collected;
  // Agents that arrived at a node together with a more senior agent.
  int conflicts = 0;
};

// Simultaneous move. `actions[k]` is the destination of agent k+1 and is
// ignored for inactive agents.
StepOutcome step(const GameState& state, std::span<const NodeId> actions, Rng& rng);

// --- Rollouts -------------------------------------------------------------

class Controller {
 public:
  virtual ~Controller() = default;
  virtual void reset(const GameState& /*initial*/) {}
  // Destination for an active agent. Must be a feasible move.
  virtual NodeId act(const GameState& state, AgentId agent, Rng& rng) = 0;
};

struct StepRecord {
  int t = 0;
  std::vector<NodeId> actions;
  std::vector<NodeId> nodes;
  std::vector<double> rewards;
  std::vector<double> budgets;
  std::vector<bool> active;
  std::string prize_digest;

  bool operator==(const StepRecord&) const = default;
};

struct EpisodeLog {
  std::vector<NodeId> starts;
  PrizeVector initial_prizes;
  std::vector<StepRecord> steps;
  std::vector<double> returns;
  std::vector<double> discounted_returns;
  // Returns without terminal payments.
  std::vector<double> prize_returns;
  // Per-agent node sequence including the start node.
  std::vector<std::vector<NodeId>> trajectories;
  int conflicts = 0;
  bool truncated = false;

  double team_return() const;
  double team_prize_return() const;
  bool operator==(const EpisodeLog&) const = default;
};

struct RolloutOptions {
  // Explicit start nodes; drawn uniformly from non-terminals when unset.
  std::optional<std::vector<NodeId>> starts;
  // Explicit initial prizes; sampled from the game's prize model when unset.
  std::optional<PrizeVector> prizes;
  // Used when `starts` is unset.
  int team_size = 0;
};

EpisodeLog rollout(const std::shared_ptr<const Game>& game, std::span<Controller* const> controllers,
                   const RolloutOptions& options, std::uint64_t seed);

std::vector<NodeId> random_starts(const Graph& graph, int team_size, Rng& rng);

// FNV-1a over the bit patterns of the prize vector, as 16 hex digits.
std::string prize_digest(const PrizeVector& prizes);

// One JSON record per line: an "episode" header, one "step" record per
// step and a closing "summary" record.
void write_episode_log(std::ostream& out, const EpisodeLog& log);
EpisodeLog read_episode_log(std::istream& in);

// Follows a fixed node sequence, one node per step.
class RouteController : public Controller {
 public:
  explicit RouteController(std::vector<NodeId> route) : route_(std::move(route)) {}
  void reset(const GameState&) override { cursor_ = 0; }
  NodeId act(const GameState& state, AgentId agent, Rng& rng) override;

 private:
  std::vector<NodeId> route_;
  std::size_t cursor_ = 0;
};

// Uniform over affordable neighbours.
class UniformController : public Controller {
 public:
  NodeId act(const GameState& state, AgentId agent, Rng& rng) override;
};

}  // namespace spcg

#endif  // SPCG_ENGINE_HPP_
