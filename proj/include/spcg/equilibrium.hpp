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

#ifndef SPCG_EQUILIBRIUM_HPP_
#define SPCG_EQUILIBRIUM_HPP_

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "spcg/common.hpp"
#include "spcg/engine.hpp"
#include "spcg/graph.hpp"

namespace spcg {

// A fixed route from an agent's start. `route` lists every node visited
// after the start, ending at a terminal. An agent that starts on a
// terminal has the empty route.
struct RouteStrategy {
  std::vector<NodeId> route;
  double cost = 0.0;

  // Nodes strictly between the start and the terminal.
  std::vector<NodeId> intermediates() const;
  std::string to_string() const;
  bool operator==(const RouteStrategy&) const = default;
};

struct EnumerationOptions {
  // Permit revisiting nodes (including the start). Requires strictly
  // positive edge weights.
  bool allow_revisits = false;
  // Enumeration aborts with InvalidArgument beyond this many routes.
  std::size_t max_routes = 1'000'000;
};

// Every route from `start` to a terminal with cost <= l_max, in
// depth-first order over ascending neighbour ids. Terminals are absorbing.
std::vector<RouteStrategy> enumerate_strategies(const Graph& graph, NodeId start, double l_max,
                                                const EnumerationOptions& options = {});

// Number of routes enumerate_strategies would return, stopping at `limit`.
std::size_t count_strategies(const Graph& graph, NodeId start, double l_max, std::size_t limit,
                             bool allow_revisits = false);

// Per-agent payoffs for every joint route profile.
class PayoffMatrix {
 public:
  PayoffMatrix(std::vector<NodeId> starts, std::vector<std::vector<RouteStrategy>> strategies);

  std::size_t agents() const { return strategies_.size(); }
  std::size_t cells() const { return cells_; }
  const std::vector<NodeId>& starts() const { return starts_; }
  const std::vector<RouteStrategy>& strategies(std::size_t agent) const { return strategies_.at(agent); }
  std::vector<std::size_t> dims() const;

  // Row-major: the last agent's strategy index varies fastest.
  std::size_t flat_index(std::span<const std::size_t> profile) const;
  std::vector<std::size_t> profile(std::size_t flat) const;

  std::span<const double> payoffs(std::size_t flat) const;
  std::span<double> mutable_payoffs(std::size_t flat);
  double payoff(std::span<const std::size_t> profile, std::size_t agent) const;
  double team_payoff(std::span<const std::size_t> profile) const;

  // One row per joint profile: strategy indices, routes, payoffs.
  void write_csv(std::ostream& out) const;

 private:
  std::vector<NodeId> starts_;
  std::vector<std::vector<RouteStrategy>> strategies_;
  std::size_t cells_ = 0;
  std::vector<double> payoffs_;
};

struct PayoffOptions {
  EnumerationOptions enumeration;
  std::size_t max_cells = 4'000'000;
  // Add terminal payments to the recorded payoffs.
  bool include_terminal = false;
  // 0 picks std::thread::hardware_concurrency().
  int threads = 0;
};

// Simulates each joint route profile through the engine with stationary
// prizes. `config` supplies L_max, the terminal prize and the terminal
// conflict rule; 1 to 4 agents.
PayoffMatrix payoff_matrix(const std::shared_ptr<const Graph>& graph, const PrizeVector& prizes,
                           std::span<const NodeId> starts, const GameConfig& config,
                           const PayoffOptions& options = {});

struct PneResult {
  std::vector<std::vector<std::size_t>> equilibria;
  bool exists = false;
};

// Profiles from which no agent gains more than `tolerance` by a unilateral
// change of route.
PneResult find_pure_nash(const PayoffMatrix& matrix, double tolerance = 1e-9);

// Smallest team payoff over the listed equilibria. Throws if there are none.
double worst_equilibrium_team_payoff(const PayoffMatrix& matrix, const PneResult& pne);

// equilibrium / optimum; throws if optimum <= 0.
double price_of_anarchy(double equilibrium_team_reward, double top_optimum);

// Rank-greedy joint action. Within each connected group of the separating
// graph, agents choose senior first and each takes the largest remaining
// prize it can reach while still affording a terminal afterwards. Equal
// prizes go junior first by cheapest move, then lowest node id. Agents with
// nothing to take head for the nearest terminal.
std::vector<NodeId> greedy_joint_actions(const GameState& state);

class GreedyController : public Controller {
 public:
  NodeId act(const GameState& state, AgentId agent, Rng& rng) override;
};

// The greedy policy as a checked equilibrium strategy: requires a complete
// or star graph and stationary prizes.
std::unique_ptr<GreedyController> greedy_pne_policy(const Game& game);

// Greedy play from the given starts and prizes.
EpisodeLog greedy_rollout(const std::shared_ptr<const Game>& game, std::span<const NodeId> starts,
                          const PrizeVector& prizes);

struct StageDeviationReport {
  bool equilibrium = true;
  int stages = 0;
  double max_gain = 0.0;
  int worst_stage = -1;
  AgentId worst_agent = 0;
  NodeId worst_action = kNoNode;
};

// Walks the greedy trajectory and, at every stage, tries every unilateral
// one-step deviation by every active agent. Stage payoffs are prize
// rewards; terminal payments are left out because every route earns them
// once. Deviations are limited to moves that still leave a terminal
// affordable.
StageDeviationReport verify_stage_equilibrium(const std::shared_ptr<const Game>& game,
                                              std::span<const NodeId> starts, const PrizeVector& prizes,
                                              double tolerance = 1e-9);

struct RouteDeviationReport {
  double max_gain = 0.0;
  AgentId agent = 0;
  RouteStrategy route;
};

// Best whole-episode gain any single agent obtains by committing to a fixed
// route while the others keep playing greedy.
RouteDeviationReport best_route_deviation(const std::shared_ptr<const Game>& game, std::span<const NodeId> starts,
                                          const PrizeVector& prizes, const EnumerationOptions& options = {});

}  // namespace spcg

#endif  // SPCG_EQUILIBRIUM_HPP_
