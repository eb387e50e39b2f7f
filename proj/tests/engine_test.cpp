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

#include <numeric>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

namespace spcg {
namespace {

std::shared_ptr<const Game> counterexample_game(double alpha, TerminalConflict rule = TerminalConflict::kPayAll) {
  Counterexample ce = make_counterexample(alpha);
  auto g = std::make_shared<const Graph>(ce.graph);
  GameConfig cfg;
  cfg.l_max = Counterexample::kBudget;
  cfg.terminal_prize = Counterexample::kTerminalPrize;
  cfg.terminal_conflict = rule;
  return std::make_shared<const Game>(g, PrizeModel::fixed(*g, ce.prizes, cfg.terminal_prize), cfg);
}

std::shared_ptr<const Game> complete_game(int n, double l_max, PrizeMode mode = PrizeMode::kStationary) {
  auto g = std::make_shared<const Graph>(make_complete(n, constant_weight(1.0)));
  GameConfig cfg;
  cfg.l_max = l_max;
  cfg.prize_mode = mode;
  return std::make_shared<const Game>(g, PrizeModel::uniform(*g, 0.0, 10.0, 15.0, mode), cfg);
}

TEST(EngineTest, ReachableSets) {
  auto k5 = complete_game(5, 4.0);
  const std::vector<NodeId> s0{0};
  GameState st = initial_state(k5, s0, PrizeVector(5, 1.0));
  EXPECT_EQ(reachable_set(st, 1), (std::vector<NodeId>{1, 2, 3, 4}));

  auto ce = counterexample_game(0.5);
  st = initial_state(ce, s0, make_counterexample(0.5).prizes);
  EXPECT_EQ(reachable_set(st, 1), (std::vector<NodeId>{1, 2, 3}));
  const auto mask = action_mask(st, 1);
  EXPECT_EQ(mask, (std::vector<std::uint8_t>{0, 1, 1, 1, 0}));
  EXPECT_EQ(std::accumulate(mask.begin(), mask.end(), 0), ce->graph().degree(0));

  const std::vector<double> w{1, 1, 1};
  auto star_graph = std::make_shared<const Graph>(make_star(3, w));
  GameConfig cfg;
  cfg.l_max = 5;
  auto star = std::make_shared<const Game>(star_graph, PrizeModel::uniform(*star_graph, 0, 10, 15), cfg);
  const std::vector<NodeId> leaf{1};
  st = initial_state(star, leaf, PrizeVector(4, 1.0));
  EXPECT_EQ(reachable_set(st, 1), (std::vector<NodeId>{0}));
}

TEST(EngineTest, InactiveAgentHasEmptyMask) {
  auto k5 = complete_game(5, 4.0);
  const std::vector<NodeId> at_terminal{4};
  GameState st = initial_state(k5, at_terminal, PrizeVector(5, 1.0));
  EXPECT_FALSE(st.agents[0].active);
  EXPECT_TRUE(reachable_set(st, 1).empty());
  EXPECT_EQ(action_mask(st, 1), std::vector<std::uint8_t>(5, 0));
}

TEST(EngineTest, SeniorCollects) {
  auto k5 = complete_game(5, 4.0);
  const std::vector<NodeId> starts{0, 1};
  GameState st = initial_state(k5, starts, PrizeVector{0, 0, 5, 0, 15});
  Rng rng = make_rng(0);
  const std::vector<NodeId> actions{2, 2};
  const StepOutcome out = step(st, actions, rng);
  EXPECT_EQ(out.rewards, (std::vector<double>{5, 0}));
  EXPECT_EQ(out.new_state.prizes[2], 0.0);
  EXPECT_EQ(out.collected.at(2), 1);
  EXPECT_EQ(out.conflicts, 1);
}

TEST(EngineTest, SingleAgentCollects) {
  auto k5 = complete_game(5, 4.0);
  const std::vector<NodeId> starts{0};
  GameState st = initial_state(k5, starts, PrizeVector{0, 7.2, 0, 0, 15});
  Rng rng = make_rng(0);
  const std::vector<NodeId> a{1};
  EXPECT_EQ(step(st, a, rng).rewards[0], 7.2);
}

TEST(EngineTest, BudgetExhaustionDeactivates) {
  auto k5 = complete_game(5, 1.0);
  const std::vector<NodeId> starts{0};
  GameState st = initial_state(k5, starts, PrizeVector{0, 3, 0, 0, 15});
  Rng rng = make_rng(0);
  const std::vector<NodeId> a{1};
  const StepOutcome out = step(st, a, rng);
  EXPECT_EQ(out.new_state.agents[0].budget, 0.0);
  EXPECT_FALSE(out.new_state.agents[0].active);
  EXPECT_EQ(out.rewards[0], 3.0);
}

TEST(EngineTest, RejectsInfeasibleActions) {
  auto ce = counterexample_game(0.5);
  const std::vector<NodeId> starts{0};
  GameState st = initial_state(ce, starts, make_counterexample(0.5).prizes);
  Rng rng = make_rng(0);
  const std::vector<NodeId> not_adjacent{4};
  EXPECT_THROW(step(st, not_adjacent, rng), InfeasibleAction);
  auto k5 = complete_game(5, 0.5);
  st = initial_state(k5, starts, PrizeVector(5, 1.0));
  // Budget 0.5 cannot pay for a unit edge, so the agent starts stranded.
  EXPECT_FALSE(st.agents[0].active);
}

TEST(EngineTest, OverBudgetRejected) {
  auto g = std::make_shared<const Graph>(Graph(3, {{0, 1, 1}, {1, 2, 3}, {0, 2, 1}}, {2}));
  GameConfig cfg;
  cfg.l_max = 2.0;
  auto game = std::make_shared<const Game>(g, PrizeModel::uniform(*g, 0, 10, 15), cfg);
  const std::vector<NodeId> starts{1};
  GameState st = initial_state(game, starts, PrizeVector{1, 0, 15});
  Rng rng = make_rng(0);
  const std::vector<NodeId> too_far{2};
  EXPECT_THROW(step(st, too_far, rng), InfeasibleAction);
}

TEST(EngineTest, TerminalPaysEveryArrival) {
  auto ce = counterexample_game(0.5);
  auto senior_only = counterexample_game(0.5, TerminalConflict::kSeniorOnly);
  const std::vector<NodeId> starts{2, 3};
  Rng rng = make_rng(0);
  const std::vector<NodeId> both_to_d{4, 4};
  const StepOutcome all = step(initial_state(ce, starts, make_counterexample(0.5).prizes), both_to_d, rng);
  EXPECT_EQ(all.rewards, (std::vector<double>{100, 100}));
  EXPECT_FALSE(all.new_state.agents[0].active);
  EXPECT_FALSE(all.new_state.agents[1].active);
  const StepOutcome senior = step(initial_state(senior_only, starts, make_counterexample(0.5).prizes), both_to_d, rng);
  EXPECT_EQ(senior.rewards, (std::vector<double>{100, 0}));
}

TEST(EngineTest, ImmediateTermination) {
  auto ce = counterexample_game(0.5);
  RouteController a({4});
  RouteController b({4});
  std::vector<Controller*> cs{&a, &b};
  const EpisodeLog log = rollout(ce, cs, {std::vector<NodeId>{2, 3}, make_counterexample(0.5).prizes, 0}, 1);
  EXPECT_EQ(log.steps.size(), 1u);
  EXPECT_EQ(log.returns, (std::vector<double>{100, 100}));
  EXPECT_FALSE(log.truncated);
}

TEST(EngineTest, CounterexampleProfile) {
  auto ce = counterexample_game(0.5);
  RouteController senior({1, 2, 4});
  RouteController junior({2, 4});
  std::vector<Controller*> cs{&senior, &junior};
  const EpisodeLog log = rollout(ce, cs, {std::vector<NodeId>{0, 0}, make_counterexample(0.5).prizes, 0}, 1);
  EXPECT_EQ(log.prize_returns, (std::vector<double>{1.0, 2.5}));
  EXPECT_EQ(log.returns, (std::vector<double>{101.0, 102.5}));
  // gamma = 1: discounted equals undiscounted.
  EXPECT_EQ(log.discounted_returns, log.returns);
}

TEST(EngineTest, Discounting) {
  auto g = std::make_shared<const Graph>(make_complete(4, constant_weight(1.0)));
  GameConfig cfg;
  cfg.l_max = 3;
  cfg.gamma = 0.5;
  auto game = std::make_shared<const Game>(g, PrizeModel::uniform(*g, 0, 10, 15), cfg);
  RouteController c({1, 2, 3});
  std::vector<Controller*> cs{&c};
  const EpisodeLog log = rollout(game, cs, {std::vector<NodeId>{0}, PrizeVector{0, 4, 8, 0}, 0}, 0);
  EXPECT_EQ(log.returns[0], 4 + 8 + 15);
  EXPECT_EQ(log.discounted_returns[0], 4 + 0.5 * 8 + 0.25 * 15);
}

TEST(EngineTest, StepCapTruncates) {
  auto g = std::make_shared<const Graph>(make_complete(4, constant_weight(1.0)));
  GameConfig cfg;
  cfg.l_max = 10;
  cfg.step_cap = 2;
  auto game = std::make_shared<const Game>(g, PrizeModel::uniform(*g, 0, 10, 15), cfg);
  RouteController c({1, 2, 1, 2});
  std::vector<Controller*> cs{&c};
  const EpisodeLog log = rollout(game, cs, {std::vector<NodeId>{0}, std::nullopt, 0}, 0);
  EXPECT_TRUE(log.truncated);
  EXPECT_EQ(log.steps.size(), 2u);
  EXPECT_EQ(complete_game(5, 3.0)->step_cap(), 12);
}

TEST(EngineTest, StartPrizeIsZeroed) {
  auto k5 = complete_game(5, 4.0);
  const std::vector<NodeId> starts{1};
  const GameState st = initial_state(k5, starts, PrizeVector{3, 3, 3, 3, 3});
  EXPECT_EQ(st.prizes, (PrizeVector{3, 0, 3, 3, 15}));
}

TEST(EngineTest, DynamicRepopulatesCollectedNode) {
  auto k5 = complete_game(5, 4.0, PrizeMode::kDynamic);
  const std::vector<NodeId> starts{0};
  GameState st = initial_state(k5, starts, PrizeVector{0, 5, 0, 0, 15});
  Rng rng = make_rng(11);
  const std::vector<NodeId> a{1};
  const StepOutcome out = step(st, a, rng);
  EXPECT_EQ(out.rewards[0], 5.0);
  // Collected then redrawn while the collector stands on it.
  EXPECT_GT(out.new_state.prizes[1], 0.0);
  EXPECT_EQ(out.new_state.prizes[2], 0.0);
}

TEST(EngineTest, EpisodeLogRoundTrip) {
  auto k6 = complete_game(6, 4.0, PrizeMode::kDynamic);
  UniformController u1, u2, u3;
  std::vector<Controller*> cs{&u1, &u2, &u3};
  const EpisodeLog log = rollout(k6, cs, {std::nullopt, std::nullopt, 3}, 99);
  std::stringstream buf;
  write_episode_log(buf, log);
  EXPECT_EQ(read_episode_log(buf), log);
  // Replay determinism.
  EXPECT_EQ(rollout(k6, cs, {std::nullopt, std::nullopt, 3}, 99), log);
}

TEST(EngineTest, ConfigValidation) {
  GameConfig cfg;
  cfg.l_max = 0;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
  cfg.l_max = 1;
  cfg.gamma = 0;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
  EXPECT_EQ(terminal_conflict_from_string("senior_only"), TerminalConflict::kSeniorOnly);
  EXPECT_THROW(terminal_conflict_from_string("x"), InvalidArgument);
}

}  // namespace
}  // namespace spcg
