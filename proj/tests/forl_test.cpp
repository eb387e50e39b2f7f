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

#include "spcg/forl.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "mock_policy.hpp"
#include "spcg/ordinal.hpp"
#include "spcg/topsolver.hpp"

namespace spcg {
namespace {

std::shared_ptr<const Game> complete_game(int n, double l_max, PrizeModel (*model)(const Graph&) = nullptr) {
  auto g = std::make_shared<const Graph>(make_complete(n, constant_weight(1.0)));
  GameConfig cfg;
  cfg.l_max = l_max;
  return std::make_shared<const Game>(g, model ? model(*g) : PrizeModel::uniform(*g, 0, 10, 15), cfg);
}

Observation observe(const std::shared_ptr<const Game>& game, std::vector<NodeId> starts, PrizeVector prizes,
                    AgentId agent) {
  const GameState st = initial_state(game, starts, std::move(prizes));
  return make_observation(st, agent, ordinal_ranks(st));
}

TEST(ObservationTest, MaskAndFeasible) {
  auto g = std::make_shared<const Graph>(Graph(4, {{0, 1, 1}, {0, 2, 5}, {1, 3, 1}}, {3}));
  GameConfig cfg;
  cfg.l_max = 2;
  auto game = std::make_shared<const Game>(g, PrizeModel::uniform(*g, 0, 10, 15), cfg);
  const Observation o = observe(game, {0, 1}, PrizeVector{0, 4, 9, 15}, 1);
  EXPECT_EQ(o.mask, (std::vector<std::uint8_t>{0, 1, 1, 0}));
  EXPECT_EQ(o.feasible, (std::vector<NodeId>{1}));  // node 2 costs 5
  EXPECT_EQ(o.ordinal_rank, 1);
  EXPECT_EQ(o.global_rank, 1);
  EXPECT_EQ(o.agent_nodes, (std::vector<NodeId>{0, 1}));
  EXPECT_EQ(o.prizes[1], 0.0);  // occupied at the start
}

TEST(LinearPolicyTest, ZeroWeightsAreUniform) {
  auto game = complete_game(5, 3);
  const Observation o = observe(game, {0}, PrizeVector{0, 1, 2, 3, 15}, 1);
  LinearSoftmaxPolicy p(FeatureSpec{game}, {});
  const ActionDistribution d = p.distribution(o);
  ASSERT_EQ(d.nodes.size(), 4u);
  for (double q : d.probs) EXPECT_DOUBLE_EQ(q, 0.25);
  const std::vector<Observation> batch{o};
  EXPECT_NEAR(estimate_entropy(p, batch), std::log(4.0), 1e-12);
}

TEST(LinearPolicyTest, SingleActionHasZeroEntropy) {
  auto g = std::make_shared<const Graph>(Graph(3, {{0, 1, 1}, {1, 2, 1}}, {2}));
  GameConfig cfg;
  cfg.l_max = 4;
  auto game = std::make_shared<const Game>(g, PrizeModel::uniform(*g, 0, 10, 15), cfg);
  const Observation o = observe(game, {0}, PrizeVector{0, 5, 15}, 1);
  LinearSoftmaxPolicy p(FeatureSpec{game}, {});
  std::vector<double> w = p.parameters();
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = 0.1 * static_cast<double>(i % 7) - 0.3;
  p.load_parameters(w);
  const ActionDistribution d = p.distribution(o);
  ASSERT_EQ(d.nodes, (std::vector<NodeId>{1}));
  EXPECT_EQ(d.probs[0], 1.0);
  const std::vector<Observation> batch{o};
  EXPECT_EQ(estimate_entropy(p, batch), 0.0);
}

TEST(EntropyTest, Examples) {
  auto k21 = complete_game(21, 3);
  PrizeVector prizes(21, 1.0);
  prizes[20] = 15;
  const std::vector<Observation> wide{observe(k21, {0}, prizes, 1)};
  EXPECT_NEAR(estimate_entropy(UniformPolicy{}, wide), std::log(20.0), 1e-12);
  EXPECT_NEAR(std::log(20.0), 2.9957, 1e-4);

  ScriptedPolicy det(0.0, 0.0);
  EXPECT_EQ(estimate_entropy(det, wide), 0.0);
  EXPECT_THROW(estimate_entropy(det, std::span<const Observation>{}), InvalidArgument);

  const double two[] = {0.5, 0.5};
  EXPECT_DOUBLE_EQ(shannon_entropy(two), std::log(2.0));
}

TEST(LinearPolicyTest, PrizeRankFeatures) {
  auto game = complete_game(6, 5);
  const FeatureSpec spec{game};
  // From node 0 the offer is 1:7, 2:3, 3:7, 4:0, 5 terminal.
  const Observation o = observe(game, {0}, PrizeVector{0, 7, 3, 7, 0, 15}, 1);
  const int slots = spec.prize_rank_slots;
  auto slot_of = [&](NodeId v) {
    const auto f = candidate_features(spec, o, v);
    for (int s = 0; s <= slots; ++s) {
      if (f[static_cast<std::size_t>(1 + s)] == 1.0) return s;
    }
    return -1;
  };
  EXPECT_EQ(slot_of(1), 0);
  EXPECT_EQ(slot_of(3), 0);
  EXPECT_EQ(slot_of(2), 1);
  EXPECT_EQ(slot_of(4), -1);
  EXPECT_EQ(slot_of(5), -1);
  const auto term = candidate_features(spec, o, 5);
  EXPECT_EQ(term[0], 0.0);
  EXPECT_EQ(term.back(), 1.0);                                     // is terminal
  EXPECT_EQ(term[static_cast<std::size_t>(2 + slots)], 1.0 / 5);  // cost / L
  EXPECT_EQ(term[static_cast<std::size_t>(3 + slots)], 4.0 / 5);  // budget after / L
}

TEST(LinearPolicyTest, GlobalStateFeatures) {
  auto g = std::make_shared<const Graph>(Graph(4, {{0, 1, 1}, {1, 2, 1}, {2, 3, 1}}, {3}));
  GameConfig cfg;
  cfg.l_max = 6;
  auto game = std::make_shared<const Game>(g, PrizeModel::uniform(*g, 0, 10, 15), cfg);
  FeatureSpec spec{game, Conditioning::kGlobalState};
  // Agents at 0, 2, 2. Agent 3 looks at node 1: both others are adjacent,
  // and both are senior.
  const Observation o = observe(game, {0, 2, 2}, PrizeVector{0, 5, 0, 15}, 3);
  const auto f = candidate_features(spec, o, 1);
  EXPECT_EQ(f[f.size() - 2], 1.0);
  EXPECT_EQ(f[f.size() - 1], 1.0);
  const Observation o1 = observe(game, {0, 2, 2}, PrizeVector{0, 5, 0, 15}, 1);
  const auto f1 = candidate_features(spec, o1, 1);
  EXPECT_EQ(f1[f1.size() - 2], 1.0);  // agents 2 and 3 are at node 2
  EXPECT_EQ(f1[f1.size() - 1], 0.0);
}

TEST(LinearPolicyTest, UpdateRaisesProbabilityOfRewardedAction) {
  auto game = complete_game(5, 3);
  const Observation o = observe(game, {0}, PrizeVector{0, 1, 2, 3, 15}, 1);
  LinearSoftmaxPolicy p(FeatureSpec{game}, {0.1, 1.0, true});
  std::vector<Trajectory> batch;
  for (NodeId a : {1, 2, 3, 4}) batch.push_back({{o}, {a}, {a == 3 ? 10.0 : 0.0}});
  const auto before = p.distribution(o);
  p.update(batch);
  const auto after = p.distribution(o);
  EXPECT_GT(after.probs[2], before.probs[2]);
  EXPECT_GT(after.probs[2], 0.25);
  for (std::size_t i = 0; i < after.nodes.size(); ++i) EXPECT_EQ(after.nodes[i], before.nodes[i]);
}

TEST(LinearPolicyTest, ParametersRoundTrip) {
  auto game = complete_game(5, 3);
  LinearSoftmaxPolicy p(FeatureSpec{game, Conditioning::kGlobal}, {});
  std::vector<double> w = p.parameters();
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::sin(static_cast<double>(i)) / 3.0;
  p.load_parameters(w);
  std::stringstream ss;
  write_parameters(ss, p);
  LinearSoftmaxPolicy q(FeatureSpec{game, Conditioning::kGlobal}, {});
  read_parameters(ss, q);
  EXPECT_EQ(q.parameters(), w);

  LinearSoftmaxPolicy other(FeatureSpec{game, Conditioning::kOrdinal}, {});
  std::stringstream again;
  write_parameters(again, p);
  EXPECT_THROW(read_parameters(again, other), ParseError);
  EXPECT_THROW(p.load_parameters(std::vector<double>(3, 0.0)), InvalidArgument);
}

TEST(ScheduleTest, Validation) {
  EXPECT_NO_THROW((EntropySchedule{1.0, 0.1, 0.0, 2.0}.validate()));
  EXPECT_THROW((EntropySchedule{1.0, 0.0, 0.0, 2.0}.validate()), InvalidArgument);
  EXPECT_THROW((EntropySchedule{1.0, 0.1, 1.0, 2.0}.validate()), InvalidArgument);
  EXPECT_THROW((EntropySchedule{2.0, 0.1, 0.0, 2.0}.validate()), InvalidArgument);
  EXPECT_THROW((EntropySchedule{1.0, 0.1, -0.1, 2.0}.validate()), InvalidArgument);

  const EntropySchedule s = EntropySchedule::standard(20, 0.05);
  EXPECT_DOUBLE_EQ(s.h_max, std::log(20.0));
  EXPECT_DOUBLE_EQ(s.h0, 0.7 * std::log(20.0));
  // Exactly ten levels at or above h_stop.
  int levels = 0;
  for (double h = s.h0; h >= s.h_stop; h -= s.dh) ++levels;
  EXPECT_EQ(levels, 10);
}

TEST(ScheduleTest, EmpiricalMaximumIsBelowLogV) {
  auto game = complete_game(6, 3);
  const double h = empirical_max_entropy(game, 2, 50, 3);
  EXPECT_GT(h, 0.0);
  EXPECT_LE(h, std::log(5.0) + 1e-12);
}

// --- Control flow with the scripted learner -------------------------------

class Recorder : public ForlObserver {
 public:
  struct Event {
    std::string kind;
    long t;
    AgentId trainee;
    int round;
    double level;
    std::vector<std::vector<double>> params;
  };

  void on_update(const ForlProgress& p) override { record("update", p); }
  void on_freeze(const ForlProgress& p) override { record("freeze", p); }
  void on_bootstrap(const ForlProgress& p) override { record("bootstrap", p); }
  void on_round_end(const ForlProgress& p) override { record("round_end", p); }

  std::vector<Event> events;

 private:
  void record(const char* kind, const ForlProgress& p) {
    Event e{kind, p.t, p.trainee, p.round, p.freezing_point, {}};
    for (const auto& pol : p.policies) e.params.push_back(pol->parameters());
    events.push_back(std::move(e));
  }
};

ForlConfig scripted_config(int n, long t_max) {
  ForlConfig c;
  c.schedule = EntropySchedule{1.5, 0.25, 0.25, std::log(8.0)};
  c.t_max = t_max;
  c.batch_steps = 4;
  c.team_size = n;
  c.seed = 5;
  return c;
}

LearnerFactory scripted_factory() {
  return [](AgentId) { return std::make_unique<ScriptedPolicy>(2.0, 0.125); };
}

TEST(ForlTest, SequentialityBootstrapAndStaircase) {
  auto game = complete_game(8, 3);
  Recorder rec;
  const ForlResult r = forl_train(game, scripted_factory(), scripted_config(3, 10'000'000), &rec);
  EXPECT_EQ(r.stop, ForlStop::kEntropy);
  // Levels 1.5, 1.25, ..., 0.25 are each passed once.
  EXPECT_EQ(r.rounds, 6);
  EXPECT_EQ(r.freezing_point, 0.0);

  std::vector<std::vector<double>> snapshot;
  AgentId trainee = 1;
  bool bootstrapped = false;
  std::vector<double> levels;
  for (const auto& e : rec.events) {
    if (e.kind == "update") {
      EXPECT_EQ(e.trainee, trainee);
      if (!snapshot.empty()) {
        for (std::size_t k = 0; k < e.params.size(); ++k) {
          if (static_cast<AgentId>(k + 1) != trainee) EXPECT_EQ(e.params[k], snapshot[k]) << "agent " << k + 1;
        }
      }
    } else if (e.kind == "freeze") {
      trainee = e.trainee % 3 + 1;
      snapshot = e.params;
    } else if (e.kind == "bootstrap") {
      EXPECT_FALSE(bootstrapped);
      bootstrapped = true;
      for (const auto& p : e.params) EXPECT_EQ(p, e.params[0]);
      snapshot = e.params;
    } else if (e.kind == "round_end") {
      levels.push_back(e.level);
    }
    if (snapshot.empty()) snapshot = e.params;
  }
  EXPECT_TRUE(bootstrapped);
  ASSERT_EQ(levels.size(), 6u);
  double prev = 1.5;
  for (double l : levels) {
    EXPECT_EQ(l, prev - 0.25);
    prev = l;
  }
  // Within a round every update sees the same level.
  for (const auto& e : rec.events) {
    if (e.kind == "update") EXPECT_EQ(e.level, 1.5 - 0.25 * e.round);
  }
}

TEST(ForlTest, BootstrapCopiesFirstAgent) {
  auto game = complete_game(8, 3);
  Recorder rec;
  forl_train(game, scripted_factory(), scripted_config(4, 10'000'000), &rec);
  int boots = 0;
  for (std::size_t i = 0; i < rec.events.size(); ++i) {
    if (rec.events[i].kind != "bootstrap") continue;
    ++boots;
    ASSERT_GT(i, 0u);
    const auto& freeze = rec.events[i - 1];
    EXPECT_EQ(freeze.kind, "freeze");
    EXPECT_EQ(freeze.trainee, 1);
    EXPECT_EQ(freeze.round, 0);
    for (const auto& p : rec.events[i].params) EXPECT_EQ(p, freeze.params[0]);
  }
  EXPECT_EQ(boots, 1);
}

TEST(ForlTest, OneLevelWhenStopIsHalfAStepBelow) {
  auto game = complete_game(8, 3);
  ForlConfig c = scripted_config(3, 10'000'000);
  c.schedule.h_stop = c.schedule.h0 - c.schedule.dh / 2;
  Recorder rec;
  const ForlResult r = forl_train(game, scripted_factory(), c, &rec);
  EXPECT_EQ(r.rounds, 1);
  std::vector<AgentId> frozen;
  for (const auto& e : rec.events) {
    if (e.kind == "freeze") frozen.push_back(e.trainee);
  }
  EXPECT_EQ(frozen, (std::vector<AgentId>{1, 2, 3}));
}

TEST(ForlTest, SingleAgentIsAStaircase) {
  auto game = complete_game(8, 3);
  Recorder rec;
  const ForlResult r = forl_train(game, scripted_factory(), scripted_config(1, 10'000'000), &rec);
  EXPECT_EQ(r.stop, ForlStop::kEntropy);
  EXPECT_EQ(r.rounds, 6);
  EXPECT_EQ(r.policies.size(), 1u);
  // 2.0 down to 0.25 in steps of 0.125.
  EXPECT_EQ(r.policies[0]->parameters()[1], 14.0);
}

TEST(ForlTest, StepLimitLeavesEntropyWithinOneStep) {
  auto game = complete_game(8, 3);
  const long full = forl_train(game, scripted_factory(), scripted_config(3, 10'000'000)).t;
  for (long t_max = 20; t_max < full; t_max += 3) {
    const ForlResult r = forl_train(game, scripted_factory(), scripted_config(3, t_max));
    EXPECT_LE(r.t, t_max);
    // A cut-short final batch can still close the last round.
    if (r.stop == ForlStop::kEntropy || r.rounds == 0) continue;
    // The last level every agent passed is one step above the current one.
    const double passed = r.freezing_point + 0.25;
    for (const auto& p : r.policies) {
      const double h = dynamic_cast<const ScriptedPolicy&>(*p).current();
      EXPECT_GE(h, passed - 0.25) << "t_max " << t_max;
      EXPECT_LE(h, passed) << "t_max " << t_max;
    }
  }
}

TEST(ForlTest, NanEntropyAborts) {
  auto game = complete_game(8, 3);
  LearnerFactory nan_factory = [](AgentId) {
    return std::make_unique<ScriptedPolicy>(std::numeric_limits<double>::quiet_NaN(), 0.1);
  };
  EXPECT_THROW(forl_train(game, nan_factory, scripted_config(2, 1000)), std::runtime_error);
}

TEST(ForlTest, RejectsBadConfig) {
  auto game = complete_game(8, 3);
  ForlConfig c = scripted_config(2, 1000);
  c.team_size = 0;
  EXPECT_THROW(forl_train(game, scripted_factory(), c), InvalidArgument);
  c = scripted_config(2, 1000);
  c.schedule.h_max = 5.0;  // above ln 8
  c.schedule.h0 = 4.0;
  EXPECT_THROW(forl_train(game, scripted_factory(), c), InvalidArgument);
}

TEST(ForlTest, LogRoundTrip) {
  auto game = complete_game(8, 3);
  const ForlResult r = forl_train(game, scripted_factory(), scripted_config(2, 200));
  std::stringstream ss;
  write_training_log(ss, r.log);
  const std::string text = ss.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "t,trainee,entropy_1,entropy_2,mean_return_1,mean_return_2,freezing_point");
  const auto back = read_training_log(ss);
  ASSERT_EQ(back.size(), r.log.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].t, r.log[i].t);
    EXPECT_EQ(back[i].entropies, r.log[i].entropies);
    EXPECT_EQ(back[i].mean_returns, r.log[i].mean_returns);
  }
}

// --- Linear learner end to end -------------------------------------------

PrizeModel single_instance(const Graph& g) {
  return PrizeModel::fixed(g, std::vector<double>{0, 2, 8, 4, 6, 15}, 15);
}

TEST(ForlTest, SingleAgentLearnsBestFirstMove) {
  // One prize then the terminal: the optimal route is the best prize.
  auto game = complete_game(6, 2, single_instance);
  const std::vector<NodeId> starts{0};
  const TopInstance inst{game->graph_ptr(), {0, 2, 8, 4, 6, 15}, starts, 2, 15};
  const NodeId best = solve_exact(inst).routes[0].route.front();

  ForlConfig c;
  c.schedule = EntropySchedule::standard(6, 0.05);
  c.t_max = 400'000;
  c.batch_steps = 500;
  c.team_size = 1;
  c.starts = starts;
  c.seed = 11;
  const FeatureSpec spec{game};
  const ForlResult r = forl_train(game, [&](AgentId) { return linear_softmax_learner(spec); }, c);
  EXPECT_EQ(r.stop, ForlStop::kEntropy);
  const Observation o = observe(game, starts, {0, 2, 8, 4, 6, 15}, 1);
  EXPECT_EQ(r.policies[0]->greedy(o), best);
  EXPECT_EQ(best, 2);
}

TEST(ForlTest, TrainedPoliciesStayOnFeasibleMoves) {
  auto g = std::make_shared<const Graph>(make_grid_with_deadends(3, 3, 0.3, 2));
  GameConfig cfg;
  cfg.l_max = 6;
  auto game = std::make_shared<const Game>(g, PrizeModel::uniform(*g, 0, 10, 15), cfg);
  ForlConfig c;
  c.schedule = EntropySchedule::standard(g->node_count(), 0.5);
  c.t_max = 20'000;
  c.batch_steps = 500;
  c.team_size = 3;
  c.seed = 4;
  const FeatureSpec spec{game};
  const ForlResult r = forl_train(game, [&](AgentId) { return linear_softmax_learner(spec); }, c);
  Rng rng = make_rng(1);
  for (int e = 0; e < 30; ++e) {
    GameState st = initial_state(game, random_starts(*g, 3, rng), sample_initial(game->prize_model(), rng));
    while (st.any_active() && st.t < game->step_cap()) {
      const auto ranks = ordinal_ranks(st);
      std::vector<NodeId> acts(3, kNoNode);
      for (AgentId a = 1; a <= 3; ++a) {
        if (!st.agent(a).active) continue;
        const Observation o = make_observation(st, a, ranks);
        const ActionDistribution d = r.policies[static_cast<std::size_t>(a - 1)]->distribution(o);
        EXPECT_EQ(d.nodes, o.feasible);
        for (NodeId v : d.nodes) EXPECT_EQ(o.mask[static_cast<std::size_t>(v)], 1);
        acts[static_cast<std::size_t>(a - 1)] = r.policies[static_cast<std::size_t>(a - 1)]->sample(o, rng);
      }
      st = step(st, acts, rng).new_state;
    }
  }
}

TEST(BaselineTest, SharedKindsUseOnePolicy) {
  auto game = complete_game(6, 3);
  BaselineConfig c;
  c.t_max = 3000;
  c.batch_steps = 500;
  c.team_size = 3;
  for (BaselineKind kind : {BaselineKind::kIplGs, BaselineKind::kPsOr, BaselineKind::kPsGs, BaselineKind::kPsGr}) {
    const FeatureSpec spec{game, conditioning_of(kind)};
    const BaselineResult r = train_baseline(game, kind, [&](AgentId) { return linear_softmax_learner(spec); }, c);
    ASSERT_EQ(r.policies.size(), 3u);
    if (is_shared(kind)) {
      EXPECT_EQ(r.policies[0], r.policies[2]);
    } else {
      EXPECT_NE(r.policies[0], r.policies[1]);
    }
    EXPECT_EQ(r.log.size(), 6u);
    EXPECT_EQ(baseline_from_string(to_string(kind)), kind);
  }
  EXPECT_THROW(baseline_from_string("ps-xx"), InvalidArgument);
}

TEST(PolicyControllerTest, GreedyRolloutIsDeterministic) {
  auto game = complete_game(6, 3);
  auto pol = std::shared_ptr<const Policy>(linear_softmax_learner(FeatureSpec{game}));
  PolicyController a(pol, true), b(pol, true);
  std::vector<Controller*> cs{&a, &b};
  const EpisodeLog l1 = rollout(game, cs, {std::vector<NodeId>{0, 1}, std::nullopt, 0}, 3);
  const EpisodeLog l2 = rollout(game, cs, {std::vector<NodeId>{0, 1}, std::nullopt, 0}, 3);
  EXPECT_EQ(l1, l2);
  // Zero weights pick the lowest feasible id.
  EXPECT_EQ(l1.trajectories[0][1], 1);
}

}  // namespace
}  // namespace spcg
