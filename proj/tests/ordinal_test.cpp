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

#include "spcg/ordinal.hpp"

#include <algorithm>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"

namespace spcg {
namespace {

SeparatingGraph sep_of(std::vector<AgentId> agents, std::vector<std::pair<AgentId, AgentId>> edges) {
  return SeparatingGraph{std::move(agents), std::move(edges)};
}

TEST(OrdinalTest, CompleteGraphConnectsEveryone) {
  auto g = std::make_shared<const Graph>(make_complete(6, constant_weight(1.0)));
  GameConfig cfg;
  cfg.l_max = 5;
  auto game = std::make_shared<const Game>(g, PrizeModel::uniform(*g, 0, 10, 15), cfg);
  const std::vector<NodeId> starts{0, 1, 2, 3};
  const GameState st = initial_state(game, starts, PrizeVector(6, 1.0));
  const SeparatingGraph sep = build_separating_graph(st);
  EXPECT_EQ(sep.edges.size(), 6u);
  EXPECT_EQ(ordinal_ranks(st), (std::vector<int>{1, 2, 3, 4}));
}

TEST(OrdinalTest, PathGraphFarEnds) {
  // 0-1-2-3-4-5-6, terminal 6. Agents at 0 and 5 see {1} and {4,6}.
  std::vector<Edge> edges;
  for (NodeId u = 0; u < 6; ++u) edges.push_back({u, u + 1, 1.0});
  auto g = std::make_shared<const Graph>(Graph(7, edges, {6}));
  GameConfig cfg;
  cfg.l_max = 10;
  auto game = std::make_shared<const Game>(g, PrizeModel::uniform(*g, 0, 10, 15), cfg);
  const std::vector<NodeId> starts{0, 5};
  const GameState st = initial_state(game, starts, PrizeVector(7, 1.0));
  EXPECT_TRUE(build_separating_graph(st).edges.empty());
  EXPECT_EQ(ordinal_ranks(st), (std::vector<int>{1, 1}));
}

TEST(OrdinalTest, SharedNeighbour) {
  const std::vector<std::vector<NodeId>> reach{{1, 2}, {7}, {2, 5}};
  const std::vector<bool> active{true, true, true};
  const SeparatingGraph sep = build_separating_graph(reach, active);
  EXPECT_EQ(sep.edges, (std::vector<std::pair<AgentId, AgentId>>{{1, 3}}));
}

TEST(OrdinalTest, InactiveAgentsDropped) {
  const std::vector<std::vector<NodeId>> reach{{1, 2}, {2}, {2}};
  const std::vector<bool> active{true, false, true};
  const SeparatingGraph sep = build_separating_graph(reach, active);
  EXPECT_EQ(sep.agents, (std::vector<AgentId>{1, 3}));
  EXPECT_EQ(sep.edges, (std::vector<std::pair<AgentId, AgentId>>{{1, 3}}));
}

TEST(OrdinalTest, OrsExamples) {
  EXPECT_EQ(ors(sep_of({1, 2, 3}, {})).parts, (std::vector<std::vector<AgentId>>{{1}, {2}, {3}}));
  const Components c = ors(sep_of({1, 2, 3}, {{1, 3}}));
  EXPECT_EQ(c.parts, (std::vector<std::vector<AgentId>>{{1, 3}, {2}}));
  const auto ranks = ordinal_ranks(c);
  EXPECT_EQ(ranks.at(1), 1);
  EXPECT_EQ(ranks.at(3), 2);
  EXPECT_EQ(ranks.at(2), 1);

  std::vector<std::pair<AgentId, AgentId>> all;
  for (AgentId i = 1; i <= 5; ++i) {
    for (AgentId j = i + 1; j <= 5; ++j) all.push_back({i, j});
  }
  const Components k5 = ors(sep_of({1, 2, 3, 4, 5}, all));
  ASSERT_EQ(k5.parts.size(), 1u);
  for (const auto& [id, r] : ordinal_ranks(k5)) EXPECT_EQ(r, id);
}

TEST(OrdinalTest, MatchesUnionFindAndRankProperties) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = std::uniform_int_distribution<int>(1, 12)(rng);
    std::vector<AgentId> agents;
    for (AgentId i = 1; i <= n; ++i) {
      if (std::bernoulli_distribution(0.85)(rng)) agents.push_back(i);
    }
    std::vector<std::pair<AgentId, AgentId>> edges;
    const double p = std::uniform_real_distribution<double>(0.0, 0.5)(rng);
    for (std::size_t a = 0; a < agents.size(); ++a) {
      for (std::size_t b = a + 1; b < agents.size(); ++b) {
        if (std::bernoulli_distribution(p)(rng)) edges.push_back({agents[a], agents[b]});
      }
    }
    const Components c = ors(sep_of(agents, edges));
    EXPECT_EQ(c.parts, oracle::components(n, edges, agents));
    const auto ranks = ordinal_ranks(c);
    for (const auto& part : c.parts) {
      std::vector<int> rs;
      for (AgentId i : part) rs.push_back(ranks.at(i));
      std::sort(rs.begin(), rs.end());
      for (std::size_t k = 0; k < rs.size(); ++k) EXPECT_EQ(rs[k], static_cast<int>(k + 1));
    }
    // Removing an agent never raises anyone's rank.
    if (!agents.empty()) {
      const AgentId gone = agents[std::uniform_int_distribution<std::size_t>(0, agents.size() - 1)(rng)];
      std::vector<AgentId> fewer;
      for (AgentId a : agents) {
        if (a != gone) fewer.push_back(a);
      }
      std::vector<std::pair<AgentId, AgentId>> fewer_edges;
      for (auto e : edges) {
        if (e.first != gone && e.second != gone) fewer_edges.push_back(e);
      }
      const auto after = ordinal_ranks(ors(sep_of(fewer, fewer_edges)));
      for (const auto& [id, r] : after) EXPECT_LE(r, ranks.at(id));
    }
  }
}

}  // namespace
}  // namespace spcg
