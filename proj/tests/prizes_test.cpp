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

#include "spcg/prizes.hpp"

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

namespace spcg {
namespace {

Graph path5() {
  return Graph(5, {{0, 1, 1}, {1, 2, 1}, {2, 3, 1}, {3, 4, 1}}, {4});
}

TEST(PrizesTest, FixedModel) {
  const Graph g = path5();
  const std::vector<double> values(5, 3.0);
  const PrizeModel m = PrizeModel::fixed(g, values, 15.0);
  EXPECT_EQ(sample_initial(m, 1), (PrizeVector{3, 3, 3, 3, 15}));
}

TEST(PrizesTest, UniformRangeAndDeterminism) {
  const Graph g = make_complete(20, constant_weight(1.0));
  const PrizeModel m = PrizeModel::uniform(g, 0.0, 10.0, 15.0);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const PrizeVector p = sample_initial(m, seed);
    for (NodeId u = 0; u < 19; ++u) {
      EXPECT_GE(p[static_cast<std::size_t>(u)], 0.0);
      EXPECT_LE(p[static_cast<std::size_t>(u)], 10.0);
    }
    EXPECT_EQ(p[19], 15.0);
    EXPECT_EQ(p, sample_initial(m, seed));
  }
}

TEST(PrizesTest, NormalIsTruncatedAtZero) {
  Rng rng = make_rng(3);
  for (int i = 0; i < 2000; ++i) EXPECT_GE(sample_prize(NormalPrize{0.5, 4.0}, rng), 0.0);
}

TEST(PrizesTest, TerminalMustExceedSupport) {
  const Graph g = path5();
  EXPECT_THROW(PrizeModel::uniform(g, 0.0, 10.0, 10.0), InvalidArgument);
  EXPECT_THROW(PrizeModel::uniform(g, 5.0, 1.0, 15.0), InvalidArgument);
  const std::vector<PrizeLine> lines{{1, 10.0, 2.0}};
  EXPECT_THROW(PrizeModel::from_prize_lines(g, lines, 15.0), InvalidArgument);  // 10 + 3*2 = 16
}

TEST(PrizesTest, RepopulateDynamicOccupied) {
  const Graph g = path5();
  const PrizeModel m = PrizeModel::uniform(g, 0.0, 10.0, 15.0, PrizeMode::kDynamic);
  Rng rng = make_rng(5);
  PrizeVector p{0, 0, 4, 0, 15};
  const std::vector<NodeId> occupied{1, 4};
  repopulate(m, p, occupied, rng);
  EXPECT_EQ(p[0], 0.0);  // unoccupied stays 0
  EXPECT_GT(p[1], 0.0);  // occupied, redrawn
  EXPECT_EQ(p[2], 4.0);  // positive prizes untouched
  EXPECT_EQ(p[3], 0.0);
  EXPECT_EQ(p[4], 15.0);
}

TEST(PrizesTest, RepopulateStationaryIsNoOp) {
  const Graph g = path5();
  const PrizeModel m = PrizeModel::uniform(g, 0.0, 10.0, 15.0, PrizeMode::kStationary);
  Rng rng = make_rng(5);
  PrizeVector p{0, 0, 4, 0, 15};
  const PrizeVector before = p;
  const std::vector<NodeId> occupied{0, 1, 3};
  repopulate(m, p, occupied, rng);
  EXPECT_EQ(p, before);
}

TEST(PrizesTest, RepopulateOnDeparture) {
  const Graph g = path5();
  std::vector<PrizeDistribution> per_node(5, UniformPrize{1.0, 2.0});
  const PrizeModel m(per_node, {4}, 15.0, PrizeMode::kDynamic, true);
  Rng rng = make_rng(5);
  PrizeVector p{0, 0, 0, 0, 15};
  const std::vector<NodeId> occupied{1};
  repopulate(m, p, occupied, rng);
  EXPECT_GT(p[0], 0.0);
  EXPECT_EQ(p[1], 0.0);
  EXPECT_GT(p[2], 0.0);
}

TEST(PrizesTest, ZoneModel) {
  // 1 x 5 row of nodes at x = 0..4, center at node 0.
  const Graph g(5, {{0, 1, 1}, {1, 2, 1}, {2, 3, 1}, {3, 4, 1}}, {4}, GraphKind::kExplicit, std::nullopt,
                {{0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 0}});
  const PrizeModel m = make_zone_model(g, 0, 1.0);
  auto mean = [&](NodeId u) { return std::get<NormalPrize>(m.distribution(u)).mean; };
  EXPECT_EQ(mean(0), 10.0);
  EXPECT_EQ(mean(1), 10.0);
  EXPECT_DOUBLE_EQ(mean(2), 5.0);  // twice as far as node 1
  for (NodeId u = 0; u < 4; ++u) {
    EXPECT_GT(mean(u), 0.0);
    EXPECT_LE(mean(u), 10.0);
  }
  EXPECT_THROW(make_zone_model(path5(), 0, 1.0), InvalidArgument);
}

TEST(PrizesTest, ModeNames) {
  EXPECT_EQ(prize_mode_from_string(to_string(PrizeMode::kDynamic)), PrizeMode::kDynamic);
  EXPECT_THROW(prize_mode_from_string("sometimes"), InvalidArgument);
}

}  // namespace
}  // namespace spcg
