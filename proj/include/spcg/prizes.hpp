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

#ifndef SPCG_PRIZES_HPP_
#define SPCG_PRIZES_HPP_

#include <cstdint>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "spcg/common.hpp"
#include "spcg/graph.hpp"

namespace spcg {

struct UniformPrize {
  double lo = 0.0;
  double hi = 10.0;
};

// Normal(mean, sd) truncated at 0.
struct NormalPrize {
  double mean = 0.0;
  double sd = 1.0;
};

struct FixedPrize {
  double value = 0.0;
};

using PrizeDistribution = std::variant<UniformPrize, NormalPrize, FixedPrize>;

enum class PrizeMode { kStationary, kDynamic };

std::string_view to_string(PrizeMode mode);
PrizeMode prize_mode_from_string(std::string_view name);

// Prize per node, indexed by NodeId. Never negative; terminals hold the
// terminal prize.
using PrizeVector = std::vector<double>;

double sample_prize(const PrizeDistribution& dist, Rng& rng);

// Largest value a distribution is expected to produce. Normal prizes have
// unbounded support, so mean + 3 sd is used.
double upper_support(const PrizeDistribution& dist);

class PrizeModel {
 public:
  // `per_node` has one entry per node; entries at terminals are ignored.
  PrizeModel(std::vector<PrizeDistribution> per_node, std::vector<NodeId> terminals,
             double terminal_value, PrizeMode mode, bool repopulate_on_departure = false);

  static PrizeModel uniform(const Graph& graph, double lo, double hi, double terminal_value,
                            PrizeMode mode = PrizeMode::kStationary);
  static PrizeModel fixed(const Graph& graph, std::span<const double> values, double terminal_value,
                          PrizeMode mode = PrizeMode::kStationary);
  // Nodes listed with an sd get Normal(mean, sd); without one, Fixed(mean).
  // Unlisted non-terminal nodes get Fixed(0).
  static PrizeModel from_prize_lines(const Graph& graph, std::span<const PrizeLine> lines,
                                     double terminal_value, PrizeMode mode = PrizeMode::kStationary);

  const PrizeDistribution& distribution(NodeId u) const { return per_node_.at(static_cast<std::size_t>(u)); }
  std::size_t node_count() const { return per_node_.size(); }
  bool is_terminal(NodeId u) const { return is_terminal_.at(static_cast<std::size_t>(u)); }
  double terminal_value() const { return terminal_value_; }
  PrizeMode mode() const { return mode_; }
  bool repopulate_on_departure() const { return repopulate_on_departure_; }

 private:
  std::vector<PrizeDistribution> per_node_;
  std::vector<bool> is_terminal_;
  double terminal_value_;
  PrizeMode mode_;
  bool repopulate_on_departure_;
};

// One independent draw per node; terminals set to the terminal value.
PrizeVector sample_initial(const PrizeModel& model, Rng& rng);
PrizeVector sample_initial(const PrizeModel& model, std::uint64_t seed);

// Applies the redraw rule to `prizes` in place. In Dynamic mode a node whose
// prize is 0 and that is occupied is redrawn. With repopulate_on_departure
// the condition is instead "prize is 0 and nobody occupies it". Stationary
// models leave the vector untouched. Terminal prizes never change.
void repopulate(const PrizeModel& model, PrizeVector& prizes, std::span<const NodeId> occupied, Rng& rng);

// Normal prizes whose mean falls off as 1/distance from `center`, scaled
// so that the nearest non-center node has mean `max_mean`; the center node
// is capped at `max_mean`. Requires node coordinates.
PrizeModel make_zone_model(const Graph& graph, NodeId center, double sd, double terminal_value = 15.0,
                           PrizeMode mode = PrizeMode::kStationary, double max_mean = 10.0);

}  // namespace spcg

#endif  // SPCG_PRIZES_HPP_
