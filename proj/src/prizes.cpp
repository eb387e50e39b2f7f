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

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace spcg {
namespace {

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

void validate(const PrizeDistribution& dist, NodeId u) {
  std::visit(Overloaded{
                 [u](const UniformPrize& d) {
                   if (!(d.lo >= 0.0 && d.lo <= d.hi && std::isfinite(d.hi))) {
                     throw InvalidArgument(fmt::format("node {}: Uniform({}, {}) must satisfy 0 <= lo <= hi", u, d.lo, d.hi));
                   }
                 },
                 [u](const NormalPrize& d) {
                   if (!(std::isfinite(d.mean) && d.sd >= 0.0 && std::isfinite(d.sd))) {
                     throw InvalidArgument(fmt::format("node {}: Normal({}, {}) needs finite mean and sd >= 0", u, d.mean, d.sd));
                   }
                 },
                 [u](const FixedPrize& d) {
                   if (!(d.value >= 0.0 && std::isfinite(d.value))) {
                     throw InvalidArgument(fmt::format("node {}: Fixed({}) must be finite and >= 0", u, d.value));
                   }
                 },
             },
             dist);
}

}  // namespace

std::string_view to_string(PrizeMode mode) {
  return mode == PrizeMode::kDynamic ? "dynamic" : "stationary";
}

PrizeMode prize_mode_from_string(std::string_view name) {
  if (name == "stationary") return PrizeMode::kStationary;
  if (name == "dynamic") return PrizeMode::kDynamic;
  throw InvalidArgument(fmt::format("unknown prize mode '{}'", name));
}

double sample_prize(const PrizeDistribution& dist, Rng& rng) {
  return std::visit(Overloaded{
                        [&rng](const UniformPrize& d) {
                          return std::uniform_real_distribution<double>(d.lo, d.hi)(rng);
                        },
                        [&rng](const NormalPrize& d) {
                          if (d.sd == 0.0) return std::max(0.0, d.mean);
                          return std::max(0.0, std::normal_distribution<double>(d.mean, d.sd)(rng));
                        },
                        [](const FixedPrize& d) { return d.value; },
                    },
                    dist);
}

double upper_support(const PrizeDistribution& dist) {
  return std::visit(Overloaded{
                        [](const UniformPrize& d) { return d.hi; },
                        [](const NormalPrize& d) { return d.mean + 3.0 * d.sd; },
                        [](const FixedPrize& d) { return d.value; },
                    },
                    dist);
}

PrizeModel::PrizeModel(std::vector<PrizeDistribution> per_node, std::vector<NodeId> terminals,
                       double terminal_value, PrizeMode mode, bool repopulate_on_departure)
    : per_node_(std::move(per_node)),
      is_terminal_(per_node_.size(), false),
      terminal_value_(terminal_value),
      mode_(mode),
      repopulate_on_departure_(repopulate_on_departure) {
  if (terminals.empty()) throw InvalidArgument("prize model needs at least one terminal");
  for (NodeId t : terminals) {
    if (t < 0 || static_cast<std::size_t>(t) >= per_node_.size()) {
      throw InvalidArgument(fmt::format("terminal {} outside the prize vector", t));
    }
    is_terminal_[static_cast<std::size_t>(t)] = true;
  }
  if (!(std::isfinite(terminal_value_) && terminal_value_ >= 0.0)) {
    throw InvalidArgument("terminal prize must be finite and >= 0");
  }
  for (std::size_t u = 0; u < per_node_.size(); ++u) {
    if (is_terminal_[u]) continue;
    validate(per_node_[u], static_cast<NodeId>(u));
    if (!(terminal_value_ > upper_support(per_node_[u]))) {
      throw InvalidArgument(fmt::format(
          "terminal prize {} must exceed the upper support {} of node {}", terminal_value_,
          upper_support(per_node_[u]), u));
    }
  }
}

PrizeModel PrizeModel::uniform(const Graph& graph, double lo, double hi, double terminal_value, PrizeMode mode) {
  std::vector<PrizeDistribution> per_node(static_cast<std::size_t>(graph.node_count()), UniformPrize{lo, hi});
  return PrizeModel(std::move(per_node), {graph.terminals().begin(), graph.terminals().end()}, terminal_value, mode);
}

PrizeModel PrizeModel::fixed(const Graph& graph, std::span<const double> values, double terminal_value,
                             PrizeMode mode) {
  if (values.size() != static_cast<std::size_t>(graph.node_count())) {
    throw InvalidArgument(fmt::format("expected {} fixed prizes, got {}", graph.node_count(), values.size()));
  }
  std::vector<PrizeDistribution> per_node;
  per_node.reserve(values.size());
  for (std::size_t u = 0; u < values.size(); ++u) {
    per_node.push_back(FixedPrize{graph.is_terminal(static_cast<NodeId>(u)) ? 0.0 : values[u]});
  }
  return PrizeModel(std::move(per_node), {graph.terminals().begin(), graph.terminals().end()}, terminal_value, mode);
}

PrizeModel PrizeModel::from_prize_lines(const Graph& graph, std::span<const PrizeLine> lines,
                                        double terminal_value, PrizeMode mode) {
  std::vector<PrizeDistribution> per_node(static_cast<std::size_t>(graph.node_count()), FixedPrize{0.0});
  for (const PrizeLine& line : lines) {
    if (line.node < 0 || line.node >= graph.node_count()) {
      throw InvalidArgument(fmt::format("prize line for unknown node {}", line.node));
    }
    auto& slot = per_node[static_cast<std::size_t>(line.node)];
    if (line.sd) {
      slot = NormalPrize{line.mean, *line.sd};
    } else {
      slot = FixedPrize{line.mean};
    }
  }
  return PrizeModel(std::move(per_node), {graph.terminals().begin(), graph.terminals().end()}, terminal_value, mode);
}

PrizeVector sample_initial(const PrizeModel& model, Rng& rng) {
  PrizeVector prizes(model.node_count(), 0.0);
  for (std::size_t u = 0; u < prizes.size(); ++u) {
    const auto node = static_cast<NodeId>(u);
    prizes[u] = model.is_terminal(node) ? model.terminal_value() : sample_prize(model.distribution(node), rng);
  }
  return prizes;
}

PrizeVector sample_initial(const PrizeModel& model, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  return sample_initial(model, rng);
}

void repopulate(const PrizeModel& model, PrizeVector& prizes, std::span<const NodeId> occupied, Rng& rng) {
  if (model.mode() == PrizeMode::kStationary) return;
  std::vector<bool> is_occupied(prizes.size(), false);
  for (NodeId u : occupied) is_occupied.at(static_cast<std::size_t>(u)) = true;
  for (std::size_t u = 0; u < prizes.size(); ++u) {
    const auto node = static_cast<NodeId>(u);
    if (model.is_terminal(node) || prizes[u] != 0.0) continue;
    const bool redraw = model.repopulate_on_departure() ? !is_occupied[u] : is_occupied[u];
    if (redraw) prizes[u] = sample_prize(model.distribution(node), rng);
  }
}

PrizeModel make_zone_model(const Graph& graph, NodeId center, double sd, double terminal_value, PrizeMode mode,
                           double max_mean) {
  if (!graph.has_coordinates()) throw InvalidArgument("zone prize model requires node coordinates");
  if (center < 0 || center >= graph.node_count()) throw InvalidArgument(fmt::format("center {} is not a node", center));
  const auto& pts = graph.coordinates();
  const Point c = pts[static_cast<std::size_t>(center)];
  std::vector<double> dist(pts.size());
  double nearest = std::numeric_limits<double>::infinity();
  for (std::size_t u = 0; u < pts.size(); ++u) {
    dist[u] = std::hypot(pts[u].x - c.x, pts[u].y - c.y);
    if (dist[u] > 0.0) nearest = std::min(nearest, dist[u]);
  }
  if (!std::isfinite(nearest)) throw InvalidArgument("all nodes coincide with the center");
  std::vector<PrizeDistribution> per_node;
  per_node.reserve(pts.size());
  for (std::size_t u = 0; u < pts.size(); ++u) {
    const double mean = dist[u] > 0.0 ? std::min(max_mean, max_mean * nearest / dist[u]) : max_mean;
    per_node.push_back(NormalPrize{mean, sd});
  }
  return PrizeModel(std::move(per_node), {graph.terminals().begin(), graph.terminals().end()}, terminal_value, mode);
}

}  // namespace spcg
