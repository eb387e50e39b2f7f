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

#ifndef SPCG_TOPSOLVER_HPP_
#define SPCG_TOPSOLVER_HPP_

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "spcg/equilibrium.hpp"
#include "spcg/graph.hpp"
#include "spcg/prizes.hpp"

namespace spcg {

// Team orienteering instance. Prizes at start nodes are treated as 0, as in
// the game. Each agent that reaches a terminal earns terminal_prize.
struct TopInstance {
  std::shared_ptr<const Graph> graph;
  PrizeVector prizes;
  std::vector<NodeId> starts;
  double l_max = 0.0;
  double terminal_prize = 15.0;

  void validate() const;
};

struct TopSolution {
  std::vector<RouteStrategy> routes;
  double team_reward = 0.0;
  // Set only by solve_exact.
  bool optimal = false;
  // Valid upper bound on the optimum; equals team_reward once the search
  // completed.
  double upper_bound = 0.0;
  bool completed = false;
  std::uint64_t nodes_expanded = 0;
};

struct TopOptions {
  // Allow routes that revisit nodes (walks). Prizes still count once.
  // Solved as simple routes on the shortest-path closure, then expanded.
  bool allow_revisits = false;
  // Guard on the estimated number of joint route profiles; infinity skips
  // the estimate.
  double profile_budget = 1e8;
  // Root-level worker threads; 0 picks hardware_concurrency().
  int threads = 1;
};

// Team reward of a joint route: each node's prize once, plus the terminal
// prize per agent whose route ends on a terminal.
double team_reward(const TopInstance& instance, std::span<const RouteStrategy> routes);

// Product of per-agent route counts, each capped at `cap`.
double estimate_profiles(const TopInstance& instance, bool allow_revisits, double cap);

// Branch-and-bound over joint routes in rank order. Throws InvalidArgument
// if the profile estimate exceeds the guard or some agent cannot reach a
// terminal within L_max.
TopSolution solve_exact(const TopInstance& instance, const TopOptions& options = {});

// Same search, stopped at `time_limit`. The initial incumbent sends every
// agent along a cheapest path to a terminal.
TopSolution solve_bound(const TopInstance& instance, std::chrono::duration<double> time_limit,
                        const TopOptions& options = {});

// Record-per-line JSON: an "instance" record and a "solution" record.
void write_top(std::ostream& out, const TopInstance& instance, const TopSolution& solution);

}  // namespace spcg

#endif  // SPCG_TOPSOLVER_HPP_
