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

#ifndef SPCG_SRC_SCENARIO_INTERNAL_HPP_
#define SPCG_SRC_SCENARIO_INTERNAL_HPP_

#include <memory>
#include <optional>
#include <vector>

#include "spcg/cli.hpp"
#include "spcg/engine.hpp"
#include "spcg/graph.hpp"
#include "spcg/prizes.hpp"

namespace spcg::cli {

// Builders over a resolved scenario. `alpha` overrides graph.alpha for the
// counterexample.
std::shared_ptr<const Graph> build_graph(const json& resolved, std::optional<double> alpha = std::nullopt);
PrizeModel build_prizes(const json& resolved, const Graph& graph, std::optional<double> alpha = std::nullopt);
GameConfig build_config(const json& resolved);
std::shared_ptr<const Game> build_game(const json& resolved, std::optional<double> alpha = std::nullopt);

std::optional<std::vector<NodeId>> scenario_starts(const json& resolved);
// Counterexample alphas to run; empty for every other graph.
std::vector<double> scenario_alphas(const json& resolved);

}  // namespace spcg::cli

#endif  // SPCG_SRC_SCENARIO_INTERNAL_HPP_
