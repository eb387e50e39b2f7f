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

#ifndef SPCG_ORDINAL_HPP_
#define SPCG_ORDINAL_HPP_

#include <map>
#include <span>
#include <utility>
#include <vector>

#include "spcg/common.hpp"
#include "spcg/engine.hpp"

namespace spcg {

// Agents are joined by an edge when their reachable sets intersect.
// Only active agents appear.
struct SeparatingGraph {
  std::vector<AgentId> agents;                        // ascending
  std::vector<std::pair<AgentId, AgentId>> edges;     // first < second, sorted

  std::vector<AgentId> neighbors(AgentId agent) const;
  bool operator==(const SeparatingGraph&) const = default;
};

// Connected components of a separating graph, each sorted ascending and
// the list sorted by smallest member.
struct Components {
  std::vector<std::vector<AgentId>> parts;
  bool operator==(const Components&) const = default;
};

SeparatingGraph build_separating_graph(const GameState& state);

// Same construction from explicit reachable sets; reachable[k] belongs to
// agent k+1 and inactive agents are skipped.
SeparatingGraph build_separating_graph(std::span<const std::vector<NodeId>> reachable,
                                       const std::vector<bool>& active);

// Ordinal rank search: depth-first flood of each unvisited agent's
// component using an explicit stack.
Components ors(const SeparatingGraph& sep);

// OR(i) = 1 + |{ j in component(i) : j < i }|.
std::map<AgentId, int> ordinal_ranks(const Components& components);

// Ordinal rank of every agent in the state, indexed by agent id - 1.
// Inactive agents get 0.
std::vector<int> ordinal_ranks(const GameState& state);

}  // namespace spcg

#endif  // SPCG_ORDINAL_HPP_
