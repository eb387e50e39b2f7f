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
#include <set>

namespace spcg {

std::vector<AgentId> SeparatingGraph::neighbors(AgentId agent) const {
  std::vector<AgentId> out;
  for (const auto& [a, b] : edges) {
    if (a == agent) out.push_back(b);
    if (b == agent) out.push_back(a);
  }
  std::sort(out.begin(), out.end());
  return out;
}

SeparatingGraph build_separating_graph(std::span<const std::vector<NodeId>> reachable,
                                       const std::vector<bool>& active) {
  SeparatingGraph sep;
  std::vector<std::vector<NodeId>> sorted;
  for (std::size_t k = 0; k < reachable.size(); ++k) {
    sorted.push_back(reachable[k]);
    std::sort(sorted.back().begin(), sorted.back().end());
    if (active[k]) sep.agents.push_back(static_cast<AgentId>(k + 1));
  }
  for (std::size_t x = 0; x < sep.agents.size(); ++x) {
    for (std::size_t y = x + 1; y < sep.agents.size(); ++y) {
      const auto& si = sorted[static_cast<std::size_t>(sep.agents[x] - 1)];
      const auto& sj = sorted[static_cast<std::size_t>(sep.agents[y] - 1)];
      // Linear merge test for a common element.
      auto i = si.begin();
      auto j = sj.begin();
      bool shared = false;
      while (i != si.end() && j != sj.end()) {
        if (*i == *j) {
          shared = true;
          break;
        }
        if (*i < *j) {
          ++i;
        } else {
          ++j;
        }
      }
      if (shared) sep.edges.push_back({sep.agents[x], sep.agents[y]});
    }
  }
  return sep;
}

SeparatingGraph build_separating_graph(const GameState& state) {
  std::vector<std::vector<NodeId>> reachable;
  std::vector<bool> active;
  for (const AgentState& a : state.agents) {
    reachable.push_back(reachable_set(state, a.id));
    active.push_back(a.active);
  }
  return build_separating_graph(reachable, active);
}

Components ors(const SeparatingGraph& sep) {
  std::set<AgentId> visited;
  Components out;
  for (AgentId i : sep.agents) {
    if (visited.contains(i)) continue;
    std::vector<AgentId> stack{i};
    std::vector<AgentId> component;
    while (!stack.empty()) {
      const AgentId top = stack.back();
      stack.pop_back();
      if (visited.contains(top)) continue;
      visited.insert(top);
      component.push_back(top);
      for (AgentId j : sep.neighbors(top)) {
        if (!visited.contains(j)) stack.push_back(j);
      }
    }
    std::sort(component.begin(), component.end());
    out.parts.push_back(std::move(component));
  }
  std::sort(out.parts.begin(), out.parts.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return out;
}

std::map<AgentId, int> ordinal_ranks(const Components& components) {
  std::map<AgentId, int> ranks;
  for (const auto& part : components.parts) {
    for (AgentId i : part) {
      ranks[i] = 1 + static_cast<int>(std::count_if(part.begin(), part.end(), [i](AgentId j) { return j < i; }));
    }
  }
  return ranks;
}

std::vector<int> ordinal_ranks(const GameState& state) {
  std::vector<int> out(state.agents.size(), 0);
  for (const auto& [id, rank] : ordinal_ranks(ors(build_separating_graph(state)))) {
    out[static_cast<std::size_t>(id - 1)] = rank;
  }
  return out;
}

}  // namespace spcg
