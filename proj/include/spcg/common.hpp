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

#ifndef SPCG_COMMON_HPP_
#define SPCG_COMMON_HPP_

#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace spcg {

// Dense node index in 0..|V|-1.
using NodeId = int;

// Global rank of an agent, 1..n. Smaller ids are senior.
using AgentId = int;

using Rng = std::mt19937_64;

inline constexpr NodeId kNoNode = -1;

// Tolerance used when comparing an edge cost against a remaining budget.
// Budgets are running differences of edge weights, so an exact comparison
// would reject moves that cost exactly the remaining budget after rounding.
inline constexpr double kBudgetEps = 1e-9;

inline bool affordable(double budget, double cost) {
  return cost <= budget + kBudgetEps;
}

// Thrown when an input violates a documented invariant or precondition.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// SplitMix64 finalizer. Used to derive independent, reproducible seeds for
// sub-streams (per rollout, per payoff cell, per training seed).
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  return mix_seed(mix_seed(base) ^ mix_seed(stream + 0x632BE59BD9B4E019ULL));
}

inline Rng make_rng(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32)};
  return Rng(seq);
}

}  // namespace spcg

#endif  // SPCG_COMMON_HPP_
