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

#ifndef SPCG_FORL_HPP_
#define SPCG_FORL_HPP_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spcg/common.hpp"
#include "spcg/engine.hpp"

namespace spcg {

// What an agent sees when choosing its next node.
struct Observation {
  AgentId agent = 0;
  NodeId own_node = kNoNode;
  double own_budget = 0.0;
  PrizeVector prizes;
  int ordinal_rank = 0;
  int global_rank = 0;
  int team_size = 0;
  // mask[u] == 1 iff u is adjacent to own_node.
  std::vector<std::uint8_t> mask;
  // Adjacent and affordable; the support of every policy.
  std::vector<NodeId> feasible;
  // Global-state extras, indexed by agent id - 1.
  std::vector<NodeId> agent_nodes;
  std::vector<double> agent_budgets;
  std::vector<bool> agent_active;
};

Observation make_observation(const GameState& state, AgentId agent, std::span<const int> ordinal_ranks);

struct Trajectory {
  std::vector<Observation> obs;
  std::vector<NodeId> actions;
  std::vector<double> rewards;
};

struct ActionDistribution {
  std::vector<NodeId> nodes;
  std::vector<double> probs;
};

double shannon_entropy(std::span<const double> probs);

class Policy {
 public:
  virtual ~Policy() = default;

  // Distribution over obs.feasible; nodes outside it get probability 0.
  virtual ActionDistribution distribution(const Observation& obs) const = 0;
  virtual void update(std::span<const Trajectory> batch) = 0;
  virtual std::vector<double> parameters() const = 0;
  virtual void load_parameters(std::span<const double> params) = 0;
  virtual std::unique_ptr<Policy> clone() const = 0;
  // One-line description written ahead of serialized parameters.
  virtual std::string header() const = 0;

  // Mean entropy (nats) of distribution() over the batch.
  virtual double entropy(std::span<const Observation> batch) const;

  NodeId sample(const Observation& obs, Rng& rng) const;
  // Most probable node; lowest id on ties.
  NodeId greedy(const Observation& obs) const;
};

// Throws InvalidArgument on an empty batch.
double estimate_entropy(const Policy& policy, std::span<const Observation> batch);

// Uniform over feasible nodes. Holds no parameters.
class UniformPolicy : public Policy {
 public:
  ActionDistribution distribution(const Observation& obs) const override;
  void update(std::span<const Trajectory>) override {}
  std::vector<double> parameters() const override { return {}; }
  void load_parameters(std::span<const double> params) override;
  std::unique_ptr<Policy> clone() const override { return std::make_unique<UniformPolicy>(); }
  std::string header() const override { return "uniform"; }
};

// --- Linear softmax learner -----------------------------------------------

enum class Conditioning { kOrdinal, kGlobal, kGlobalState };

std::string_view to_string(Conditioning c);
Conditioning conditioning_from_string(std::string_view name);

struct FeatureSpec {
  std::shared_ptr<const Game> game;
  Conditioning conditioning = Conditioning::kOrdinal;
  // Ranks above the cap share the last weight block.
  int rank_cap = 8;
  // One-hot slots for the rank of a candidate's prize among the positive
  // prizes on offer, plus one slot for anything beyond.
  int prize_rank_slots = 8;
  double prize_scale = 10.0;

  int feature_count() const;
  int block_count() const { return rank_cap; }
};

// Per-candidate features:
//   prize / scale (0 at terminals), one-hot prize rank, cost / L,
//   budget after the move / L, can-still-reach-a-terminal flag,
//   is-terminal flag; with kGlobalState also the fraction of other agents
//   and of senior agents adjacent to the candidate.
std::vector<double> candidate_features(const FeatureSpec& spec, const Observation& obs, NodeId v);

struct LearnerConfig {
  double learning_rate = 0.05;
  double gamma = 0.99;
  bool normalize_advantages = true;
};

// Score = w[block] . features; masked softmax; REINFORCE with a mean-return
// baseline, optimized with Adam.
class LinearSoftmaxPolicy : public Policy {
 public:
  LinearSoftmaxPolicy(FeatureSpec spec, LearnerConfig config);

  ActionDistribution distribution(const Observation& obs) const override;
  void update(std::span<const Trajectory> batch) override;
  std::vector<double> parameters() const override { return weights_; }
  void load_parameters(std::span<const double> params) override;
  std::unique_ptr<Policy> clone() const override;
  std::string header() const override;

  const FeatureSpec& spec() const { return spec_; }
  int block_of(const Observation& obs) const;

 private:
  FeatureSpec spec_;
  LearnerConfig config_;
  std::vector<double> weights_;
  std::vector<double> adam_m_;
  std::vector<double> adam_v_;
  long adam_t_ = 0;
};

std::unique_ptr<Policy> linear_softmax_learner(FeatureSpec spec, LearnerConfig config = {});

// Parameters as a header line followed by one line of decimal values.
void write_parameters(std::ostream& out, const Policy& policy);
void read_parameters(std::istream& in, Policy& policy);

// --- Entropy schedule -----------------------------------------------------

struct EntropySchedule {
  double h0 = 0.0;
  double dh = 0.0;
  double h_stop = 0.0;
  double h_max = 0.0;

  // Requires dh > 0 and 0 <= h_stop < h0 < h_max.
  void validate() const;

  // h_max = ln|V|, h0 = 0.7 h_max unless given, and dh such that exactly
  // `rounds` freezing levels lie at or above h_stop.
  static EntropySchedule standard(int node_count, double h_stop, std::optional<double> h0 = std::nullopt,
                                  int rounds = 10);
};

// Mean entropy of the uniform feasible policy over `episodes` random
// episodes; an alternative starting freezing point.
double empirical_max_entropy(const std::shared_ptr<const Game>& game, int team_size, int episodes,
                             std::uint64_t seed);

// --- Training -------------------------------------------------------------

using LearnerFactory = std::function<std::unique_ptr<Policy>(AgentId)>;

struct ForlConfig {
  EntropySchedule schedule;
  long t_max = 1'000'000;
  // Environment steps per learner update, rounded up to an episode end.
  long batch_steps = 2500;
  int team_size = 2;
  std::optional<std::vector<NodeId>> starts;
  std::uint64_t seed = 0;
};

struct TrainingLogRow {
  long t = 0;
  AgentId trainee = 0;
  std::vector<double> entropies;
  std::vector<double> mean_returns;
  double freezing_point = 0.0;
};

void write_training_log(std::ostream& out, std::span<const TrainingLogRow> rows);
std::vector<TrainingLogRow> read_training_log(std::istream& in);

struct ForlProgress {
  long t = 0;
  AgentId trainee = 0;
  int round = 0;
  double freezing_point = 0.0;
  bool bootstrapped = false;
  std::span<const std::unique_ptr<Policy>> policies;
  std::span<const double> entropies;
};

// Hooks for instrumentation; all are called from the training thread.
class ForlObserver {
 public:
  virtual ~ForlObserver() = default;
  // After every learner update and entropy estimate.
  virtual void on_update(const ForlProgress&) {}
  // The trainee reached the freezing point; `trainee` is the agent that froze.
  virtual void on_freeze(const ForlProgress&) {}
  virtual void on_bootstrap(const ForlProgress&) {}
  // All agents froze; `freezing_point` is the lowered level.
  virtual void on_round_end(const ForlProgress&) {}
};

enum class ForlStop { kEntropy, kStepLimit };

struct ForlResult {
  std::vector<std::unique_ptr<Policy>> policies;
  std::vector<TrainingLogRow> log;
  long t = 0;
  int rounds = 0;
  AgentId trainee = 1;
  double freezing_point = 0.0;
  bool bootstrapped = false;
  ForlStop stop = ForlStop::kStepLimit;
};

ForlResult forl_train(const std::shared_ptr<const Game>& game, const LearnerFactory& factory,
                      const ForlConfig& config, ForlObserver* observer = nullptr);

// --- Baselines ------------------------------------------------------------

enum class BaselineKind { kIplGs, kPsOr, kPsGs, kPsGr };

std::string_view to_string(BaselineKind kind);
BaselineKind baseline_from_string(std::string_view name);
Conditioning conditioning_of(BaselineKind kind);
bool is_shared(BaselineKind kind);

struct BaselineConfig {
  long t_max = 200'000;
  long batch_steps = 2500;
  int team_size = 2;
  std::optional<std::vector<NodeId>> starts;
  std::uint64_t seed = 0;
};

struct BaselineResult {
  // One entry per agent; shared policies are the same object repeated.
  std::vector<std::shared_ptr<Policy>> policies;
  std::vector<TrainingLogRow> log;
};

// All agents learn simultaneously. Shared kinds update one learner on every
// agent's trajectories; kIplGs gives each agent its own learner.
BaselineResult train_baseline(const std::shared_ptr<const Game>& game, BaselineKind kind,
                              const LearnerFactory& factory, const BaselineConfig& config);

// --- Evaluation -----------------------------------------------------------

// Acts through a policy, either by argmax or by sampling.
class PolicyController : public Controller {
 public:
  PolicyController(std::shared_ptr<const Policy> policy, bool greedy) : policy_(std::move(policy)), greedy_(greedy) {}
  void reset(const GameState& initial) override;
  NodeId act(const GameState& state, AgentId agent, Rng& rng) override;

 private:
  std::shared_ptr<const Policy> policy_;
  bool greedy_;
  int cached_t_ = -1;
  std::vector<int> ranks_;
};

}  // namespace spcg

#endif  // SPCG_FORL_HPP_
