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

#include "spcg/forl.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "spcg/ordinal.hpp"

namespace spcg {

namespace {

constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

std::size_t idx(int i) { return static_cast<std::size_t>(i); }

std::vector<double> discounted_returns(std::span<const double> rewards, double gamma) {
  std::vector<double> g(rewards.size());
  double acc = 0.0;
  for (std::size_t i = rewards.size(); i-- > 0;) {
    acc = rewards[i] + gamma * acc;
    g[i] = acc;
  }
  return g;
}

std::vector<double> softmax(std::vector<double> scores) {
  if (scores.empty()) return scores;
  const double hi = *std::max_element(scores.begin(), scores.end());
  double sum = 0.0;
  for (double& s : scores) {
    s = std::exp(s - hi);
    sum += s;
  }
  for (double& s : scores) s /= sum;
  return scores;
}

}  // namespace

// --- Observations and policies --------------------------------------------

Observation make_observation(const GameState& state, AgentId agent, std::span<const int> ordinal_ranks) {
  const AgentState& a = state.agent(agent);
  const Graph& g = state.game->graph();
  Observation obs;
  obs.agent = agent;
  obs.own_node = a.node;
  obs.own_budget = a.budget;
  obs.prizes = state.prizes;
  obs.ordinal_rank = ordinal_ranks.empty() ? 0 : ordinal_ranks[idx(agent - 1)];
  obs.global_rank = agent;
  obs.team_size = state.team_size();
  obs.mask = action_mask(state, agent);
  if (a.active) {
    for (NodeId v : g.neighbors(a.node)) {
      if (affordable(a.budget, g.weight(a.node, v))) obs.feasible.push_back(v);
    }
  }
  for (const AgentState& o : state.agents) {
    obs.agent_nodes.push_back(o.node);
    obs.agent_budgets.push_back(o.budget);
    obs.agent_active.push_back(o.active);
  }
  return obs;
}

double shannon_entropy(std::span<const double> probs) {
  double h = 0.0;
  for (double p : probs) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

double Policy::entropy(std::span<const Observation> batch) const {
  double sum = 0.0;
  for (const Observation& o : batch) sum += shannon_entropy(distribution(o).probs);
  return batch.empty() ? 0.0 : sum / static_cast<double>(batch.size());
}

NodeId Policy::sample(const Observation& obs, Rng& rng) const {
  const ActionDistribution d = distribution(obs);
  if (d.nodes.empty()) throw InfeasibleAction(fmt::format("agent {} has no feasible move", obs.agent));
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double acc = 0.0;
  for (std::size_t i = 0; i < d.nodes.size(); ++i) {
    acc += d.probs[i];
    if (u < acc) return d.nodes[i];
  }
  // Rounding left u above the final partial sum.
  for (std::size_t i = d.nodes.size(); i-- > 0;) {
    if (d.probs[i] > 0.0) return d.nodes[i];
  }
  return d.nodes.back();
}

NodeId Policy::greedy(const Observation& obs) const {
  const ActionDistribution d = distribution(obs);
  if (d.nodes.empty()) throw InfeasibleAction(fmt::format("agent {} has no feasible move", obs.agent));
  std::size_t best = 0;
  for (std::size_t i = 1; i < d.nodes.size(); ++i) {
    if (d.probs[i] > d.probs[best] || (d.probs[i] == d.probs[best] && d.nodes[i] < d.nodes[best])) best = i;
  }
  return d.nodes[best];
}

double estimate_entropy(const Policy& policy, std::span<const Observation> batch) {
  if (batch.empty()) throw InvalidArgument("entropy estimate needs a non-empty observation batch");
  return policy.entropy(batch);
}

ActionDistribution UniformPolicy::distribution(const Observation& obs) const {
  ActionDistribution d;
  d.nodes = obs.feasible;
  d.probs.assign(d.nodes.size(), d.nodes.empty() ? 0.0 : 1.0 / static_cast<double>(d.nodes.size()));
  return d;
}

void UniformPolicy::load_parameters(std::span<const double> params) {
  if (!params.empty()) throw InvalidArgument("uniform policy takes no parameters");
}

// --- Linear softmax learner -----------------------------------------------

std::string_view to_string(Conditioning c) {
  switch (c) {
    case Conditioning::kOrdinal:
      return "ordinal";
    case Conditioning::kGlobal:
      return "global";
    case Conditioning::kGlobalState:
      return "global_state";
  }
  return "?";
}

Conditioning conditioning_from_string(std::string_view name) {
  if (name == "ordinal") return Conditioning::kOrdinal;
  if (name == "global") return Conditioning::kGlobal;
  if (name == "global_state") return Conditioning::kGlobalState;
  throw InvalidArgument(fmt::format("unknown conditioning '{}'", name));
}

int FeatureSpec::feature_count() const {
  return 1 + (prize_rank_slots + 1) + 4 + (conditioning == Conditioning::kGlobalState ? 2 : 0);
}

std::vector<double> candidate_features(const FeatureSpec& spec, const Observation& obs, NodeId v) {
  const Game& game = *spec.game;
  const Graph& g = game.graph();
  const double l = game.config().l_max;
  std::vector<double> f(idx(spec.feature_count()), 0.0);
  const bool terminal = g.is_terminal(v);
  const double prize = obs.prizes[idx(v)];

  f[0] = terminal ? 0.0 : prize / spec.prize_scale;
  if (!terminal && prize > 0.0) {
    // Dense rank among the distinct positive prizes on offer.
    std::vector<double> better;
    for (NodeId u : obs.feasible) {
      const double p = obs.prizes[idx(u)];
      if (!g.is_terminal(u) && p > prize) better.push_back(p);
    }
    std::sort(better.begin(), better.end());
    const auto distinct = std::unique(better.begin(), better.end()) - better.begin();
    f[1 + idx(std::min<int>(static_cast<int>(distinct), spec.prize_rank_slots))] = 1.0;
  }
  std::size_t i = 2 + idx(spec.prize_rank_slots);
  const double w = g.weight(obs.own_node, v);
  const double after = obs.own_budget - w;
  f[i++] = w / l;
  f[i++] = after / l;
  f[i++] = affordable(after, game.paths().to_terminal(v)) ? 1.0 : 0.0;
  f[i++] = terminal ? 1.0 : 0.0;
  if (spec.conditioning == Conditioning::kGlobalState && obs.team_size > 1) {
    int near = 0;
    int senior = 0;
    for (std::size_t k = 0; k < obs.agent_nodes.size(); ++k) {
      const AgentId other = static_cast<AgentId>(k + 1);
      if (other == obs.agent || !obs.agent_active[k]) continue;
      if (g.has_edge(obs.agent_nodes[k], v)) {
        ++near;
        if (other < obs.agent) ++senior;
      }
    }
    const double others = static_cast<double>(obs.team_size - 1);
    f[i++] = near / others;
    f[i++] = senior / others;
  }
  return f;
}

LinearSoftmaxPolicy::LinearSoftmaxPolicy(FeatureSpec spec, LearnerConfig config)
    : spec_(std::move(spec)), config_(config) {
  if (!spec_.game) throw InvalidArgument("feature spec needs a game");
  if (spec_.rank_cap < 1 || spec_.prize_rank_slots < 1) {
    throw InvalidArgument("rank_cap and prize_rank_slots must be >= 1");
  }
  if (!(spec_.prize_scale > 0.0)) throw InvalidArgument("prize_scale must be > 0");
  if (!(config_.learning_rate > 0.0) || config_.gamma < 0.0 || config_.gamma > 1.0) {
    throw InvalidArgument("learning rate must be > 0 and gamma in [0, 1]");
  }
  const std::size_t size = idx(spec_.block_count() * spec_.feature_count());
  weights_.assign(size, 0.0);
  adam_m_.assign(size, 0.0);
  adam_v_.assign(size, 0.0);
}

int LinearSoftmaxPolicy::block_of(const Observation& obs) const {
  const int rank = spec_.conditioning == Conditioning::kOrdinal ? obs.ordinal_rank : obs.global_rank;
  return std::clamp(rank, 1, spec_.rank_cap) - 1;
}

ActionDistribution LinearSoftmaxPolicy::distribution(const Observation& obs) const {
  ActionDistribution d;
  d.nodes = obs.feasible;
  const std::size_t base = idx(block_of(obs) * spec_.feature_count());
  std::vector<double> scores;
  scores.reserve(d.nodes.size());
  for (NodeId v : d.nodes) {
    const std::vector<double> f = candidate_features(spec_, obs, v);
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += weights_[base + i] * f[i];
    scores.push_back(s);
  }
  d.probs = softmax(std::move(scores));
  return d;
}

void LinearSoftmaxPolicy::update(std::span<const Trajectory> batch) {
  struct Sample {
    const Observation* obs;
    NodeId action;
    double ret;
  };
  std::vector<Sample> samples;
  for (const Trajectory& tr : batch) {
    const std::vector<double> g = discounted_returns(tr.rewards, config_.gamma);
    for (std::size_t i = 0; i < tr.obs.size(); ++i) samples.push_back({&tr.obs[i], tr.actions[i], g[i]});
  }
  if (samples.empty()) return;

  double mean = 0.0;
  for (const Sample& s : samples) mean += s.ret;
  mean /= static_cast<double>(samples.size());
  double var = 0.0;
  for (const Sample& s : samples) var += (s.ret - mean) * (s.ret - mean);
  const double sd = std::sqrt(var / static_cast<double>(samples.size()));
  const double scale = config_.normalize_advantages && sd > 1e-8 ? 1.0 / sd : 1.0;

  const std::size_t nf = idx(spec_.feature_count());
  std::vector<double> grad(weights_.size(), 0.0);
  for (const Sample& s : samples) {
    const double adv = (s.ret - mean) * scale;
    if (adv == 0.0) continue;
    const ActionDistribution d = distribution(*s.obs);
    const std::size_t base = idx(block_of(*s.obs)) * nf;
    for (std::size_t c = 0; c < d.nodes.size(); ++c) {
      const double indicator = d.nodes[c] == s.action ? 1.0 : 0.0;
      const double coef = adv * (indicator - d.probs[c]);
      if (coef == 0.0) continue;
      const std::vector<double> f = candidate_features(spec_, *s.obs, d.nodes[c]);
      for (std::size_t i = 0; i < nf; ++i) grad[base + i] += coef * f[i];
    }
  }

  ++adam_t_;
  const double n = static_cast<double>(samples.size());
  const double c1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(adam_t_));
  const double c2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(adam_t_));
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    const double gi = grad[i] / n;
    adam_m_[i] = kAdamBeta1 * adam_m_[i] + (1 - kAdamBeta1) * gi;
    adam_v_[i] = kAdamBeta2 * adam_v_[i] + (1 - kAdamBeta2) * gi * gi;
    // Gradient ascent on expected return.
    weights_[i] += config_.learning_rate * (adam_m_[i] / c1) / (std::sqrt(adam_v_[i] / c2) + kAdamEps);
  }
}

void LinearSoftmaxPolicy::load_parameters(std::span<const double> params) {
  if (params.size() != weights_.size()) {
    throw InvalidArgument(fmt::format("expected {} parameters, got {}", weights_.size(), params.size()));
  }
  weights_.assign(params.begin(), params.end());
  std::fill(adam_m_.begin(), adam_m_.end(), 0.0);
  std::fill(adam_v_.begin(), adam_v_.end(), 0.0);
  adam_t_ = 0;
}

std::unique_ptr<Policy> LinearSoftmaxPolicy::clone() const {
  return std::make_unique<LinearSoftmaxPolicy>(*this);
}

std::string LinearSoftmaxPolicy::header() const {
  return fmt::format("linear_softmax conditioning={} rank_cap={} prize_rank_slots={} features={} prize_scale={}",
                     to_string(spec_.conditioning), spec_.rank_cap, spec_.prize_rank_slots, spec_.feature_count(),
                     spec_.prize_scale);
}

std::unique_ptr<Policy> linear_softmax_learner(FeatureSpec spec, LearnerConfig config) {
  return std::make_unique<LinearSoftmaxPolicy>(std::move(spec), config);
}

void write_parameters(std::ostream& out, const Policy& policy) {
  out << policy.header() << '\n';
  const std::vector<double> p = policy.parameters();
  for (std::size_t i = 0; i < p.size(); ++i) out << (i ? " " : "") << fmt::format("{:.17g}", p[i]);
  out << '\n';
}

void read_parameters(std::istream& in, Policy& policy) {
  std::string header;
  if (!std::getline(in, header)) throw ParseError(1, "missing parameter header");
  if (header != policy.header()) {
    throw ParseError(1, fmt::format("parameter header '{}' does not match '{}'", header, policy.header()));
  }
  std::string line;
  std::getline(in, line);
  std::istringstream values(line);
  std::vector<double> p;
  double x = 0.0;
  while (values >> x) p.push_back(x);
  if (!values.eof()) throw ParseError(2, "malformed parameter value");
  policy.load_parameters(p);
}

// --- Entropy schedule -----------------------------------------------------

void EntropySchedule::validate() const {
  if (!(dh > 0.0)) throw InvalidArgument(fmt::format("entropy decrement must be > 0, got {}", dh));
  if (!(h_stop >= 0.0 && h_stop < h0 && h0 < h_max)) {
    throw InvalidArgument(
        fmt::format("entropy schedule needs 0 <= h_stop < h0 < h_max, got h_stop={} h0={} h_max={}", h_stop, h0,
                    h_max));
  }
}

EntropySchedule EntropySchedule::standard(int node_count, double h_stop, std::optional<double> h0, int rounds) {
  if (node_count < 2) throw InvalidArgument("entropy schedule needs at least 2 nodes");
  if (rounds < 1) throw InvalidArgument("entropy schedule needs at least one round");
  EntropySchedule s;
  s.h_max = std::log(static_cast<double>(node_count));
  s.h0 = h0.value_or(0.7 * s.h_max);
  s.h_stop = h_stop;
  // Levels h0 - k dh for k < rounds stay above h_stop; the next one drops
  // half a step below it.
  s.dh = (s.h0 - s.h_stop) / (rounds - 0.5);
  s.validate();
  return s;
}

double empirical_max_entropy(const std::shared_ptr<const Game>& game, int team_size, int episodes,
                             std::uint64_t seed) {
  if (episodes < 1) throw InvalidArgument("need at least one episode");
  UniformPolicy uniform;
  double sum = 0.0;
  long count = 0;
  for (int e = 0; e < episodes; ++e) {
    Rng setup = make_rng(derive_seed(seed, 3 * static_cast<std::uint64_t>(e)));
    Rng act = make_rng(derive_seed(seed, 3 * static_cast<std::uint64_t>(e) + 1));
    Rng env = make_rng(derive_seed(seed, 3 * static_cast<std::uint64_t>(e) + 2));
    const std::vector<NodeId> starts = random_starts(game->graph(), team_size, setup);
    GameState state = initial_state(game, starts, sample_initial(game->prize_model(), setup));
    while (state.any_active() && state.t < game->step_cap()) {
      std::vector<NodeId> actions(idx(team_size), kNoNode);
      for (int k = 0; k < team_size; ++k) {
        if (!state.agents[idx(k)].active) continue;
        const Observation obs = make_observation(state, k + 1, {});
        sum += std::log(static_cast<double>(obs.feasible.size()));
        ++count;
        actions[idx(k)] = uniform.sample(obs, act);
      }
      state = step(state, actions, env).new_state;
    }
  }
  return count ? sum / static_cast<double>(count) : 0.0;
}

// --- Training -------------------------------------------------------------

void write_training_log(std::ostream& out, std::span<const TrainingLogRow> rows) {
  const std::size_t n = rows.empty() ? 0 : rows.front().entropies.size();
  out << "t,trainee";
  for (std::size_t k = 1; k <= n; ++k) out << ",entropy_" << k;
  for (std::size_t k = 1; k <= n; ++k) out << ",mean_return_" << k;
  out << ",freezing_point\n";
  for (const TrainingLogRow& r : rows) {
    out << r.t << ',' << r.trainee;
    for (double h : r.entropies) out << ',' << fmt::format("{:.17g}", h);
    for (double g : r.mean_returns) out << ',' << fmt::format("{:.17g}", g);
    out << ',' << fmt::format("{:.17g}", r.freezing_point) << '\n';
  }
}

std::vector<TrainingLogRow> read_training_log(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, "empty training log");
  const auto cols = static_cast<std::size_t>(std::count(line.begin(), line.end(), ','));
  if (cols < 2 || cols % 2 != 0) throw ParseError(1, "malformed training log header");
  const std::size_t n = (cols - 2) / 2;
  std::vector<TrainingLogRow> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::istringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != cols + 1) throw ParseError(line_no, "wrong number of columns");
    try {
      TrainingLogRow r;
      r.t = std::stol(cells[0]);
      r.trainee = std::stoi(cells[1]);
      for (std::size_t k = 0; k < n; ++k) r.entropies.push_back(std::stod(cells[2 + k]));
      for (std::size_t k = 0; k < n; ++k) r.mean_returns.push_back(std::stod(cells[2 + n + k]));
      r.freezing_point = std::stod(cells.back());
      rows.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw ParseError(line_no, "malformed number");
    }
  }
  return rows;
}

namespace {

struct Batch {
  std::vector<std::vector<Trajectory>> trajectories;  // [agent][episode]
  std::vector<double> return_sums;
  int episodes = 0;
  long steps = 0;

  explicit Batch(int n) : trajectories(idx(n)), return_sums(idx(n), 0.0) {}

  std::vector<Observation> observations(int agent) const {
    std::vector<Observation> out;
    for (const Trajectory& tr : trajectories[idx(agent)]) out.insert(out.end(), tr.obs.begin(), tr.obs.end());
    return out;
  }
  std::vector<double> mean_returns() const {
    std::vector<double> m = return_sums;
    for (double& x : m) x = episodes ? x / episodes : 0.0;
    return m;
  }
};

// Plays one episode, stopping early once the global step count reaches
// t_max. `actor(k)` is the policy of agent index k.
template <typename ActorFn>
void play_episode(const std::shared_ptr<const Game>& game, const std::optional<std::vector<NodeId>>& fixed_starts,
                  int team_size, std::uint64_t seed, long t_max, long& t, const ActorFn& actor, Batch& batch) {
  Rng setup = make_rng(derive_seed(seed, 0));
  Rng act = make_rng(derive_seed(seed, 1));
  Rng env = make_rng(derive_seed(seed, 2));
  const std::vector<NodeId> starts = fixed_starts ? *fixed_starts : random_starts(game->graph(), team_size, setup);
  GameState state = initial_state(game, starts, sample_initial(game->prize_model(), setup));
  std::vector<Trajectory> trs(idx(team_size));
  const int cap = game->step_cap();
  while (state.any_active() && state.t < cap && t < t_max) {
    const std::vector<int> ranks = ordinal_ranks(state);
    std::vector<NodeId> actions(idx(team_size), kNoNode);
    for (int k = 0; k < team_size; ++k) {
      if (!state.agents[idx(k)].active) continue;
      Observation obs = make_observation(state, k + 1, ranks);
      actions[idx(k)] = actor(k).sample(obs, act);
      trs[idx(k)].obs.push_back(std::move(obs));
      trs[idx(k)].actions.push_back(actions[idx(k)]);
    }
    StepOutcome out = step(state, actions, env);
    for (int k = 0; k < team_size; ++k) {
      if (state.agents[idx(k)].active) trs[idx(k)].rewards.push_back(out.rewards[idx(k)]);
      batch.return_sums[idx(k)] += out.rewards[idx(k)];
    }
    state = std::move(out.new_state);
    ++t;
    ++batch.steps;
  }
  ++batch.episodes;
  for (int k = 0; k < team_size; ++k) batch.trajectories[idx(k)].push_back(std::move(trs[idx(k)]));
}

void check_team(const std::shared_ptr<const Game>& game, int team_size,
                const std::optional<std::vector<NodeId>>& starts, long t_max, long batch_steps) {
  if (!game) throw InvalidArgument("training needs a game");
  if (team_size < 1) throw InvalidArgument(fmt::format("team size must be >= 1, got {}", team_size));
  if (starts && static_cast<int>(starts->size()) != team_size) {
    throw InvalidArgument(fmt::format("{} start nodes for {} agents", starts->size(), team_size));
  }
  if (t_max < 1 || batch_steps < 1) throw InvalidArgument("t_max and batch_steps must be >= 1");
}

std::vector<double> agent_entropies(std::span<const std::unique_ptr<Policy>> policies, const Batch& batch,
                                    int fallback) {
  const std::vector<Observation> shared = batch.observations(fallback);
  std::vector<double> h;
  for (std::size_t k = 0; k < policies.size(); ++k) {
    const std::vector<Observation> own = batch.observations(static_cast<int>(k));
    const std::vector<Observation>& use = own.empty() ? shared : own;
    h.push_back(use.empty() ? std::numeric_limits<double>::quiet_NaN() : estimate_entropy(*policies[k], use));
  }
  return h;
}

}  // namespace

ForlResult forl_train(const std::shared_ptr<const Game>& game, const LearnerFactory& factory,
                      const ForlConfig& config, ForlObserver* observer) {
  check_team(game, config.team_size, config.starts, config.t_max, config.batch_steps);
  const EntropySchedule& sched = config.schedule;
  sched.validate();
  if (sched.h_max > std::log(static_cast<double>(game->graph().node_count())) + 1e-12) {
    throw InvalidArgument(fmt::format("h_max {} exceeds ln|V|", sched.h_max));
  }
  const int n = config.team_size;

  ForlResult res;
  for (int k = 0; k < n; ++k) {
    res.policies.push_back(factory(k + 1));
    if (!res.policies.back()) throw InvalidArgument("learner factory returned null");
  }
  const UniformPolicy uniform;
  int j = 0;
  double level = sched.h0;
  long t = 0;
  std::uint64_t episode = 0;

  auto progress = [&](AgentId trainee, std::span<const double> h) {
    return ForlProgress{t, trainee, res.rounds, level, res.bootstrapped, res.policies, h};
  };

  while (t < config.t_max) {
    Batch batch(n);
    // Before bootstrapping only the first agent has a policy worth playing.
    auto actor = [&](int k) -> const Policy& {
      if (k == j || res.bootstrapped) return *res.policies[idx(k)];
      return uniform;
    };
    while (batch.steps < config.batch_steps && t < config.t_max) {
      play_episode(game, config.starts, n, derive_seed(config.seed, episode++), config.t_max, t, actor, batch);
    }

    res.policies[idx(j)]->update(batch.trajectories[idx(j)]);
    const std::vector<double> h = agent_entropies(res.policies, batch, j);
    if (std::isnan(h[idx(j)])) {
      throw std::runtime_error(fmt::format("entropy estimate for agent {} is NaN at t={} (round {}, level {})", j + 1,
                                           t, res.rounds, level));
    }
    res.log.push_back({t, j + 1, h, batch.mean_returns(), level});
    if (observer) observer->on_update(progress(j + 1, h));

    if (h[idx(j)] <= level) {
      if (observer) observer->on_freeze(progress(j + 1, h));
      if (j == 0 && !res.bootstrapped && n > 1) {
        const std::vector<double> p = res.policies[0]->parameters();
        for (int k = 1; k < n; ++k) res.policies[idx(k)]->load_parameters(p);
        res.bootstrapped = true;
        if (observer) observer->on_bootstrap(progress(j + 1, h));
      }
      // The gate only moves past agent n, never wraps early.
      if (++j == n) {
        j = 0;
        level -= sched.dh;
        ++res.rounds;
        if (observer) observer->on_round_end(progress(j + 1, h));
        if (level < sched.h_stop) {
          res.stop = ForlStop::kEntropy;
          break;
        }
      }
    }
  }
  res.t = t;
  res.trainee = j + 1;
  res.freezing_point = level;
  return res;
}

// --- Baselines ------------------------------------------------------------

std::string_view to_string(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::kIplGs:
      return "ipl-gs";
    case BaselineKind::kPsOr:
      return "ps-or";
    case BaselineKind::kPsGs:
      return "ps-gs";
    case BaselineKind::kPsGr:
      return "ps-gr";
  }
  return "?";
}

BaselineKind baseline_from_string(std::string_view name) {
  for (BaselineKind k : {BaselineKind::kIplGs, BaselineKind::kPsOr, BaselineKind::kPsGs, BaselineKind::kPsGr}) {
    if (name == to_string(k)) return k;
  }
  throw InvalidArgument(fmt::format("unknown baseline '{}'", name));
}

Conditioning conditioning_of(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::kPsOr:
      return Conditioning::kOrdinal;
    case BaselineKind::kPsGr:
      return Conditioning::kGlobal;
    case BaselineKind::kIplGs:
    case BaselineKind::kPsGs:
      return Conditioning::kGlobalState;
  }
  return Conditioning::kOrdinal;
}

bool is_shared(BaselineKind kind) { return kind != BaselineKind::kIplGs; }

BaselineResult train_baseline(const std::shared_ptr<const Game>& game, BaselineKind kind,
                              const LearnerFactory& factory, const BaselineConfig& config) {
  check_team(game, config.team_size, config.starts, config.t_max, config.batch_steps);
  const int n = config.team_size;
  BaselineResult res;
  std::vector<std::unique_ptr<Policy>> owned;
  if (is_shared(kind)) {
    owned.push_back(factory(1));
  } else {
    for (int k = 0; k < n; ++k) owned.push_back(factory(k + 1));
  }
  for (const auto& p : owned) {
    if (!p) throw InvalidArgument("learner factory returned null");
  }
  std::vector<std::shared_ptr<Policy>> shared(owned.size());
  for (std::size_t i = 0; i < owned.size(); ++i) shared[i] = std::move(owned[i]);
  for (int k = 0; k < n; ++k) res.policies.push_back(shared[is_shared(kind) ? 0 : idx(k)]);

  long t = 0;
  std::uint64_t episode = 0;
  while (t < config.t_max) {
    Batch batch(n);
    auto actor = [&](int k) -> const Policy& { return *res.policies[idx(k)]; };
    while (batch.steps < config.batch_steps && t < config.t_max) {
      play_episode(game, config.starts, n, derive_seed(config.seed, episode++), config.t_max, t, actor, batch);
    }
    if (is_shared(kind)) {
      std::vector<Trajectory> all;
      for (const auto& per_agent : batch.trajectories) all.insert(all.end(), per_agent.begin(), per_agent.end());
      shared[0]->update(all);
    } else {
      for (int k = 0; k < n; ++k) shared[idx(k)]->update(batch.trajectories[idx(k)]);
    }
    std::vector<double> h;
    for (int k = 0; k < n; ++k) {
      const std::vector<Observation> obs = batch.observations(k);
      h.push_back(obs.empty() ? std::numeric_limits<double>::quiet_NaN()
                              : estimate_entropy(*res.policies[idx(k)], obs));
    }
    res.log.push_back({t, 0, h, batch.mean_returns(), 0.0});
  }
  return res;
}

// --- Evaluation -----------------------------------------------------------

void PolicyController::reset(const GameState&) {
  cached_t_ = -1;
  ranks_.clear();
}

NodeId PolicyController::act(const GameState& state, AgentId agent, Rng& rng) {
  if (state.t != cached_t_) {
    ranks_ = ordinal_ranks(state);
    cached_t_ = state.t;
  }
  const Observation obs = make_observation(state, agent, ranks_);
  return greedy_ ? policy_->greedy(obs) : policy_->sample(obs, rng);
}

}  // namespace spcg
