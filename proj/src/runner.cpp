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

// Scenario pipelines and the run directory writer.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "scenario_internal.hpp"
#include "spcg/cli.hpp"
#include "spcg/engine.hpp"
#include "spcg/equilibrium.hpp"
#include "spcg/forl.hpp"
#include "spcg/topsolver.hpp"

#ifndef SPCG_VERSION
#define SPCG_VERSION "0.0.0"
#endif

namespace spcg::cli {
namespace {

namespace fs = std::filesystem;

// What one unit of work produces: CSV rows for shared tables and whole
// files of its own.
struct UnitOutput {
  std::vector<std::pair<std::string, std::string>> rows;
  std::vector<std::pair<std::string, std::string>> files;

  void row(const std::string& table, std::string line) { rows.emplace_back(table, std::move(line)); }
};

using Unit = std::function<UnitOutput()>;

// Runs units on a pool; results come back in unit order so the writer never
// depends on scheduling.
std::vector<UnitOutput> run_units(const std::vector<Unit>& units, int threads) {
  std::vector<UnitOutput> out(units.size());
  std::vector<std::exception_ptr> errors(units.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < units.size(); i = next++) {
      try {
        out[i] = units[i]();
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  unsigned n = threads > 0 ? static_cast<unsigned>(threads) : std::max(1u, std::thread::hardware_concurrency());
  n = std::min<unsigned>(n, static_cast<unsigned>(std::max<std::size_t>(units.size(), 1)));
  if (n <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < n; ++k) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

std::string num(double x) { return fmt::format("{}", x); }

std::string route_text(const std::vector<RouteStrategy>& routes) {
  std::string s;
  for (std::size_t k = 0; k < routes.size(); ++k) {
    if (k) s += '|';
    s += fmt::format("{}", fmt::join(routes[k].route, "-"));
  }
  return s;
}

struct Draw {
  PrizeVector prizes;
  std::vector<NodeId> starts;
};

Draw draw_instance(const Game& game, const json& r, int team_size, std::uint64_t seed, std::uint64_t index) {
  Rng rng = make_rng(derive_seed(seed, index));
  const Graph& g = game.graph();
  const bool distinct = r.contains("prizes") && r["prizes"].value("distinct", false);
  Draw d;
  for (int attempt = 0;; ++attempt) {
    d.prizes = sample_initial(game.prize_model(), rng);
    if (!distinct) break;
    std::set<double> seen;
    bool ok = true;
    for (NodeId u : g.non_terminals()) ok = ok && seen.insert(d.prizes[static_cast<std::size_t>(u)]).second;
    if (ok) break;
    if (attempt == 1000) throw std::runtime_error("cannot draw distinct prizes from this prize model");
  }
  if (const auto fixed = scenario_starts(r)) {
    d.starts = *fixed;
    return d;
  }
  // Random starts come from nodes that can still reach a terminal.
  std::vector<NodeId> ok;
  for (NodeId u : g.non_terminals()) {
    if (affordable(game.config().l_max, game.paths().to_terminal(u))) ok.push_back(u);
  }
  if (ok.empty()) throw std::runtime_error("no start node can reach a terminal within l_max");
  std::uniform_int_distribution<std::size_t> pick(0, ok.size() - 1);
  for (int k = 0; k < team_size; ++k) d.starts.push_back(ok[pick(rng)]);
  return d;
}

TopSolution solve(const json& r, const TopInstance& inst) {
  const json& t = r["topsolver"];
  TopOptions o;
  o.allow_revisits = t["allow_revisits"].get<bool>();
  o.profile_budget = t["profile_budget"].is_null() ? std::numeric_limits<double>::infinity()
                                                   : t["profile_budget"].get<double>();
  TopSolution sol = t["time_limit"].is_null()
                        ? solve_exact(inst, o)
                        : solve_bound(inst, std::chrono::duration<double>(t["time_limit"].get<double>()), o);
  // Same summation order as every other reported reward.
  if (!sol.routes.empty()) sol.team_reward = team_reward(inst, sol.routes);
  return sol;
}

// A played episode's team reward summed like team_reward(): prizes by node
// id, then terminal payments.
double canonical_reward(const TopInstance& inst, const EpisodeLog& log) {
  std::vector<RouteStrategy> routes;
  for (const auto& traj : log.trajectories) routes.push_back({{traj.begin() + 1, traj.end()}, 0.0});
  return team_reward(inst, routes);
}

// One row per move: stage, agent, node, prize collected (terminal payments
// excluded), terminal flag.
void stage_rows(UnitOutput& out, const Graph& g, const EpisodeLog& log, std::uint64_t seed, int instance) {
  for (std::size_t s = 0; s < log.steps.size(); ++s) {
    const StepRecord& rec = log.steps[s];
    for (std::size_t k = 0; k < rec.actions.size(); ++k) {
      const NodeId v = rec.actions[k];
      if (v == kNoNode) continue;
      const bool terminal = g.is_terminal(v);
      out.row("stage_rewards.csv", fmt::format("{},{},{},{},{},{},{}", seed, instance, s + 1, k + 1, v,
                                               terminal ? 0.0 : rec.rewards[k], terminal ? 1 : 0));
    }
  }
}

const char* kStageHeader = "seed,instance,stage,agent,node,prize,terminal";
const char* kPoaHeader = "seed,instance,equilibrium_reward,optimum,poa";

double ratio_or_nan(double reward, double optimum) {
  return optimum > 0.0 ? price_of_anarchy(reward, optimum) : std::numeric_limits<double>::quiet_NaN();
}

std::string maybe(double x) { return std::isnan(x) ? "" : num(x); }

// --- pipelines ---------------------------------------------------------------

struct Plan {
  std::vector<std::pair<std::string, std::string>> tables;  // file, header
  std::vector<Unit> units;
};

Plan plan_greedy(const Scenario& s) {
  Plan p;
  p.tables = {{"poa.csv", std::string(kPoaHeader) + ",stage_equilibrium,max_stage_gain,optimal"},
              {"stage_rewards.csv", kStageHeader}};
  auto game = build_game(s.resolved);
  for (std::uint64_t seed : s.seeds) {
    for (int i = 0; i < s.instances; ++i) {
      p.units.push_back([&s, game, seed, i] {
        UnitOutput out;
        const Draw d = draw_instance(*game, s.resolved, s.team_size, seed, static_cast<std::uint64_t>(i));
        const EpisodeLog log = greedy_rollout(game, d.starts, d.prizes);
        const StageDeviationReport dev = verify_stage_equilibrium(game, d.starts, d.prizes);
        const TopInstance inst{game->graph_ptr(), d.prizes, d.starts, game->config().l_max,
                               game->config().terminal_prize};
        const TopSolution top = solve(s.resolved, inst);
        const double reward = canonical_reward(inst, log);
        if (std::abs(reward - log.team_return()) > 1e-9) {
          throw std::runtime_error(fmt::format("greedy episode paid {} but its routes are worth {}",
                                               log.team_return(), reward));
        }
        out.row("poa.csv", fmt::format("{},{},{},{},{},{},{},{}", seed, i, num(reward), num(top.team_reward),
                                       maybe(ratio_or_nan(reward, top.team_reward)), dev.equilibrium,
                                       num(dev.max_gain), top.optimal));
        stage_rows(out, game->graph(), log, seed, i);
        return out;
      });
    }
  }
  return p;
}

Plan plan_brute_force(const Scenario& s) {
  Plan p;
  p.tables = {{"pne.csv", "seed,instance,alpha,profiles,pne_exists,equilibria,worst_equilibrium_reward,optimum,poa"},
              {"poa.csv", kPoaHeader}};
  const json& bf = s.resolved["brute_force"];
  PayoffOptions po;
  po.max_cells = bf["max_cells"].get<std::size_t>();
  po.include_terminal = bf["include_terminal"].get<bool>();
  po.threads = 1;

  auto unit = [&s, po](std::shared_ptr<const Game> game, std::uint64_t seed, int i, std::optional<double> alpha) {
    return [&s, po, game, seed, i, alpha] {
      UnitOutput out;
      const Draw d = draw_instance(*game, s.resolved, s.team_size, seed, static_cast<std::uint64_t>(i));
      const PayoffMatrix m = payoff_matrix(game->graph_ptr(), d.prizes, d.starts, game->config(), po);
      const PneResult pne = find_pure_nash(m);
      const TopInstance inst{game->graph_ptr(), d.prizes, d.starts, game->config().l_max,
                             po.include_terminal ? game->config().terminal_prize : 0.0};
      const double optimum = solve(s.resolved, inst).team_reward;
      double worst = std::numeric_limits<double>::quiet_NaN();
      if (pne.exists) worst = worst_equilibrium_team_payoff(m, pne);
      const double ratio = pne.exists ? ratio_or_nan(worst, optimum) : std::numeric_limits<double>::quiet_NaN();
      out.row("pne.csv", fmt::format("{},{},{},{},{},{},{},{},{}", seed, i, alpha ? num(*alpha) : "", m.cells(),
                                     pne.exists, pne.equilibria.size(), maybe(worst), num(optimum), maybe(ratio)));
      if (pne.exists) out.row("poa.csv", fmt::format("{},{},{},{},{}", seed, i, num(worst), num(optimum), maybe(ratio)));
      std::ostringstream csv;
      m.write_csv(csv);
      const std::string name = alpha ? fmt::format("matrix_alpha_{}.csv", num(*alpha))
                                     : fmt::format("matrix_seed{}_{}.csv", seed, i);
      out.files.emplace_back(name, csv.str());
      return out;
    };
  };

  const std::vector<double> alphas = scenario_alphas(s.resolved);
  if (!alphas.empty()) {
    // The counterexample is deterministic: one row per alpha.
    for (std::size_t k = 0; k < alphas.size(); ++k) {
      p.units.push_back(unit(build_game(s.resolved, alphas[k]), s.seeds.front(), static_cast<int>(k), alphas[k]));
    }
    return p;
  }
  auto game = build_game(s.resolved);
  for (std::uint64_t seed : s.seeds) {
    for (int i = 0; i < s.instances; ++i) p.units.push_back(unit(game, seed, i, std::nullopt));
  }
  return p;
}

Plan plan_topsolver(const Scenario& s) {
  Plan p;
  p.tables = {{"top.csv", "seed,instance,team_reward,optimal,completed,upper_bound,nodes_expanded,routes"}};
  auto game = build_game(s.resolved);
  for (std::uint64_t seed : s.seeds) {
    for (int i = 0; i < s.instances; ++i) {
      p.units.push_back([&s, game, seed, i] {
        UnitOutput out;
        const Draw d = draw_instance(*game, s.resolved, s.team_size, seed, static_cast<std::uint64_t>(i));
        const TopInstance inst{game->graph_ptr(), d.prizes, d.starts, game->config().l_max,
                               game->config().terminal_prize};
        const TopSolution sol = solve(s.resolved, inst);
        out.row("top.csv", fmt::format("{},{},{},{},{},{},{},{}", seed, i, num(sol.team_reward), sol.optimal,
                                       sol.completed, num(sol.upper_bound), sol.nodes_expanded,
                                       route_text(sol.routes)));
        return out;
      });
    }
  }
  return p;
}

constexpr std::uint64_t kEvalStream = 0xE7A1;

Plan plan_forl(const Scenario& s) {
  Plan p;
  p.tables = {{"training.csv", "seed,t,rounds,stop,freezing_point,bootstrapped"},
              {"eval.csv", "seed,instance,learned_reward,greedy_reward,greedy_match,optimum,ratio"},
              {"poa.csv", kPoaHeader},
              {"stage_rewards.csv", kStageHeader}};
  auto game = build_game(s.resolved);
  for (std::uint64_t seed : s.seeds) {
    p.units.push_back([&s, game, seed] {
      UnitOutput out;
      const json& f = s.resolved["forl"];
      const FeatureSpec spec{game, conditioning_from_string(f["conditioning"].get<std::string>())};
      LearnerConfig lc;
      lc.learning_rate = f["learning_rate"].get<double>();
      lc.gamma = game->config().gamma;
      ForlConfig fc;
      fc.schedule = EntropySchedule::standard(game->graph().node_count(), f["h_stop"].get<double>(),
                                              f["h0"].is_null() ? std::nullopt
                                                                : std::optional<double>(f["h0"].get<double>()),
                                              f["rounds"].get<int>());
      fc.t_max = f["t_max"].get<long>();
      fc.batch_steps = f["batch_steps"].get<long>();
      fc.team_size = s.team_size;
      fc.starts = scenario_starts(s.resolved);
      fc.seed = seed;
      ForlResult res = forl_train(game, [&](AgentId) { return linear_softmax_learner(spec, lc); }, fc);
      out.row("training.csv", fmt::format("{},{},{},{},{},{}", seed, res.t, res.rounds,
                                          res.stop == ForlStop::kEntropy ? "entropy" : "step_limit",
                                          num(res.freezing_point), res.bootstrapped));
      std::ostringstream log;
      write_training_log(log, res.log);
      out.files.emplace_back(fmt::format("training_log_forl_seed{}.csv", seed), log.str());

      std::vector<std::shared_ptr<const Policy>> policies;
      for (std::size_t k = 0; k < res.policies.size(); ++k) {
        std::ostringstream params;
        write_parameters(params, *res.policies[k]);
        out.files.emplace_back(fmt::format("policy_seed{}_agent{}.txt", seed, k + 1), params.str());
        policies.push_back(std::move(res.policies[k]));
      }

      const Graph& g = game->graph();
      const bool stationary = game->config().prize_mode == PrizeMode::kStationary;
      const bool greedy_ok = stationary && (g.kind() == GraphKind::kComplete || g.kind() == GraphKind::kStar);
      const std::uint64_t eval_seed = derive_seed(seed, kEvalStream);
      for (int i = 0; i < s.instances; ++i) {
        const Draw d = draw_instance(*game, s.resolved, s.team_size, eval_seed, static_cast<std::uint64_t>(i));
        std::vector<std::unique_ptr<PolicyController>> owned;
        std::vector<Controller*> cs;
        for (const auto& pol : policies) {
          owned.push_back(std::make_unique<PolicyController>(pol, true));
          cs.push_back(owned.back().get());
        }
        RolloutOptions ro;
        ro.starts = d.starts;
        ro.prizes = d.prizes;
        const EpisodeLog learned = rollout(game, cs, ro, derive_seed(eval_seed, static_cast<std::uint64_t>(i)));
        std::string greedy_reward;
        std::string match;
        if (greedy_ok) {
          const EpisodeLog ref = greedy_rollout(game, d.starts, d.prizes);
          greedy_reward = num(ref.team_return());
          match = fmt::format("{}", ref.trajectories == learned.trajectories);
        }
        double optimum = std::numeric_limits<double>::quiet_NaN();
        if (stationary) {
          try {
            optimum = solve(s.resolved, TopInstance{game->graph_ptr(), d.prizes, d.starts, game->config().l_max,
                                                    game->config().terminal_prize})
                          .team_reward;
          } catch (const InvalidArgument&) {
            // Too large to solve exactly; the optimum column stays empty.
          }
        }
        double reward = learned.team_return();
        if (stationary) {
          // Re-sum in the optimum's order when the episode paid exactly its routes.
          const double c = canonical_reward(TopInstance{game->graph_ptr(), d.prizes, d.starts, game->config().l_max,
                                                        game->config().terminal_prize},
                                            learned);
          if (std::abs(c - reward) <= 1e-9) reward = c;
        }
        const double ratio = std::isnan(optimum) ? optimum : ratio_or_nan(reward, optimum);
        out.row("eval.csv", fmt::format("{},{},{},{},{},{},{}", seed, i, num(reward), greedy_reward,
                                        match, maybe(optimum), maybe(ratio)));
        if (!std::isnan(optimum)) {
          out.row("poa.csv", fmt::format("{},{},{},{},{}", seed, i, num(reward), num(optimum),
                                         maybe(ratio)));
        }
        stage_rows(out, g, learned, seed, i);
      }
      return out;
    });
  }
  return p;
}

Plan plan_baseline(const Scenario& s) {
  Plan p;
  p.tables = {{"scaling.csv", "seed,kind,team_size,episodes,mean_team_reward,mean_prize_reward"}};
  auto game = build_game(s.resolved);
  const json& b = s.resolved["baseline"];
  std::vector<int> sizes;
  if (b["eval_team_sizes"].is_null()) {
    sizes.push_back(s.team_size);
  } else {
    for (const json& x : b["eval_team_sizes"]) sizes.push_back(x.get<int>());
  }
  for (std::uint64_t seed : s.seeds) {
    for (const json& kj : b["kinds"]) {
      const BaselineKind kind = baseline_from_string(kj.get<std::string>());
      p.units.push_back([&s, game, seed, kind, sizes] {
        UnitOutput out;
        const json& b = s.resolved["baseline"];
        const FeatureSpec spec{game, conditioning_of(kind)};
        LearnerConfig lc;
        lc.learning_rate = b["learning_rate"].get<double>();
        lc.gamma = game->config().gamma;
        BaselineConfig bc;
        bc.t_max = b["t_max"].get<long>();
        bc.batch_steps = b["batch_steps"].get<long>();
        bc.team_size = s.team_size;
        bc.starts = scenario_starts(s.resolved);
        bc.seed = seed;
        const BaselineResult res =
            train_baseline(game, kind, [&](AgentId) { return linear_softmax_learner(spec, lc); }, bc);
        const std::string name(to_string(kind));
        std::ostringstream log;
        write_training_log(log, res.log);
        out.files.emplace_back(fmt::format("training_log_{}_seed{}.csv", name, seed), log.str());
        for (std::size_t k = 0; k < (is_shared(kind) ? 1 : res.policies.size()); ++k) {
          std::ostringstream params;
          write_parameters(params, *res.policies[k]);
          out.files.emplace_back(is_shared(kind) ? fmt::format("policy_{}_seed{}.txt", name, seed)
                                                 : fmt::format("policy_{}_seed{}_agent{}.txt", name, seed, k + 1),
                                 params.str());
        }

        const int episodes = b["eval_episodes"].get<int>();
        const bool greedy = b["eval_greedy"].get<bool>();
        const std::uint64_t eval_seed = derive_seed(seed, kEvalStream);
        for (int m : sizes) {
          // Agents beyond the trained team reuse the last trained policy.
          std::vector<std::unique_ptr<PolicyController>> owned;
          std::vector<Controller*> cs;
          for (int k = 0; k < m; ++k) {
            const std::size_t src = std::min<std::size_t>(static_cast<std::size_t>(k), res.policies.size() - 1);
            owned.push_back(std::make_unique<PolicyController>(res.policies[src], greedy));
            cs.push_back(owned.back().get());
          }
          RolloutOptions ro;
          ro.team_size = m;
          if (m == s.team_size) ro.starts = scenario_starts(s.resolved);
          double team = 0.0;
          double prize = 0.0;
          for (int e = 0; e < episodes; ++e) {
            const EpisodeLog log = rollout(game, cs, ro, derive_seed(eval_seed, static_cast<std::uint64_t>(e)));
            team += log.team_return();
            prize += log.team_prize_return();
          }
          out.row("scaling.csv", fmt::format("{},{},{},{},{},{}", seed, name, m, episodes, num(team / episodes),
                                             num(prize / episodes)));
        }
        return out;
      });
    }
  }
  return p;
}

Plan make_plan(const Scenario& s) {
  if (s.algorithm == "greedy-pne") return plan_greedy(s);
  if (s.algorithm == "brute-force") return plan_brute_force(s);
  if (s.algorithm == "topsolver") return plan_topsolver(s);
  if (s.algorithm == "forl") return plan_forl(s);
  return plan_baseline(s);
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void prepare_run_dir(const fs::path& dir) {
  if (fs::exists(dir)) {
    if (!fs::is_directory(dir)) throw std::runtime_error(fmt::format("'{}' is not a directory", dir.string()));
    if (!fs::is_empty(dir)) {
      if (!fs::exists(dir / "manifest.json")) {
        throw std::runtime_error(fmt::format("'{}' is not empty and holds no previous run", dir.string()));
      }
      fs::remove_all(dir);
    }
  }
  fs::create_directories(dir);
}

}  // namespace

RunReport run_scenario(const Scenario& scenario, const fs::path& output_root, std::optional<int> threads) {
  Plan plan = make_plan(scenario);
  const std::vector<UnitOutput> results = run_units(plan.units, threads.value_or(scenario.threads));

  RunReport report;
  report.run_dir = output_root / scenario.output;
  prepare_run_dir(report.run_dir);

  // Single writer: tables in plan order, rows in unit order.
  std::map<std::string, std::string> tables;
  for (const auto& [file, header] : plan.tables) tables[file] = header + '\n';
  for (const UnitOutput& u : results) {
    for (const auto& [file, line] : u.rows) tables.at(file) += line + '\n';
  }
  for (const auto& [file, header] : plan.tables) {
    write_file(report.run_dir / file, tables.at(file));
    report.files.push_back(file);
  }
  for (const UnitOutput& u : results) {
    for (const auto& [file, content] : u.files) {
      write_file(report.run_dir / file, content);
      report.files.push_back(file);
    }
  }

  json files = json::array();
  for (const std::string& f : report.files) {
    const std::string content = read_file(report.run_dir / f);
    files.push_back({{"path", f}, {"bytes", content.size()}, {"fnv1a64", fmt::format("{:016x}", fnv1a64(content))}});
  }
  const json manifest = {{"tool", "spcg"},
                         {"version", SPCG_VERSION},
                         {"name", scenario.name},
                         {"algorithm", scenario.algorithm},
                         {"config_hash", config_hash(scenario)},
                         {"seeds", scenario.seeds},
                         {"scenario", scenario.resolved},
                         {"files", files},
                         {"rerun", "spcg run <this manifest> --output-root <root>"}};
  write_file(report.run_dir / "manifest.json", manifest.dump(2) + '\n');
  report.files.push_back("manifest.json");
  return report;
}

// --- plot data -----------------------------------------------------------------

namespace {

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t col(const std::string& name, const fs::path& file) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw ArtifactError(fmt::format("'{}' has no column '{}'", file.string(), name));
    return static_cast<std::size_t>(it - header.begin());
  }
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

Csv read_csv(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw ArtifactError(fmt::format("missing artifact '{}'", file.string()));
  Csv csv;
  std::string line;
  if (!std::getline(in, line)) throw ArtifactError(fmt::format("empty artifact '{}'", file.string()));
  csv.header = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    csv.rows.push_back(split(line));
    csv.rows.back().resize(csv.header.size());
  }
  return csv;
}

std::string convergence(const fs::path& dir) {
  std::vector<fs::path> logs;
  for (const auto& e : fs::directory_iterator(dir)) {
    const std::string name = e.path().filename().string();
    if (name.rfind("training_log_", 0) == 0 && e.path().extension() == ".csv") logs.push_back(e.path());
  }
  if (logs.empty()) throw ArtifactError(fmt::format("no training logs in '{}'", dir.string()));
  std::sort(logs.begin(), logs.end());
  std::string out = "source,t,trainee,agent,entropy,mean_return,freezing_point\n";
  for (const fs::path& file : logs) {
    const std::string source = file.stem().string().substr(std::string("training_log_").size());
    std::ifstream in(file);
    for (const TrainingLogRow& r : read_training_log(in)) {
      for (std::size_t k = 0; k < r.entropies.size(); ++k) {
        out += fmt::format("{},{},{},{},{},{},{}\n", source, r.t, r.trainee, k + 1, num(r.entropies[k]),
                           num(r.mean_returns[k]), num(r.freezing_point));
      }
    }
  }
  return out;
}

std::string project(const fs::path& file, const std::vector<std::pair<std::string, std::string>>& columns,
                    bool number_rows = false) {
  const Csv csv = read_csv(file);
  std::vector<std::size_t> idx;
  std::string out;
  if (number_rows) out += "instance,";
  for (std::size_t k = 0; k < columns.size(); ++k) {
    idx.push_back(csv.col(columns[k].first, file));
    out += (k ? "," : "") + columns[k].second;
  }
  out += '\n';
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    if (number_rows) out += fmt::format("{},", r);
    for (std::size_t k = 0; k < idx.size(); ++k) out += (k ? "," : "") + csv.rows[r][idx[k]];
    out += '\n';
  }
  return out;
}

}  // namespace

fs::path emit_plotdata(const fs::path& run_dir, std::string_view which) {
  if (!fs::is_directory(run_dir)) throw ArtifactError(fmt::format("no run directory '{}'", run_dir.string()));
  std::string content;
  if (which == "convergence") {
    content = convergence(run_dir);
  } else if (which == "stage_rewards") {
    content = project(run_dir / "stage_rewards.csv", {{"stage", "stage"},
                                                      {"agent", "agent"},
                                                      {"prize", "prize"},
                                                      {"terminal", "terminal"},
                                                      {"seed", "seed"},
                                                      {"instance", "instance"}});
  } else if (which == "poa") {
    content = project(run_dir / "poa.csv", {{"equilibrium_reward", "equilibrium_reward"},
                                            {"optimum", "optimum"},
                                            {"poa", "ratio"},
                                            {"seed", "seed"}},
                      true);
  } else if (which == "scaling") {
    content = project(run_dir / "scaling.csv",
                      {{"kind", "kind"}, {"team_size", "team_size"}, {"seed", "seed"}, {"mean_team_reward", "mean_team_reward"}});
  } else {
    throw ValidationError("which", fmt::format("unknown plot data '{}'", which));
  }
  const fs::path out_dir = run_dir / "plotdata";
  fs::create_directories(out_dir);
  const fs::path out = out_dir / fmt::format("{}.csv", which);
  write_file(out, content);
  return out;
}

}  // namespace spcg::cli
