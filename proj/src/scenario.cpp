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

// Scenario files: key registry, defaults, validation.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "scenario_internal.hpp"
#include "spcg/cli.hpp"
#include "spcg/engine.hpp"
#include "spcg/forl.hpp"
#include "spcg/graph.hpp"
#include "spcg/prizes.hpp"

namespace spcg::cli {

ValidationError::ValidationError(std::string path, const std::string& what)
    : InvalidArgument(path.empty() ? what : fmt::format("{}: {}", path, what)), path_(std::move(path)) {}

namespace {

using When = bool (*)(const json&);

struct Field {
  std::string_view path;
  json def;
  bool required;
  When when;
  std::string_view doc;
};

const json& at_path(const json& doc, std::string_view path) {
  static const json kNull;
  const json* cur = &doc;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = path.find('.', start);
    const std::string key(path.substr(start, dot == std::string_view::npos ? std::string_view::npos : dot - start));
    if (!cur->is_object() || !cur->contains(key)) return kNull;
    cur = &(*cur)[key];
    if (dot == std::string_view::npos) return *cur;
    start = dot + 1;
  }
}

bool has_path(const json& doc, std::string_view path) {
  const std::size_t dot = path.find('.');
  if (dot == std::string_view::npos) return doc.contains(std::string(path));
  const std::string head(path.substr(0, dot));
  return doc.contains(head) && doc[head].is_object() && doc[head].contains(std::string(path.substr(dot + 1)));
}

void set_path(json& doc, std::string_view path, const json& value) {
  const std::size_t dot = path.find('.');
  if (dot == std::string_view::npos) {
    doc[std::string(path)] = value;
  } else {
    doc[std::string(path.substr(0, dot))][std::string(path.substr(dot + 1))] = value;
  }
}

std::string kind_of(const json& d) {
  const json& k = at_path(d, "graph.kind");
  return k.is_string() ? k.get<std::string>() : "";
}
std::string model_of(const json& d) {
  const json& m = at_path(d, "prizes.model");
  return m.is_string() ? m.get<std::string>() : "";
}
std::string algo_of(const json& d) {
  const json& a = at_path(d, "algorithm");
  return a.is_string() ? a.get<std::string>() : "";
}

bool always(const json&) { return true; }
bool is_complete(const json& d) { return kind_of(d) == "complete"; }
bool is_unit_complete(const json& d) {
  return is_complete(d) && at_path(d, "graph.layout") == "unit";
}
bool has_graph_seed(const json& d) {
  const std::string k = kind_of(d);
  return k == "random_geometric" || k == "grid" || (k == "complete" && at_path(d, "graph.layout") == "euclidean");
}
bool has_nodes(const json& d) { return kind_of(d) == "complete" || kind_of(d) == "random_geometric"; }
bool is_star(const json& d) { return kind_of(d) == "star"; }
bool is_geometric(const json& d) { return kind_of(d) == "random_geometric"; }
bool is_grid(const json& d) { return kind_of(d) == "grid"; }
bool is_counterexample(const json& d) { return kind_of(d) == "counterexample"; }
bool is_file(const json& d) { return kind_of(d) == "file"; }
bool sampled_prizes(const json& d) { return !is_counterexample(d); }
bool is_uniform(const json& d) { return sampled_prizes(d) && model_of(d) == "uniform"; }
bool is_fixed(const json& d) { return sampled_prizes(d) && model_of(d) == "fixed"; }
bool is_zone(const json& d) { return sampled_prizes(d) && model_of(d) == "zone"; }
bool is_forl(const json& d) { return algo_of(d) == "forl"; }
bool is_baseline(const json& d) { return algo_of(d) == "baseline"; }
bool is_brute(const json& d) { return algo_of(d) == "brute-force"; }
bool uses_solver(const json& d) { return algo_of(d) != "baseline"; }

const std::vector<Field>& fields() {
  static const std::vector<Field> kFields = {
      {"name", nullptr, true, always, "Run name; also the default run directory."},
      {"description", "", false, always, "Free text, copied to the manifest."},
      {"algorithm", nullptr, true, always, "greedy-pne | brute-force | forl | baseline | topsolver."},
      {"seeds", json::array({0}), false, always, "Non-empty list of base seeds; each is an independent replicate."},
      {"instances", 1, false, always, "Prize/start draws per seed (evaluation draws for forl)."},
      {"team_size", 2, false, always, "Number of agents n."},
      {"starts", nullptr, false, always,
       "Start node per agent; null draws random starts that can reach a terminal within l_max."},
      {"threads", 1, false, always, "Workers for independent seeds and instances; 0 uses every core."},
      {"output", nullptr, false, always, "Run directory under the output root; null uses the name."},

      {"graph.kind", nullptr, true, always,
       "complete | star | random_geometric | grid | counterexample | file."},
      {"graph.nodes", 6, false, has_nodes, "Node count (complete, random_geometric)."},
      {"graph.layout", "unit", false, is_complete,
       "complete: unit (constant weight) or euclidean (random points in [0,10]^2)."},
      {"graph.weight", 1.0, false, is_unit_complete, "Edge weight of a unit complete graph."},
      {"graph.seed", 0, false, has_graph_seed, "Generator seed for random layouts; fixed across run seeds."},
      {"graph.leaf_weights", json::array({1.0, 1.0, 1.0, 1.0}), false, is_star,
       "star: hub-to-leaf weights; the hub is node 0."},
      {"graph.terminal_leaf", nullptr, false, is_star, "star: terminal leaf id; null picks the last leaf."},
      {"graph.radius", 8.0, false, is_geometric, "random_geometric: connection radius in a [-10,10]^2 box."},
      {"graph.terminals", 1, false, is_geometric, "random_geometric: number of terminal nodes."},
      {"graph.rows", 5, false, is_grid, "grid: rows."},
      {"graph.cols", 5, false, is_grid, "grid: columns."},
      {"graph.deadend_fraction", 0.3, false, is_grid, "grid: fraction of cells turned into dead ends."},
      {"graph.alpha", 0.5, false, is_counterexample,
       "counterexample: prize parameter in (0,1); prizes 1, 2+alpha, 2-alpha."},
      {"graph.path", nullptr, true, is_file, "file: graph file, relative to the scenario file."},

      {"prizes.model", "uniform", false, sampled_prizes,
       "uniform | fixed | zone | file (prize lines of the graph file). Not used by counterexample."},
      {"prizes.lo", 0.0, false, is_uniform, "uniform: lower bound."},
      {"prizes.hi", 10.0, false, is_uniform, "uniform: upper bound."},
      {"prizes.values", nullptr, true, is_fixed, "fixed: one prize per node; terminal entries are ignored."},
      {"prizes.center", 0, false, is_zone, "zone: node whose neighbourhood holds the largest means."},
      {"prizes.sd", 2.0, false, is_zone, "zone: per-node standard deviation."},
      {"prizes.max_mean", 10.0, false, is_zone, "zone: mean at the centre."},
      {"prizes.distinct", false, false, sampled_prizes, "Redraw an instance until all non-terminal prizes differ."},

      {"game.l_max", 3.0, false, always, "Travel budget per agent."},
      {"game.terminal_prize", 15.0, false, always, "Prize paid on reaching a terminal."},
      {"game.gamma", 1.0, false, always, "Discount factor used for learning."},
      {"game.prize_mode", "stationary", false, always, "stationary | dynamic (collected nodes are redrawn)."},
      {"game.terminal_conflict", "pay_all", false, always,
       "pay_all | senior_only: who is paid when agents reach a terminal together."},
      {"game.step_cap", 0, false, always, "Episode step limit; 0 derives it from the budget."},

      {"forl.conditioning", "ordinal", false, is_forl, "ordinal | global | global_state policy conditioning."},
      {"forl.h_stop", 0.05, false, is_forl, "Training ends once the freezing point drops below this."},
      {"forl.h0", nullptr, false, is_forl, "First freezing point; null uses 0.7 ln|V|."},
      {"forl.rounds", 10, false, is_forl, "Number of freezing levels at or above h_stop."},
      {"forl.t_max", 1000000, false, is_forl, "Environment step limit."},
      {"forl.batch_steps", 2500, false, is_forl, "Environment steps per learner update."},
      {"forl.learning_rate", 0.05, false, is_forl, "Adam step size."},

      {"baseline.kinds", json::array({"ps-or", "ps-gr"}), false, is_baseline,
       "Any of ipl-gs, ps-or, ps-gs, ps-gr."},
      {"baseline.t_max", 200000, false, is_baseline, "Environment step limit per trainer."},
      {"baseline.batch_steps", 2500, false, is_baseline, "Environment steps per learner update."},
      {"baseline.learning_rate", 0.05, false, is_baseline, "Adam step size."},
      {"baseline.eval_team_sizes", nullptr, false, is_baseline,
       "Team sizes to evaluate at; null uses team_size. Larger teams start at random nodes."},
      {"baseline.eval_episodes", 50, false, is_baseline, "Evaluation episodes per seed and team size."},
      {"baseline.eval_greedy", false, false, is_baseline, "Evaluate with argmax actions instead of sampling."},

      {"brute_force.alphas", nullptr, false, is_brute,
       "counterexample only: scan these alphas instead of graph.alpha."},
      {"brute_force.include_terminal", true, false, is_brute, "Count terminal prizes in payoffs."},
      {"brute_force.max_cells", 4000000, false, is_brute, "Refuse payoff matrices larger than this."},

      {"topsolver.allow_revisits", false, false, uses_solver, "Optimize over walks instead of simple routes."},
      {"topsolver.profile_budget", 1e8, false, uses_solver,
       "Refuse exact solves estimated above this many joint profiles; null disables the guard."},
      {"topsolver.time_limit", nullptr, false, uses_solver,
       "Seconds; when set, return the best solution found and an upper bound instead of proving optimality."},
  };
  return kFields;
}

const std::set<std::string>& sections() {
  static const std::set<std::string> kSections = {"graph",    "prizes",      "game",     "forl",
                                                  "baseline", "brute_force", "topsolver"};
  return kSections;
}

const Field* find_field(std::string_view path) {
  for (const Field& f : fields()) {
    if (f.path == path) return &f;
  }
  return nullptr;
}

void check_known_keys(const json& doc) {
  if (!doc.is_object()) throw ValidationError("", "scenario must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (sections().count(key)) {
      if (!value.is_object()) throw ValidationError(key, "must be an object");
      for (const auto& [sub, v] : value.items()) {
        if (!find_field(key + "." + sub)) throw ValidationError(key + "." + sub, "unknown key");
      }
    } else if (!find_field(key)) {
      throw ValidationError(key, "unknown key");
    }
  }
}

// --- typed access ----------------------------------------------------------

double number(const json& d, std::string_view path) {
  const json& v = at_path(d, path);
  if (!v.is_number()) throw ValidationError(std::string(path), "must be a number");
  return v.get<double>();
}

long integer(const json& d, std::string_view path, long lo, long hi = std::numeric_limits<long>::max()) {
  const json& v = at_path(d, path);
  if (!v.is_number_integer()) throw ValidationError(std::string(path), "must be an integer");
  const long x = v.get<long>();
  if (x < lo || x > hi) throw ValidationError(std::string(path), fmt::format("must lie in [{}, {}]", lo, hi));
  return x;
}

std::string text(const json& d, std::string_view path, std::initializer_list<std::string_view> allowed = {}) {
  const json& v = at_path(d, path);
  if (!v.is_string()) throw ValidationError(std::string(path), "must be a string");
  std::string s = v.get<std::string>();
  if (allowed.size() && std::find(allowed.begin(), allowed.end(), s) == allowed.end()) {
    std::string options;
    for (auto a : allowed) options += fmt::format("{}{}", options.empty() ? "" : ", ", a);
    throw ValidationError(std::string(path), fmt::format("'{}' is not one of {}", s, options));
  }
  return s;
}

bool flag(const json& d, std::string_view path) {
  const json& v = at_path(d, path);
  if (!v.is_boolean()) throw ValidationError(std::string(path), "must be true or false");
  return v.get<bool>();
}

std::vector<double> numbers(const json& d, std::string_view path) {
  const json& v = at_path(d, path);
  if (!v.is_array() || v.empty()) throw ValidationError(std::string(path), "must be a non-empty array of numbers");
  std::vector<double> out;
  for (const json& x : v) {
    if (!x.is_number()) throw ValidationError(std::string(path), "must be a non-empty array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

std::vector<long> integers(const json& d, std::string_view path, long lo) {
  const json& v = at_path(d, path);
  if (!v.is_array() || v.empty()) throw ValidationError(std::string(path), "must be a non-empty array of integers");
  std::vector<long> out;
  for (const json& x : v) {
    if (!x.is_number_integer() || x.get<long>() < lo) {
      throw ValidationError(std::string(path), fmt::format("must be a non-empty array of integers >= {}", lo));
    }
    out.push_back(x.get<long>());
  }
  return out;
}

void positive(const json& d, std::string_view path) {
  if (!(number(d, path) > 0.0)) throw ValidationError(std::string(path), "must be positive");
}

// Runs a builder and reports library argument errors against `path`.
template <typename F>
auto checked(std::string_view path, F&& f) {
  try {
    return f();
  } catch (const ValidationError&) {
    throw;
  } catch (const InvalidArgument& e) {
    throw ValidationError(std::string(path), e.what());
  }
}

}  // namespace

// --- building ----------------------------------------------------------------

std::shared_ptr<const Graph> build_graph(const json& d, std::optional<double> alpha) {
  const std::string kind = kind_of(d);
  return checked("graph", [&]() -> std::shared_ptr<const Graph> {
    if (kind == "complete") {
      const int n = static_cast<int>(integer(d, "graph.nodes", 2, 64));
      if (text(d, "graph.layout", {"unit", "euclidean"}) == "unit") {
        positive(d, "graph.weight");
        return std::make_shared<const Graph>(make_complete(n, constant_weight(number(d, "graph.weight"))));
      }
      Rng rng = make_rng(static_cast<std::uint64_t>(integer(d, "graph.seed", 0)));
      std::uniform_real_distribution<double> coord(0.0, 10.0);
      std::vector<Point> pts(static_cast<std::size_t>(n));
      for (auto& p : pts) {
        p.x = coord(rng);
        p.y = coord(rng);
      }
      return std::make_shared<const Graph>(make_complete(std::move(pts)));
    }
    if (kind == "star") {
      const std::vector<double> w = numbers(d, "graph.leaf_weights");
      std::optional<NodeId> terminal;
      if (!at_path(d, "graph.terminal_leaf").is_null()) {
        terminal = static_cast<NodeId>(integer(d, "graph.terminal_leaf", 1, static_cast<long>(w.size())));
      }
      return std::make_shared<const Graph>(make_star(static_cast<int>(w.size()), w, terminal));
    }
    if (kind == "random_geometric") {
      return std::make_shared<const Graph>(make_random_geometric(
          static_cast<int>(integer(d, "graph.nodes", 2, 4096)), number(d, "graph.radius"),
          static_cast<int>(integer(d, "graph.terminals", 1)), static_cast<std::uint64_t>(integer(d, "graph.seed", 0))));
    }
    if (kind == "grid") {
      return std::make_shared<const Graph>(make_grid_with_deadends(
          static_cast<int>(integer(d, "graph.rows", 1, 256)), static_cast<int>(integer(d, "graph.cols", 1, 256)),
          number(d, "graph.deadend_fraction"), static_cast<std::uint64_t>(integer(d, "graph.seed", 0))));
    }
    if (kind == "counterexample") {
      return std::make_shared<const Graph>(make_counterexample(alpha.value_or(number(d, "graph.alpha"))).graph);
    }
    return std::make_shared<const Graph>(load_graph_document(text(d, "graph.path")).graph);
  });
}

PrizeModel build_prizes(const json& d, const Graph& g, std::optional<double> alpha) {
  const double terminal = number(d, "game.terminal_prize");
  const PrizeMode mode = prize_mode_from_string(text(d, "game.prize_mode", {"stationary", "dynamic"}));
  if (is_counterexample(d)) {
    return PrizeModel::fixed(g, make_counterexample(alpha.value_or(number(d, "graph.alpha"))).prizes, terminal, mode);
  }
  const std::string model = text(d, "prizes.model", {"uniform", "fixed", "zone", "file"});
  return checked("prizes", [&]() -> PrizeModel {
    if (model == "uniform") {
      if (!(number(d, "prizes.lo") <= number(d, "prizes.hi")) || number(d, "prizes.lo") < 0.0) {
        throw ValidationError("prizes", "need 0 <= lo <= hi");
      }
      return PrizeModel::uniform(g, number(d, "prizes.lo"), number(d, "prizes.hi"), terminal, mode);
    }
    if (model == "fixed") {
      const std::vector<double> v = numbers(d, "prizes.values");
      if (v.size() != static_cast<std::size_t>(g.node_count())) {
        throw ValidationError("prizes.values", fmt::format("has {} entries for {} nodes", v.size(), g.node_count()));
      }
      return PrizeModel::fixed(g, v, terminal, mode);
    }
    if (model == "zone") {
      return make_zone_model(g, static_cast<NodeId>(integer(d, "prizes.center", 0, g.node_count() - 1)),
                             number(d, "prizes.sd"), terminal, mode, number(d, "prizes.max_mean"));
    }
    if (!is_file(d)) throw ValidationError("prizes.model", "'file' needs graph.kind 'file'");
    const GraphDocument doc = load_graph_document(text(d, "graph.path"));
    if (doc.prizes.empty()) throw ValidationError("prizes.model", "graph file has no prize lines");
    return PrizeModel::from_prize_lines(g, doc.prizes, terminal, mode);
  });
}

GameConfig build_config(const json& d) {
  GameConfig c;
  c.l_max = number(d, "game.l_max");
  c.terminal_prize = number(d, "game.terminal_prize");
  c.gamma = number(d, "game.gamma");
  c.prize_mode = prize_mode_from_string(text(d, "game.prize_mode", {"stationary", "dynamic"}));
  c.terminal_conflict = terminal_conflict_from_string(text(d, "game.terminal_conflict", {"pay_all", "senior_only"}));
  c.step_cap = static_cast<int>(integer(d, "game.step_cap", 0));
  checked("game", [&] {
    c.validate();
    return 0;
  });
  return c;
}

std::shared_ptr<const Game> build_game(const json& d, std::optional<double> alpha) {
  auto g = build_graph(d, alpha);
  PrizeModel model = build_prizes(d, *g, alpha);
  const GameConfig cfg = build_config(d);
  return checked("game", [&] { return std::make_shared<const Game>(g, std::move(model), cfg); });
}

std::optional<std::vector<NodeId>> scenario_starts(const json& d) {
  const json& s = at_path(d, "starts");
  if (s.is_null()) return std::nullopt;
  std::vector<NodeId> out;
  for (long x : integers(d, "starts", 0)) out.push_back(static_cast<NodeId>(x));
  return out;
}

std::vector<double> scenario_alphas(const json& d) {
  if (is_brute(d) && !at_path(d, "brute_force.alphas").is_null()) return numbers(d, "brute_force.alphas");
  if (is_counterexample(d)) return {number(d, "graph.alpha")};
  return {};
}

// --- resolution ----------------------------------------------------------------

Scenario resolve_scenario(const json& input, const std::filesystem::path& base_dir) {
  const json& doc = (input.is_object() && input.contains("scenario") && input.contains("config_hash"))
                        ? input["scenario"]
                        : input;
  check_known_keys(doc);

  json r = json::object();
  for (const Field& f : fields()) {
    const bool present = has_path(doc, f.path);
    if (!f.when(r)) {
      if (present) throw ValidationError(std::string(f.path), "does not apply to this scenario");
      continue;
    }
    if (present) {
      set_path(r, f.path, at_path(doc, f.path));
    } else if (f.required) {
      throw ValidationError(std::string(f.path), "is required");
    } else {
      set_path(r, f.path, f.def);
    }
  }
  if (is_file(r)) {
    std::filesystem::path p = text(r, "graph.path");
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    if (!std::filesystem::exists(p)) throw ValidationError("graph.path", fmt::format("no such file '{}'", p.string()));
    set_path(r, "graph.path", std::filesystem::absolute(p).lexically_normal().string());
  }

  Scenario s;
  s.name = text(r, "name");
  if (s.name.empty() || s.name.find_first_of("/\\") != std::string::npos || s.name == "." || s.name == "..") {
    throw ValidationError("name", "must be a non-empty plain file name");
  }
  text(r, "description");
  s.algorithm = text(r, "algorithm", {"greedy-pne", "brute-force", "forl", "baseline", "topsolver"});
  for (long x : integers(r, "seeds", 0)) s.seeds.push_back(static_cast<std::uint64_t>(x));
  s.instances = static_cast<int>(integer(r, "instances", 1, 1'000'000));
  s.team_size = static_cast<int>(integer(r, "team_size", 1, 64));
  s.threads = static_cast<int>(integer(r, "threads", 0, 1024));
  s.output = at_path(r, "output").is_null() ? s.name : text(r, "output");
  if (s.output.empty() || std::filesystem::path(s.output).is_absolute()) {
    throw ValidationError("output", "must be a relative path");
  }
  text(r, "graph.kind", {"complete", "star", "random_geometric", "grid", "counterexample", "file"});

  // Build everything once so bad parameters surface now.
  const std::vector<double> alphas = scenario_alphas(r);
  std::shared_ptr<const Game> game;
  for (double a : alphas.empty() ? std::vector<double>{0.5} : alphas) {
    game = build_game(r, alphas.empty() ? std::nullopt : std::optional<double>(a));
  }
  const Graph& g = game->graph();
  if (sampled_prizes(r)) flag(r, "prizes.distinct");
  if (const auto starts = scenario_starts(r)) {
    if (static_cast<int>(starts->size()) != s.team_size) {
      throw ValidationError("starts", fmt::format("has {} entries for team_size {}", starts->size(), s.team_size));
    }
    for (NodeId v : *starts) {
      if (v >= g.node_count()) throw ValidationError("starts", fmt::format("node {} is out of range", v));
    }
  } else if (g.non_terminals().empty()) {
    throw ValidationError("graph", "has no non-terminal start nodes");
  }

  const bool stationary = build_config(r).prize_mode == PrizeMode::kStationary;
  if (s.algorithm == "greedy-pne") {
    if (g.kind() != GraphKind::kComplete && g.kind() != GraphKind::kStar) {
      throw ValidationError("graph.kind", "greedy-pne needs a complete or star graph");
    }
    if (!stationary) throw ValidationError("game.prize_mode", "greedy-pne needs stationary prizes");
  }
  if (s.algorithm == "brute-force") {
    if (s.team_size > 4) throw ValidationError("team_size", "brute-force supports at most 4 agents");
    if (!stationary) throw ValidationError("game.prize_mode", "brute-force needs stationary prizes");
    if (!at_path(r, "brute_force.alphas").is_null() && !is_counterexample(r)) {
      throw ValidationError("brute_force.alphas", "needs graph.kind 'counterexample'");
    }
    flag(r, "brute_force.include_terminal");
    integer(r, "brute_force.max_cells", 1);
  }
  if (s.algorithm == "topsolver" && !stationary) {
    throw ValidationError("game.prize_mode", "topsolver needs stationary prizes");
  }
  if (uses_solver(r)) {
    flag(r, "topsolver.allow_revisits");
    if (!at_path(r, "topsolver.profile_budget").is_null()) positive(r, "topsolver.profile_budget");
    if (!at_path(r, "topsolver.time_limit").is_null()) positive(r, "topsolver.time_limit");
  }
  if (s.algorithm == "forl") {
    conditioning_from_string(text(r, "forl.conditioning", {"ordinal", "global", "global_state"}));
    integer(r, "forl.rounds", 1, 100000);
    integer(r, "forl.t_max", 1);
    integer(r, "forl.batch_steps", 1);
    positive(r, "forl.learning_rate");
    const std::optional<double> h0 =
        at_path(r, "forl.h0").is_null() ? std::nullopt : std::optional<double>(number(r, "forl.h0"));
    checked("forl", [&] {
      EntropySchedule::standard(g.node_count(), number(r, "forl.h_stop"), h0,
                                static_cast<int>(integer(r, "forl.rounds", 1)))
          .validate();
      return 0;
    });
  }
  if (s.algorithm == "baseline") {
    const json& kinds = at_path(r, "baseline.kinds");
    if (!kinds.is_array() || kinds.empty()) throw ValidationError("baseline.kinds", "must be a non-empty array");
    for (const json& k : kinds) {
      if (!k.is_string()) throw ValidationError("baseline.kinds", "entries must be strings");
      checked("baseline.kinds", [&] { return baseline_from_string(k.get<std::string>()); });
    }
    integer(r, "baseline.t_max", 1);
    integer(r, "baseline.batch_steps", 1);
    positive(r, "baseline.learning_rate");
    if (!at_path(r, "baseline.eval_team_sizes").is_null()) integers(r, "baseline.eval_team_sizes", 1);
    integer(r, "baseline.eval_episodes", 1);
    flag(r, "baseline.eval_greedy");
  }

  s.resolved = std::move(r);
  return s;
}

Scenario load_scenario(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ValidationError("", fmt::format("cannot open scenario '{}'", file.string()));
  json doc;
  try {
    doc = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ValidationError("", fmt::format("{}: {}", file.string(), e.what()));
  }
  return resolve_scenario(doc, file.parent_path());
}

std::string explain_config() {
  std::ostringstream out;
  out << "Scenario files are JSON objects (comments allowed). Keys, defaults and meaning;\n"
         "keys that do not apply to a scenario are rejected.\n\n";
  for (const Field& f : fields()) {
    const std::string def = f.required ? "(required)" : f.def.dump();
    out << fmt::format("  {:<28} {:<22} {}\n", f.path, def, f.doc);
  }
  out << "\nOutput root: --output-root, else $SPCG_OUTPUT_ROOT, else ./runs.\n";
  return out.str();
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

// 15 and 15.0 name the same setting.
json numbers_as_double(const json& v) {
  if (v.is_number_float()) return v;
  if (v.is_number()) {
    constexpr double kExact = 9007199254740992.0;  // 2^53
    const double d = v.get<double>();
    return std::abs(d) <= kExact ? json(d) : v;
  }
  if (v.is_array() || v.is_object()) {
    json out = v;
    for (auto it = out.begin(); it != out.end(); ++it) *it = numbers_as_double(*it);
    return out;
  }
  return v;
}

}  // namespace

std::string config_hash(const Scenario& scenario) {
  return fmt::format("{:016x}", fnv1a64(numbers_as_double(scenario.resolved).dump()));
}

}  // namespace spcg::cli
