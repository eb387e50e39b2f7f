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

#include <cstdlib>
#include <ostream>
#include <string>

#include "CLI11.hpp"
#include "spcg/cli.hpp"
#include "spcg/graph.hpp"

namespace spcg::cli {
namespace {

constexpr int kOk = 0;
constexpr int kRuntime = 1;
constexpr int kValidation = 2;

int report(std::ostream& err, int code, const std::string& kind, const std::string& message,
           const json& extra = json::object()) {
  json rec = {{"status", "error"}, {"kind", kind}, {"message", message}};
  rec.update(extra);
  err << rec.dump() << '\n';
  return code;
}

std::filesystem::path output_root(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("SPCG_OUTPUT_ROOT"); env && *env) return env;
  return "runs";
}

}  // namespace

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stochastic prize-collecting games on graphs: experiments and tools.", "spcg"};
  app.require_subcommand(0, 1);
  bool explain = false;
  app.add_flag("--explain-config", explain, "Print every scenario key with its default");

  std::string scenario_file;
  std::string root;
  int threads = -1;
  auto* run = app.add_subcommand("run", "Run a scenario (or re-run a manifest) and write its artifacts");
  run->add_option("scenario", scenario_file, "Scenario or manifest JSON file")->required();
  run->add_option("--output-root", root, "Directory for run directories (default $SPCG_OUTPUT_ROOT or ./runs)");
  run->add_option("--threads", threads, "Override the scenario's worker count (0 = every core)")
      ->check(CLI::NonNegativeNumber);

  auto* validate = app.add_subcommand("validate", "Check a scenario and print it with defaults filled in");
  validate->add_option("scenario", scenario_file, "Scenario JSON file")->required();

  std::string run_dir;
  std::string which;
  auto* plot = app.add_subcommand("plotdata", "Write long-form CSV for plotting from a run directory");
  plot->add_option("run_dir", run_dir, "Run directory")->required();
  plot->add_option("which", which, "convergence | stage_rewards | poa | scaling")
      ->required()
      ->check(CLI::IsMember({"convergence", "stage_rewards", "poa", "scaling"}));

  auto* explain_cmd = app.add_subcommand("explain-config", "Print every scenario key with its default");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    return report(err, kValidation, "usage", e.what());
  }

  try {
    if (explain || explain_cmd->parsed()) {
      out << explain_config();
      return kOk;
    }
    if (run->parsed()) {
      const Scenario s = load_scenario(scenario_file);
      const RunReport r =
          run_scenario(s, output_root(root), threads >= 0 ? std::optional<int>(threads) : std::nullopt);
      out << json{{"status", "ok"},
                  {"run_dir", r.run_dir.string()},
                  {"config_hash", config_hash(s)},
                  {"files", r.files}}
                 .dump()
          << '\n';
      return kOk;
    }
    if (validate->parsed()) {
      const Scenario s = load_scenario(scenario_file);
      out << s.resolved.dump(2) << '\n';
      return kOk;
    }
    if (plot->parsed()) {
      out << emit_plotdata(run_dir, which).string() << '\n';
      return kOk;
    }
    out << app.help();
    return kValidation;
  } catch (const ValidationError& e) {
    return report(err, kValidation, "validation", e.what(), {{"path", e.path()}});
  } catch (const ParseError& e) {
    return report(err, kValidation, "validation", e.what(), {{"line", e.line()}});
  } catch (const ArtifactError& e) {
    return report(err, kRuntime, "missing_artifact", e.what());
  } catch (const std::exception& e) {
    return report(err, kRuntime, "runtime", e.what());
  }
}

}  // namespace spcg::cli
