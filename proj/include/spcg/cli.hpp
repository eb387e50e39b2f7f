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

#ifndef SPCG_CLI_HPP_
#define SPCG_CLI_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "spcg/common.hpp"

namespace spcg::cli {

using json = nlohmann::json;

// A scenario that fails to parse or validate. `path` names the offending
// key ("graph.radius"), empty for whole-file problems.
class ValidationError : public InvalidArgument {
 public:
  ValidationError(std::string path, const std::string& what);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

// Run artifacts are missing or unreadable.
class ArtifactError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A validated scenario. `resolved` holds every key with defaults filled in
// and is what the config hash covers.
struct Scenario {
  json resolved;
  std::string name;
  std::string algorithm;
  std::vector<std::uint64_t> seeds;
  int instances = 1;
  int team_size = 2;
  int threads = 1;
  std::string output;
};

// Accepts a scenario object, or a run manifest holding one under "scenario".
// Relative graph file paths resolve against `base_dir`.
Scenario resolve_scenario(const json& doc, const std::filesystem::path& base_dir = {});
Scenario load_scenario(const std::filesystem::path& file);

// Every scenario key with its default and meaning.
std::string explain_config();

std::uint64_t fnv1a64(std::string_view bytes);
std::string config_hash(const Scenario& scenario);

struct RunReport {
  std::filesystem::path run_dir;
  std::vector<std::string> files;  // relative to run_dir, in write order
};

// Runs the selected pipeline and writes CSVs plus manifest.json into
// output_root / scenario.output. A previous run in that directory (one
// holding a manifest) is replaced; any other non-empty directory is refused.
// `threads` overrides the scenario's worker count when set.
RunReport run_scenario(const Scenario& scenario, const std::filesystem::path& output_root,
                       std::optional<int> threads = std::nullopt);

inline constexpr std::string_view kPlotKinds[] = {"convergence", "stage_rewards", "poa", "scaling"};

// Writes run_dir/plotdata/<which>.csv in long form and returns its path.
std::filesystem::path emit_plotdata(const std::filesystem::path& run_dir, std::string_view which);

// The command-line front end; returns the process exit code (0 ok,
// 1 runtime failure, 2 validation failure). Errors go to `err` as one JSON
// record.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace spcg::cli

#endif  // SPCG_CLI_HPP_
