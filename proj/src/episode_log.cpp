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

#include <istream>
#include <ostream>
#include <string>

#include "json.hpp"
#include "spcg/engine.hpp"

namespace spcg {

using nlohmann::json;

void write_episode_log(std::ostream& out, const EpisodeLog& log) {
  out << json{{"type", "episode"}, {"starts", log.starts}, {"initial_prizes", log.initial_prizes}}.dump() << '\n';
  for (const StepRecord& s : log.steps) {
    json rec{{"type", "step"},    {"t", s.t},           {"actions", s.actions},
             {"nodes", s.nodes},  {"rewards", s.rewards}, {"budgets", s.budgets},
             {"active", s.active}, {"prize_digest", s.prize_digest}};
    out << rec.dump() << '\n';
  }
  json summary{{"type", "summary"},
               {"returns", log.returns},
               {"discounted_returns", log.discounted_returns},
               {"prize_returns", log.prize_returns},
               {"trajectories", log.trajectories},
               {"conflicts", log.conflicts},
               {"truncated", log.truncated}};
  out << summary.dump() << '\n';
}

EpisodeLog read_episode_log(std::istream& in) {
  EpisodeLog log;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(line_no, e.what());
    }
    const auto type = rec.at("type").get<std::string>();
    if (type == "episode") {
      log.starts = rec.at("starts").get<std::vector<NodeId>>();
      log.initial_prizes = rec.at("initial_prizes").get<PrizeVector>();
    } else if (type == "step") {
      StepRecord s;
      s.t = rec.at("t").get<int>();
      s.actions = rec.at("actions").get<std::vector<NodeId>>();
      s.nodes = rec.at("nodes").get<std::vector<NodeId>>();
      s.rewards = rec.at("rewards").get<std::vector<double>>();
      s.budgets = rec.at("budgets").get<std::vector<double>>();
      s.active = rec.at("active").get<std::vector<bool>>();
      s.prize_digest = rec.at("prize_digest").get<std::string>();
      log.steps.push_back(std::move(s));
    } else if (type == "summary") {
      log.returns = rec.at("returns").get<std::vector<double>>();
      log.discounted_returns = rec.at("discounted_returns").get<std::vector<double>>();
      log.prize_returns = rec.at("prize_returns").get<std::vector<double>>();
      log.trajectories = rec.at("trajectories").get<std::vector<std::vector<NodeId>>>();
      log.conflicts = rec.at("conflicts").get<int>();
      log.truncated = rec.at("truncated").get<bool>();
    } else {
      throw ParseError(line_no, "unknown record type '" + type + "'");
    }
  }
  return log;
}

}  // namespace spcg
