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

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "spcg/graph.hpp"

namespace spcg {
namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<std::string> tokens(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

double parse_double(const std::string& tok, int line) {
  double value = 0.0;
  const char* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, value);
  if (ec != std::errc() || ptr != end) throw ParseError(line, fmt::format("expected a number, got '{}'", tok));
  return value;
}

int parse_int(const std::string& tok, int line) {
  int value = 0;
  const char* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, value);
  if (ec != std::errc() || ptr != end) throw ParseError(line, fmt::format("expected an integer, got '{}'", tok));
  return value;
}

}  // namespace

ParseError::ParseError(int line, const std::string& what)
    : InvalidArgument(fmt::format("line {}: {}", line, what)), line_(line) {}

void write_graph(std::ostream& out, const Graph& graph, std::span<const PrizeLine> prizes) {
  std::vector<std::string> terms;
  for (NodeId t : graph.terminals()) terms.push_back(std::to_string(t));
  fmt::print(out, "nodes {} terminals {}\n", graph.node_count(), fmt::join(terms, ","));
  if (graph.kind() != GraphKind::kExplicit) fmt::print(out, "kind {}\n", to_string(graph.kind()));
  if (graph.staging()) fmt::print(out, "staging {}\n", *graph.staging());
  if (graph.has_coordinates()) {
    for (NodeId u = 0; u < graph.node_count(); ++u) {
      const Point& p = graph.coordinates()[static_cast<std::size_t>(u)];
      fmt::print(out, "coord {} {} {}\n", u, p.x, p.y);
    }
  }
  for (const Edge& e : graph.edges()) fmt::print(out, "{} {} {}\n", e.u, e.v, e.weight);
  for (const PrizeLine& p : prizes) {
    if (p.sd) {
      fmt::print(out, "prize {} {} {}\n", p.node, p.mean, *p.sd);
    } else {
      fmt::print(out, "prize {} {}\n", p.node, p.mean);
    }
  }
}

GraphDocument parse_graph(std::istream& in) {
  std::optional<int> node_count;
  std::vector<NodeId> terminals;
  GraphKind kind = GraphKind::kExplicit;
  std::optional<NodeId> staging;
  std::vector<std::pair<NodeId, Point>> coords;
  std::vector<Edge> edges;
  std::vector<PrizeLine> prizes;

  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const auto tok = tokens(raw);
    if (tok.empty()) continue;

    if (!node_count) {
      if (tok.size() != 4 || tok[0] != "nodes" || tok[2] != "terminals") {
        throw ParseError(line_no, "expected header 'nodes N terminals t1,t2,...'");
      }
      node_count = parse_int(tok[1], line_no);
      for (const auto& t : split(tok[3], ',')) terminals.push_back(parse_int(t, line_no));
      continue;
    }

    if (tok[0] == "kind") {
      if (tok.size() != 2) throw ParseError(line_no, "expected 'kind <name>'");
      try {
        kind = graph_kind_from_string(tok[1]);
      } catch (const GraphError& e) {
        throw ParseError(line_no, e.what());
      }
    } else if (tok[0] == "staging") {
      if (tok.size() != 2) throw ParseError(line_no, "expected 'staging <node>'");
      staging = parse_int(tok[1], line_no);
    } else if (tok[0] == "coord") {
      if (tok.size() != 4) throw ParseError(line_no, "expected 'coord <node> <x> <y>'");
      coords.push_back({parse_int(tok[1], line_no),
                        {parse_double(tok[2], line_no), parse_double(tok[3], line_no)}});
    } else if (tok[0] == "prize") {
      if (tok.size() != 3 && tok.size() != 4) throw ParseError(line_no, "expected 'prize <node> <mean> [sd]'");
      PrizeLine p{parse_int(tok[1], line_no), parse_double(tok[2], line_no), std::nullopt};
      if (tok.size() == 4) p.sd = parse_double(tok[3], line_no);
      if (p.node < 0 || p.node >= *node_count) throw ParseError(line_no, fmt::format("prize for unknown node {}", p.node));
      prizes.push_back(p);
    } else {
      if (tok.size() != 3) throw ParseError(line_no, "expected edge line 'u v weight'");
      edges.push_back({parse_int(tok[0], line_no), parse_int(tok[1], line_no), parse_double(tok[2], line_no)});
    }
  }
  if (!node_count) throw ParseError(line_no, "missing 'nodes' header");

  std::vector<Point> points;
  if (!coords.empty()) {
    if (coords.size() != static_cast<std::size_t>(*node_count)) {
      throw GraphError(fmt::format("expected coordinates for all {} nodes, got {}", *node_count, coords.size()));
    }
    points.resize(coords.size());
    std::vector<bool> seen(coords.size(), false);
    for (const auto& [u, p] : coords) {
      if (u < 0 || u >= *node_count || seen[static_cast<std::size_t>(u)]) {
        throw GraphError(fmt::format("bad or repeated coordinate for node {}", u));
      }
      seen[static_cast<std::size_t>(u)] = true;
      points[static_cast<std::size_t>(u)] = p;
    }
  }
  return GraphDocument{Graph(*node_count, std::move(edges), std::move(terminals), kind, staging, std::move(points)),
                       std::move(prizes)};
}

void save_graph(const Graph& graph, const std::string& path, std::span<const PrizeLine> prizes) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(fmt::format("cannot open '{}' for writing", path));
  write_graph(out, graph, prizes);
}

GraphDocument load_graph_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot open '{}'", path));
  return parse_graph(in);
}

Graph load_graph(const std::string& path) { return load_graph_document(path).graph; }

}  // namespace spcg
