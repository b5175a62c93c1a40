/*
 * Copyright 2026 the ppminspect authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "mine.hpp"

#include <algorithm>
#include <sstream>

namespace ppmi {

ProcessGraph discover_dfg(const EventLog& log) {
  if (log.traces.empty()) fail(ErrorCode::kInvalidArgument, "discover_dfg: empty log");

  ProcessGraph graph;
  for (const Trace& trace : log.traces) {
    std::set<std::string> seen_nodes;
    std::set<std::pair<std::string, std::string>> seen_edges;
    for (std::size_t i = 0; i < trace.events.size(); ++i) {
      const std::string& act = trace.events[i].activity;
      graph.nodes[act].total_frequency += 1;
      seen_nodes.insert(act);
      if (i + 1 < trace.events.size()) {
        auto edge = std::make_pair(act, trace.events[i + 1].activity);
        graph.edges[edge].total_frequency += 1;
        seen_edges.insert(edge);
      }
    }
    for (const auto& act : seen_nodes) graph.nodes[act].case_frequency += 1;
    for (const auto& edge : seen_edges) graph.edges[edge].case_frequency += 1;
    graph.start_activities.insert(trace.events.front().activity);
    graph.end_activities.insert(trace.events.back().activity);
  }
  return graph;
}

std::optional<int> min_prefix_index(const EventLog& log, const std::string& activity) {
  std::optional<int> best;
  for (const Trace& trace : log.traces) {
    for (int i = 0; i < trace.length(); ++i) {
      if (trace.events[i].activity == activity) {
        if (!best || i + 1 < *best) best = i + 1;
        break;  // later occurrences in this trace cannot be smaller
      }
    }
  }
  return best;
}

namespace {

// 0-based index of the first occurrence, or -1.
int first_occurrence(const Trace& trace, const std::string& activity) {
  for (int i = 0; i < trace.length(); ++i) {
    if (trace.events[i].activity == activity) return i;
  }
  return -1;
}

}  // namespace

double eventually_follows_ratio(const EventLog& log, const std::string& a,
                                const std::string& b) {
  std::size_t with_a = 0, followed = 0;
  for (const Trace& trace : log.traces) {
    int first_a = first_occurrence(trace, a);
    if (first_a < 0) continue;
    ++with_a;
    for (int i = first_a + 1; i < trace.length(); ++i) {
      if (trace.events[i].activity == b) {
        ++followed;
        break;
      }
    }
  }
  if (with_a == 0) {
    fail(ErrorCode::kData, "eventually_follows_ratio: activity '" + a +
                               "' does not occur in the log");
  }
  return static_cast<double>(followed) / static_cast<double>(with_a);
}

double precedes_ratio(const EventLog& log, const std::string& a, const std::string& b) {
  std::size_t with_b = 0, preceded = 0;
  for (const Trace& trace : log.traces) {
    int first_b = first_occurrence(trace, b);
    if (first_b < 0) continue;
    ++with_b;
    for (int i = 0; i < first_b; ++i) {
      if (trace.events[i].activity == a) {
        ++preceded;
        break;
      }
    }
  }
  if (with_b == 0) {
    fail(ErrorCode::kData,
         "precedes_ratio: activity '" + b + "' does not occur in the log");
  }
  return static_cast<double>(preceded) / static_cast<double>(with_b);
}

std::optional<Comparison> comparison_from_name(std::string_view name) {
  if (name == "==" || name == "eq") return Comparison::kEq;
  if (name == "!=" || name == "ne") return Comparison::kNe;
  if (name == "<" || name == "lt") return Comparison::kLt;
  if (name == "<=" || name == "le") return Comparison::kLe;
  if (name == ">" || name == "gt") return Comparison::kGt;
  if (name == ">=" || name == "ge") return Comparison::kGe;
  return std::nullopt;
}

const char* comparison_name(Comparison cmp) {
  switch (cmp) {
    case Comparison::kEq: return "==";
    case Comparison::kNe: return "!=";
    case Comparison::kLt: return "<";
    case Comparison::kLe: return "<=";
    case Comparison::kGt: return ">";
    case Comparison::kGe: return ">=";
  }
  return "==";
}

namespace {

bool apply_comparison(double lhs, Comparison cmp, double rhs) {
  switch (cmp) {
    case Comparison::kEq: return lhs == rhs;
    case Comparison::kNe: return lhs != rhs;
    case Comparison::kLt: return lhs < rhs;
    case Comparison::kLe: return lhs <= rhs;
    case Comparison::kGt: return lhs > rhs;
    case Comparison::kGe: return lhs >= rhs;
  }
  return false;
}

bool event_matches(const Trace& trace, const Event& event,
                   const EventCondition& condition) {
  auto it = event.attrs.find(condition.attribute);
  if (it != event.attrs.end()) return it->second == condition.value;
  auto st = trace.static_attrs.find(condition.attribute);
  return st != trace.static_attrs.end() && st->second == condition.value;
}

}  // namespace

double conditional_event_stat(const EventLog& log, const EventCondition& condition,
                              const std::string& numeric_attr, Comparison cmp,
                              double threshold) {
  std::size_t matching = 0, satisfied = 0;
  for (const Trace& trace : log.traces) {
    for (int i = 0; i < trace.length(); ++i) {
      const Event& event = trace.events[i];
      if (!event_matches(trace, event, condition)) continue;
      double value = 0.0;
      if (numeric_attr == "elapsed_time") {
        value = static_cast<double>(event.timestamp_ms - trace.start_ms()) / 1000.0;
      } else {
        auto it = event.attrs.find(numeric_attr);
        if (it == event.attrs.end() || !parse_finite_double(it->second, &value)) {
          continue;  // no numeric observation on this event
        }
      }
      ++matching;
      if (apply_comparison(value, cmp, threshold)) ++satisfied;
    }
  }
  if (matching == 0) {
    fail(ErrorCode::kData, "conditional_event_stat: no events match " +
                               condition.attribute + "=" + condition.value);
  }
  return static_cast<double>(satisfied) / static_cast<double>(matching);
}

namespace {

std::string dot_escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

}  // namespace

std::string dfg_to_dot(const ProcessGraph& graph) {
  std::ostringstream out;
  out << "digraph dfg {\n";
  out << "  rankdir=TB;\n";
  out << "  node [shape=box];\n";
  for (const auto& [activity, stats] : graph.nodes) {
    out << "  \"" << dot_escape(activity) << "\" [label=\"" << dot_escape(activity)
        << "\\n" << stats.case_frequency << "\"];\n";
  }
  for (const auto& [edge, stats] : graph.edges) {
    out << "  \"" << dot_escape(edge.first) << "\" -> \"" << dot_escape(edge.second)
        << "\" [label=\"" << stats.total_frequency << "\"];\n";
  }
  out << "}\n";
  return out.str();
}

nlohmann::json dfg_to_json(const ProcessGraph& graph) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& [activity, stats] : graph.nodes) {
    nodes.push_back({{"activity", activity},
                     {"case_frequency", stats.case_frequency},
                     {"total_frequency", stats.total_frequency}});
  }
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& [edge, stats] : graph.edges) {
    edges.push_back({{"from", edge.first},
                     {"to", edge.second},
                     {"case_frequency", stats.case_frequency},
                     {"total_frequency", stats.total_frequency}});
  }
  return nlohmann::json{
      {"nodes", nodes},
      {"edges", edges},
      {"start_activities", graph.start_activities},
      {"end_activities", graph.end_activities}};
}

}  // namespace ppmi
