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
#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>

#include "json.hpp"

#include "eventlog.hpp"

namespace ppmi {

struct NodeStats {
  std::size_t case_frequency = 0;   // cases containing the activity
  std::size_t total_frequency = 0;  // events with the activity
};

struct EdgeStats {
  std::size_t case_frequency = 0;   // cases with >= 1 direct succession
  std::size_t total_frequency = 0;  // direct successions overall
};

// Directly-follows graph with case/total frequency annotations.
struct ProcessGraph {
  std::map<std::string, NodeStats> nodes;
  std::map<std::pair<std::string, std::string>, EdgeStats> edges;
  std::set<std::string> start_activities;
  std::set<std::string> end_activities;
};

ProcessGraph discover_dfg(const EventLog& log);

// Minimum 1-based event position at which the activity occurs anywhere in
// the log; nullopt when it never occurs.
std::optional<int> min_prefix_index(const EventLog& log, const std::string& activity);

// Fraction of cases containing `a` in which `b` occurs strictly after the
// first occurrence of `a`.
double eventually_follows_ratio(const EventLog& log, const std::string& a,
                                const std::string& b);

// Fraction of cases containing `b` in which `a` occurs strictly before the
// first occurrence of `b`.
double precedes_ratio(const EventLog& log, const std::string& a, const std::string& b);

struct EventCondition {
  std::string attribute;  // event or hoisted static attribute
  std::string value;
};

enum class Comparison { kEq, kNe, kLt, kLe, kGt, kGe };

std::optional<Comparison> comparison_from_name(std::string_view name);
const char* comparison_name(Comparison cmp);

// Fraction of condition-matching events whose numeric attribute satisfies the
// predicate. `numeric_attr` may name the derived "elapsed_time" (seconds from
// the case's first event).
double conditional_event_stat(const EventLog& log, const EventCondition& condition,
                              const std::string& numeric_attr, Comparison cmp,
                              double threshold);

// DOT rendering; node labels carry the case frequency under the name.
std::string dfg_to_dot(const ProcessGraph& graph);

nlohmann::json dfg_to_json(const ProcessGraph& graph);

}  // namespace ppmi
