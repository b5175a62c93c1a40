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
#include "eventlog.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

namespace ppmi {

const Trace* EventLog::find_trace(const std::string& case_id) const {
  for (const auto& t : traces) {
    if (t.case_id == case_id) return &t;
  }
  return nullptr;
}

LabelSpec LabelSpec::contains(std::string activity) {
  LabelSpec spec;
  spec.kind = Kind::kContainsActivity;
  spec.activity_a = std::move(activity);
  return spec;
}

LabelSpec LabelSpec::eventually_follows(std::string a, std::string b) {
  LabelSpec spec;
  spec.kind = Kind::kEventuallyFollows;
  spec.activity_a = std::move(a);
  spec.activity_b = std::move(b);
  return spec;
}

std::vector<std::string> LabelSpec::referenced_activities() const {
  if (kind == Kind::kContainsActivity) return {activity_a};
  return {activity_a, activity_b};
}

AttributeSchema infer_schema(std::span<const Event> events) {
  if (events.empty()) fail(ErrorCode::kInvalidArgument, "infer_schema: no events");

  struct State {
    bool is_static = true;
    bool is_numeric = true;
    // last case seen and the value observed for it, to detect in-case variation
    const std::string* current_case = nullptr;
    std::string case_value;
    bool case_has_value = false;
  };
  std::unordered_map<std::string, State> states;

  // Events of one case are not necessarily contiguous; track per (attr, case).
  std::unordered_map<std::string, std::unordered_map<std::string, std::string>>
      first_value_per_case;

  for (const Event& e : events) {
    for (const auto& [name, value] : e.attrs) {
      State& st = states[name];
      double parsed = 0.0;
      if (st.is_numeric && !parse_finite_double(value, &parsed)) {
        st.is_numeric = false;
      }
      if (st.is_static) {
        auto& per_case = first_value_per_case[name];
        auto [it, inserted] = per_case.emplace(e.case_id, value);
        if (!inserted && it->second != value) st.is_static = false;
      }
    }
  }

  AttributeSchema schema;
  for (const auto& [name, st] : states) {
    AttributeInfo info;
    info.kind = st.is_static ? AttributeKind::kStatic : AttributeKind::kDynamic;
    info.value_type = st.is_numeric ? ValueType::kNumeric : ValueType::kCategorical;
    schema.attributes[name] = info;
  }
  return schema;
}

EventLog build_log(std::vector<Event> events, std::optional<AttributeSchema> schema) {
  if (events.empty()) fail(ErrorCode::kInvalidArgument, "build_log: no events");

  for (const Event& e : events) {
    if (e.case_id.empty()) fail(ErrorCode::kData, "build_log: empty case id");
    if (e.activity.empty())
      fail(ErrorCode::kData, "build_log: empty activity in case '" + e.case_id + "'");
  }

  AttributeSchema resolved =
      schema ? *schema : infer_schema(std::span<const Event>(events));

  // Validate declared numeric attributes before any grouping.
  for (const Event& e : events) {
    for (const auto& [name, value] : e.attrs) {
      if (resolved.is_numeric(name)) {
        double parsed = 0.0;
        if (!value.empty() && !parse_finite_double(value, &parsed)) {
          fail(ErrorCode::kData, "build_log: attribute '" + name +
                                     "' declared numeric but value '" + value +
                                     "' is not a finite number");
        }
      }
    }
  }

  // Group by case id, preserving first-seen case order.
  std::vector<std::string> case_order;
  std::unordered_map<std::string, std::size_t> index;
  std::unordered_map<std::string, std::vector<Event>> grouped;
  for (Event& e : events) {
    auto it = index.find(e.case_id);
    if (it == index.end()) {
      index.emplace(e.case_id, case_order.size());
      case_order.push_back(e.case_id);
    }
    grouped[e.case_id].push_back(std::move(e));
  }

  EventLog log;
  log.schema = std::move(resolved);
  log.traces.reserve(case_order.size());
  for (const std::string& case_id : case_order) {
    Trace trace;
    trace.case_id = case_id;
    trace.events = std::move(grouped[case_id]);
    std::stable_sort(trace.events.begin(), trace.events.end(),
                     [](const Event& a, const Event& b) {
                       return a.timestamp_ms < b.timestamp_ms;
                     });
    // Hoist static attributes: first observed value in the trace.
    for (const Event& e : trace.events) {
      for (const auto& [name, value] : e.attrs) {
        if (log.schema.is_static(name) && !trace.static_attrs.count(name)) {
          trace.static_attrs.emplace(name, value);
        }
      }
    }
    log.traces.push_back(std::move(trace));
  }
  return log;
}

bool evaluate_label(const Trace& trace, const LabelSpec& spec) {
  if (spec.kind == LabelSpec::Kind::kContainsActivity) {
    for (const Event& e : trace.events) {
      if (e.activity == spec.activity_a) return true;
    }
    return false;
  }
  // EventuallyFollows: every occurrence of a has a strictly later occurrence
  // of b. Backward scan keeps the nearest b index seen so far.
  const int n = trace.length();
  int nearest_b = -1;
  for (int i = n - 1; i >= 0; --i) {
    if (trace.events[i].activity == spec.activity_b) nearest_b = i;
    if (trace.events[i].activity == spec.activity_a && nearest_b <= i) {
      return false;
    }
  }
  return true;
}

}  // namespace ppmi
