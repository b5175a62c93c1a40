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
#include "support/loggen.hpp"

#include <algorithm>

#include "ingest.hpp"

namespace ppmi::testsupport {

namespace {

std::string padded(const std::string& prefix, int value, int width) {
  std::string digits = std::to_string(value);
  while (static_cast<int>(digits.size()) < width) digits.insert(digits.begin(), '0');
  return prefix + digits;
}

Event make_event(const std::string& case_id, const std::string& activity,
                 std::int64_t ts_ms, const std::string& resource) {
  Event e;
  e.case_id = case_id;
  e.activity = activity;
  e.timestamp_ms = ts_ms;
  e.resource = resource;
  return e;
}

}  // namespace

EventLog random_log(Rng* rng, const RandomLogSpec& spec) {
  std::vector<Event> events;
  const int n_traces = 1 + static_cast<int>(rng->uniform_index(spec.max_traces));
  for (int t = 0; t < n_traces; ++t) {
    const std::string case_id = padded("c", t, 3);
    const std::string region = padded("region", static_cast<int>(rng->uniform_index(3)), 1);
    const int len = 1 + static_cast<int>(rng->uniform_index(spec.max_trace_len));
    std::int64_t ts = 1'000'000 * (t + 1);
    for (int i = 0; i < len; ++i) {
      Event e = make_event(
          case_id, padded("A", static_cast<int>(rng->uniform_index(spec.n_activities)), 1),
          ts, padded("r", static_cast<int>(rng->uniform_index(spec.n_resources)), 1));
      if (spec.numeric_attr && (!spec.sparse_attrs || rng->bernoulli(0.7))) {
        e.attrs["cost"] = format_double(
            static_cast<double>(rng->uniform_index(100)) / 4.0);
      }
      if (spec.categorical_attr && (!spec.sparse_attrs || rng->bernoulli(0.7))) {
        e.attrs["channel"] = padded("ch", static_cast<int>(rng->uniform_index(3)), 1);
      }
      if (spec.static_attr) e.attrs["region"] = region;
      events.push_back(std::move(e));
      ts += 1000 * (1 + static_cast<std::int64_t>(rng->uniform_index(120)));
    }
  }
  return build_log(std::move(events));
}

EventLog leakage_log(std::uint64_t seed, const LeakageSpec& spec) {
  Rng rng(seed, "loggen.leakage");
  std::vector<Event> events;

  const int n_positive =
      static_cast<int>(spec.positive_fraction * static_cast<double>(spec.n_cases));
  const int n_follows = static_cast<int>(
      spec.follows_fraction * static_cast<double>(n_positive) + 0.5);
  const int n_precedes = static_cast<int>(
      spec.precedes_fraction * static_cast<double>(n_positive) + 0.5);
  const char* fillers[] = {"F1", "F2", "F3", "F4", "F5"};
  const std::string resource = "r0";

  int positive_seen = 0;
  for (int c = 0; c < spec.n_cases; ++c) {
    const std::string case_id = padded("case", c, 4);
    const bool positive = c % 2 == 0 && positive_seen < n_positive;
    std::int64_t ts = 10'000'000LL * (c + 1);
    auto push = [&](const std::string& activity) {
      events.push_back(make_event(case_id, activity, ts, resource));
      ts += 60'000;
    };

    if (positive) {
      const int k = positive_seen++;
      const bool with_z = k < n_precedes;       // Z strictly before the first X
      const bool with_y = k % n_positive < n_follows;  // Y strictly after it
      push(fillers[rng.uniform_index(5)]);
      if (with_z) push("Z");
      push(fillers[rng.uniform_index(5)]);
      push("X");
      push(fillers[rng.uniform_index(5)]);
      if (with_y) push("Y");
      push(fillers[rng.uniform_index(5)]);
      push(fillers[rng.uniform_index(5)]);
    } else {
      const int len = 6 + static_cast<int>(rng.uniform_index(3));
      for (int i = 0; i < len; ++i) push(fillers[rng.uniform_index(5)]);
    }
  }
  return build_log(std::move(events));
}

const std::vector<std::string>& relevance_designated_activities() {
  static const std::vector<std::string> activities = {"B1", "B2", "B3",
                                                      "B4", "B5", "B6"};
  return activities;
}

EventLog relevance_log(std::uint64_t seed, const RelevanceSpec& spec) {
  Rng rng(seed, "loggen.relevance");
  const auto& designated = relevance_designated_activities();
  const char* fillers[] = {"F1", "F2", "F3", "F4", "F5", "F6"};
  const std::string resource = "r0";

  std::vector<Event> events;
  int positive_seen = 0;
  for (int c = 0; c < spec.n_cases; ++c) {
    const std::string case_id = padded("case", c, 4);
    const bool positive = c % 2 == 0;
    std::int64_t ts = 10'000'000LL * (c + 1);
    int position = 0;
    auto push = [&](const std::string& activity) {
      events.push_back(make_event(case_id, activity, ts, resource));
      ts += 60'000;
      ++position;
    };

    while (position < spec.earliest_index - 1) push(fillers[rng.uniform_index(6)]);
    if (positive) {
      // All six designated activities, rotated so that every one of them
      // hits the earliest index in some case.
      const int rotation = positive_seen++ % static_cast<int>(designated.size());
      for (std::size_t i = 0; i < designated.size(); ++i) {
        push(designated[(rotation + i) % designated.size()]);
      }
    }
    while (position < spec.trace_len) push(fillers[rng.uniform_index(6)]);
  }
  return build_log(std::move(events));
}

EventLog static_dominance_log(std::uint64_t seed, int n_cases) {
  Rng rng(seed, "loggen.static");
  const char* fillers[] = {"F1", "F2", "F3", "F4"};
  const std::string resource = "r0";

  std::vector<Event> events;
  for (int c = 0; c < n_cases; ++c) {
    const std::string case_id = padded("case", c, 4);
    const int code = c % 4;
    const std::string code_value = padded("C", code, 1);
    // Total duration is determined by the code alone; the first events are
    // packed at the start so remaining time barely depends on the position.
    const std::int64_t start = 10'000'000LL * (c + 1);
    const std::int64_t duration_ms = 1000LL * 1000 * (code + 1);
    const int len = 6;
    for (int i = 0; i < len; ++i) {
      std::int64_t ts = i + 1 < len ? start + 1000LL * i : start + duration_ms;
      Event e = make_event(case_id, fillers[rng.uniform_index(4)], ts, resource);
      e.attrs["code"] = code_value;
      events.push_back(std::move(e));
    }
  }
  return build_log(std::move(events));
}

EventLog dynamic_signal_log(std::uint64_t seed, int n_cases) {
  Rng rng(seed, "loggen.dynamic");
  const char* fillers[] = {"F1", "F2", "F3", "F4"};
  const std::string resource = "r0";

  std::vector<Event> events;
  for (int c = 0; c < n_cases; ++c) {
    const std::string case_id = padded("case", c, 4);
    const bool fast = c % 2 == 0;
    const std::int64_t start = 10'000'000LL * (c + 1);
    const std::int64_t duration_ms = fast ? 50'000 : 4'000'000;
    const int len = 6;
    for (int i = 0; i < len; ++i) {
      std::int64_t ts = i + 1 < len ? start + 1000LL * i : start + duration_ms;
      std::string activity =
          (fast && i == 2) ? "FAST" : fillers[rng.uniform_index(4)];
      Event e = make_event(case_id, activity, ts, resource);
      e.attrs["code"] = "C0";  // constant static attribute
      events.push_back(std::move(e));
    }
  }
  return build_log(std::move(events));
}

EventLog sparsity_log(std::uint64_t seed, const SparsitySpec& spec) {
  Rng rng(seed, "loggen.sparsity");
  std::vector<Event> events;
  int code_counter = 0;
  for (int c = 0; c < spec.n_cases; ++c) {
    const std::string case_id = padded("case", c, 4);
    const std::string dept =
        padded("dept", static_cast<int>(rng.uniform_index(spec.dept_cardinality)), 2);
    std::int64_t ts = 10'000'000LL * (c + 1);
    for (int i = 0; i < spec.trace_len; ++i) {
      Event e = make_event(
          case_id, padded("A", static_cast<int>(rng.uniform_index(spec.n_activities)), 2),
          ts, padded("R", static_cast<int>(rng.uniform_index(spec.n_resources)), 1));
      e.attrs["code"] = padded("code", code_counter++ % spec.code_cardinality, 3);
      e.attrs["cost"] = format_double(static_cast<double>(rng.uniform_index(1000)));
      e.attrs["dept"] = dept;
      events.push_back(std::move(e));
      ts += 60'000;
    }
  }
  return build_log(std::move(events));
}

void write_log_csv(const std::string& path, const EventLog& log,
                   const std::vector<std::string>& attribute_columns) {
  ColumnMapping mapping;
  mapping.case_column = "case_id";
  mapping.activity_column = "activity";
  mapping.timestamp_column = "timestamp";
  mapping.resource_column = "resource";
  mapping.attribute_columns = attribute_columns;

  std::vector<Event> events;
  for (const Trace& t : log.traces) {
    events.insert(events.end(), t.events.begin(), t.events.end());
  }
  write_csv(path, events, mapping);
}

}  // namespace ppmi::testsupport
