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
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>

#include "eventlog.hpp"
#include "rng.hpp"
#include "support/loggen.hpp"
#include "support/oracles.hpp"

using namespace ppmi;

namespace {

Event ev(const std::string& case_id, const std::string& activity, std::int64_t ts_ms) {
  Event e;
  e.case_id = case_id;
  e.activity = activity;
  e.timestamp_ms = ts_ms;
  return e;
}

Trace trace_of(std::vector<std::string> activities) {
  Trace t;
  t.case_id = "c";
  std::int64_t ts = 0;
  for (auto& a : activities) {
    t.events.push_back(ev("c", a, ts));
    ts += 1000;
  }
  return t;
}

}  // namespace

TEST_CASE("build_log groups events by case") {
  auto log = build_log({ev("c1", "A", 0), ev("c2", "B", 10), ev("c1", "C", 20)});
  REQUIRE(log.traces.size() == 2);
  CHECK(log.find_trace("c1")->length() == 2);
  CHECK(log.find_trace("c2")->length() == 1);
  CHECK(log.event_count() == 3);
}

TEST_CASE("build_log sorts events of a case by timestamp") {
  auto log = build_log({ev("c1", "third", 300), ev("c1", "first", 100),
                        ev("c1", "second", 200)});
  const Trace& t = log.traces[0];
  CHECK(t.events[0].activity == "first");
  CHECK(t.events[1].activity == "second");
  CHECK(t.events[2].activity == "third");
}

TEST_CASE("build_log keeps input order for identical timestamps") {
  auto log = build_log({ev("c1", "a", 100), ev("c1", "b", 100), ev("c1", "c", 100)});
  const Trace& t = log.traces[0];
  CHECK(t.events[0].activity == "a");
  CHECK(t.events[1].activity == "b");
  CHECK(t.events[2].activity == "c");
}

TEST_CASE("build_log rejects bad input") {
  CHECK_THROWS_AS(build_log({}), Error);
  CHECK_THROWS_AS(build_log({ev("", "A", 0)}), Error);
  CHECK_THROWS_AS(build_log({ev("c", "", 0)}), Error);

  Event bad = ev("c", "A", 0);
  bad.attrs["amount"] = "not-a-number";
  AttributeSchema schema;
  schema.attributes["amount"] = {AttributeKind::kDynamic, ValueType::kNumeric};
  CHECK_THROWS_AS(build_log({bad}, schema), Error);
}

TEST_CASE("build_log hoists static attributes onto the trace") {
  Event a = ev("c1", "A", 0);
  a.attrs["region"] = "north";
  Event b = ev("c1", "B", 1000);
  b.attrs["region"] = "north";
  Event other = ev("c2", "A", 0);
  other.attrs["region"] = "south";
  auto log = build_log({a, b, other});
  CHECK(log.schema.is_static("region"));
  CHECK(log.find_trace("c1")->static_attrs.at("region") == "north");
  CHECK(log.find_trace("c2")->static_attrs.at("region") == "south");
}

TEST_CASE("infer_schema classifies static vs dynamic and numeric vs categorical") {
  Event a = ev("c1", "A", 0);
  a.attrs = {{"constant_per_case", "x"}, {"varying", "1"}, {"mixed", "1.5"}};
  Event b = ev("c1", "B", 1000);
  b.attrs = {{"constant_per_case", "x"}, {"varying", "2"}, {"mixed", "2"}};
  Event c = ev("c2", "A", 0);
  c.attrs = {{"constant_per_case", "y"}, {"varying", "3"}, {"mixed", "x"}};
  std::vector<Event> events = {a, b, c};

  auto schema = infer_schema(events);
  CHECK(schema.is_static("constant_per_case"));
  CHECK_FALSE(schema.is_numeric("constant_per_case"));
  CHECK_FALSE(schema.is_static("varying"));
  CHECK(schema.is_numeric("varying"));
  // {"1.5", "2", "x"} does not parse throughout: categorical.
  CHECK_FALSE(schema.is_numeric("mixed"));
}

TEST_CASE("evaluate_label: ContainsActivity") {
  CHECK(evaluate_label(trace_of({"A", "B"}), LabelSpec::contains("A")));
  CHECK_FALSE(evaluate_label(trace_of({"A", "C"}), LabelSpec::contains("O_ACCEPTED")));
}

TEST_CASE("evaluate_label: EventuallyFollows") {
  auto spec = LabelSpec::eventually_follows("A", "B");
  CHECK(evaluate_label(trace_of({"A", "B"}), spec));
  CHECK_FALSE(evaluate_label(trace_of({"A", "B", "A"}), spec));
  CHECK(evaluate_label(trace_of({"C", "B"}), spec));  // vacuously true
  CHECK(evaluate_label(trace_of({"A", "C", "B", "A", "B"}), spec));
}

TEST_CASE("evaluate_label agrees with the brute-force double loop") {
  Rng rng(20260810, "eventlog.label");
  const std::vector<std::string> alphabet = {"A", "B", "C", "D"};
  for (int round = 0; round < 1000; ++round) {
    std::vector<std::string> activities;
    int len = 1 + static_cast<int>(rng.uniform_index(20));
    for (int i = 0; i < len; ++i) {
      activities.push_back(alphabet[rng.uniform_index(alphabet.size())]);
    }
    Trace t = trace_of(activities);
    const std::string& a = alphabet[rng.uniform_index(alphabet.size())];
    const std::string& b = alphabet[rng.uniform_index(alphabet.size())];
    bool expected = ppmi::testoracles::eventually_follows_label_naive(t, a, b);
    CHECK(evaluate_label(t, LabelSpec::eventually_follows(a, b)) == expected);
  }
}

TEST_CASE("static attribute values have cardinality <= 1 per trace") {
  Rng rng(7, "eventlog.static");
  for (int round = 0; round < 50; ++round) {
    auto log = ppmi::testsupport::random_log(&rng);
    for (const auto& [name, info] : log.schema.attributes) {
      if (info.kind != AttributeKind::kStatic) continue;
      for (const Trace& t : log.traces) {
        std::set<std::string> values;
        for (const Event& e : t.events) {
          auto it = e.attrs.find(name);
          if (it != e.attrs.end()) values.insert(it->second);
        }
        CHECK(values.size() <= 1);
      }
    }
  }
}

TEST_CASE("rebuilding a log from its own events is idempotent") {
  Rng rng(99, "eventlog.rebuild");
  auto log = ppmi::testsupport::random_log(&rng);
  std::vector<Event> flattened;
  for (const Trace& t : log.traces) {
    flattened.insert(flattened.end(), t.events.begin(), t.events.end());
  }
  auto rebuilt = build_log(flattened);
  REQUIRE(rebuilt.traces.size() == log.traces.size());
  for (std::size_t i = 0; i < log.traces.size(); ++i) {
    CHECK(rebuilt.traces[i].case_id == log.traces[i].case_id);
    CHECK(rebuilt.traces[i].length() == log.traces[i].length());
    CHECK(rebuilt.traces[i].static_attrs == log.traces[i].static_attrs);
    for (int j = 0; j < log.traces[i].length(); ++j) {
      CHECK(rebuilt.traces[i].events[j].activity == log.traces[i].events[j].activity);
      CHECK(rebuilt.traces[i].events[j].timestamp_ms ==
            log.traces[i].events[j].timestamp_ms);
    }
  }
  CHECK(rebuilt.schema.attributes.size() == log.schema.attributes.size());
}
