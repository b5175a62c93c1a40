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

#include <algorithm>
#include <set>

#include "prep.hpp"
#include "rng.hpp"
#include "support/loggen.hpp"

using namespace ppmi;

namespace {

EventLog log_with_lengths(const std::vector<int>& lengths) {
  std::vector<Event> events;
  for (std::size_t t = 0; t < lengths.size(); ++t) {
    for (int i = 0; i < lengths[t]; ++i) {
      Event e;
      e.case_id = "c" + std::to_string(t);
      e.activity = "A";
      e.timestamp_ms = 1'000'000 * static_cast<std::int64_t>(t + 1) + 1000 * i;
      events.push_back(std::move(e));
    }
  }
  return build_log(std::move(events));
}

TargetSpec outcome_target() {
  TargetSpec t;
  t.kind = PredictionTarget::Kind::kOutcome;
  t.label = LabelSpec::contains("A");
  return t;
}

std::vector<int> lengths_of(const std::vector<Prefix>& prefixes) {
  std::vector<int> out;
  for (const auto& p : prefixes) out.push_back(p.length);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("extract_prefixes: every length up to n") {
  auto log = log_with_lengths({3});
  auto prefixes = extract_prefixes(log, 1, 40, 1, outcome_target());
  CHECK(lengths_of(prefixes) == std::vector<int>{1, 2, 3});
}

TEST_CASE("extract_prefixes: clamps at max_len") {
  auto log = log_with_lengths({50});
  auto prefixes = extract_prefixes(log, 1, 40, 1, outcome_target());
  CHECK(prefixes.size() == 40);
  CHECK(lengths_of(prefixes).back() == 40);
}

TEST_CASE("extract_prefixes: arithmetic progression with gap") {
  auto log = log_with_lengths({12});
  auto prefixes = extract_prefixes(log, 5, 40, 5, outcome_target());
  // {5, 5+5, ...} intersected with [1, 12]
  CHECK(lengths_of(prefixes) == std::vector<int>{5, 10});
}

TEST_CASE("extract_prefixes: short traces contribute nothing") {
  auto log = log_with_lengths({3, 7});
  auto prefixes = extract_prefixes(log, 5, 40, 1, outcome_target());
  CHECK(lengths_of(prefixes) == std::vector<int>{5, 6, 7});
}

TEST_CASE("extract_prefixes validates bounds") {
  auto log = log_with_lengths({3});
  CHECK_THROWS_AS(extract_prefixes(log, 0, 40, 1, outcome_target()), Error);
  CHECK_THROWS_AS(extract_prefixes(log, 5, 4, 1, outcome_target()), Error);
  CHECK_THROWS_AS(extract_prefixes(log, 1, 40, 0, outcome_target()), Error);
}

TEST_CASE("compute_remaining_time") {
  std::vector<Event> events;
  for (std::int64_t seconds : {0, 100, 250}) {
    Event e;
    e.case_id = "c";
    e.activity = "A";
    e.timestamp_ms = seconds * 1000;
    events.push_back(std::move(e));
  }
  auto log = build_log(std::move(events));
  const Trace& t = log.traces[0];
  CHECK(compute_remaining_time(t, 1) == doctest::Approx(250.0));
  CHECK(compute_remaining_time(t, 2) == doctest::Approx(150.0));
  CHECK(compute_remaining_time(t, 3) == 0.0);
  CHECK_THROWS_AS(compute_remaining_time(t, 0), Error);
  CHECK_THROWS_AS(compute_remaining_time(t, 4), Error);
}

TEST_CASE("remaining time telescopes") {
  Rng rng(5, "prep.telescope");
  for (int round = 0; round < 50; ++round) {
    auto log = ppmi::testsupport::random_log(&rng);
    for (const Trace& t : log.traces) {
      for (int i = 1; i < t.length(); ++i) {
        double step = static_cast<double>(t.events[i].timestamp_ms -
                                          t.events[i - 1].timestamp_ms) /
                      1000.0;
        CHECK(compute_remaining_time(t, i) ==
              doctest::Approx(compute_remaining_time(t, i + 1) + step).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("remaining-time prefixes carry the recomputed target") {
  auto log = log_with_lengths({3});
  TargetSpec target;
  target.kind = PredictionTarget::Kind::kRemainingTime;
  auto prefixes = extract_prefixes(log, 1, 40, 1, target);
  for (const Prefix& p : prefixes) {
    CHECK(p.target.seconds ==
          doctest::Approx(compute_remaining_time(*p.trace, p.length)));
    CHECK(p.target.seconds >= 0.0);
  }
}

TEST_CASE("bucket_single puts everything in one bucket") {
  auto log = log_with_lengths({3, 5, 2});
  auto prefixes = extract_prefixes(log, 1, 40, 1, outcome_target());
  auto buckets = bucket_single(prefixes);
  REQUIRE(buckets.size() == 1);
  CHECK(buckets[0].id == "single");
  CHECK(buckets[0].scheme == Bucket::Scheme::kSingle);
  CHECK(buckets[0].prefixes.size() == prefixes.size());
  CHECK_THROWS_AS(bucket_single({}), Error);
}

TEST_CASE("bucket_by_prefix_length partitions exactly") {
  auto log = log_with_lengths({5, 5, 10});
  // Hand-built prefixes with lengths {5, 5, 10}.
  std::vector<Prefix> prefixes;
  for (const Trace& t : log.traces) {
    Prefix p;
    p.trace = &t;
    p.length = t.length();
    p.target = PredictionTarget::outcome(true);
    prefixes.push_back(p);
  }
  auto buckets = bucket_by_prefix_length(prefixes);

  std::size_t total = 0;
  std::set<int> seen_lengths;
  for (const Bucket& b : buckets) {
    CHECK(b.scheme == Bucket::Scheme::kPrefixLength);
    CHECK(seen_lengths.insert(b.prefix_length).second);  // disjoint lengths
    for (const Prefix& p : b.prefixes) CHECK(p.length == b.prefix_length);
    total += b.prefixes.size();
  }
  CHECK(total == prefixes.size());  // exhaustive
  // lengths {5,5,10}: bucket 5 holds two prefixes, bucket 10 one.
  auto len5 = std::find_if(buckets.begin(), buckets.end(),
                           [](const Bucket& b) { return b.prefix_length == 5; });
  REQUIRE(len5 != buckets.end());
  CHECK(len5->prefixes.size() == 2);
}

TEST_CASE("temporal_split: earliest cases go to train") {
  auto log = log_with_lengths({2, 2, 2, 2, 2, 2, 2, 2, 2, 2});
  auto split = temporal_split(log, 0.8);
  CHECK(split.train_case_ids.size() == 8);
  CHECK(split.test_case_ids.size() == 2);

  // Start times are increasing with the generated case index.
  std::int64_t latest_train = 0;
  for (const auto& id : split.train_case_ids) {
    latest_train = std::max(latest_train, log.find_trace(id)->start_ms());
  }
  for (const auto& id : split.test_case_ids) {
    CHECK(log.find_trace(id)->start_ms() >= latest_train);
  }
}

TEST_CASE("temporal_split: 2 cases at ratio 0.5") {
  auto log = log_with_lengths({2, 2});
  auto split = temporal_split(log, 0.5);
  CHECK(split.train_case_ids.size() == 1);
  CHECK(split.test_case_ids.size() == 1);
}

TEST_CASE("temporal_split: ties broken by case id") {
  std::vector<Event> events;
  for (const char* id : {"zebra", "alpha", "mango"}) {
    Event e;
    e.case_id = id;
    e.activity = "A";
    e.timestamp_ms = 42;  // identical start time for every case
    events.push_back(std::move(e));
  }
  auto split = temporal_split(build_log(std::move(events)), 0.5);
  REQUIRE(split.train_case_ids.size() == 2);
  CHECK(split.train_case_ids[0] == "alpha");
  CHECK(split.train_case_ids[1] == "mango");
  CHECK(split.test_case_ids[0] == "zebra");
}

TEST_CASE("temporal_split: no case id on both sides") {
  Rng rng(17, "prep.split");
  for (int round = 0; round < 30; ++round) {
    auto log = ppmi::testsupport::random_log(&rng);
    if (log.traces.size() < 2) continue;
    auto split = temporal_split(log, 0.7);
    std::set<std::string> train(split.train_case_ids.begin(), split.train_case_ids.end());
    for (const auto& id : split.test_case_ids) CHECK_FALSE(train.count(id));
    CHECK(split.train_case_ids.size() + split.test_case_ids.size() ==
          log.traces.size());
  }
}

TEST_CASE("temporal_split validates input") {
  auto log = log_with_lengths({2});
  CHECK_THROWS_AS(temporal_split(log, 0.5), Error);
  auto two = log_with_lengths({2, 2});
  CHECK_THROWS_AS(temporal_split(two, 0.0), Error);
  CHECK_THROWS_AS(temporal_split(two, 1.0), Error);
}
