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

#include <string>
#include <vector>

#include "eventlog.hpp"

namespace ppmi {

struct PredictionTarget {
  enum class Kind { kOutcome, kRemainingTime };

  Kind kind = Kind::kOutcome;
  bool positive = false;      // outcome
  double seconds = 0.0;       // remaining time, >= 0

  static PredictionTarget outcome(bool positive) {
    PredictionTarget t;
    t.kind = Kind::kOutcome;
    t.positive = positive;
    return t;
  }
  static PredictionTarget remaining_time(double seconds) {
    PredictionTarget t;
    t.kind = Kind::kRemainingTime;
    t.seconds = seconds;
    return t;
  }
  double value() const {
    return kind == Kind::kOutcome ? (positive ? 1.0 : 0.0) : seconds;
  }
};

// First `length` events of a trace. The trace pointer refers into the
// immutable EventLog the prefix was extracted from.
struct Prefix {
  const Trace* trace = nullptr;
  int length = 0;
  PredictionTarget target;

  const std::string& case_id() const { return trace->case_id; }
  const Event& event(int i) const { return trace->events[i]; }  // 0-based
  const Event& last_event() const { return trace->events[length - 1]; }
};

struct TargetSpec {
  PredictionTarget::Kind kind = PredictionTarget::Kind::kOutcome;
  LabelSpec label;  // used for outcome targets
};

struct Bucket {
  enum class Scheme { kSingle, kPrefixLength };

  std::string id;
  Scheme scheme = Scheme::kSingle;
  int prefix_length = 0;  // meaningful for kPrefixLength
  std::vector<Prefix> prefixes;
};

// Prefix lengths {min_len, min_len+gap, ...} clamped to [1, min(n, max_len)].
// Outcome prefixes inherit the complete trace's label; remaining time is
// recomputed per length.
std::vector<Prefix> extract_prefixes(const EventLog& log, int min_len, int max_len,
                                     int gap, const TargetSpec& targets);

// Seconds between event i (1-based) and the trace's last event.
double compute_remaining_time(const Trace& trace, int i);

std::vector<Bucket> bucket_single(std::vector<Prefix> prefixes);
std::vector<Bucket> bucket_by_prefix_length(std::vector<Prefix> prefixes);

// Cases ordered by first-event time (ties by case id); the earliest
// ceil(ratio * #cases) go to train. A case is never split across sides.
struct Split {
  std::vector<std::string> train_case_ids;
  std::vector<std::string> test_case_ids;
};
Split temporal_split(const EventLog& log, double train_ratio);

}  // namespace ppmi
