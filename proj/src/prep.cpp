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
#include "prep.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace ppmi {

std::vector<Prefix> extract_prefixes(const EventLog& log, int min_len, int max_len,
                                     int gap, const TargetSpec& targets) {
  if (min_len < 1 || min_len > max_len) {
    fail(ErrorCode::kInvalidArgument, "extract_prefixes: need 1 <= min_len <= max_len");
  }
  if (gap < 1) fail(ErrorCode::kInvalidArgument, "extract_prefixes: gap must be >= 1");

  std::vector<Prefix> prefixes;
  for (const Trace& trace : log.traces) {
    const int upper = std::min(trace.length(), max_len);
    const bool outcome_positive =
        targets.kind == PredictionTarget::Kind::kOutcome
            ? evaluate_label(trace, targets.label)
            : false;
    for (int len = min_len; len <= upper; len += gap) {
      Prefix p;
      p.trace = &trace;
      p.length = len;
      if (targets.kind == PredictionTarget::Kind::kOutcome) {
        p.target = PredictionTarget::outcome(outcome_positive);
      } else {
        p.target = PredictionTarget::remaining_time(compute_remaining_time(trace, len));
      }
      prefixes.push_back(p);
    }
  }
  return prefixes;
}

double compute_remaining_time(const Trace& trace, int i) {
  if (i < 1 || i > trace.length()) {
    fail(ErrorCode::kInvalidArgument, "compute_remaining_time: index out of range");
  }
  return static_cast<double>(trace.end_ms() - trace.events[i - 1].timestamp_ms) / 1000.0;
}

std::vector<Bucket> bucket_single(std::vector<Prefix> prefixes) {
  if (prefixes.empty()) fail(ErrorCode::kInvalidArgument, "bucket_single: no prefixes");
  Bucket bucket;
  bucket.id = "single";
  bucket.scheme = Bucket::Scheme::kSingle;
  bucket.prefixes = std::move(prefixes);
  std::vector<Bucket> out;
  out.push_back(std::move(bucket));
  return out;
}

std::vector<Bucket> bucket_by_prefix_length(std::vector<Prefix> prefixes) {
  if (prefixes.empty()) {
    fail(ErrorCode::kInvalidArgument, "bucket_by_prefix_length: no prefixes");
  }
  std::map<int, Bucket> by_length;
  for (Prefix& p : prefixes) {
    Bucket& b = by_length[p.length];
    if (b.prefixes.empty()) {
      b.id = "len_" + std::to_string(p.length);
      b.scheme = Bucket::Scheme::kPrefixLength;
      b.prefix_length = p.length;
    }
    b.prefixes.push_back(std::move(p));
  }
  std::vector<Bucket> out;
  out.reserve(by_length.size());
  for (auto& [len, bucket] : by_length) out.push_back(std::move(bucket));
  return out;
}

Split temporal_split(const EventLog& log, double train_ratio) {
  if (log.traces.size() < 2) {
    fail(ErrorCode::kInvalidArgument, "temporal_split: need at least 2 cases");
  }
  if (!(train_ratio > 0.0 && train_ratio < 1.0)) {
    fail(ErrorCode::kInvalidArgument, "temporal_split: ratio must be in (0,1)");
  }

  struct Key {
    std::int64_t start_ms;
    const std::string* case_id;
  };
  std::vector<Key> keys;
  keys.reserve(log.traces.size());
  for (const Trace& t : log.traces) keys.push_back({t.start_ms(), &t.case_id});
  std::sort(keys.begin(), keys.end(), [](const Key& a, const Key& b) {
    if (a.start_ms != b.start_ms) return a.start_ms < b.start_ms;
    return *a.case_id < *b.case_id;
  });

  const std::size_t n_train = static_cast<std::size_t>(
      std::ceil(train_ratio * static_cast<double>(keys.size())));
  Split split;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (i < n_train) split.train_case_ids.push_back(*keys[i].case_id);
    else split.test_case_ids.push_back(*keys[i].case_id);
  }
  return split;
}

}  // namespace ppmi
