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

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "util.hpp"

namespace ppmi {

// Missing resource values map to this distinct token so encoders stay total.
inline constexpr const char* kMissingResource = "\xE2\x8A\xA5";  // "⊥"

using AttrMap = std::map<std::string, std::string>;

struct Event {
  std::string case_id;
  std::string activity;
  std::int64_t timestamp_ms = 0;  // UTC epoch, millisecond precision
  std::optional<std::string> resource;
  AttrMap attrs;

  const std::string& resource_or_missing() const {
    static const std::string missing = kMissingResource;
    return resource ? *resource : missing;
  }
};

// Ordered event sequence of one case. Events are sorted ascending by
// timestamp; ties keep their input order.
struct Trace {
  std::string case_id;
  std::vector<Event> events;
  AttrMap static_attrs;

  int length() const { return static_cast<int>(events.size()); }
  std::int64_t start_ms() const { return events.front().timestamp_ms; }
  std::int64_t end_ms() const { return events.back().timestamp_ms; }
};

enum class AttributeKind { kStatic, kDynamic };
enum class ValueType { kCategorical, kNumeric };

struct AttributeInfo {
  AttributeKind kind = AttributeKind::kDynamic;
  ValueType value_type = ValueType::kCategorical;
};

struct AttributeSchema {
  std::map<std::string, AttributeInfo> attributes;

  bool is_static(const std::string& name) const {
    auto it = attributes.find(name);
    return it != attributes.end() && it->second.kind == AttributeKind::kStatic;
  }
  bool is_numeric(const std::string& name) const {
    auto it = attributes.find(name);
    return it != attributes.end() && it->second.value_type == ValueType::kNumeric;
  }
};

struct EventLog {
  std::vector<Trace> traces;
  AttributeSchema schema;

  std::size_t case_count() const { return traces.size(); }
  std::size_t event_count() const {
    std::size_t n = 0;
    for (const auto& t : traces) n += t.events.size();
    return n;
  }
  const Trace* find_trace(const std::string& case_id) const;
};

// Outcome labelling rules: a trace either contains a given activity, or every
// occurrence of activity a is eventually followed by activity b.
struct LabelSpec {
  enum class Kind { kContainsActivity, kEventuallyFollows };

  Kind kind = Kind::kContainsActivity;
  std::string activity_a;  // ContainsActivity target / follows antecedent
  std::string activity_b;  // follows consequent

  static LabelSpec contains(std::string activity);
  static LabelSpec eventually_follows(std::string a, std::string b);
  std::vector<std::string> referenced_activities() const;
};

// Infers, from a full scan of the events, which attributes are static
// (constant within every case) and which parse as finite numbers throughout.
AttributeSchema infer_schema(std::span<const Event> events);

// Groups events into traces, sorts them, hoists static attributes onto the
// trace, and validates against the (possibly inferred) schema.
EventLog build_log(std::vector<Event> events,
                   std::optional<AttributeSchema> schema = std::nullopt);

bool evaluate_label(const Trace& trace, const LabelSpec& spec);

}  // namespace ppmi
