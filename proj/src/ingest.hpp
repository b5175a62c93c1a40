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

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "eventlog.hpp"

namespace ppmi {

// Maps CSV columns onto event fields. The three mandatory columns must be
// present and distinct; unmapped columns are ignored.
struct ColumnMapping {
  std::string case_column;
  std::string activity_column;
  std::string timestamp_column;
  std::optional<std::string> resource_column;
  std::vector<std::string> attribute_columns;
  std::string timestamp_format = "iso8601";
};

// Comma separated, double-quote quoting (RFC 4180 style), UTF-8. Empty cells
// are missing values. Malformed rows are fatal with the 1-based row number;
// silently dropping rows would corrupt downstream log statistics.
std::vector<Event> parse_csv(const std::string& path, const ColumnMapping& mapping);
std::vector<Event> parse_csv_stream(std::istream& in, const ColumnMapping& mapping,
                                    const std::string& origin);

// Writes events back out with the same dialect; header order is
// case, activity, timestamp, resource (if mapped), then attribute columns.
void write_csv(const std::string& path, const std::vector<Event>& events,
               const ColumnMapping& mapping);

// Low-level CSV helpers shared with the feature-matrix export.
std::vector<std::vector<std::string>> read_csv_records(std::istream& in,
                                                       const std::string& origin);
std::string csv_escape_field(const std::string& field);

}  // namespace ppmi
