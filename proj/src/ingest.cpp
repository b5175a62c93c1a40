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
#include "ingest.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "timeparse.hpp"

namespace ppmi {

namespace {

// One RFC-4180 record; may span physical lines inside quoted fields.
// Returns false at end of input.
bool read_record(std::istream& in, std::vector<std::string>* fields,
                 std::size_t* line_no) {
  fields->clear();
  int ch = in.get();
  if (ch == EOF) return false;

  std::string field;
  bool in_quotes = false;
  while (true) {
    if (ch == EOF) {
      if (in_quotes) fail(ErrorCode::kData, "unterminated quoted field at end of file");
      fields->push_back(std::move(field));
      return true;
    }
    char c = static_cast<char>(ch);
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          field.push_back('"');
          in.get();
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++*line_no;
        field.push_back(c);
      }
    } else if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      fields->push_back(std::move(field));
      field.clear();
    } else if (c == '\r') {
      if (in.peek() == '\n') in.get();
      ++*line_no;
      fields->push_back(std::move(field));
      return true;
    } else if (c == '\n') {
      ++*line_no;
      fields->push_back(std::move(field));
      return true;
    } else {
      field.push_back(c);
    }
    ch = in.get();
  }
}

int require_column(const std::vector<std::string>& header, const std::string& name,
                   const std::string& origin) {
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) {
    fail(ErrorCode::kData,
         origin + ": missing mandatory column '" + name + "' in header");
  }
  return static_cast<int>(it - header.begin());
}

int optional_column(const std::vector<std::string>& header, const std::string& name) {
  auto it = std::find(header.begin(), header.end(), name);
  return it == header.end() ? -1 : static_cast<int>(it - header.begin());
}

}  // namespace

std::vector<std::vector<std::string>> read_csv_records(std::istream& in,
                                                       const std::string& origin) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> fields;
  std::size_t line_no = 1;
  while (read_record(in, &fields, &line_no)) {
    // A trailing newline yields one empty single-field record; skip it.
    if (fields.size() == 1 && fields[0].empty() && in.peek() == EOF) break;
    records.push_back(fields);
  }
  if (records.empty()) fail(ErrorCode::kData, origin + ": empty file");
  return records;
}

std::vector<Event> parse_csv_stream(std::istream& in, const ColumnMapping& mapping,
                                    const std::string& origin) {
  if (mapping.case_column.empty() || mapping.activity_column.empty() ||
      mapping.timestamp_column.empty()) {
    fail(ErrorCode::kConfig, "column mapping: the case, activity and timestamp "
                             "columns must all be named");
  }
  if (mapping.case_column == mapping.activity_column ||
      mapping.case_column == mapping.timestamp_column ||
      mapping.activity_column == mapping.timestamp_column) {
    fail(ErrorCode::kConfig, "column mapping: mandatory columns must be distinct");
  }

  auto records = read_csv_records(in, origin);
  const auto& header = records.front();
  int case_idx = require_column(header, mapping.case_column, origin);
  int act_idx = require_column(header, mapping.activity_column, origin);
  int time_idx = require_column(header, mapping.timestamp_column, origin);
  int res_idx = -1;
  if (mapping.resource_column) {
    res_idx = require_column(header, *mapping.resource_column, origin);
  }
  std::vector<std::pair<std::string, int>> attr_idx;
  for (const std::string& name : mapping.attribute_columns) {
    int idx = optional_column(header, name);
    if (idx < 0) {
      fail(ErrorCode::kData, origin + ": mapped attribute column '" + name +
                                 "' not found in header");
    }
    attr_idx.emplace_back(name, idx);
  }

  std::vector<Event> events;
  events.reserve(records.size() - 1);
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& row = records[r];
    const std::size_t row_no = r + 1;  // 1-based, header is row 1
    if (row.size() != header.size()) {
      fail(ErrorCode::kData, origin + ": row " + std::to_string(row_no) + " has " +
                                 std::to_string(row.size()) + " fields, expected " +
                                 std::to_string(header.size()));
    }
    Event e;
    e.case_id = row[case_idx];
    e.activity = row[act_idx];
    auto ts = parse_timestamp(row[time_idx], mapping.timestamp_format);
    if (!ts) {
      fail(ErrorCode::kData, origin + ": row " + std::to_string(row_no) +
                                 ": unparseable timestamp '" + row[time_idx] + "'");
    }
    e.timestamp_ms = *ts;
    if (res_idx >= 0 && !row[res_idx].empty()) e.resource = row[res_idx];
    for (const auto& [name, idx] : attr_idx) {
      if (!row[idx].empty()) e.attrs.emplace(name, row[idx]);
    }
    events.push_back(std::move(e));
  }
  return events;
}

std::vector<Event> parse_csv(const std::string& path, const ColumnMapping& mapping) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open '" + path + "'");
  return parse_csv_stream(in, mapping, path);
}

std::string csv_escape_field(const std::string& field) {
  bool needs_quotes = field.find_first_of(",\"\r\n") != std::string::npos;
  if (!needs_quotes) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += "\"";
  return out;
}

void write_csv(const std::string& path, const std::vector<Event>& events,
               const ColumnMapping& mapping) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, "cannot write '" + path + "'");

  std::vector<std::string> header = {mapping.case_column, mapping.activity_column,
                                     mapping.timestamp_column};
  if (mapping.resource_column) header.push_back(*mapping.resource_column);
  for (const auto& a : mapping.attribute_columns) header.push_back(a);

  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out << ',';
    out << csv_escape_field(header[i]);
  }
  out << '\n';

  for (const Event& e : events) {
    out << csv_escape_field(e.case_id) << ',' << csv_escape_field(e.activity) << ','
        << format_timestamp(e.timestamp_ms);
    if (mapping.resource_column) {
      out << ',' << csv_escape_field(e.resource ? *e.resource : "");
    }
    for (const auto& name : mapping.attribute_columns) {
      auto it = e.attrs.find(name);
      out << ',' << csv_escape_field(it == e.attrs.end() ? "" : it->second);
    }
    out << '\n';
  }
}

}  // namespace ppmi
