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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ingest.hpp"
#include "rng.hpp"
#include "support/loggen.hpp"
#include "timeparse.hpp"

using namespace ppmi;

namespace {

ColumnMapping basic_mapping() {
  ColumnMapping m;
  m.case_column = "case_id";
  m.activity_column = "activity";
  m.timestamp_column = "timestamp";
  return m;
}

std::vector<Event> parse_text(const std::string& text, const ColumnMapping& mapping) {
  std::istringstream in(text);
  return parse_csv_stream(in, mapping, "<test>");
}

std::filesystem::path temp_file(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "ppmi_ingest_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("timestamp parsing: iso8601 variants") {
  CHECK(parse_timestamp("1970-01-01T00:00:00") == 0);
  CHECK(parse_timestamp("1970-01-01 00:00:01") == 1000);
  CHECK(parse_timestamp("1970-01-01T00:00:00.25") == 250);
  CHECK(parse_timestamp("1970-01-01T01:00:00+01:00") == 0);
  CHECK(parse_timestamp("1969-12-31T23:00:00-01:00") == 0);
  CHECK(parse_timestamp("2011-10-01T08:30:05.123Z") ==
        parse_timestamp("2011-10-01 08:30:05.123"));
  CHECK(parse_timestamp("1970-01-02") == 86400000);
  CHECK_FALSE(parse_timestamp("not a time").has_value());
  CHECK_FALSE(parse_timestamp("1970-13-01T00:00:00").has_value());
  CHECK_FALSE(parse_timestamp("").has_value());
}

TEST_CASE("timestamp parsing: explicit pattern") {
  // 1 February 1970, day 31 of the epoch year.
  CHECK(parse_timestamp("01/02/1970 00:00:00", "%d/%m/%Y %H:%M:%S") ==
        31LL * 86400000);
  CHECK(parse_timestamp("1970-01-01 00.00.02,500", "%Y-%m-%d %H.%M.%S,%f") == 2500);
  CHECK_FALSE(parse_timestamp("01/02/1970", "%d/%m/%Y %H:%M:%S").has_value());
}

TEST_CASE("timestamp round trip through format_timestamp") {
  Rng rng(11, "ingest.ts");
  for (int i = 0; i < 200; ++i) {
    std::int64_t ms = static_cast<std::int64_t>(rng.uniform_index(4'000'000'000'000ULL));
    auto parsed = parse_timestamp(format_timestamp(ms));
    REQUIRE(parsed.has_value());
    CHECK(*parsed == ms);
  }
}

TEST_CASE("parse_csv: two data rows become two events") {
  auto events = parse_text(
      "case_id,activity,timestamp\n"
      "c1,register,2011-10-01T08:00:00\n"
      "c1,review,2011-10-01T09:00:00\n",
      basic_mapping());
  REQUIRE(events.size() == 2);
  CHECK(events[0].case_id == "c1");
  CHECK(events[0].activity == "register");
  CHECK_FALSE(events[0].resource.has_value());
  CHECK(events[1].timestamp_ms - events[0].timestamp_ms == 3'600'000);
}

TEST_CASE("parse_csv: missing mandatory column is fatal and names the column") {
  try {
    parse_text("case_id,activity\nc1,a\n", basic_mapping());
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("timestamp") != std::string::npos);
  }
}

TEST_CASE("parse_csv: bad timestamp is fatal with the row number") {
  try {
    parse_text(
        "case_id,activity,timestamp\n"
        "c1,a,2011-10-01T08:00:00\n"
        "c1,b,banana\n",
        basic_mapping());
    FAIL("expected an error");
  } catch (const Error& e) {
    std::string message = e.what();
    CHECK(message.find("row 3") != std::string::npos);
    CHECK(message.find("banana") != std::string::npos);
  }
}

TEST_CASE("parse_csv: inconsistent column count is fatal with the row number") {
  try {
    parse_text(
        "case_id,activity,timestamp\n"
        "c1,a,2011-10-01T08:00:00,extra\n",
        basic_mapping());
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("row 2") != std::string::npos);
  }
}

TEST_CASE("parse_csv: quoting, embedded separators and empty cells") {
  ColumnMapping m = basic_mapping();
  m.resource_column = "resource";
  m.attribute_columns = {"note"};
  auto events = parse_text(
      "case_id,activity,timestamp,resource,note\n"
      "c1,\"check, recheck\",2011-10-01T08:00:00,,\"say \"\"hi\"\"\"\n",
      m);
  REQUIRE(events.size() == 1);
  CHECK(events[0].activity == "check, recheck");
  CHECK_FALSE(events[0].resource.has_value());  // empty cell -> missing
  CHECK(events[0].attrs.at("note") == "say \"hi\"");
}

TEST_CASE("parse_csv: patient episode fixture carries resource and case attributes") {
  // Shaped after a hospital event log: one patient episode per case."
  ColumnMapping m = basic_mapping();
  m.resource_column = "resource";
  m.attribute_columns = {"age_group", "department"};
  auto events = parse_text(
      "case_id,activity,timestamp,resource,age_group,department\n"
      "patient_7,consultation,2011-03-01T09:00:00,dr_lang,60-70,gynaecology\n"
      "patient_7,test,2011-03-01T10:30:00,lab_2,60-70,gynaecology\n"
      "patient_7,diagnosis,2011-03-02T09:00:00,dr_lang,60-70,gynaecology\n"
      "patient_7,treatment,2011-03-05T11:00:00,dr_kim,60-70,gynaecology\n"
      "patient_7,check-up,2011-03-20T09:30:00,dr_lang,60-70,gynaecology\n",
      m);
  REQUIRE(events.size() == 5);
  CHECK(events[1].resource == "lab_2");
  CHECK(events[4].attrs.at("age_group") == "60-70");

  auto log = build_log(events);
  CHECK(log.traces.size() == 1);
  CHECK(log.schema.is_static("age_group"));
  CHECK(log.schema.is_static("department"));
}

TEST_CASE("parse_csv: bpic2012-shaped header parses") {
  ColumnMapping m;
  m.case_column = "Case ID";
  m.activity_column = "Activity";
  m.timestamp_column = "Complete Timestamp";
  m.resource_column = "Resource";
  m.attribute_columns = {"AMOUNT_REQ"};
  auto events = parse_text(
      "Case ID,Activity,Complete Timestamp,Resource,AMOUNT_REQ\n"
      "173688,A_SUBMITTED-COMPLETE,2011-10-01 08:08:58.256,112,20000\n"
      "173688,A_PARTLYSUBMITTED-COMPLETE,2011-10-01 08:09:02.195,112,20000\n"
      "173691,A_SUBMITTED-COMPLETE,2011-10-01 08:11:08.865,112,5000\n",
      m);
  REQUIRE(events.size() == 3);
  auto log = build_log(events);
  CHECK(log.case_count() == 2);
  CHECK(log.event_count() == 3);
  CHECK(log.schema.is_numeric("AMOUNT_REQ"));
  CHECK(log.schema.is_static("AMOUNT_REQ"));
}

TEST_CASE("round trip: write then re-parse yields identical events") {
  Rng rng(31, "ingest.roundtrip");
  auto log = ppmi::testsupport::random_log(&rng);

  auto path = temp_file("roundtrip.csv");
  ppmi::testsupport::write_log_csv(path.string(), log,
                                   {"cost", "channel", "region"});

  ColumnMapping m = basic_mapping();
  m.resource_column = "resource";
  m.attribute_columns = {"cost", "channel", "region"};
  auto reparsed = parse_csv(path.string(), m);

  std::vector<Event> original;
  for (const Trace& t : log.traces) {
    original.insert(original.end(), t.events.begin(), t.events.end());
  }
  REQUIRE(reparsed.size() == original.size());
  for (std::size_t i = 0; i < original.size(); ++i) {
    CHECK(reparsed[i].case_id == original[i].case_id);
    CHECK(reparsed[i].activity == original[i].activity);
    CHECK(reparsed[i].timestamp_ms == original[i].timestamp_ms);
    CHECK(reparsed[i].resource == original[i].resource);
    CHECK(reparsed[i].attrs == original[i].attrs);
  }
  std::filesystem::remove(path);
}

TEST_CASE("row count equals data-row count") {
  std::string text = "case_id,activity,timestamp\n";
  for (int i = 0; i < 57; ++i) {
    text += "c" + std::to_string(i % 5) + ",act,2011-10-01T08:00:00\n";
  }
  CHECK(parse_text(text, basic_mapping()).size() == 57);
}

TEST_CASE("parse_csv: unreadable file") {
  CHECK_THROWS_AS(parse_csv("/nonexistent/nope.csv", basic_mapping()), Error);
}
