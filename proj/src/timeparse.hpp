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
#include <optional>
#include <string>
#include <string_view>

namespace ppmi {

// Format name for the default parser: ISO-8601 date-time, 'T' or ' '
// separator, optional fractional seconds (kept to millisecond precision),
// optional 'Z' or +HH:MM offset. Everything is normalised to UTC.
inline constexpr const char* kIso8601 = "iso8601";

// Parses `text` with either the default ISO-8601 parser or an explicit
// pattern using a strptime subset: %Y %m %d %H %M %S %f (fraction) %z,
// all other characters literal. Returns epoch milliseconds (UTC).
std::optional<std::int64_t> parse_timestamp(std::string_view text,
                                            std::string_view format = kIso8601);

// ISO-8601 with milliseconds, UTC ("2011-10-01T08:30:00.000Z").
std::string format_timestamp(std::int64_t epoch_ms);

// Days-from-civil conversion, exposed for tests.
std::int64_t days_from_civil(int year, int month, int day);

}  // namespace ppmi
