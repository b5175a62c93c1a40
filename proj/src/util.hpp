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
#include <stdexcept>
#include <string>
#include <string_view>

namespace ppmi {

enum class ErrorCode {
  kInvalidArgument,
  kIo,
  kConfig,
  kData,
  kState,
  kInternal,
};

// Single exception type used across the core; the code survives the trip
// through the C API boundary as a status value.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

// Percent-escaping for raw values embedded in rendered feature names.
// '%', '|' and '=' are always escaped; '_' is escaped only inside a run of
// two or more so that single underscores in attribute names stay readable
// while the "__" namespace separator never appears in a payload.
std::string escape_component(std::string_view raw);
std::optional<std::string> unescape_component(std::string_view escaped);

// Shortest decimal representation that round-trips through a double.
std::string format_double(double value);

bool parse_finite_double(std::string_view text, double* out);

// FNV-1a, used for stable config digests and seed sub-stream derivation.
std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t value);

}  // namespace ppmi
