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
#include "timeparse.hpp"

#include <cstdio>

namespace ppmi {

namespace {

struct Cursor {
  std::string_view text;
  std::size_t pos = 0;

  bool done() const { return pos >= text.size(); }
  char peek() const { return pos < text.size() ? text[pos] : '\0'; }
  bool eat(char c) {
    if (peek() != c) return false;
    ++pos;
    return true;
  }
};

bool read_digits(Cursor* c, int count, int* out) {
  int value = 0;
  for (int i = 0; i < count; ++i) {
    char ch = c->peek();
    if (ch < '0' || ch > '9') return false;
    value = value * 10 + (ch - '0');
    ++c->pos;
  }
  *out = value;
  return true;
}

// Fractional seconds: one or more digits, truncated to milliseconds.
bool read_fraction_ms(Cursor* c, int* out_ms) {
  int digits = 0;
  long long value = 0;
  while (c->peek() >= '0' && c->peek() <= '9') {
    if (digits < 3) value = value * 10 + (c->peek() - '0');
    ++digits;
    ++c->pos;
  }
  if (digits == 0) return false;
  while (digits < 3) {
    value *= 10;
    ++digits;
  }
  *out_ms = static_cast<int>(value);
  return true;
}

// Offset: 'Z', or ±HH[:MM] / ±HHMM. Returns offset minutes east of UTC.
bool read_offset(Cursor* c, int* out_minutes) {
  if (c->eat('Z') || c->eat('z')) {
    *out_minutes = 0;
    return true;
  }
  int sign = 0;
  if (c->eat('+')) sign = 1;
  else if (c->eat('-')) sign = -1;
  else return false;
  int hh = 0, mm = 0;
  if (!read_digits(c, 2, &hh)) return false;
  if (c->eat(':')) {
    if (!read_digits(c, 2, &mm)) return false;
  } else if (c->peek() >= '0' && c->peek() <= '9') {
    if (!read_digits(c, 2, &mm)) return false;
  }
  *out_minutes = sign * (hh * 60 + mm);
  return true;
}

struct Fields {
  int year = 0, month = 1, day = 1;
  int hour = 0, minute = 0, second = 0, millis = 0;
  int offset_minutes = 0;
};

std::optional<std::int64_t> to_epoch_ms(const Fields& f) {
  if (f.month < 1 || f.month > 12 || f.day < 1 || f.day > 31) return std::nullopt;
  if (f.hour > 23 || f.minute > 59 || f.second > 60) return std::nullopt;
  std::int64_t days = days_from_civil(f.year, f.month, f.day);
  std::int64_t secs = days * 86400 + f.hour * 3600 + f.minute * 60 + f.second;
  secs -= static_cast<std::int64_t>(f.offset_minutes) * 60;
  return secs * 1000 + f.millis;
}

std::optional<std::int64_t> parse_iso8601(std::string_view text) {
  Cursor c{text};
  Fields f;
  if (!read_digits(&c, 4, &f.year)) return std::nullopt;
  if (!c.eat('-') || !read_digits(&c, 2, &f.month)) return std::nullopt;
  if (!c.eat('-') || !read_digits(&c, 2, &f.day)) return std::nullopt;
  if (!c.done()) {
    if (!c.eat('T') && !c.eat(' ') && !c.eat('t')) return std::nullopt;
    if (!read_digits(&c, 2, &f.hour)) return std::nullopt;
    if (!c.eat(':') || !read_digits(&c, 2, &f.minute)) return std::nullopt;
    if (!c.eat(':') || !read_digits(&c, 2, &f.second)) return std::nullopt;
    if (c.eat('.') || c.eat(',')) {
      if (!read_fraction_ms(&c, &f.millis)) return std::nullopt;
    }
    if (!c.done()) {
      if (!read_offset(&c, &f.offset_minutes)) return std::nullopt;
    }
  }
  if (!c.done()) return std::nullopt;
  return to_epoch_ms(f);
}

std::optional<std::int64_t> parse_with_pattern(std::string_view text,
                                               std::string_view pattern) {
  Cursor c{text};
  Fields f;
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    char p = pattern[i];
    if (p != '%') {
      if (!c.eat(p)) return std::nullopt;
      continue;
    }
    if (++i >= pattern.size()) return std::nullopt;
    switch (pattern[i]) {
      case 'Y': if (!read_digits(&c, 4, &f.year)) return std::nullopt; break;
      case 'm': if (!read_digits(&c, 2, &f.month)) return std::nullopt; break;
      case 'd': if (!read_digits(&c, 2, &f.day)) return std::nullopt; break;
      case 'H': if (!read_digits(&c, 2, &f.hour)) return std::nullopt; break;
      case 'M': if (!read_digits(&c, 2, &f.minute)) return std::nullopt; break;
      case 'S': if (!read_digits(&c, 2, &f.second)) return std::nullopt; break;
      case 'f': if (!read_fraction_ms(&c, &f.millis)) return std::nullopt; break;
      case 'z': if (!read_offset(&c, &f.offset_minutes)) return std::nullopt; break;
      case '%': if (!c.eat('%')) return std::nullopt; break;
      default: return std::nullopt;
    }
  }
  if (!c.done()) return std::nullopt;
  return to_epoch_ms(f);
}

}  // namespace

std::int64_t days_from_civil(int year, int month, int day) {
  // Howard Hinnant's algorithm; proleptic Gregorian calendar.
  year -= month <= 2;
  const std::int64_t era = (year >= 0 ? year : year - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(year - era * 400);
  const unsigned doy = (153u * (month + (month > 2 ? -3 : 9)) + 2) / 5 + day - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

std::optional<std::int64_t> parse_timestamp(std::string_view text,
                                            std::string_view format) {
  if (text.empty()) return std::nullopt;
  if (format == kIso8601 || format.empty()) return parse_iso8601(text);
  return parse_with_pattern(text, format);
}

std::string format_timestamp(std::int64_t epoch_ms) {
  std::int64_t ms = epoch_ms % 1000;
  std::int64_t secs = epoch_ms / 1000;
  if (ms < 0) {
    ms += 1000;
    secs -= 1;
  }
  std::int64_t days = secs / 86400;
  std::int64_t rem = secs % 86400;
  if (rem < 0) {
    rem += 86400;
    days -= 1;
  }
  // Civil-from-days, inverse of days_from_civil.
  std::int64_t z = days + 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp + (mp < 10 ? 3 : -9);
  const std::int64_t year = y + (m <= 2);

  int hour = static_cast<int>(rem / 3600);
  int minute = static_cast<int>((rem % 3600) / 60);
  int second = static_cast<int>(rem % 60);
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%04lld-%02u-%02uT%02d:%02d:%02d.%03lldZ",
                static_cast<long long>(year), m, d, hour, minute, second,
                static_cast<long long>(ms));
  return std::string(buf);
}

}  // namespace ppmi
