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
#include "ppminspect/c_api.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "pipeline.hpp"

struct ppmi_session {
  ppmi::PipelineSession impl;
};

namespace {

thread_local std::string t_last_error;

ppmi_status status_from_code(ppmi::ErrorCode code) {
  switch (code) {
    case ppmi::ErrorCode::kInvalidArgument: return PPMI_ERROR_INVALID_ARGUMENT;
    case ppmi::ErrorCode::kIo: return PPMI_ERROR_IO;
    case ppmi::ErrorCode::kConfig: return PPMI_ERROR_CONFIG;
    case ppmi::ErrorCode::kData: return PPMI_ERROR_DATA;
    case ppmi::ErrorCode::kState: return PPMI_ERROR_STATE;
    case ppmi::ErrorCode::kInternal: return PPMI_ERROR_INTERNAL;
  }
  return PPMI_ERROR_INTERNAL;
}

char* copy_string(const std::string& text) {
  char* out = static_cast<char*>(std::malloc(text.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, text.data(), text.size() + 1);
  return out;
}

template <typename Fn>
ppmi_status guarded(Fn&& fn) {
  try {
    fn();
    t_last_error.clear();
    return PPMI_OK;
  } catch (const ppmi::Error& e) {
    t_last_error = e.what();
    return status_from_code(e.code());
  } catch (const std::exception& e) {
    t_last_error = e.what();
    return PPMI_ERROR_INTERNAL;
  } catch (...) {
    t_last_error = "unknown error";
    return PPMI_ERROR_INTERNAL;
  }
}

ppmi_status require(bool condition, const char* message) {
  if (condition) return PPMI_OK;
  t_last_error = message;
  return PPMI_ERROR_INVALID_ARGUMENT;
}

}  // namespace

extern "C" {

const char* ppmi_version(void) { return "0.1.0"; }

const char* ppmi_last_error(void) { return t_last_error.c_str(); }

ppmi_status ppmi_session_open(const char* config_json, ppmi_session** out) {
  if (auto s = require(config_json && out, "ppmi_session_open: NULL argument")) return s;
  *out = nullptr;
  return guarded([&] {
    ppmi::RunConfig config = ppmi::parse_run_config(config_json, "<config>");
    *out = new ppmi_session{ppmi::PipelineSession(std::move(config))};
  });
}

ppmi_status ppmi_session_open_file(const char* path, ppmi_session** out) {
  if (auto s = require(path && out, "ppmi_session_open_file: NULL argument")) return s;
  *out = nullptr;
  return guarded([&] {
    ppmi::RunConfig config = ppmi::load_run_config(path);
    *out = new ppmi_session{ppmi::PipelineSession(std::move(config))};
  });
}

void ppmi_session_close(ppmi_session* session) { delete session; }

ppmi_status ppmi_session_set_seed(ppmi_session* session, uint64_t seed) {
  if (auto s = require(session != nullptr, "ppmi_session_set_seed: NULL session")) return s;
  return guarded([&] { session->impl.set_seed(seed); });
}

ppmi_status ppmi_session_set_output_dir(ppmi_session* session, const char* dir) {
  if (auto s = require(session && dir, "ppmi_session_set_output_dir: NULL argument")) {
    return s;
  }
  return guarded([&] { session->impl.set_output_dir(dir); });
}

ppmi_status ppmi_validate(ppmi_session* session, char** summary_json) {
  if (auto s = require(session && summary_json, "ppmi_validate: NULL argument")) return s;
  return guarded([&] { *summary_json = copy_string(session->impl.run_validate().dump(2)); });
}

ppmi_status ppmi_train(ppmi_session* session, char** metrics_json) {
  if (auto s = require(session && metrics_json, "ppmi_train: NULL argument")) return s;
  return guarded([&] { *metrics_json = copy_string(session->impl.run_train().dump(2)); });
}

ppmi_status ppmi_explain_global(ppmi_session* session, char** explanation_json) {
  if (auto s = require(session && explanation_json, "ppmi_explain_global: NULL argument")) {
    return s;
  }
  return guarded(
      [&] { *explanation_json = copy_string(session->impl.run_explain_global().dump(2)); });
}

ppmi_status ppmi_explain_local(ppmi_session* session, const char* case_id,
                               int prefix_length, char** explanation_json) {
  if (auto s = require(session && case_id && explanation_json,
                       "ppmi_explain_local: NULL argument")) {
    return s;
  }
  return guarded([&] {
    *explanation_json =
        copy_string(session->impl.run_explain_local(case_id, prefix_length).dump(2));
  });
}

ppmi_status ppmi_mine(ppmi_session* session, char** stats_json) {
  if (auto s = require(session && stats_json, "ppmi_mine: NULL argument")) return s;
  return guarded([&] { *stats_json = copy_string(session->impl.run_mine().dump(2)); });
}

ppmi_status ppmi_inspect(ppmi_session* session, int* error_finding_count,
                         char** report_json) {
  if (auto s = require(session && report_json, "ppmi_inspect: NULL argument")) return s;
  return guarded([&] {
    auto outcome = session->impl.run_inspect();
    if (error_finding_count) *error_finding_count = outcome.error_finding_count;
    *report_json = copy_string(outcome.report_json.dump(2));
  });
}

void ppmi_string_free(char* text) { std::free(text); }

}  // extern "C"
