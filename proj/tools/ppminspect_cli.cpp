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

// Command line front end. Talks to the core exclusively through the C API so
// it doubles as a smoke test for the shared-library surface.

#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>

#include "CLI11.hpp"

#include "ppminspect/c_api.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFindings = 1;
constexpr int kExitInputError = 2;

struct SessionCloser {
  void operator()(ppmi_session* s) const { ppmi_session_close(s); }
};
using SessionPtr = std::unique_ptr<ppmi_session, SessionCloser>;

struct StringFree {
  void operator()(char* s) const { ppmi_string_free(s); }
};
using ApiString = std::unique_ptr<char, StringFree>;

int report_failure(const char* what) {
  std::fprintf(stderr, "ppminspect: %s failed: %s\n", what, ppmi_last_error());
  return kExitInputError;
}

SessionPtr open_session(const std::string& config_path, const std::string& out_dir,
                        bool has_seed, std::uint64_t seed) {
  ppmi_session* raw = nullptr;
  if (ppmi_session_open_file(config_path.c_str(), &raw) != PPMI_OK) {
    report_failure("loading config");
    return nullptr;
  }
  SessionPtr session(raw);
  if (!out_dir.empty() &&
      ppmi_session_set_output_dir(session.get(), out_dir.c_str()) != PPMI_OK) {
    report_failure("setting output dir");
    return nullptr;
  }
  if (has_seed && ppmi_session_set_seed(session.get(), seed) != PPMI_OK) {
    report_failure("setting seed");
    return nullptr;
  }
  return session;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Train, explain, mine and inspect business process prediction models"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool strict = false;
  std::string case_id;
  int prefix_length = 0;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "run configuration (JSON)")->required();
    cmd->add_option("--out", out_dir, "output directory (overrides config)");
    cmd->add_option("--seed", seed, "global seed (overrides config)");
  };

  CLI::App* validate = app.add_subcommand("validate", "parse the log, report the schema");
  CLI::App* train = app.add_subcommand("train", "train models, write metrics and plot data");
  CLI::App* explain = app.add_subcommand("explain", "write global (and local) explanations");
  CLI::App* mine = app.add_subcommand("mine", "discover the process graph");
  CLI::App* inspect = app.add_subcommand("inspect", "run the full pipeline and inspection");
  for (CLI::App* cmd : {validate, train, explain, mine, inspect}) add_common(cmd);
  explain->add_option("--case", case_id, "case id for a local explanation");
  explain->add_option("--prefix", prefix_length, "prefix length for a local explanation")
      ->check(CLI::PositiveNumber);
  inspect->add_flag("--strict", strict, "exit 1 when any error-severity finding exists");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInputError;
  }

  bool has_seed = false;
  for (CLI::App* cmd : {validate, train, explain, mine, inspect}) {
    if (cmd->parsed() && cmd->count("--seed") > 0) has_seed = true;
  }

  SessionPtr session = open_session(config_path, out_dir, has_seed, seed);
  if (!session) return kExitInputError;

  if (validate->parsed()) {
    char* summary = nullptr;
    if (ppmi_validate(session.get(), &summary) != PPMI_OK) {
      return report_failure("validate");
    }
    ApiString guard(summary);
    std::printf("%s\n", summary);
    return kExitOk;
  }

  if (train->parsed()) {
    char* metrics = nullptr;
    if (ppmi_train(session.get(), &metrics) != PPMI_OK) return report_failure("train");
    ApiString guard(metrics);
    std::printf("%s\n", metrics);
    return kExitOk;
  }

  if (explain->parsed()) {
    if (case_id.empty() != (prefix_length == 0)) {
      std::fprintf(stderr, "ppminspect: --case and --prefix must be given together\n");
      return kExitInputError;
    }
    char* global = nullptr;
    if (ppmi_explain_global(session.get(), &global) != PPMI_OK) {
      return report_failure("explain");
    }
    ApiString global_guard(global);
    std::printf("%s\n", global);
    if (!case_id.empty()) {
      char* local = nullptr;
      if (ppmi_explain_local(session.get(), case_id.c_str(), prefix_length, &local) !=
          PPMI_OK) {
        return report_failure("local explanation");
      }
      ApiString local_guard(local);
      std::printf("%s\n", local);
    }
    return kExitOk;
  }

  if (mine->parsed()) {
    char* stats = nullptr;
    if (ppmi_mine(session.get(), &stats) != PPMI_OK) return report_failure("mine");
    ApiString guard(stats);
    std::printf("%s\n", stats);
    return kExitOk;
  }

  if (inspect->parsed()) {
    char* report = nullptr;
    int error_findings = 0;
    if (ppmi_inspect(session.get(), &error_findings, &report) != PPMI_OK) {
      return report_failure("inspect");
    }
    ApiString guard(report);
    std::printf("%s\n", report);
    if (strict && error_findings > 0) {
      std::fprintf(stderr, "ppminspect: %d error-severity finding(s)\n", error_findings);
      return kExitFindings;
    }
    return kExitOk;
  }

  return kExitInputError;
}
