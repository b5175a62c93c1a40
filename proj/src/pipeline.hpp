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

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "ingest.hpp"
#include "inspect.hpp"

namespace ppmi {

// Full run configuration, loaded from a versioned JSON document.
struct RunConfig {
  std::string log_path;
  ColumnMapping mapping;
  TargetSpec target;
  Bucket::Scheme bucketing = Bucket::Scheme::kSingle;
  EncodingSet encodings;
  int min_len = 1;
  int max_len = 40;
  int gap = 1;
  double split_ratio = 0.8;
  Hyperparams hp;

  std::string global_method = "gain";  // or "permutation"
  int permutation_repeats = 5;
  LocalConfig local;
  int local_instances = 3;  // local explanations generated by `inspect`

  InspectionConfig inspection;
  std::uint64_t seed = 42;
  std::string output_dir = ".";

  std::string digest;  // stable digest of the source document

  PipelineConfig pipeline_config() const;
};

RunConfig parse_run_config(const std::string& json_text, const std::string& origin);
RunConfig load_run_config(const std::string& path);

// One configured run over one log. Artifacts (parsed log, trained models,
// training statistics) are built lazily and reused across subcommands; all
// output files land in the configured output directory.
class PipelineSession {
 public:
  explicit PipelineSession(RunConfig config);
  ~PipelineSession();

  PipelineSession(const PipelineSession&) = delete;
  PipelineSession& operator=(const PipelineSession&) = delete;

  void set_seed(std::uint64_t seed);
  void set_output_dir(std::string dir);
  const RunConfig& config() const { return config_; }

  // Parse the log and report schema plus label coverage. No files written.
  nlohmann::json run_validate();

  // Train per-bucket models; writes metrics.json, plot_data.csv and one
  // model_<bucket>.json per trained bucket.
  nlohmann::json run_train();

  // Writes global_explanation.json (one entry per trained bucket).
  nlohmann::json run_explain_global();

  // Local surrogate for one (case, prefix length); writes
  // local_<case>_<L>.json.
  nlohmann::json run_explain_local(const std::string& case_id, int prefix_length);

  // Writes dfg.dot and dfg_statistics.json.
  nlohmann::json run_mine();

  struct InspectOutcome {
    nlohmann::json report_json;
    bool has_error_findings = false;
    int error_finding_count = 0;
  };

  // Full pipeline, then every inspection rule; writes
  // inspection_report.json and inspection_report.txt.
  InspectOutcome run_inspect();

 private:
  struct Artifacts;

  const EventLog& log();
  const Artifacts& artifacts();
  void write_text_file(const std::string& name, const std::string& content) const;
  std::string out_path(const std::string& name) const;

  RunConfig config_;
  std::unique_ptr<EventLog> log_;
  std::unique_ptr<Artifacts> artifacts_;
};

}  // namespace ppmi
