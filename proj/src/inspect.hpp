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

#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "explain.hpp"
#include "mine.hpp"

namespace ppmi {

struct InspectionConfig {
  int top_k = 10;
  double leak_ratio = 0.5;     // tau
  double static_share = 0.6;   // theta
  double density_floor = 0.05;

  void validate() const;
};

enum class FindingKind {
  kDirectLeakage,
  kCorrelatedLeakage,
  kIrrelevantFeature,
  kStaticDominance,
  kSparsityWarning,
};

enum class Severity { kError, kWarning, kInfo };

const char* finding_kind_name(FindingKind kind);
const char* severity_name(Severity severity);

// A rule hit. `evidence` carries every statistic the rule compared against a
// threshold, so findings can be recomputed from the log.
struct Finding {
  FindingKind kind = FindingKind::kDirectLeakage;
  Severity severity = Severity::kInfo;
  std::vector<std::string> subjects;  // rendered feature names
  std::map<std::string, double> evidence;
  std::string message;
};

struct ReportMetadata {
  std::string config_digest;
  std::string model_id;
  std::string log_id;
  std::uint64_t seed = 0;
  std::vector<std::string> notes;
};

struct InspectionReport {
  ReportMetadata metadata;
  std::vector<Finding> findings;

  bool has_errors() const;
  std::map<std::string, std::size_t> counts_by_severity() const;
  std::map<std::string, std::size_t> counts_by_kind() const;
};

// Top-k features that resolve to activities are checked against the label:
// label-defining activities are direct leakage; otherwise order statistics
// against each label activity at threshold tau decide correlated leakage.
// Feature names that do not parse are skipped with a note.
std::vector<Finding> inspect_leakage(const GlobalExplanation& global,
                                     const LabelSpec& label, const EventLog& log,
                                     const InspectionConfig& cfg,
                                     std::vector<std::string>* notes = nullptr);

// Attributions citing the absence of an activity that cannot have occurred
// by prefix length L are unreliable.
std::vector<Finding> inspect_relevance(const LocalExplanation& local, int prefix_length,
                                       const EventLog& log, const InspectionConfig& cfg);

// Share of static-feature importance among the top-k for regression models.
std::vector<Finding> inspect_static_dominance(const GlobalExplanation& global,
                                              const AttributeSchema& schema, Task task,
                                              const InspectionConfig& cfg);

std::vector<Finding> inspect_sparsity(const FeatureMatrix& matrix,
                                      const InspectionConfig& cfg);

// Deterministic ordering: severity desc, kind, first subject.
InspectionReport build_report(std::vector<Finding> findings, ReportMetadata metadata);

nlohmann::json report_to_json(const InspectionReport& report);
std::string report_to_text(const InspectionReport& report);

}  // namespace ppmi
