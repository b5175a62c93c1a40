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
#include "inspect.hpp"

#include <algorithm>
#include <sstream>

namespace ppmi {

void InspectionConfig::validate() const {
  if (top_k < 1) fail(ErrorCode::kConfig, "inspection: top_k must be >= 1");
  auto in_unit = [](double v) { return v > 0.0 && v <= 1.0; };
  if (!in_unit(leak_ratio) || !in_unit(static_share) || !in_unit(density_floor)) {
    fail(ErrorCode::kConfig,
         "inspection: leak_ratio, static_share and density_floor must be in (0,1]");
  }
}

const char* finding_kind_name(FindingKind kind) {
  switch (kind) {
    case FindingKind::kDirectLeakage: return "DirectLeakage";
    case FindingKind::kCorrelatedLeakage: return "CorrelatedLeakage";
    case FindingKind::kIrrelevantFeature: return "IrrelevantFeature";
    case FindingKind::kStaticDominance: return "StaticDominance";
    case FindingKind::kSparsityWarning: return "SparsityWarning";
  }
  return "DirectLeakage";
}

const char* severity_name(Severity severity) {
  switch (severity) {
    case Severity::kError: return "error";
    case Severity::kWarning: return "warning";
    case Severity::kInfo: return "info";
  }
  return "info";
}

bool InspectionReport::has_errors() const {
  return std::any_of(findings.begin(), findings.end(),
                     [](const Finding& f) { return f.severity == Severity::kError; });
}

std::map<std::string, std::size_t> InspectionReport::counts_by_severity() const {
  std::map<std::string, std::size_t> counts;
  for (const Finding& f : findings) counts[severity_name(f.severity)] += 1;
  return counts;
}

std::map<std::string, std::size_t> InspectionReport::counts_by_kind() const {
  std::map<std::string, std::size_t> counts;
  for (const Finding& f : findings) counts[finding_kind_name(f.kind)] += 1;
  return counts;
}

std::vector<Finding> inspect_leakage(const GlobalExplanation& global,
                                     const LabelSpec& label, const EventLog& log,
                                     const InspectionConfig& cfg,
                                     std::vector<std::string>* notes) {
  cfg.validate();

  const std::vector<std::string> label_activities = label.referenced_activities();
  for (const std::string& la : label_activities) {
    if (!min_prefix_index(log, la)) {
      fail(ErrorCode::kData,
           "inspect_leakage: label activity '" + la + "' does not occur in the log");
    }
  }

  std::vector<Finding> findings;
  const std::size_t limit =
      std::min<std::size_t>(static_cast<std::size_t>(cfg.top_k), global.ranking.size());
  for (std::size_t i = 0; i < limit; ++i) {
    const auto& [name, importance] = global.ranking[i];
    auto parsed = FeatureName::parse(name);
    if (!parsed) {
      if (notes) notes->push_back("leakage rule skipped unparseable feature '" + name + "'");
      continue;
    }
    auto activity = parsed->activity();
    if (!activity) continue;

    if (std::find(label_activities.begin(), label_activities.end(), *activity) !=
        label_activities.end()) {
      Finding f;
      f.kind = FindingKind::kDirectLeakage;
      f.severity = Severity::kError;
      f.subjects = {name};
      f.evidence["importance"] = importance;
      f.evidence["rank"] = static_cast<double>(i + 1);
      f.message = "feature '" + name + "' references activity '" + *activity +
                  "', which is part of the outcome label";
      findings.push_back(std::move(f));
      continue;
    }

    for (const std::string& la : label_activities) {
      double follows = eventually_follows_ratio(log, la, *activity);
      double precedes = precedes_ratio(log, *activity, la);
      if (follows >= cfg.leak_ratio || precedes >= cfg.leak_ratio) {
        Finding f;
        f.kind = FindingKind::kCorrelatedLeakage;
        f.severity = Severity::kWarning;
        f.subjects = {name};
        f.evidence["importance"] = importance;
        f.evidence["rank"] = static_cast<double>(i + 1);
        f.evidence["eventually_follows_ratio"] = follows;
        f.evidence["precedes_ratio"] = precedes;
        f.evidence["leak_ratio_threshold"] = cfg.leak_ratio;
        f.message = "activity '" + *activity + "' co-occurs with label activity '" + la +
                    "' (follows " + format_double(follows) + ", precedes " +
                    format_double(precedes) + ", threshold " +
                    format_double(cfg.leak_ratio) + ")";
        findings.push_back(std::move(f));
        break;
      }
    }
  }
  return findings;
}

std::vector<Finding> inspect_relevance(const LocalExplanation& local, int prefix_length,
                                       const EventLog& log, const InspectionConfig& cfg) {
  cfg.validate();

  std::vector<Finding> findings;
  for (const Attribution& attribution : local.attributions) {
    // Only absence conditions on activity-derived features are in scope.
    if (attribution.condition != attribution.feature + " <= 0") continue;
    auto parsed = FeatureName::parse(attribution.feature);
    if (!parsed) continue;
    auto activity = parsed->activity();
    if (!activity) continue;
    auto min_index = min_prefix_index(log, *activity);
    if (!min_index || *min_index <= prefix_length) continue;

    Finding f;
    f.kind = FindingKind::kIrrelevantFeature;
    f.severity = Severity::kError;
    f.subjects = {attribution.feature};
    f.evidence["min_prefix_index"] = static_cast<double>(*min_index);
    f.evidence["prefix_length"] = static_cast<double>(prefix_length);
    f.evidence["attribution_weight"] = attribution.weight;
    f.message = "absence of activity '" + *activity + "' cited at prefix length " +
                std::to_string(prefix_length) + ", but it never occurs before index " +
                std::to_string(*min_index) + "; the feature cannot be relevant here";
    findings.push_back(std::move(f));
  }
  return findings;
}

std::vector<Finding> inspect_static_dominance(const GlobalExplanation& global,
                                              const AttributeSchema& schema, Task task,
                                              const InspectionConfig& cfg) {
  cfg.validate();
  if (task != Task::kSquaredError) {
    fail(ErrorCode::kInvalidArgument,
         "inspect_static_dominance: rule applies to regression models only");
  }

  const std::size_t limit =
      std::min<std::size_t>(static_cast<std::size_t>(cfg.top_k), global.ranking.size());
  double total = 0.0, static_total = 0.0;
  std::vector<std::string> static_features;
  for (std::size_t i = 0; i < limit; ++i) {
    const auto& [name, importance] = global.ranking[i];
    total += importance;
    auto parsed = FeatureName::parse(name);
    if (!parsed) continue;
    bool is_static = parsed->kind == FeatureName::Kind::kStaticOneHot ||
                     parsed->kind == FeatureName::Kind::kStaticNumeric;
    if (is_static && schema.attributes.count(parsed->a) &&
        !schema.is_static(parsed->a)) {
      is_static = false;  // name collision with a dynamic attribute
    }
    if (is_static) {
      static_total += importance;
      static_features.push_back(name);
    }
  }

  std::vector<Finding> findings;
  if (total <= 0.0) return findings;
  const double share = static_total / total;
  if (share >= cfg.static_share) {
    Finding f;
    f.kind = FindingKind::kStaticDominance;
    f.severity = Severity::kWarning;
    f.subjects = static_features;
    f.evidence["static_share"] = share;
    f.evidence["static_share_threshold"] = cfg.static_share;
    f.evidence["top_k"] = static_cast<double>(limit);
    f.message = "static features hold " + format_double(share) +
                " of the top-" + std::to_string(limit) +
                " importance mass for a remaining-time model";
    findings.push_back(std::move(f));
  }
  return findings;
}

std::vector<Finding> inspect_sparsity(const FeatureMatrix& matrix,
                                      const InspectionConfig& cfg) {
  cfg.validate();
  SparsityReport report = sparsity_report(matrix);

  std::vector<Finding> findings;
  if (report.density < cfg.density_floor) {
    Finding f;
    f.kind = FindingKind::kSparsityWarning;
    f.severity = Severity::kInfo;
    f.evidence["feature_count"] = static_cast<double>(report.feature_count);
    f.evidence["density"] = report.density;
    f.evidence["density_floor"] = cfg.density_floor;
    f.message = "encoded matrix has " + std::to_string(report.feature_count) +
                " features at density " + format_double(report.density) +
                "; explanations over such sparse inputs tend toward absence statements";
    findings.push_back(std::move(f));
  }
  return findings;
}

InspectionReport build_report(std::vector<Finding> findings, ReportMetadata metadata) {
  std::sort(findings.begin(), findings.end(), [](const Finding& a, const Finding& b) {
    if (a.severity != b.severity) {
      return static_cast<int>(a.severity) < static_cast<int>(b.severity);
    }
    if (a.kind != b.kind) return static_cast<int>(a.kind) < static_cast<int>(b.kind);
    const std::string& sa = a.subjects.empty() ? a.message : a.subjects.front();
    const std::string& sb = b.subjects.empty() ? b.message : b.subjects.front();
    return sa < sb;
  });
  InspectionReport report;
  report.metadata = std::move(metadata);
  report.findings = std::move(findings);
  return report;
}

nlohmann::json report_to_json(const InspectionReport& report) {
  nlohmann::json findings = nlohmann::json::array();
  for (const Finding& f : report.findings) {
    findings.push_back({{"kind", finding_kind_name(f.kind)},
                        {"severity", severity_name(f.severity)},
                        {"subjects", f.subjects},
                        {"evidence", f.evidence},
                        {"message", f.message}});
  }
  return nlohmann::json{
      {"metadata",
       {{"config_digest", report.metadata.config_digest},
        {"model_id", report.metadata.model_id},
        {"log_id", report.metadata.log_id},
        {"seed", report.metadata.seed},
        {"notes", report.metadata.notes}}},
      {"findings", findings},
      {"summary",
       {{"total", report.findings.size()},
        {"by_severity", report.counts_by_severity()},
        {"by_kind", report.counts_by_kind()}}}};
}

std::string report_to_text(const InspectionReport& report) {
  std::ostringstream out;
  out << "inspection report\n";
  out << "  log: " << report.metadata.log_id << "\n";
  out << "  model: " << report.metadata.model_id << "\n";
  out << "  config digest: " << report.metadata.config_digest << "\n";
  out << "  seed: " << report.metadata.seed << "\n";
  auto by_severity = report.counts_by_severity();
  out << "  findings: " << report.findings.size();
  if (!report.findings.empty()) {
    out << " (";
    bool first = true;
    for (const auto& [severity, count] : by_severity) {
      if (!first) out << ", ";
      out << count << " " << severity;
      first = false;
    }
    out << ")";
  }
  out << "\n\n";
  for (const Finding& f : report.findings) {
    out << "[" << severity_name(f.severity) << "] " << finding_kind_name(f.kind) << ": "
        << f.message << "\n";
    if (!f.subjects.empty()) {
      out << "    subjects:";
      for (const auto& s : f.subjects) out << " " << s;
      out << "\n";
    }
    for (const auto& [key, value] : f.evidence) {
      out << "    " << key << " = " << format_double(value) << "\n";
    }
  }
  for (const auto& note : report.metadata.notes) {
    out << "[note] " << note << "\n";
  }
  return out.str();
}

}  // namespace ppmi
