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
#include "pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <unordered_set>

namespace ppmi {

namespace {

const nlohmann::json* maybe(const nlohmann::json& doc, const char* key) {
  auto it = doc.find(key);
  return it == doc.end() ? nullptr : &*it;
}

[[noreturn]] void config_error(const std::string& origin, const std::string& message) {
  fail(ErrorCode::kConfig, origin + ": " + message);
}

}  // namespace

PipelineConfig RunConfig::pipeline_config() const {
  PipelineConfig pc;
  pc.target = target;
  pc.bucketing = bucketing;
  pc.encodings = encodings;
  pc.min_len = min_len;
  pc.max_len = max_len;
  pc.gap = gap;
  pc.split_ratio = split_ratio;
  pc.hp = hp;
  pc.hp.seed = seed;
  return pc;
}

RunConfig parse_run_config(const std::string& json_text, const std::string& origin) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    config_error(origin, std::string("invalid JSON: ") + e.what());
  }

  try {
    if (doc.value("version", 0) != 1) {
      config_error(origin, "missing or unsupported \"version\" (expected 1)");
    }

    RunConfig cfg;
    cfg.digest = hex64(fnv1a64(doc.dump()));

    const nlohmann::json* log = maybe(doc, "log");
    if (!log) config_error(origin, "missing \"log\" section");
    cfg.log_path = log->value("path", "");
    if (cfg.log_path.empty()) config_error(origin, "log.path is required");
    cfg.mapping.case_column = log->value("case_column", "");
    cfg.mapping.activity_column = log->value("activity_column", "");
    cfg.mapping.timestamp_column = log->value("timestamp_column", "");
    if (cfg.mapping.case_column.empty() || cfg.mapping.activity_column.empty() ||
        cfg.mapping.timestamp_column.empty()) {
      config_error(origin,
                   "log.case_column, log.activity_column and log.timestamp_column "
                   "are required");
    }
    if (auto* res = maybe(*log, "resource_column")) {
      cfg.mapping.resource_column = res->get<std::string>();
    }
    if (auto* attrs = maybe(*log, "attribute_columns")) {
      cfg.mapping.attribute_columns = attrs->get<std::vector<std::string>>();
    }
    cfg.mapping.timestamp_format = log->value("timestamp_format", "iso8601");

    const nlohmann::json* target = maybe(doc, "target");
    if (!target) config_error(origin, "missing \"target\" section");
    std::string kind = target->value("kind", "");
    if (kind == "outcome") {
      cfg.target.kind = PredictionTarget::Kind::kOutcome;
      const nlohmann::json* label = maybe(*target, "label");
      if (!label) config_error(origin, "outcome target requires \"target.label\"");
      std::string type = label->value("type", "");
      if (type == "contains_activity") {
        std::string activity = label->value("activity", "");
        if (activity.empty()) config_error(origin, "label.activity is required");
        cfg.target.label = LabelSpec::contains(activity);
      } else if (type == "eventually_follows") {
        std::string first = label->value("first", "");
        std::string second = label->value("second", "");
        if (first.empty() || second.empty()) {
          config_error(origin, "label.first and label.second are required");
        }
        cfg.target.label = LabelSpec::eventually_follows(first, second);
      } else {
        config_error(origin, "label.type must be contains_activity or eventually_follows");
      }
    } else if (kind == "remaining_time") {
      cfg.target.kind = PredictionTarget::Kind::kRemainingTime;
    } else {
      config_error(origin, "target.kind must be outcome or remaining_time");
    }

    std::string bucketing = doc.value("bucketing", "single");
    if (bucketing == "single") cfg.bucketing = Bucket::Scheme::kSingle;
    else if (bucketing == "prefix_length") cfg.bucketing = Bucket::Scheme::kPrefixLength;
    else config_error(origin, "bucketing must be single or prefix_length");

    cfg.encodings = EncodingSet{};
    cfg.encodings.aggregation = false;
    const nlohmann::json* encodings = maybe(doc, "encodings");
    if (!encodings) config_error(origin, "missing \"encodings\" list");
    for (const auto& e : *encodings) {
      std::string name = e.get<std::string>();
      if (name == "static") cfg.encodings.static_attrs = true;
      else if (name == "aggregation") cfg.encodings.aggregation = true;
      else if (name == "index") cfg.encodings.index = true;
      else if (name == "engineered") cfg.encodings.engineered = true;
      else config_error(origin, "unknown encoding '" + name + "'");
    }

    if (auto* prefix = maybe(doc, "prefix")) {
      cfg.min_len = prefix->value("min", 1);
      cfg.max_len = prefix->value("max", 40);
      cfg.gap = prefix->value("gap", 1);
    }
    cfg.split_ratio = doc.value("split_ratio", 0.8);

    if (auto* hp = maybe(doc, "hyperparams")) {
      cfg.hp.n_rounds = hp->value("n_rounds", cfg.hp.n_rounds);
      cfg.hp.max_depth = hp->value("max_depth", cfg.hp.max_depth);
      cfg.hp.learning_rate = hp->value("learning_rate", cfg.hp.learning_rate);
      cfg.hp.l2_leaf = hp->value("l2_leaf", cfg.hp.l2_leaf);
      cfg.hp.min_split_gain = hp->value("min_split_gain", cfg.hp.min_split_gain);
      cfg.hp.min_child_hessian = hp->value("min_child_hessian", cfg.hp.min_child_hessian);
    }

    if (auto* explanation = maybe(doc, "explanation")) {
      cfg.global_method = explanation->value("global_method", "gain");
      if (cfg.global_method != "gain" && cfg.global_method != "permutation") {
        config_error(origin, "explanation.global_method must be gain or permutation");
      }
      cfg.permutation_repeats = explanation->value("permutation_repeats", 5);
      if (cfg.permutation_repeats < 1) {
        config_error(origin, "explanation.permutation_repeats must be >= 1");
      }
      cfg.local.n_samples = explanation->value("n_samples", cfg.local.n_samples);
      cfg.local.top_k = explanation->value("top_k", cfg.local.top_k);
      cfg.local.kernel_width = explanation->value("kernel_width", cfg.local.kernel_width);
      cfg.local.ridge = explanation->value("ridge", cfg.local.ridge);
      cfg.local_instances = explanation->value("local_instances", cfg.local_instances);
      if (cfg.local_instances < 0) {
        config_error(origin, "explanation.local_instances must be >= 0");
      }
    }

    if (auto* inspection = maybe(doc, "inspection")) {
      cfg.inspection.top_k = inspection->value("top_k", cfg.inspection.top_k);
      cfg.inspection.leak_ratio = inspection->value("leak_ratio", cfg.inspection.leak_ratio);
      cfg.inspection.static_share =
          inspection->value("static_share", cfg.inspection.static_share);
      cfg.inspection.density_floor =
          inspection->value("density_floor", cfg.inspection.density_floor);
    }

    cfg.seed = doc.value("seed", static_cast<std::uint64_t>(42));
    cfg.output_dir = doc.value("output_dir", ".");

    cfg.inspection.validate();
    cfg.pipeline_config().validate();
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    config_error(origin, std::string("malformed field: ") + e.what());
  }
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open config '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return parse_run_config(text, path);
}

// ---- Session ----

struct PipelineSession::Artifacts {
  TrainOutput trained;
  // Aligned with trained.models: training-side matrix and surrogate stats.
  std::vector<FeatureMatrix> train_matrices;
  std::vector<TrainingStats> stats;
  std::vector<GlobalExplanation> global_explanations;
};

PipelineSession::PipelineSession(RunConfig config) : config_(std::move(config)) {}
PipelineSession::~PipelineSession() = default;

void PipelineSession::set_seed(std::uint64_t seed) {
  if (seed != config_.seed) {
    config_.seed = seed;
    artifacts_.reset();  // explanations depend on the seed
  }
}

void PipelineSession::set_output_dir(std::string dir) {
  config_.output_dir = std::move(dir);
}

const EventLog& PipelineSession::log() {
  if (!log_) {
    std::vector<Event> events = parse_csv(config_.log_path, config_.mapping);
    log_ = std::make_unique<EventLog>(build_log(std::move(events)));
  }
  return *log_;
}

const PipelineSession::Artifacts& PipelineSession::artifacts() {
  if (artifacts_) return *artifacts_;

  auto artifacts = std::make_unique<Artifacts>();
  const EventLog& event_log = log();
  const PipelineConfig pc = config_.pipeline_config();
  artifacts->trained = train_pipeline(event_log, pc);

  // Rebuild the training-side buckets to derive matrices and stats for the
  // models that were actually trained. The reconstruction is deterministic.
  std::unordered_set<std::string> train_ids(
      artifacts->trained.split.train_case_ids.begin(),
      artifacts->trained.split.train_case_ids.end());
  std::vector<Prefix> prefixes =
      extract_prefixes(event_log, pc.min_len, pc.max_len, pc.gap, pc.target);
  std::vector<Prefix> train_prefixes;
  for (const Prefix& p : prefixes) {
    if (train_ids.count(p.case_id())) train_prefixes.push_back(p);
  }
  std::vector<Bucket> train_buckets =
      pc.bucketing == Bucket::Scheme::kSingle
          ? bucket_single(std::move(train_prefixes))
          : bucket_by_prefix_length(std::move(train_prefixes));

  for (const BucketModel& bm : artifacts->trained.models) {
    const Bucket* bucket = nullptr;
    for (const Bucket& b : train_buckets) {
      if (b.id == bm.bucket_id) {
        bucket = &b;
        break;
      }
    }
    if (!bucket) fail(ErrorCode::kInternal, "lost training bucket " + bm.bucket_id);
    FeatureMatrix matrix =
        encode_bucket(*bucket, event_log, event_log.schema, bm.vocab, pc.encodings);

    if (config_.global_method == "permutation") {
      std::vector<double> y;
      y.reserve(bucket->prefixes.size());
      for (const Prefix& p : bucket->prefixes) y.push_back(p.target.value());
      Metric metric = bm.model.task == Task::kBinaryLogistic ? Metric::kAuc : Metric::kMae;
      artifacts->global_explanations.push_back(
          permutation_importance(bm.model, matrix, y, metric, config_.permutation_repeats,
                                 config_.seed));
    } else {
      artifacts->global_explanations.push_back(gain_importance(bm.model));
    }
    artifacts->stats.push_back(TrainingStats::compute(matrix));
    artifacts->train_matrices.push_back(std::move(matrix));
  }

  artifacts_ = std::move(artifacts);
  return *artifacts_;
}

std::string PipelineSession::out_path(const std::string& name) const {
  std::filesystem::path dir(config_.output_dir);
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

void PipelineSession::write_text_file(const std::string& name,
                                      const std::string& content) const {
  std::string path = out_path(name);
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, "cannot write '" + path + "'");
  out << content;
}

nlohmann::json PipelineSession::run_validate() {
  const EventLog& event_log = log();

  nlohmann::json schema = nlohmann::json::object();
  for (const auto& [name, info] : event_log.schema.attributes) {
    schema[name] = {
        {"kind", info.kind == AttributeKind::kStatic ? "static" : "dynamic"},
        {"value_type",
         info.value_type == ValueType::kNumeric ? "numeric" : "categorical"}};
  }

  std::set<std::string> activities;
  int min_len = 0, max_len = 0;
  for (const Trace& t : event_log.traces) {
    for (const Event& e : t.events) activities.insert(e.activity);
    min_len = min_len == 0 ? t.length() : std::min(min_len, t.length());
    max_len = std::max(max_len, t.length());
  }

  nlohmann::json doc{{"log", config_.log_path},
                     {"cases", event_log.case_count()},
                     {"events", event_log.event_count()},
                     {"activities", activities.size()},
                     {"min_trace_length", min_len},
                     {"max_trace_length", max_len},
                     {"schema", schema}};
  if (config_.target.kind == PredictionTarget::Kind::kOutcome) {
    nlohmann::json label = nlohmann::json::object();
    for (const std::string& a : config_.target.label.referenced_activities()) {
      label[a] = activities.count(a) > 0;
    }
    doc["label_activities_present"] = label;
  }
  return doc;
}

nlohmann::json PipelineSession::run_train() {
  const Artifacts& art = artifacts();
  const TrainOutput& trained = art.trained;
  const bool classification =
      config_.target.kind == PredictionTarget::Kind::kOutcome;
  const char* metric = classification ? "auc" : "mae";

  nlohmann::json buckets = nlohmann::json::array();
  for (std::size_t i = 0; i < trained.models.size(); ++i) {
    const BucketModel& bm = trained.models[i];
    buckets.push_back({{"id", bm.bucket_id},
                       {"prefix_length", bm.prefix_length},
                       {"trees", bm.model.trees.size()},
                       {"features", bm.model.n_features()}});
    write_text_file("model_" + bm.bucket_id + ".json",
                    model_to_json(bm.model).dump(2) + "\n");
  }

  nlohmann::json series = nlohmann::json::array();
  std::string plot_data = "prefix_length,metric_name,value\n";
  for (const auto& [length, value] : trained.metrics.per_length) {
    series.push_back({{"prefix_length", length}, {"metric", metric}, {"value", value}});
    plot_data += std::to_string(length) + "," + metric + "," + format_double(value) + "\n";
  }

  nlohmann::json overall = nlohmann::json::object();
  if (trained.metrics.auc) overall["auc"] = *trained.metrics.auc;
  if (trained.metrics.mae) overall["mae"] = *trained.metrics.mae;

  nlohmann::json doc{{"task", classification ? "binary_logistic" : "squared_error"},
                     {"overall", overall},
                     {"series", series},
                     {"buckets", buckets},
                     {"split",
                      {{"train_cases", trained.split.train_case_ids.size()},
                       {"test_cases", trained.split.test_case_ids.size()}}},
                     {"warnings", trained.metrics.warnings},
                     {"seed", config_.seed}};

  write_text_file("metrics.json", doc.dump(2) + "\n");
  write_text_file("plot_data.csv", plot_data);
  return doc;
}

nlohmann::json PipelineSession::run_explain_global() {
  const Artifacts& art = artifacts();
  nlohmann::json buckets = nlohmann::json::array();
  for (std::size_t i = 0; i < art.trained.models.size(); ++i) {
    nlohmann::json entry = global_explanation_to_json(art.global_explanations[i]);
    entry["bucket_id"] = art.trained.models[i].bucket_id;
    entry["prefix_length"] = art.trained.models[i].prefix_length;
    buckets.push_back(std::move(entry));
  }
  nlohmann::json doc{{"seed", config_.seed}, {"buckets", buckets}};
  write_text_file("global_explanation.json", doc.dump(2) + "\n");
  return doc;
}

namespace {

std::string sanitize_for_filename(const std::string& raw) {
  std::string out;
  for (char c : raw) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
              c == '.' || c == '-' || c == '_';
    out.push_back(ok ? c : '_');
  }
  return out;
}

}  // namespace

nlohmann::json PipelineSession::run_explain_local(const std::string& case_id,
                                                  int prefix_length) {
  const EventLog& event_log = log();
  const Trace* trace = event_log.find_trace(case_id);
  if (!trace) fail(ErrorCode::kInvalidArgument, "no case with id '" + case_id + "'");
  if (prefix_length < 1 || prefix_length > trace->length()) {
    fail(ErrorCode::kInvalidArgument,
         "prefix length " + std::to_string(prefix_length) + " out of range for case '" +
             case_id + "' (trace length " + std::to_string(trace->length()) + ")");
  }

  const Artifacts& art = artifacts();
  std::size_t model_idx = art.trained.models.size();
  for (std::size_t i = 0; i < art.trained.models.size(); ++i) {
    if (config_.bucketing == Bucket::Scheme::kSingle ||
        art.trained.models[i].prefix_length == prefix_length) {
      model_idx = i;
      break;
    }
  }
  if (model_idx == art.trained.models.size()) {
    fail(ErrorCode::kInvalidArgument,
         "no trained model covers prefix length " + std::to_string(prefix_length));
  }
  const BucketModel& bm = art.trained.models[model_idx];

  Prefix prefix;
  prefix.trace = trace;
  prefix.length = prefix_length;
  prefix.target = config_.target.kind == PredictionTarget::Kind::kOutcome
                      ? PredictionTarget::outcome(
                            evaluate_label(*trace, config_.target.label))
                      : PredictionTarget::remaining_time(
                            compute_remaining_time(*trace, prefix_length));
  Bucket bucket;
  bucket.id = "query";
  bucket.scheme = config_.bucketing;
  bucket.prefix_length = config_.bucketing == Bucket::Scheme::kPrefixLength
                             ? prefix_length
                             : 0;
  bucket.prefixes = {prefix};
  FeatureMatrix matrix = encode_bucket(bucket, event_log, event_log.schema, bm.vocab,
                                       config_.encodings);

  LocalConfig lc = config_.local;
  lc.seed = config_.seed;
  LocalExplanation explanation =
      explain_local(bm.model, matrix, 0, art.stats[model_idx], lc);

  nlohmann::json doc = local_explanation_to_json(explanation);
  doc["bucket_id"] = bm.bucket_id;
  doc["seed"] = config_.seed;
  write_text_file("local_" + sanitize_for_filename(case_id) + "_" +
                      std::to_string(prefix_length) + ".json",
                  doc.dump(2) + "\n");
  return doc;
}

nlohmann::json PipelineSession::run_mine() {
  const EventLog& event_log = log();
  ProcessGraph graph = discover_dfg(event_log);
  write_text_file("dfg.dot", dfg_to_dot(graph));

  nlohmann::json stats = dfg_to_json(graph);
  nlohmann::json min_index = nlohmann::json::object();
  for (const auto& [activity, _] : graph.nodes) {
    if (auto idx = min_prefix_index(event_log, activity)) min_index[activity] = *idx;
  }
  stats["min_prefix_index"] = min_index;
  stats["cases"] = event_log.case_count();
  stats["events"] = event_log.event_count();
  write_text_file("dfg_statistics.json", stats.dump(2) + "\n");
  return stats;
}

PipelineSession::InspectOutcome PipelineSession::run_inspect() {
  const EventLog& event_log = log();
  const Artifacts& art = artifacts();

  std::vector<Finding> findings;
  std::vector<std::string> notes;
  const bool classification =
      config_.target.kind == PredictionTarget::Kind::kOutcome;

  for (std::size_t i = 0; i < art.trained.models.size(); ++i) {
    if (classification) {
      auto leak = inspect_leakage(art.global_explanations[i], config_.target.label,
                                  event_log, config_.inspection, &notes);
      findings.insert(findings.end(), leak.begin(), leak.end());
    } else {
      auto dominance = inspect_static_dominance(art.global_explanations[i],
                                                event_log.schema, Task::kSquaredError,
                                                config_.inspection);
      findings.insert(findings.end(), dominance.begin(), dominance.end());
    }
    auto sparsity = inspect_sparsity(art.train_matrices[i], config_.inspection);
    findings.insert(findings.end(), sparsity.begin(), sparsity.end());
  }

  // Local explanations for a deterministic sample of held-out prefixes.
  if (config_.local_instances > 0) {
    std::unordered_set<std::string> test_ids(art.trained.split.test_case_ids.begin(),
                                             art.trained.split.test_case_ids.end());
    const PipelineConfig pc = config_.pipeline_config();
    std::vector<Prefix> prefixes =
        extract_prefixes(event_log, pc.min_len, pc.max_len, pc.gap, pc.target);
    std::vector<const Prefix*> test_prefixes;
    for (const Prefix& p : prefixes) {
      if (test_ids.count(p.case_id())) test_prefixes.push_back(&p);
    }
    std::sort(test_prefixes.begin(), test_prefixes.end(),
              [](const Prefix* a, const Prefix* b) {
                if (a->length != b->length) return a->length < b->length;
                return a->case_id() < b->case_id();
              });
    int explained = 0;
    for (const Prefix* p : test_prefixes) {
      if (explained >= config_.local_instances) break;
      std::size_t model_idx = art.trained.models.size();
      for (std::size_t i = 0; i < art.trained.models.size(); ++i) {
        if (config_.bucketing == Bucket::Scheme::kSingle ||
            art.trained.models[i].prefix_length == p->length) {
          model_idx = i;
          break;
        }
      }
      if (model_idx == art.trained.models.size()) continue;
      const BucketModel& bm = art.trained.models[model_idx];

      Bucket bucket;
      bucket.id = "query";
      bucket.scheme = config_.bucketing;
      bucket.prefix_length =
          config_.bucketing == Bucket::Scheme::kPrefixLength ? p->length : 0;
      bucket.prefixes = {*p};
      FeatureMatrix matrix = encode_bucket(bucket, event_log, event_log.schema,
                                           bm.vocab, config_.encodings);
      LocalConfig lc = config_.local;
      lc.seed = config_.seed;
      LocalExplanation explanation =
          explain_local(bm.model, matrix, 0, art.stats[model_idx], lc);
      auto relevance =
          inspect_relevance(explanation, p->length, event_log, config_.inspection);
      findings.insert(findings.end(), relevance.begin(), relevance.end());
      ++explained;
    }
  }

  ReportMetadata metadata;
  metadata.config_digest = config_.digest;
  metadata.log_id = config_.log_path;
  metadata.model_id =
      std::string(config_.bucketing == Bucket::Scheme::kSingle ? "single" : "prefix") +
      "/" + (classification ? "outcome" : "remaining_time") + "/" +
      std::to_string(art.trained.models.size()) + " bucket(s)";
  metadata.seed = config_.seed;
  metadata.notes = std::move(notes);

  InspectionReport report = build_report(std::move(findings), std::move(metadata));
  InspectOutcome outcome;
  outcome.report_json = report_to_json(report);
  outcome.has_error_findings = report.has_errors();
  for (const Finding& f : report.findings) {
    if (f.severity == Severity::kError) ++outcome.error_finding_count;
  }
  write_text_file("inspection_report.json", outcome.report_json.dump(2) + "\n");
  write_text_file("inspection_report.txt", report_to_text(report));
  return outcome;
}

}  // namespace ppmi
