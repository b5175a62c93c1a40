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
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "encode.hpp"

namespace ppmi {

struct Hyperparams {
  int n_rounds = 200;
  int max_depth = 6;
  double learning_rate = 0.1;   // eta
  double l2_leaf = 1.0;         // lambda
  double min_split_gain = 0.0;  // gamma
  double min_child_hessian = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
};

enum class Task { kBinaryLogistic, kSquaredError };

const char* task_name(Task task);
std::optional<Task> task_from_name(std::string_view name);

struct TreeNode {
  int feature = -1;        // -1 marks a leaf
  double threshold = 0.0;  // left branch takes x[feature] < threshold
  int left = -1;
  int right = -1;
  double weight = 0.0;     // leaf weight, before learning-rate scaling
  double gain = 0.0;       // split gain (internal nodes)

  bool is_leaf() const { return feature < 0; }
};

struct RegressionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double predict_row(std::span<const double> row) const;
  int depth() const;
};

// Additive model over regression trees; raw score = base_score plus
// learning-rate-scaled tree outputs. Classification applies the logistic
// link on top of the raw score.
struct BoostedEnsemble {
  Task task = Task::kBinaryLogistic;
  double base_score = 0.0;
  Hyperparams params;
  std::vector<std::string> feature_names;
  std::vector<RegressionTree> trees;
  // Regularised training objective recorded after every boosting round.
  std::vector<double> objective_trace;

  std::size_t n_features() const { return feature_names.size(); }
};

// Second-order boosting with exact greedy splits on sorted unique values;
// thresholds are midpoints. Deterministic: no row or column subsampling.
BoostedEnsemble fit(const FeatureMatrix& matrix, std::span<const double> targets,
                    const Hyperparams& hp, Task task);

std::vector<double> predict_raw(const BoostedEnsemble& model, const FeatureMatrix& matrix);
std::vector<double> predict(const BoostedEnsemble& model, const FeatureMatrix& matrix);
double predict_one(const BoostedEnsemble& model, std::span<const double> row);

// Probability that a random positive outranks a random negative; tied
// scores count one half. Exact pair counting.
double auc(std::span<const double> scores, std::span<const double> labels);
double mae(std::span<const double> predictions, std::span<const double> targets);

nlohmann::json model_to_json(const BoostedEnsemble& model);
BoostedEnsemble model_from_json(const nlohmann::json& doc);

// ---- Per-bucket training pipeline ----

struct PipelineConfig {
  TargetSpec target;
  Bucket::Scheme bucketing = Bucket::Scheme::kSingle;
  EncodingSet encodings;
  int min_len = 1;
  int max_len = 40;
  int gap = 1;
  double split_ratio = 0.8;
  Hyperparams hp;

  void validate() const;
};

struct BucketModel {
  std::string bucket_id;
  int prefix_length = 0;  // 0 for the single bucket
  Vocabulary vocab;
  BoostedEnsemble model;
};

struct EvalMetrics {
  std::optional<double> auc;
  std::optional<double> mae;
  std::vector<std::pair<int, double>> per_length;  // prefix length -> metric
  std::vector<std::string> warnings;
};

struct TrainOutput {
  std::vector<BucketModel> models;
  EvalMetrics metrics;
  Split split;
};

// Split -> prefix extraction -> bucketing -> encoding (vocabulary frozen on
// the training side) -> fit per bucket -> per-prefix-length evaluation on
// the held-out cases.
TrainOutput train_pipeline(const EventLog& log, const PipelineConfig& config);

}  // namespace ppmi
