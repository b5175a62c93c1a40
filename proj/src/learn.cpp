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
#include "learn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <unordered_set>

namespace ppmi {

void Hyperparams::validate() const {
  if (n_rounds < 1) fail(ErrorCode::kConfig, "hyperparams: n_rounds must be >= 1");
  if (max_depth < 1) fail(ErrorCode::kConfig, "hyperparams: max_depth must be >= 1");
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) {
    fail(ErrorCode::kConfig, "hyperparams: learning_rate must be in (0, 1]");
  }
  if (l2_leaf < 0.0) fail(ErrorCode::kConfig, "hyperparams: l2_leaf must be >= 0");
  if (min_split_gain < 0.0) {
    fail(ErrorCode::kConfig, "hyperparams: min_split_gain must be >= 0");
  }
}

const char* task_name(Task task) {
  return task == Task::kBinaryLogistic ? "binary_logistic" : "squared_error";
}

std::optional<Task> task_from_name(std::string_view name) {
  if (name == "binary_logistic") return Task::kBinaryLogistic;
  if (name == "squared_error") return Task::kSquaredError;
  return std::nullopt;
}

double RegressionTree::predict_row(std::span<const double> row) const {
  int idx = 0;
  while (!nodes[idx].is_leaf()) {
    const TreeNode& n = nodes[idx];
    idx = row[n.feature] < n.threshold ? n.left : n.right;
  }
  return nodes[idx].weight;
}

int RegressionTree::depth() const {
  // Iterative depth over the index-linked nodes.
  std::vector<std::pair<int, int>> stack = {{0, 0}};
  int best = 0;
  while (!stack.empty()) {
    auto [idx, d] = stack.back();
    stack.pop_back();
    best = std::max(best, d);
    const TreeNode& n = nodes[idx];
    if (!n.is_leaf()) {
      stack.push_back({n.left, d + 1});
      stack.push_back({n.right, d + 1});
    }
  }
  return best;
}

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct SplitChoice {
  double gain = 0.0;
  int feature = -1;
  double threshold = 0.0;
};

// Exact greedy search over one node's rows. Returns the best positive-gain
// split, if any.
std::optional<SplitChoice> best_split(const FeatureMatrix& matrix,
                                      const std::vector<double>& grad,
                                      const std::vector<double>& hess,
                                      const std::vector<int>& rows, double sum_g,
                                      double sum_h, const Hyperparams& hp) {
  const double lambda = hp.l2_leaf;
  const double parent_score = sum_g * sum_g / (sum_h + lambda);

  SplitChoice best;
  bool found = false;

  std::vector<std::pair<double, int>> ordered(rows.size());
  for (std::size_t f = 0; f < matrix.cols(); ++f) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      ordered[i] = {matrix.at(static_cast<std::size_t>(rows[i]), f), rows[i]};
    }
    std::sort(ordered.begin(), ordered.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    if (ordered.front().first == ordered.back().first) continue;

    double left_g = 0.0, left_h = 0.0;
    for (std::size_t i = 0; i + 1 < ordered.size(); ++i) {
      left_g += grad[ordered[i].second];
      left_h += hess[ordered[i].second];
      if (ordered[i].first == ordered[i + 1].first) continue;  // not a boundary
      double right_g = sum_g - left_g;
      double right_h = sum_h - left_h;
      if (left_h < hp.min_child_hessian || right_h < hp.min_child_hessian) continue;
      double gain = 0.5 * (left_g * left_g / (left_h + lambda) +
                           right_g * right_g / (right_h + lambda) - parent_score) -
                    hp.min_split_gain;
      // Strict improvement only; scanning order makes ties resolve to the
      // lowest feature index and threshold.
      if (gain > best.gain) {
        best.gain = gain;
        best.feature = static_cast<int>(f);
        best.threshold = 0.5 * (ordered[i].first + ordered[i + 1].first);
        found = true;
      }
    }
  }
  if (!found) return std::nullopt;
  return best;
}

RegressionTree grow_tree(const FeatureMatrix& matrix, const std::vector<double>& grad,
                         const std::vector<double>& hess, const Hyperparams& hp) {
  RegressionTree tree;

  struct Work {
    int node = 0;
    int depth = 0;
    std::vector<int> rows;
  };

  std::vector<int> all_rows(matrix.rows());
  std::iota(all_rows.begin(), all_rows.end(), 0);
  tree.nodes.emplace_back();
  std::vector<Work> stack;
  stack.push_back({0, 0, std::move(all_rows)});

  while (!stack.empty()) {
    Work work = std::move(stack.back());
    stack.pop_back();

    double sum_g = 0.0, sum_h = 0.0;
    for (int r : work.rows) {
      sum_g += grad[r];
      sum_h += hess[r];
    }

    std::optional<SplitChoice> split;
    if (work.depth < hp.max_depth && work.rows.size() >= 2) {
      split = best_split(matrix, grad, hess, work.rows, sum_g, sum_h, hp);
    }
    if (!split) {
      tree.nodes[work.node].feature = -1;
      tree.nodes[work.node].weight = -sum_g / (sum_h + hp.l2_leaf);
      continue;
    }

    std::vector<int> left_rows, right_rows;
    for (int r : work.rows) {
      if (matrix.at(static_cast<std::size_t>(r),
                    static_cast<std::size_t>(split->feature)) < split->threshold) {
        left_rows.push_back(r);
      } else {
        right_rows.push_back(r);
      }
    }

    int left_idx = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    int right_idx = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();

    TreeNode& node = tree.nodes[work.node];
    node.feature = split->feature;
    node.threshold = split->threshold;
    node.gain = split->gain;
    node.left = left_idx;
    node.right = right_idx;

    stack.push_back({left_idx, work.depth + 1, std::move(left_rows)});
    stack.push_back({right_idx, work.depth + 1, std::move(right_rows)});
  }
  return tree;
}

double loss_value(Task task, double margin, double y) {
  if (task == Task::kSquaredError) {
    double d = margin - y;
    return 0.5 * d * d;
  }
  // Logistic loss, written to stay finite for large |margin|.
  double m = std::max(margin, 0.0);
  return m - margin * y + std::log(std::exp(-m) + std::exp(margin - m));
}

double tree_penalty(const RegressionTree& tree, const Hyperparams& hp) {
  double leaves = 0.0, weight_sq = 0.0;
  for (const TreeNode& n : tree.nodes) {
    if (n.is_leaf()) {
      leaves += 1.0;
      weight_sq += n.weight * n.weight;
    }
  }
  return hp.min_split_gain * leaves + 0.5 * hp.l2_leaf * weight_sq;
}

}  // namespace

BoostedEnsemble fit(const FeatureMatrix& matrix, std::span<const double> targets,
                    const Hyperparams& hp, Task task) {
  hp.validate();
  const std::size_t n = matrix.rows();
  if (n < 2) fail(ErrorCode::kInvalidArgument, "fit: need at least 2 rows");
  if (targets.size() != n) fail(ErrorCode::kInvalidArgument, "fit: target length mismatch");

  BoostedEnsemble model;
  model.task = task;
  model.params = hp;
  model.feature_names = matrix.column_names;

  if (task == Task::kBinaryLogistic) {
    std::size_t positives = 0;
    for (double y : targets) {
      if (y != 0.0 && y != 1.0) {
        fail(ErrorCode::kInvalidArgument, "fit: classification targets must be 0 or 1");
      }
      if (y == 1.0) ++positives;
    }
    if (positives == 0 || positives == n) {
      fail(ErrorCode::kData, "fit: classification needs both classes present");
    }
    double p = static_cast<double>(positives) / static_cast<double>(n);
    model.base_score = std::log(p / (1.0 - p));
  } else {
    double sum = 0.0;
    for (double y : targets) sum += y;
    model.base_score = sum / static_cast<double>(n);
  }

  std::vector<double> margin(n, model.base_score);
  std::vector<double> grad(n), hess(n);
  double penalty_total = 0.0;

  for (int round = 0; round < hp.n_rounds; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      if (task == Task::kBinaryLogistic) {
        double p = sigmoid(margin[i]);
        grad[i] = p - targets[i];
        hess[i] = std::max(p * (1.0 - p), 1e-16);
      } else {
        grad[i] = margin[i] - targets[i];
        hess[i] = 1.0;
      }
    }

    RegressionTree tree = grow_tree(matrix, grad, hess, hp);
    for (std::size_t i = 0; i < n; ++i) {
      margin[i] += hp.learning_rate * tree.predict_row(matrix.row(i));
    }
    penalty_total += tree_penalty(tree, hp);
    model.trees.push_back(std::move(tree));

    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) loss += loss_value(task, margin[i], targets[i]);
    model.objective_trace.push_back(loss + penalty_total);
  }
  return model;
}

std::vector<double> predict_raw(const BoostedEnsemble& model, const FeatureMatrix& matrix) {
  if (matrix.cols() != model.n_features()) {
    fail(ErrorCode::kInvalidArgument,
         "predict: matrix has " + std::to_string(matrix.cols()) + " features, model has " +
             std::to_string(model.n_features()));
  }
  std::vector<double> out(matrix.rows(), model.base_score);
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    auto row = matrix.row(r);
    double acc = 0.0;
    for (const RegressionTree& tree : model.trees) acc += tree.predict_row(row);
    out[r] += model.params.learning_rate * acc;
  }
  return out;
}

std::vector<double> predict(const BoostedEnsemble& model, const FeatureMatrix& matrix) {
  std::vector<double> out = predict_raw(model, matrix);
  if (model.task == Task::kBinaryLogistic) {
    for (double& v : out) v = sigmoid(v);
  }
  return out;
}

double predict_one(const BoostedEnsemble& model, std::span<const double> row) {
  if (row.size() != model.n_features()) {
    fail(ErrorCode::kInvalidArgument, "predict_one: row width mismatch");
  }
  double acc = 0.0;
  for (const RegressionTree& tree : model.trees) acc += tree.predict_row(row);
  double raw = model.base_score + model.params.learning_rate * acc;
  return model.task == Task::kBinaryLogistic ? sigmoid(raw) : raw;
}

double auc(std::span<const double> scores, std::span<const double> labels) {
  if (scores.size() != labels.size() || scores.empty()) {
    fail(ErrorCode::kInvalidArgument, "auc: need equally sized, non-empty inputs");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  unsigned long long positives = 0, negatives = 0;
  for (double y : labels) {
    if (y == 1.0) ++positives;
    else if (y == 0.0) ++negatives;
    else fail(ErrorCode::kInvalidArgument, "auc: labels must be 0 or 1");
  }
  if (positives == 0 || negatives == 0) {
    fail(ErrorCode::kData, "auc: both classes required");
  }

  // Numerator in half-units: 2 per win, 1 per tie; exact in integers.
  unsigned long long numerator2 = 0;
  unsigned long long negatives_below = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    unsigned long long pos_here = 0, neg_here = 0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      if (labels[order[j]] == 1.0) ++pos_here;
      else ++neg_here;
      ++j;
    }
    numerator2 += 2ULL * negatives_below * pos_here + pos_here * neg_here;
    negatives_below += neg_here;
    i = j;
  }
  return static_cast<double>(numerator2) /
         (2.0 * static_cast<double>(positives) * static_cast<double>(negatives));
}

double mae(std::span<const double> predictions, std::span<const double> targets) {
  if (predictions.size() != targets.size() || predictions.empty()) {
    fail(ErrorCode::kInvalidArgument, "mae: need equally sized, non-empty inputs");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    sum += std::abs(predictions[i] - targets[i]);
  }
  return sum / static_cast<double>(predictions.size());
}

namespace {

nlohmann::json node_to_json(const RegressionTree& tree, int idx) {
  const TreeNode& n = tree.nodes[idx];
  if (n.is_leaf()) return nlohmann::json{{"weight", n.weight}};
  return nlohmann::json{{"feature", n.feature},
                        {"threshold", n.threshold},
                        {"gain", n.gain},
                        {"left", node_to_json(tree, n.left)},
                        {"right", node_to_json(tree, n.right)}};
}

int node_from_json(const nlohmann::json& doc, RegressionTree* tree) {
  int idx = static_cast<int>(tree->nodes.size());
  tree->nodes.emplace_back();
  if (doc.contains("weight")) {
    tree->nodes[idx].weight = doc.at("weight").get<double>();
    return idx;
  }
  tree->nodes[idx].feature = doc.at("feature").get<int>();
  tree->nodes[idx].threshold = doc.at("threshold").get<double>();
  tree->nodes[idx].gain = doc.value("gain", 0.0);
  int left = node_from_json(doc.at("left"), tree);
  int right = node_from_json(doc.at("right"), tree);
  tree->nodes[idx].left = left;
  tree->nodes[idx].right = right;
  return idx;
}

}  // namespace

nlohmann::json model_to_json(const BoostedEnsemble& model) {
  nlohmann::json trees = nlohmann::json::array();
  for (const RegressionTree& t : model.trees) trees.push_back(node_to_json(t, 0));
  return nlohmann::json{
      {"format", "ppminspect-model"},
      {"version", 1},
      {"task", task_name(model.task)},
      {"base_score", model.base_score},
      {"hyperparams",
       {{"n_rounds", model.params.n_rounds},
        {"max_depth", model.params.max_depth},
        {"learning_rate", model.params.learning_rate},
        {"l2_leaf", model.params.l2_leaf},
        {"min_split_gain", model.params.min_split_gain},
        {"min_child_hessian", model.params.min_child_hessian},
        {"seed", model.params.seed}}},
      {"feature_names", model.feature_names},
      {"trees", trees},
      {"objective_trace", model.objective_trace}};
}

BoostedEnsemble model_from_json(const nlohmann::json& doc) {
  if (doc.value("format", "") != "ppminspect-model" || doc.value("version", 0) != 1) {
    fail(ErrorCode::kData, "model_from_json: unrecognised model document");
  }
  BoostedEnsemble model;
  auto task = task_from_name(doc.at("task").get<std::string>());
  if (!task) fail(ErrorCode::kData, "model_from_json: unknown task");
  model.task = *task;
  model.base_score = doc.at("base_score").get<double>();
  const auto& hp = doc.at("hyperparams");
  model.params.n_rounds = hp.at("n_rounds").get<int>();
  model.params.max_depth = hp.at("max_depth").get<int>();
  model.params.learning_rate = hp.at("learning_rate").get<double>();
  model.params.l2_leaf = hp.at("l2_leaf").get<double>();
  model.params.min_split_gain = hp.at("min_split_gain").get<double>();
  model.params.min_child_hessian = hp.at("min_child_hessian").get<double>();
  model.params.seed = hp.at("seed").get<std::uint64_t>();
  model.feature_names = doc.at("feature_names").get<std::vector<std::string>>();
  for (const auto& t : doc.at("trees")) {
    RegressionTree tree;
    node_from_json(t, &tree);
    model.trees.push_back(std::move(tree));
  }
  model.objective_trace = doc.value("objective_trace", std::vector<double>{});
  return model;
}

void PipelineConfig::validate() const {
  hp.validate();
  if (min_len < 1 || min_len > max_len) {
    fail(ErrorCode::kConfig, "pipeline: need 1 <= min_len <= max_len");
  }
  if (gap < 1) fail(ErrorCode::kConfig, "pipeline: gap must be >= 1");
  if (!(split_ratio > 0.0 && split_ratio < 1.0)) {
    fail(ErrorCode::kConfig, "pipeline: split_ratio must be in (0,1)");
  }
  if (encodings.index && bucketing != Bucket::Scheme::kPrefixLength) {
    fail(ErrorCode::kConfig, "pipeline: index encoding requires prefix_length bucketing");
  }
  if (!encodings.static_attrs && !encodings.aggregation && !encodings.index &&
      !encodings.engineered) {
    fail(ErrorCode::kConfig, "pipeline: at least one encoding must be enabled");
  }
  if (target.kind == PredictionTarget::Kind::kOutcome &&
      target.label.activity_a.empty()) {
    fail(ErrorCode::kConfig, "pipeline: outcome target requires a label spec");
  }
}

TrainOutput train_pipeline(const EventLog& log, const PipelineConfig& config) {
  config.validate();

  TrainOutput out;
  out.split = temporal_split(log, config.split_ratio);
  std::unordered_set<std::string> train_ids(out.split.train_case_ids.begin(),
                                            out.split.train_case_ids.end());

  std::vector<Prefix> prefixes =
      extract_prefixes(log, config.min_len, config.max_len, config.gap, config.target);
  std::vector<Prefix> train_prefixes, test_prefixes;
  for (const Prefix& p : prefixes) {
    (train_ids.count(p.case_id()) ? train_prefixes : test_prefixes).push_back(p);
  }
  if (train_prefixes.empty()) fail(ErrorCode::kData, "train_pipeline: empty training side");
  if (test_prefixes.empty()) fail(ErrorCode::kData, "train_pipeline: empty test side");

  auto make_buckets = [&](std::vector<Prefix> side) {
    return config.bucketing == Bucket::Scheme::kSingle
               ? bucket_single(std::move(side))
               : bucket_by_prefix_length(std::move(side));
  };
  std::vector<Bucket> train_buckets = make_buckets(std::move(train_prefixes));
  std::vector<Bucket> test_buckets = make_buckets(std::move(test_prefixes));

  const Task task = config.target.kind == PredictionTarget::Kind::kOutcome
                        ? Task::kBinaryLogistic
                        : Task::kSquaredError;

  for (const Bucket& bucket : train_buckets) {
    std::vector<double> y;
    y.reserve(bucket.prefixes.size());
    for (const Prefix& p : bucket.prefixes) y.push_back(p.target.value());

    if (task == Task::kBinaryLogistic) {
      bool has_pos = false, has_neg = false;
      for (double v : y) (v == 1.0 ? has_pos : has_neg) = true;
      if (!has_pos || !has_neg) {
        out.metrics.warnings.push_back("bucket " + bucket.id +
                                       " skipped: single-class training data");
        continue;
      }
    }
    if (bucket.prefixes.size() < 2) {
      out.metrics.warnings.push_back("bucket " + bucket.id + " skipped: fewer than 2 rows");
      continue;
    }

    BucketModel bm;
    bm.bucket_id = bucket.id;
    bm.prefix_length = bucket.scheme == Bucket::Scheme::kPrefixLength
                           ? bucket.prefix_length
                           : 0;
    bm.vocab = build_vocabulary(bucket, log.schema);
    FeatureMatrix matrix =
        encode_bucket(bucket, log, log.schema, bm.vocab, config.encodings);
    bm.model = fit(matrix, y, config.hp, task);
    out.models.push_back(std::move(bm));
  }
  if (out.models.empty()) fail(ErrorCode::kData, "train_pipeline: no trainable bucket");

  // Evaluation on the held-out side, grouped by prefix length.
  struct Scored {
    int length;
    double score;
    double target;
  };
  std::vector<Scored> scored;
  for (const Bucket& bucket : test_buckets) {
    const BucketModel* bm = nullptr;
    for (const BucketModel& candidate : out.models) {
      if (config.bucketing == Bucket::Scheme::kSingle ||
          candidate.prefix_length == bucket.prefix_length) {
        bm = &candidate;
        break;
      }
    }
    if (!bm) {
      out.metrics.warnings.push_back("no model for test bucket " + bucket.id);
      continue;
    }
    FeatureMatrix matrix =
        encode_bucket(bucket, log, log.schema, bm->vocab, config.encodings);
    std::vector<double> scores = predict(bm->model, matrix);
    for (std::size_t i = 0; i < bucket.prefixes.size(); ++i) {
      scored.push_back({bucket.prefixes[i].length, scores[i],
                        bucket.prefixes[i].target.value()});
    }
  }
  if (scored.empty()) fail(ErrorCode::kData, "train_pipeline: nothing to evaluate");

  std::set<int> lengths;
  for (const Scored& s : scored) lengths.insert(s.length);

  auto metric_of = [&](const std::vector<Scored>& group) -> std::optional<double> {
    std::vector<double> scores, targets;
    scores.reserve(group.size());
    targets.reserve(group.size());
    for (const Scored& s : group) {
      scores.push_back(s.score);
      targets.push_back(s.target);
    }
    if (task == Task::kBinaryLogistic) {
      bool has_pos = false, has_neg = false;
      for (double v : targets) (v == 1.0 ? has_pos : has_neg) = true;
      if (!has_pos || !has_neg) return std::nullopt;
      return auc(scores, targets);
    }
    return mae(scores, targets);
  };

  if (auto overall = metric_of(scored)) {
    if (task == Task::kBinaryLogistic) out.metrics.auc = *overall;
    else out.metrics.mae = *overall;
  } else {
    out.metrics.warnings.push_back("overall metric unavailable: single-class test data");
  }
  for (int len : lengths) {
    std::vector<Scored> group;
    for (const Scored& s : scored) {
      if (s.length == len) group.push_back(s);
    }
    if (auto value = metric_of(group)) {
      out.metrics.per_length.emplace_back(len, *value);
    } else {
      out.metrics.warnings.push_back("prefix length " + std::to_string(len) +
                                     " skipped in metric series: single-class data");
    }
  }
  return out;
}

}  // namespace ppmi
