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
#include "explain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rng.hpp"

namespace ppmi {

const char* metric_name(Metric metric) {
  return metric == Metric::kAuc ? "auc" : "mae";
}

namespace {

void sort_ranking(std::vector<std::pair<std::string, double>>* ranking) {
  std::sort(ranking->begin(), ranking->end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
}

}  // namespace

GlobalExplanation gain_importance(const BoostedEnsemble& model) {
  std::map<std::string, double> totals;
  double grand_total = 0.0;
  for (const RegressionTree& tree : model.trees) {
    for (const TreeNode& node : tree.nodes) {
      if (node.is_leaf()) continue;
      totals[model.feature_names[node.feature]] += node.gain;
      grand_total += node.gain;
    }
  }

  GlobalExplanation out;
  out.method = GlobalExplanation::Method::kGain;
  if (grand_total <= 0.0) return out;  // no splits: empty explanation
  for (const auto& [name, total] : totals) {
    out.ranking.emplace_back(name, total / grand_total);
  }
  sort_ranking(&out.ranking);
  return out;
}

GlobalExplanation permutation_importance(const BoostedEnsemble& model,
                                         const FeatureMatrix& matrix,
                                         std::span<const double> targets,
                                         Metric metric, int repeats,
                                         std::uint64_t seed) {
  if (repeats < 1) fail(ErrorCode::kInvalidArgument, "permutation_importance: repeats >= 1");
  if ((metric == Metric::kAuc) != (model.task == Task::kBinaryLogistic)) {
    fail(ErrorCode::kInvalidArgument,
         "permutation_importance: metric does not match the model task");
  }

  auto evaluate = [&](const FeatureMatrix& m) {
    std::vector<double> scores = predict(model, m);
    return metric == Metric::kAuc ? auc(scores, targets) : mae(scores, targets);
  };
  const double baseline = evaluate(matrix);

  GlobalExplanation out;
  out.method = GlobalExplanation::Method::kPermutation;
  out.metric_context = metric_name(metric);

  FeatureMatrix scratch = matrix;
  const std::size_t n = matrix.rows();
  std::vector<double> column(n);
  for (std::size_t f = 0; f < matrix.cols(); ++f) {
    double total = 0.0;
    for (int rep = 0; rep < repeats; ++rep) {
      for (std::size_t r = 0; r < n; ++r) column[r] = matrix.at(r, f);
      Rng rng(seed, "perm", f, static_cast<std::uint64_t>(rep));
      rng.shuffle(&column);
      for (std::size_t r = 0; r < n; ++r) scratch.at(r, f) = column[r];
      double shuffled = evaluate(scratch);
      total += metric == Metric::kAuc ? baseline - shuffled : shuffled - baseline;
    }
    for (std::size_t r = 0; r < n; ++r) scratch.at(r, f) = matrix.at(r, f);
    double raw = total / static_cast<double>(repeats);
    out.raw.emplace_back(matrix.column_names[f], raw);
    out.ranking.emplace_back(matrix.column_names[f], std::max(raw, 0.0));
  }
  sort_ranking(&out.ranking);
  return out;
}

// ---- Training stats ----

namespace {

// Linear-interpolation quantile over a sorted vector.
double quantile_sorted(const std::vector<double>& sorted, double p) {
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  double h = p * static_cast<double>(n - 1);
  std::size_t lo = static_cast<std::size_t>(h);
  if (lo + 1 >= n) return sorted[n - 1];
  double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

int bin_of(const FeatureStats& fs, double value) {
  if (value <= fs.edges[1]) return 0;
  if (value <= fs.edges[2]) return 1;
  if (value <= fs.edges[3]) return 2;
  return 3;
}

}  // namespace

TrainingStats TrainingStats::compute(const FeatureMatrix& training_matrix) {
  if (training_matrix.rows() == 0) {
    fail(ErrorCode::kInvalidArgument, "TrainingStats: empty training matrix");
  }
  TrainingStats stats;
  stats.columns = training_matrix.columns;
  stats.column_names = training_matrix.column_names;
  stats.features.resize(training_matrix.cols());

  const std::size_t n = training_matrix.rows();
  std::vector<double> values(n);
  for (std::size_t c = 0; c < training_matrix.cols(); ++c) {
    for (std::size_t r = 0; r < n; ++r) values[r] = training_matrix.at(r, c);
    FeatureStats& fs = stats.features[c];

    bool constant = std::all_of(values.begin(), values.end(),
                                [&](double v) { return v == values[0]; });
    if (constant) {
      fs.kind = FeatureStats::Kind::kExcluded;
      continue;
    }

    if (training_matrix.columns[c].counts_like()) {
      std::size_t present = 0;
      double positive_sum = 0.0;
      for (double v : values) {
        if (v > 0.0) {
          ++present;
          positive_sum += v;
        }
      }
      if (present == 0 || present == n) {
        // Presence never varies even though raw counts do.
        fs.kind = FeatureStats::Kind::kExcluded;
        continue;
      }
      fs.kind = FeatureStats::Kind::kPresence;
      fs.p_present = static_cast<double>(present) / static_cast<double>(n);
      fs.positive_mean = positive_sum / static_cast<double>(present);
      continue;
    }

    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    fs.kind = FeatureStats::Kind::kBinned;
    fs.edges = {sorted.front(), quantile_sorted(sorted, 0.25),
                quantile_sorted(sorted, 0.50), quantile_sorted(sorted, 0.75),
                sorted.back()};
    for (double v : values) fs.bin_probs[bin_of(fs, v)] += 1.0;
    for (double& p : fs.bin_probs) p /= static_cast<double>(n);
  }
  return stats;
}

// ---- Local surrogate ----

namespace {

// Solves the symmetric system A x = b by Gaussian elimination with partial
// pivoting. A is n x n row-major, consumed in place.
std::vector<double> solve_linear(std::vector<double> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r * n + col]) > std::abs(a[pivot * n + col])) pivot = r;
    }
    if (std::abs(a[pivot * n + col]) < 1e-300) {
      fail(ErrorCode::kInternal, "solve_linear: singular system");
    }
    if (pivot != col) {
      for (std::size_t k = 0; k < n; ++k) std::swap(a[col * n + k], a[pivot * n + k]);
      std::swap(b[col], b[pivot]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      double factor = a[r * n + col] / a[col * n + col];
      if (factor == 0.0) continue;
      for (std::size_t k = col; k < n; ++k) a[r * n + k] -= factor * a[col * n + k];
      b[r] -= factor * b[col];
    }
  }
  std::vector<double> x(n, 0.0);
  for (std::size_t ri = n; ri-- > 0;) {
    double acc = b[ri];
    for (std::size_t k = ri + 1; k < n; ++k) acc -= a[ri * n + k] * x[k];
    x[ri] = acc / a[ri * n + ri];
  }
  return x;
}

std::string condition_string(const FeatureStats& fs, const std::string& name,
                             bool presence_on, int instance_bin) {
  if (fs.kind == FeatureStats::Kind::kPresence) {
    return presence_on ? name + " > 0" : name + " <= 0";
  }
  if (instance_bin == 0) return name + " <= " + format_double(fs.edges[1]);
  if (instance_bin == 3) return name + " > " + format_double(fs.edges[3]);
  return name + " = (" + format_double(fs.edges[instance_bin]) + ", " +
         format_double(fs.edges[instance_bin + 1]) + "]";
}

}  // namespace

LocalExplanation explain_local(const BlackBox& black_box,
                               std::span<const double> instance, const RowId& row,
                               const TrainingStats& stats, const LocalConfig& config) {
  if (instance.size() != stats.features.size()) {
    fail(ErrorCode::kInvalidArgument, "explain_local: instance width mismatch");
  }
  if (config.n_samples < 2) {
    fail(ErrorCode::kInvalidArgument, "explain_local: n_samples must be >= 2");
  }

  // Interpretable coordinates = non-excluded columns.
  std::vector<int> coords;
  for (std::size_t c = 0; c < stats.features.size(); ++c) {
    if (stats.features[c].kind != FeatureStats::Kind::kExcluded) {
      coords.push_back(static_cast<int>(c));
    }
  }
  const std::size_t m = coords.size();

  LocalExplanation out;
  out.row = row;

  // Instance-side state of each coordinate.
  std::vector<int> instance_state(m, 0);
  for (std::size_t j = 0; j < m; ++j) {
    const FeatureStats& fs = stats.features[coords[j]];
    double v = instance[coords[j]];
    instance_state[j] =
        fs.kind == FeatureStats::Kind::kPresence ? (v > 0.0 ? 1 : 0) : bin_of(fs, v);
  }

  const std::size_t n = static_cast<std::size_t>(config.n_samples);
  Rng rng(config.seed, "explain", fnv1a64(row.case_id),
          static_cast<std::uint64_t>(row.prefix_length));

  // Perturbation matrix in raw feature space; excluded columns keep the
  // instance's value.
  FeatureMatrix perturbed;
  perturbed.columns = stats.columns;
  perturbed.column_names = stats.column_names;
  perturbed.row_ids.assign(n, row);
  perturbed.values.assign(n * stats.columns.size(), 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t c = 0; c < stats.columns.size(); ++c) {
      perturbed.at(s, c) = instance[c];
    }
  }

  std::vector<double> z(n * m, 0.0);  // 1 when the sample matches the instance
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t j = 0; j < m; ++j) {
      const FeatureStats& fs = stats.features[coords[j]];
      const std::size_t c = static_cast<std::size_t>(coords[j]);
      int state;
      double raw;
      if (fs.kind == FeatureStats::Kind::kPresence) {
        state = rng.bernoulli(fs.p_present) ? 1 : 0;
        if (state == 0) {
          raw = 0.0;
        } else {
          raw = instance[c] > 0.0 ? instance[c] : fs.positive_mean;
        }
      } else {
        std::vector<double> probs(fs.bin_probs.begin(), fs.bin_probs.end());
        state = static_cast<int>(rng.categorical(probs));
        raw = rng.uniform(fs.edges[state], fs.edges[state + 1]);
      }
      perturbed.at(s, c) = raw;
      z[s * m + j] = state == instance_state[j] ? 1.0 : 0.0;
    }
  }

  std::vector<double> predictions = black_box(perturbed);
  if (predictions.size() != n) {
    fail(ErrorCode::kInternal, "explain_local: black box returned wrong row count");
  }
  {
    // Prediction for the instance itself.
    FeatureMatrix one;
    one.columns = stats.columns;
    one.column_names = stats.column_names;
    one.row_ids = {row};
    one.values.assign(instance.begin(), instance.end());
    out.prediction = black_box(one).at(0);
  }

  // Kernel weights from interpretable-space distance to the instance.
  const double width =
      config.kernel_width > 0.0 ? config.kernel_width
                                : 0.75 * std::sqrt(static_cast<double>(std::max<std::size_t>(m, 1)));
  std::vector<double> weights(n, 1.0);
  for (std::size_t s = 0; s < n; ++s) {
    double d2 = 0.0;
    for (std::size_t j = 0; j < m; ++j) d2 += 1.0 - z[s * m + j];
    weights[s] = std::exp(-d2 / (width * width));
  }

  if (m == 0) {
    // Nothing varies; report the black-box value and stop.
    out.intercept = out.prediction;
    out.fidelity = 1.0;
    return out;
  }

  // Weighted moments for the pre-selection correlations.
  double w_total = 0.0, y_mean = 0.0;
  for (std::size_t s = 0; s < n; ++s) {
    w_total += weights[s];
    y_mean += weights[s] * predictions[s];
  }
  y_mean /= w_total;
  double y_var = 0.0;
  for (std::size_t s = 0; s < n; ++s) {
    y_var += weights[s] * (predictions[s] - y_mean) * (predictions[s] - y_mean);
  }
  y_var /= w_total;

  std::vector<std::pair<double, int>> scored(m);
  for (std::size_t j = 0; j < m; ++j) {
    double zj_mean = 0.0;
    for (std::size_t s = 0; s < n; ++s) zj_mean += weights[s] * z[s * m + j];
    zj_mean /= w_total;
    double cov = 0.0, var = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      double dz = z[s * m + j] - zj_mean;
      cov += weights[s] * dz * (predictions[s] - y_mean);
      var += weights[s] * dz * dz;
    }
    cov /= w_total;
    var /= w_total;
    double corr = (var > 0.0 && y_var > 0.0) ? cov / std::sqrt(var * y_var) : 0.0;
    scored[j] = {std::abs(corr), static_cast<int>(j)};
  }
  std::sort(scored.begin(), scored.end(), [&](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return stats.column_names[coords[a.second]] < stats.column_names[coords[b.second]];
  });
  const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(config.top_k), m);
  std::vector<int> selected;
  for (std::size_t i = 0; i < k; ++i) selected.push_back(scored[i].second);
  std::sort(selected.begin(), selected.end());

  // Weighted ridge: minimise sum_s w_s (y_s - b0 - z_s beta)^2 + ridge |beta|^2.
  const std::size_t dim = selected.size() + 1;  // intercept first
  std::vector<double> normal(dim * dim, 0.0);
  std::vector<double> rhs(dim, 0.0);
  auto design = [&](std::size_t s, std::size_t d) -> double {
    return d == 0 ? 1.0 : z[s * m + static_cast<std::size_t>(selected[d - 1])];
  };
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t d1 = 0; d1 < dim; ++d1) {
      double x1 = design(s, d1);
      if (x1 == 0.0) continue;
      rhs[d1] += weights[s] * x1 * predictions[s];
      for (std::size_t d2 = 0; d2 < dim; ++d2) {
        double x2 = design(s, d2);
        if (x2 != 0.0) normal[d1 * dim + d2] += weights[s] * x1 * x2;
      }
    }
  }
  for (std::size_t d = 1; d < dim; ++d) normal[d * dim + d] += config.ridge;

  std::vector<double> beta = solve_linear(normal, rhs);
  out.intercept = beta[0];

  // Weighted R^2 of the surrogate on its own sample.
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t s = 0; s < n; ++s) {
    double fitted = beta[0];
    for (std::size_t d = 1; d < dim; ++d) fitted += beta[d] * design(s, d);
    ss_res += weights[s] * (predictions[s] - fitted) * (predictions[s] - fitted);
    ss_tot += weights[s] * (predictions[s] - y_mean) * (predictions[s] - y_mean);
  }
  out.fidelity = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;

  for (std::size_t d = 1; d < dim; ++d) {
    const int j = selected[d - 1];
    const int c = coords[j];
    const FeatureStats& fs = stats.features[c];
    Attribution attr;
    attr.feature = stats.column_names[c];
    attr.condition = condition_string(fs, stats.column_names[c],
                                      instance_state[j] == 1, instance_state[j]);
    attr.weight = beta[d];
    out.attributions.push_back(std::move(attr));
  }
  std::sort(out.attributions.begin(), out.attributions.end(),
            [](const Attribution& a, const Attribution& b) {
              if (std::abs(a.weight) != std::abs(b.weight)) {
                return std::abs(a.weight) > std::abs(b.weight);
              }
              return a.feature < b.feature;
            });

  if (config.keep_sample) {
    auto sample = std::make_shared<SurrogateSample>();
    sample->interpretable_columns = coords;
    sample->selected = selected;
    sample->n_samples = n;
    sample->z = std::move(z);
    sample->weights = std::move(weights);
    sample->predictions = std::move(predictions);
    out.sample = std::move(sample);
  }
  return out;
}

LocalExplanation explain_local(const BoostedEnsemble& model,
                               const FeatureMatrix& matrix, std::size_t row_index,
                               const TrainingStats& stats, const LocalConfig& config) {
  if (row_index >= matrix.rows()) {
    fail(ErrorCode::kInvalidArgument, "explain_local: row index out of range");
  }
  BlackBox box = [&model](const FeatureMatrix& m) { return predict(model, m); };
  return explain_local(box, matrix.row(row_index), matrix.row_ids[row_index], stats,
                       config);
}

nlohmann::json global_explanation_to_json(const GlobalExplanation& explanation) {
  nlohmann::json ranking = nlohmann::json::array();
  for (const auto& [name, value] : explanation.ranking) {
    ranking.push_back({{"feature", name}, {"importance", value}});
  }
  nlohmann::json doc{
      {"method",
       explanation.method == GlobalExplanation::Method::kGain ? "gain" : "permutation"},
      {"ranking", ranking}};
  if (!explanation.metric_context.empty()) doc["metric"] = explanation.metric_context;
  if (!explanation.raw.empty()) {
    nlohmann::json raw = nlohmann::json::array();
    for (const auto& [name, value] : explanation.raw) {
      raw.push_back({{"feature", name}, {"raw_importance", value}});
    }
    doc["raw"] = raw;
  }
  return doc;
}

nlohmann::json local_explanation_to_json(const LocalExplanation& explanation) {
  nlohmann::json attrs = nlohmann::json::array();
  for (const Attribution& a : explanation.attributions) {
    attrs.push_back(
        {{"feature", a.feature}, {"condition", a.condition}, {"weight", a.weight}});
  }
  return nlohmann::json{{"case_id", explanation.row.case_id},
                        {"prefix_length", explanation.row.prefix_length},
                        {"prediction", explanation.prediction},
                        {"intercept", explanation.intercept},
                        {"local_fidelity", explanation.fidelity},
                        {"attributions", attrs}};
}

}  // namespace ppmi
