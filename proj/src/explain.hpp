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

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"

#include "learn.hpp"

namespace ppmi {

enum class Metric { kAuc, kMae };

const char* metric_name(Metric metric);

struct GlobalExplanation {
  enum class Method { kGain, kPermutation };

  Method method = Method::kGain;
  std::string metric_context;  // "auc", "mae" or empty
  // Sorted descending by importance, ties by feature name. Permutation
  // importances are clamped at 0 here; `raw` keeps the unclamped values.
  std::vector<std::pair<std::string, double>> ranking;
  std::vector<std::pair<std::string, double>> raw;
};

// Split-gain totals per feature, normalised to sum 1.
GlobalExplanation gain_importance(const BoostedEnsemble& model);

// Mean metric degradation over `repeats` column shuffles. AUC drops and MAE
// increases both count as positive importance.
GlobalExplanation permutation_importance(const BoostedEnsemble& model,
                                         const FeatureMatrix& matrix,
                                         std::span<const double> targets,
                                         Metric metric, int repeats,
                                         std::uint64_t seed);

// ---- Local surrogate (perturbation-based weighted linear model) ----

// Per-feature interpretable representation learned from the training matrix:
// count/one-hot features binarise by presence, numeric features by training
// quartile bins. Constant columns are excluded.
struct FeatureStats {
  enum class Kind { kPresence, kBinned, kExcluded };

  Kind kind = Kind::kExcluded;
  double p_present = 0.0;             // presence features
  double positive_mean = 0.0;         // mean over training values > 0
  std::array<double, 5> edges{};      // min, q25, q50, q75, max
  std::array<double, 4> bin_probs{};  // empirical bin marginal
};

struct TrainingStats {
  std::vector<FeatureName> columns;
  std::vector<std::string> column_names;
  std::vector<FeatureStats> features;

  static TrainingStats compute(const FeatureMatrix& training_matrix);
};

struct LocalConfig {
  int n_samples = 5000;
  int top_k = 10;
  double kernel_width = 0.0;  // 0 selects the default 0.75 * sqrt(M)
  double ridge = 1e-3;
  std::uint64_t seed = 0;
  bool keep_sample = false;   // retain the perturbation sample for diagnostics
};

struct Attribution {
  std::string feature;
  std::string condition;  // "<name> <= v", "<name> > v" or "<name> = v"
  double weight = 0.0;    // positive pushes the prediction higher
};

// Raw material of one surrogate fit, kept only on request.
struct SurrogateSample {
  std::vector<int> interpretable_columns;  // matrix column per coordinate
  std::vector<int> selected;               // coordinate indices used in the fit
  std::size_t n_samples = 0;
  std::vector<double> z;            // n_samples x n_coordinates, 1 = matches instance
  std::vector<double> weights;      // kernel weights
  std::vector<double> predictions;  // black-box outputs
};

struct LocalExplanation {
  RowId row;
  double prediction = 0.0;
  double intercept = 0.0;
  double fidelity = 1.0;  // weighted R^2 on the perturbation sample
  std::vector<Attribution> attributions;
  std::shared_ptr<const SurrogateSample> sample;
};

using BlackBox = std::function<std::vector<double>(const FeatureMatrix&)>;

// Perturbs the instance in interpretable space, queries the black box,
// kernel-weights the sample by interpretable-space distance, pre-selects
// top-k coordinates by weighted |correlation| and fits a weighted ridge
// regression. Deterministic given (seed, row id).
LocalExplanation explain_local(const BlackBox& black_box,
                               std::span<const double> instance, const RowId& row,
                               const TrainingStats& stats, const LocalConfig& config);

LocalExplanation explain_local(const BoostedEnsemble& model,
                               const FeatureMatrix& matrix, std::size_t row_index,
                               const TrainingStats& stats, const LocalConfig& config);

nlohmann::json global_explanation_to_json(const GlobalExplanation& explanation);
nlohmann::json local_explanation_to_json(const LocalExplanation& explanation);

}  // namespace ppmi
