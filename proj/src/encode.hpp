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
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "prep.hpp"

namespace ppmi {

enum class Stat { kMax, kMean, kSum, kStd };

const char* stat_name(Stat stat);

// Structured feature identity. Rendered string forms are part of the external
// contract (the inspector parses them back):
//   agg__<act>|<res>        frequency of an (activity, resource) pair
//   agg__<attr>=<val>       frequency of a categorical dynamic value
//   agg__<attr>_<stat>      max/mean/sum/std of a numeric dynamic attribute
//   static__<attr>=<val>    one-hot static categorical
//   static__<attr>          numeric static, as-is
//   idx__<field>_<k>=<val>  one-hot at position k (field: activity/resource/attr)
//   idx__<attr>_<k>         numeric dynamic attribute at position k
//   eng__<name>             engineered temporal feature
// Raw payloads are percent-escaped so rendering round-trips.
struct FeatureName {
  enum class Kind {
    kAggPair,
    kAggValueCount,
    kAggNumericStat,
    kStaticOneHot,
    kStaticNumeric,
    kIndexOneHot,
    kIndexNumeric,
    kEngineered,
  };

  Kind kind = Kind::kEngineered;
  std::string a;        // activity / attribute / index field / engineered name
  std::string b;        // resource / categorical value
  int position = 0;     // 1-based index for idx features
  Stat stat = Stat::kMax;

  std::string render() const;
  static std::optional<FeatureName> parse(std::string_view rendered);

  // Activity referenced by this feature, when one can be recovered.
  std::optional<std::string> activity() const;

  // Count/one-hot features binarise by presence; the rest are numeric-valued.
  bool counts_like() const;

  static FeatureName agg_pair(std::string act, std::string res);
  static FeatureName agg_value(std::string attr, std::string value);
  static FeatureName agg_stat(std::string attr, Stat stat);
  static FeatureName static_one_hot(std::string attr, std::string value);
  static FeatureName static_numeric(std::string attr);
  static FeatureName index_one_hot(std::string field, int position, std::string value);
  static FeatureName index_numeric(std::string attr, int position);
  static FeatureName engineered(std::string name);
};

struct RowId {
  std::string case_id;
  int prefix_length = 0;
};

// Dense row-major matrix with named columns sorted lexicographically by
// rendered name. No missing cells: absences encode as 0.
struct FeatureMatrix {
  std::vector<FeatureName> columns;
  std::vector<std::string> column_names;  // rendered, aligned with columns
  std::vector<RowId> row_ids;
  std::vector<double> values;

  std::size_t rows() const { return row_ids.size(); }
  std::size_t cols() const { return columns.size(); }
  double at(std::size_t r, std::size_t c) const { return values[r * cols() + c]; }
  double& at(std::size_t r, std::size_t c) { return values[r * cols() + c]; }
  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(values.data() + r * cols(), cols());
  }
  int column_index(std::string_view rendered) const;  // -1 when absent
};

// Creates an all-zero matrix; sorts columns and rejects duplicates.
FeatureMatrix make_matrix(std::vector<FeatureName> columns, std::vector<RowId> row_ids);

// Horizontal concatenation; all parts must agree on row ids.
FeatureMatrix combine_matrices(std::vector<FeatureMatrix> parts);

// Per-position vocabulary for index encoding.
struct PositionVocab {
  std::vector<std::string> activities;
  std::vector<std::string> resources;
  std::map<std::string, std::vector<std::string>> cat_values;
};

// Category/pair vocabularies frozen on the training bucket. Unseen values at
// encode time land in all-zero one-hot groups.
struct Vocabulary {
  std::vector<std::pair<std::string, std::string>> agg_pairs;
  std::map<std::string, std::vector<std::string>> agg_cat_values;
  std::vector<std::string> dyn_numeric_attrs;
  std::map<std::string, std::vector<std::string>> static_cat_values;
  std::vector<std::string> static_numeric_attrs;
  std::vector<PositionVocab> positions;  // index k-1 describes position k
};

Vocabulary build_vocabulary(const Bucket& bucket, const AttributeSchema& schema);

FeatureMatrix encode_static(const Bucket& bucket, const AttributeSchema& schema,
                            const Vocabulary& vocab);
FeatureMatrix encode_aggregation(const Bucket& bucket, const AttributeSchema& schema,
                                 const Vocabulary& vocab);
// Requires a prefix-length bucket; rejects single buckets.
FeatureMatrix encode_index(const Bucket& bucket, const AttributeSchema& schema,
                           const Vocabulary& vocab);
FeatureMatrix encode_engineered(const Bucket& bucket, const EventLog& log);

// elapsed time, time since last event, open cases — in that order.
std::array<double, 3> engineered_features(const Prefix& prefix, const EventLog& log);

struct EncodingSet {
  bool static_attrs = false;
  bool aggregation = true;
  bool index = false;
  bool engineered = false;
};

FeatureMatrix encode_bucket(const Bucket& bucket, const EventLog& log,
                            const AttributeSchema& schema, const Vocabulary& vocab,
                            const EncodingSet& set);

struct SparsityReport {
  std::size_t feature_count = 0;
  double density = 0.0;  // non-zero cells / total cells
};

SparsityReport sparsity_report(const FeatureMatrix& matrix);

void write_matrix_csv(const std::string& path, const FeatureMatrix& matrix);

}  // namespace ppmi
