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
#include "encode.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "ingest.hpp"
#include "util.hpp"

namespace ppmi {

namespace {

constexpr std::string_view kAggPrefix = "agg__";
constexpr std::string_view kStaticPrefix = "static__";
constexpr std::string_view kIdxPrefix = "idx__";
constexpr std::string_view kEngPrefix = "eng__";

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

// Splits "<payload>_<k>" from the right; k is the last all-digit segment.
bool split_position(std::string_view text, std::string_view* payload, int* position) {
  auto us = text.rfind('_');
  if (us == std::string_view::npos) return false;
  std::string_view digits = text.substr(us + 1);
  if (!all_digits(digits)) return false;
  *payload = text.substr(0, us);
  *position = 0;
  for (char c : digits) *position = *position * 10 + (c - '0');
  return *position >= 1;
}

std::optional<Stat> stat_from_suffix(std::string_view text, std::string_view* payload) {
  struct Entry {
    std::string_view suffix;
    Stat stat;
  };
  static constexpr Entry kEntries[] = {
      {"_max", Stat::kMax}, {"_mean", Stat::kMean},
      {"_sum", Stat::kSum}, {"_std", Stat::kStd}};
  for (const Entry& e : kEntries) {
    if (text.size() > e.suffix.size() && text.ends_with(e.suffix)) {
      *payload = text.substr(0, text.size() - e.suffix.size());
      return e.stat;
    }
  }
  return std::nullopt;
}

}  // namespace

const char* stat_name(Stat stat) {
  switch (stat) {
    case Stat::kMax: return "max";
    case Stat::kMean: return "mean";
    case Stat::kSum: return "sum";
    case Stat::kStd: return "std";
  }
  return "max";
}

FeatureName FeatureName::agg_pair(std::string act, std::string res) {
  FeatureName f;
  f.kind = Kind::kAggPair;
  f.a = std::move(act);
  f.b = std::move(res);
  return f;
}

FeatureName FeatureName::agg_value(std::string attr, std::string value) {
  FeatureName f;
  f.kind = Kind::kAggValueCount;
  f.a = std::move(attr);
  f.b = std::move(value);
  return f;
}

FeatureName FeatureName::agg_stat(std::string attr, Stat stat) {
  FeatureName f;
  f.kind = Kind::kAggNumericStat;
  f.a = std::move(attr);
  f.stat = stat;
  return f;
}

FeatureName FeatureName::static_one_hot(std::string attr, std::string value) {
  FeatureName f;
  f.kind = Kind::kStaticOneHot;
  f.a = std::move(attr);
  f.b = std::move(value);
  return f;
}

FeatureName FeatureName::static_numeric(std::string attr) {
  FeatureName f;
  f.kind = Kind::kStaticNumeric;
  f.a = std::move(attr);
  return f;
}

FeatureName FeatureName::index_one_hot(std::string field, int position,
                                       std::string value) {
  FeatureName f;
  f.kind = Kind::kIndexOneHot;
  f.a = std::move(field);
  f.b = std::move(value);
  f.position = position;
  return f;
}

FeatureName FeatureName::index_numeric(std::string attr, int position) {
  FeatureName f;
  f.kind = Kind::kIndexNumeric;
  f.a = std::move(attr);
  f.position = position;
  return f;
}

FeatureName FeatureName::engineered(std::string name) {
  FeatureName f;
  f.kind = Kind::kEngineered;
  f.a = std::move(name);
  return f;
}

std::string FeatureName::render() const {
  switch (kind) {
    case Kind::kAggPair:
      return std::string(kAggPrefix) + escape_component(a) + "|" + escape_component(b);
    case Kind::kAggValueCount:
      return std::string(kAggPrefix) + escape_component(a) + "=" + escape_component(b);
    case Kind::kAggNumericStat:
      return std::string(kAggPrefix) + escape_component(a) + "_" + stat_name(stat);
    case Kind::kStaticOneHot:
      return std::string(kStaticPrefix) + escape_component(a) + "=" +
             escape_component(b);
    case Kind::kStaticNumeric:
      return std::string(kStaticPrefix) + escape_component(a);
    case Kind::kIndexOneHot:
      return std::string(kIdxPrefix) + escape_component(a) + "_" +
             std::to_string(position) + "=" + escape_component(b);
    case Kind::kIndexNumeric:
      return std::string(kIdxPrefix) + escape_component(a) + "_" +
             std::to_string(position);
    case Kind::kEngineered:
      return std::string(kEngPrefix) + escape_component(a);
  }
  fail(ErrorCode::kInternal, "unreachable feature kind");
}

std::optional<FeatureName> FeatureName::parse(std::string_view rendered) {
  auto unescape2 = [](std::string_view x,
                      std::string_view y) -> std::optional<std::pair<std::string, std::string>> {
    auto ux = unescape_component(x);
    auto uy = unescape_component(y);
    if (!ux || !uy) return std::nullopt;
    return std::make_pair(std::move(*ux), std::move(*uy));
  };

  if (rendered.starts_with(kAggPrefix)) {
    std::string_view payload = rendered.substr(kAggPrefix.size());
    if (auto bar = payload.find('|'); bar != std::string_view::npos) {
      auto parts = unescape2(payload.substr(0, bar), payload.substr(bar + 1));
      if (!parts) return std::nullopt;
      return agg_pair(std::move(parts->first), std::move(parts->second));
    }
    if (auto eq = payload.find('='); eq != std::string_view::npos) {
      auto parts = unescape2(payload.substr(0, eq), payload.substr(eq + 1));
      if (!parts) return std::nullopt;
      return agg_value(std::move(parts->first), std::move(parts->second));
    }
    std::string_view attr;
    if (auto stat = stat_from_suffix(payload, &attr)) {
      auto ua = unescape_component(attr);
      if (!ua) return std::nullopt;
      return agg_stat(std::move(*ua), *stat);
    }
    return std::nullopt;
  }

  if (rendered.starts_with(kStaticPrefix)) {
    std::string_view payload = rendered.substr(kStaticPrefix.size());
    if (auto eq = payload.find('='); eq != std::string_view::npos) {
      auto parts = unescape2(payload.substr(0, eq), payload.substr(eq + 1));
      if (!parts) return std::nullopt;
      return static_one_hot(std::move(parts->first), std::move(parts->second));
    }
    auto ua = unescape_component(payload);
    if (!ua || ua->empty()) return std::nullopt;
    return static_numeric(std::move(*ua));
  }

  if (rendered.starts_with(kIdxPrefix)) {
    std::string_view payload = rendered.substr(kIdxPrefix.size());
    if (auto eq = payload.find('='); eq != std::string_view::npos) {
      std::string_view field_pos = payload.substr(0, eq);
      std::string_view field;
      int position = 0;
      if (!split_position(field_pos, &field, &position)) return std::nullopt;
      auto parts = unescape2(field, payload.substr(eq + 1));
      if (!parts) return std::nullopt;
      return index_one_hot(std::move(parts->first), position, std::move(parts->second));
    }
    std::string_view attr;
    int position = 0;
    if (!split_position(payload, &attr, &position)) return std::nullopt;
    auto ua = unescape_component(attr);
    if (!ua || ua->empty()) return std::nullopt;
    return index_numeric(std::move(*ua), position);
  }

  if (rendered.starts_with(kEngPrefix)) {
    auto ua = unescape_component(rendered.substr(kEngPrefix.size()));
    if (!ua || ua->empty()) return std::nullopt;
    return engineered(std::move(*ua));
  }

  return std::nullopt;
}

std::optional<std::string> FeatureName::activity() const {
  if (kind == Kind::kAggPair) return a;
  if (kind == Kind::kIndexOneHot && a == "activity") return b;
  return std::nullopt;
}

bool FeatureName::counts_like() const {
  switch (kind) {
    case Kind::kAggPair:
    case Kind::kAggValueCount:
    case Kind::kStaticOneHot:
    case Kind::kIndexOneHot:
      return true;
    default:
      return false;
  }
}

int FeatureMatrix::column_index(std::string_view rendered) const {
  auto it = std::lower_bound(column_names.begin(), column_names.end(), rendered);
  if (it == column_names.end() || *it != rendered) return -1;
  return static_cast<int>(it - column_names.begin());
}

FeatureMatrix make_matrix(std::vector<FeatureName> columns, std::vector<RowId> row_ids) {
  std::vector<std::pair<std::string, FeatureName>> named;
  named.reserve(columns.size());
  for (auto& c : columns) {
    std::string rendered = c.render();
    named.emplace_back(std::move(rendered), std::move(c));
  }
  std::sort(named.begin(), named.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });

  FeatureMatrix m;
  m.columns.reserve(named.size());
  m.column_names.reserve(named.size());
  for (auto& [rendered, col] : named) {
    m.column_names.push_back(std::move(rendered));
    m.columns.push_back(std::move(col));
  }
  for (std::size_t i = 1; i < m.column_names.size(); ++i) {
    if (m.column_names[i] == m.column_names[i - 1]) {
      fail(ErrorCode::kInternal, "duplicate feature name '" + m.column_names[i] + "'");
    }
  }
  m.row_ids = std::move(row_ids);
  m.values.assign(m.rows() * m.cols(), 0.0);
  return m;
}

FeatureMatrix combine_matrices(std::vector<FeatureMatrix> parts) {
  if (parts.empty()) fail(ErrorCode::kInvalidArgument, "combine_matrices: no parts");
  if (parts.size() == 1) return std::move(parts.front());
  const auto& ids = parts.front().row_ids;
  std::vector<FeatureName> columns;
  for (const auto& p : parts) {
    if (p.row_ids.size() != ids.size()) {
      fail(ErrorCode::kInternal, "combine_matrices: row count mismatch");
    }
    columns.insert(columns.end(), p.columns.begin(), p.columns.end());
  }
  FeatureMatrix out = make_matrix(std::move(columns), ids);
  for (const auto& p : parts) {
    for (std::size_t c = 0; c < p.cols(); ++c) {
      int oc = out.column_index(p.column_names[c]);
      for (std::size_t r = 0; r < p.rows(); ++r) out.at(r, oc) = p.at(r, c);
    }
  }
  return out;
}

Vocabulary build_vocabulary(const Bucket& bucket, const AttributeSchema& schema) {
  Vocabulary vocab;

  std::set<std::pair<std::string, std::string>> pairs;
  std::map<std::string, std::set<std::string>> agg_values;
  std::map<std::string, std::set<std::string>> static_values;
  int max_len = 0;
  for (const Prefix& p : bucket.prefixes) max_len = std::max(max_len, p.length);

  struct PosSets {
    std::set<std::string> activities;
    std::set<std::string> resources;
    std::map<std::string, std::set<std::string>> cat_values;
  };
  std::vector<PosSets> pos_sets(static_cast<std::size_t>(max_len));

  for (const Prefix& p : bucket.prefixes) {
    for (int i = 0; i < p.length; ++i) {
      const Event& e = p.event(i);
      pairs.emplace(e.activity, e.resource_or_missing());
      PosSets& ps = pos_sets[static_cast<std::size_t>(i)];
      ps.activities.insert(e.activity);
      ps.resources.insert(e.resource_or_missing());
      for (const auto& [name, value] : e.attrs) {
        if (schema.is_static(name)) continue;
        if (schema.is_numeric(name)) continue;
        agg_values[name].insert(value);
        ps.cat_values[name].insert(value);
      }
    }
    for (const auto& [name, value] : p.trace->static_attrs) {
      if (!schema.is_numeric(name)) static_values[name].insert(value);
    }
  }

  vocab.agg_pairs.assign(pairs.begin(), pairs.end());
  for (auto& [name, values] : agg_values) {
    vocab.agg_cat_values[name].assign(values.begin(), values.end());
  }
  for (auto& [name, values] : static_values) {
    vocab.static_cat_values[name].assign(values.begin(), values.end());
  }
  for (const auto& [name, info] : schema.attributes) {
    if (info.value_type != ValueType::kNumeric) continue;
    if (info.kind == AttributeKind::kStatic) vocab.static_numeric_attrs.push_back(name);
    else vocab.dyn_numeric_attrs.push_back(name);
  }

  vocab.positions.resize(pos_sets.size());
  for (std::size_t k = 0; k < pos_sets.size(); ++k) {
    PositionVocab& pv = vocab.positions[k];
    pv.activities.assign(pos_sets[k].activities.begin(), pos_sets[k].activities.end());
    pv.resources.assign(pos_sets[k].resources.begin(), pos_sets[k].resources.end());
    for (auto& [name, values] : pos_sets[k].cat_values) {
      pv.cat_values[name].assign(values.begin(), values.end());
    }
  }
  return vocab;
}

FeatureMatrix encode_static(const Bucket& bucket, const AttributeSchema& schema,
                            const Vocabulary& vocab) {
  (void)schema;
  std::vector<FeatureName> columns;
  for (const auto& attr : vocab.static_numeric_attrs) {
    columns.push_back(FeatureName::static_numeric(attr));
  }
  for (const auto& [attr, values] : vocab.static_cat_values) {
    for (const auto& v : values) columns.push_back(FeatureName::static_one_hot(attr, v));
  }

  std::vector<RowId> ids;
  ids.reserve(bucket.prefixes.size());
  for (const Prefix& p : bucket.prefixes) ids.push_back({p.case_id(), p.length});

  FeatureMatrix m = make_matrix(std::move(columns), std::move(ids));
  for (std::size_t r = 0; r < bucket.prefixes.size(); ++r) {
    const Trace& trace = *bucket.prefixes[r].trace;
    for (const auto& attr : vocab.static_numeric_attrs) {
      auto it = trace.static_attrs.find(attr);
      if (it == trace.static_attrs.end()) continue;
      double value = 0.0;
      if (parse_finite_double(it->second, &value)) {
        m.at(r, m.column_index(FeatureName::static_numeric(attr).render())) = value;
      }
    }
    for (const auto& [attr, values] : vocab.static_cat_values) {
      auto it = trace.static_attrs.find(attr);
      if (it == trace.static_attrs.end()) continue;
      int c = m.column_index(FeatureName::static_one_hot(attr, it->second).render());
      if (c >= 0) m.at(r, c) = 1.0;  // unseen category: all-zero group
    }
  }
  return m;
}

FeatureMatrix encode_aggregation(const Bucket& bucket, const AttributeSchema& schema,
                                 const Vocabulary& vocab) {
  std::vector<FeatureName> columns;
  for (const auto& [act, res] : vocab.agg_pairs) {
    columns.push_back(FeatureName::agg_pair(act, res));
  }
  for (const auto& [attr, values] : vocab.agg_cat_values) {
    for (const auto& v : values) columns.push_back(FeatureName::agg_value(attr, v));
  }
  for (const auto& attr : vocab.dyn_numeric_attrs) {
    for (Stat s : {Stat::kMax, Stat::kMean, Stat::kSum, Stat::kStd}) {
      columns.push_back(FeatureName::agg_stat(attr, s));
    }
  }

  std::vector<RowId> ids;
  ids.reserve(bucket.prefixes.size());
  for (const Prefix& p : bucket.prefixes) ids.push_back({p.case_id(), p.length});

  FeatureMatrix m = make_matrix(std::move(columns), std::move(ids));
  for (std::size_t r = 0; r < bucket.prefixes.size(); ++r) {
    const Prefix& p = bucket.prefixes[r];
    // Event order within the prefix is deliberately ignored here.
    for (int i = 0; i < p.length; ++i) {
      const Event& e = p.event(i);
      int c = m.column_index(
          FeatureName::agg_pair(e.activity, e.resource_or_missing()).render());
      if (c >= 0) m.at(r, c) += 1.0;
      for (const auto& [name, value] : e.attrs) {
        if (schema.is_static(name) || schema.is_numeric(name)) continue;
        int vc = m.column_index(FeatureName::agg_value(name, value).render());
        if (vc >= 0) m.at(r, vc) += 1.0;
      }
    }
    for (const auto& attr : vocab.dyn_numeric_attrs) {
      std::vector<double> observed;
      for (int i = 0; i < p.length; ++i) {
        auto it = p.event(i).attrs.find(attr);
        if (it == p.event(i).attrs.end()) continue;
        double v = 0.0;
        if (parse_finite_double(it->second, &v)) observed.push_back(v);
      }
      // Attribute absent from the prefix: all four stats stay 0.
      if (observed.empty()) continue;
      double maxv = observed.front();
      double sum = 0.0;
      for (double v : observed) {
        maxv = std::max(maxv, v);
        sum += v;
      }
      double mean = sum / static_cast<double>(observed.size());
      double sq = 0.0;
      for (double v : observed) sq += (v - mean) * (v - mean);
      double stddev = std::sqrt(sq / static_cast<double>(observed.size()));
      m.at(r, m.column_index(FeatureName::agg_stat(attr, Stat::kMax).render())) = maxv;
      m.at(r, m.column_index(FeatureName::agg_stat(attr, Stat::kMean).render())) = mean;
      m.at(r, m.column_index(FeatureName::agg_stat(attr, Stat::kSum).render())) = sum;
      m.at(r, m.column_index(FeatureName::agg_stat(attr, Stat::kStd).render())) = stddev;
    }
  }
  return m;
}

FeatureMatrix encode_index(const Bucket& bucket, const AttributeSchema& schema,
                           const Vocabulary& vocab) {
  if (bucket.scheme != Bucket::Scheme::kPrefixLength) {
    fail(ErrorCode::kInvalidArgument,
         "encode_index: requires a prefix-length bucket, got bucket '" + bucket.id + "'");
  }
  const int length = bucket.prefix_length;
  for (const Prefix& p : bucket.prefixes) {
    if (p.length != length) {
      fail(ErrorCode::kInternal, "encode_index: prefix length " +
                                     std::to_string(p.length) + " in bucket of length " +
                                     std::to_string(length));
    }
  }
  if (static_cast<int>(vocab.positions.size()) < length) {
    fail(ErrorCode::kInternal, "encode_index: vocabulary shorter than bucket length");
  }

  std::vector<FeatureName> columns;
  for (int k = 1; k <= length; ++k) {
    const PositionVocab& pv = vocab.positions[static_cast<std::size_t>(k - 1)];
    for (const auto& v : pv.activities) {
      columns.push_back(FeatureName::index_one_hot("activity", k, v));
    }
    for (const auto& v : pv.resources) {
      columns.push_back(FeatureName::index_one_hot("resource", k, v));
    }
    for (const auto& [attr, values] : pv.cat_values) {
      for (const auto& v : values) {
        columns.push_back(FeatureName::index_one_hot(attr, k, v));
      }
    }
    for (const auto& attr : vocab.dyn_numeric_attrs) {
      columns.push_back(FeatureName::index_numeric(attr, k));
    }
  }

  std::vector<RowId> ids;
  ids.reserve(bucket.prefixes.size());
  for (const Prefix& p : bucket.prefixes) ids.push_back({p.case_id(), p.length});

  FeatureMatrix m = make_matrix(std::move(columns), std::move(ids));
  for (std::size_t r = 0; r < bucket.prefixes.size(); ++r) {
    const Prefix& p = bucket.prefixes[r];
    for (int k = 1; k <= length; ++k) {
      const Event& e = p.event(k - 1);
      int c = m.column_index(FeatureName::index_one_hot("activity", k, e.activity).render());
      if (c >= 0) m.at(r, c) = 1.0;
      c = m.column_index(
          FeatureName::index_one_hot("resource", k, e.resource_or_missing()).render());
      if (c >= 0) m.at(r, c) = 1.0;
      for (const auto& [name, value] : e.attrs) {
        if (schema.is_static(name)) continue;
        if (schema.is_numeric(name)) {
          double v = 0.0;
          if (parse_finite_double(value, &v)) {
            int nc = m.column_index(FeatureName::index_numeric(name, k).render());
            if (nc >= 0) m.at(r, nc) = v;
          }
        } else {
          int vc = m.column_index(FeatureName::index_one_hot(name, k, value).render());
          if (vc >= 0) m.at(r, vc) = 1.0;
        }
      }
    }
  }
  return m;
}

std::array<double, 3> engineered_features(const Prefix& prefix, const EventLog& log) {
  const Trace& trace = *prefix.trace;
  const Event& last = prefix.last_event();
  double elapsed =
      static_cast<double>(last.timestamp_ms - trace.start_ms()) / 1000.0;
  double since_last =
      prefix.length <= 1
          ? 0.0
          : static_cast<double>(last.timestamp_ms -
                                trace.events[prefix.length - 2].timestamp_ms) /
                1000.0;
  int open = 0;
  for (const Trace& other : log.traces) {
    if (&other == prefix.trace) continue;
    if (other.start_ms() <= last.timestamp_ms && last.timestamp_ms <= other.end_ms()) {
      ++open;
    }
  }
  return {elapsed, since_last, static_cast<double>(open)};
}

FeatureMatrix encode_engineered(const Bucket& bucket, const EventLog& log) {
  std::vector<FeatureName> columns = {FeatureName::engineered("elapsed_time"),
                                      FeatureName::engineered("time_since_last_event"),
                                      FeatureName::engineered("open_cases")};
  std::vector<RowId> ids;
  ids.reserve(bucket.prefixes.size());
  for (const Prefix& p : bucket.prefixes) ids.push_back({p.case_id(), p.length});

  FeatureMatrix m = make_matrix(std::move(columns), std::move(ids));
  int c_elapsed = m.column_index("eng__elapsed_time");
  int c_since = m.column_index("eng__time_since_last_event");
  int c_open = m.column_index("eng__open_cases");
  for (std::size_t r = 0; r < bucket.prefixes.size(); ++r) {
    auto f = engineered_features(bucket.prefixes[r], log);
    m.at(r, c_elapsed) = f[0];
    m.at(r, c_since) = f[1];
    m.at(r, c_open) = f[2];
  }
  return m;
}

FeatureMatrix encode_bucket(const Bucket& bucket, const EventLog& log,
                            const AttributeSchema& schema, const Vocabulary& vocab,
                            const EncodingSet& set) {
  std::vector<FeatureMatrix> parts;
  if (set.static_attrs) parts.push_back(encode_static(bucket, schema, vocab));
  if (set.aggregation) parts.push_back(encode_aggregation(bucket, schema, vocab));
  if (set.index) parts.push_back(encode_index(bucket, schema, vocab));
  if (set.engineered) parts.push_back(encode_engineered(bucket, log));
  if (parts.empty()) fail(ErrorCode::kConfig, "encode_bucket: no encodings selected");
  return combine_matrices(std::move(parts));
}

SparsityReport sparsity_report(const FeatureMatrix& matrix) {
  if (matrix.rows() == 0 || matrix.cols() == 0) {
    fail(ErrorCode::kInvalidArgument, "sparsity_report: empty matrix");
  }
  std::size_t non_zero = 0;
  for (double v : matrix.values) {
    if (v != 0.0) ++non_zero;
  }
  SparsityReport report;
  report.feature_count = matrix.cols();
  report.density =
      static_cast<double>(non_zero) / static_cast<double>(matrix.values.size());
  return report;
}

void write_matrix_csv(const std::string& path, const FeatureMatrix& matrix) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, "cannot write '" + path + "'");
  out << "case_id,prefix_length";
  for (const auto& name : matrix.column_names) out << ',' << csv_escape_field(name);
  out << '\n';
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    out << csv_escape_field(matrix.row_ids[r].case_id) << ','
        << matrix.row_ids[r].prefix_length;
    for (std::size_t c = 0; c < matrix.cols(); ++c) {
      out << ',' << format_double(matrix.at(r, c));
    }
    out << '\n';
  }
}

}  // namespace ppmi
