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
#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace ppmi::testoracles {

double auc_pairwise(std::span<const double> scores, std::span<const double> labels) {
  unsigned long long numerator2 = 0, positives = 0, negatives = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1.0) continue;
    ++positives;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] != 0.0) continue;
      if (scores[i] > scores[j]) numerator2 += 2;
      else if (scores[i] == scores[j]) numerator2 += 1;
    }
  }
  for (double y : labels) {
    if (y == 0.0) ++negatives;
  }
  return static_cast<double>(numerator2) /
         (2.0 * static_cast<double>(positives) * static_cast<double>(negatives));
}

double mae_direct(std::span<const double> predictions, std::span<const double> targets) {
  double total = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    total += std::fabs(predictions[i] - targets[i]);
  }
  return total / static_cast<double>(predictions.size());
}

namespace {

// The oracle renders names with its own escaping, independent of the
// library's helpers.
std::string esc(const std::string& raw) {
  auto hex = [](unsigned char c) {
    static const char* digits = "0123456789ABCDEF";
    return std::string{'%', digits[c >> 4], digits[c & 0xF]};
  };
  std::string out;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    unsigned char c = static_cast<unsigned char>(raw[i]);
    bool underscore_run =
        raw[i] == '_' && ((i + 1 < raw.size() && raw[i + 1] == '_') ||
                          (i > 0 && raw[i - 1] == '_'));
    if (c == '%' || c == '|' || c == '=' || underscore_run) out += hex(c);
    else out.push_back(raw[i]);
  }
  return out;
}

std::string resource_of(const Event& e) {
  return e.resource ? *e.resource : std::string("\xE2\x8A\xA5");
}

}  // namespace

std::map<std::string, double> encode_row(const Prefix& prefix, const EventLog& log,
                                         const AttributeSchema& schema, bool aggregation,
                                         bool static_attrs, bool engineered) {
  std::map<std::string, double> expected;

  if (aggregation) {
    for (int i = 0; i < prefix.length; ++i) {
      const Event& e = prefix.trace->events[i];
      expected["agg__" + esc(e.activity) + "|" + esc(resource_of(e))] += 1.0;
      for (const auto& [name, value] : e.attrs) {
        auto info = schema.attributes.find(name);
        if (info == schema.attributes.end()) continue;
        if (info->second.kind == AttributeKind::kStatic) continue;
        if (info->second.value_type == ValueType::kNumeric) continue;
        expected["agg__" + esc(name) + "=" + esc(value)] += 1.0;
      }
    }
    for (const auto& [name, info] : schema.attributes) {
      if (info.kind != AttributeKind::kDynamic ||
          info.value_type != ValueType::kNumeric) {
        continue;
      }
      std::vector<double> values;
      for (int i = 0; i < prefix.length; ++i) {
        auto it = prefix.trace->events[i].attrs.find(name);
        if (it == prefix.trace->events[i].attrs.end()) continue;
        values.push_back(std::stod(it->second));
      }
      if (values.empty()) continue;
      double maxv = values[0], sum = 0.0;
      for (double v : values) {
        if (v > maxv) maxv = v;
        sum += v;
      }
      double mean = sum / static_cast<double>(values.size());
      double sq = 0.0;
      for (double v : values) sq += (v - mean) * (v - mean);
      expected["agg__" + esc(name) + "_max"] = maxv;
      expected["agg__" + esc(name) + "_mean"] = mean;
      expected["agg__" + esc(name) + "_sum"] = sum;
      expected["agg__" + esc(name) + "_std"] =
          std::sqrt(sq / static_cast<double>(values.size()));
    }
  }

  if (static_attrs) {
    for (const auto& [name, value] : prefix.trace->static_attrs) {
      auto info = schema.attributes.find(name);
      if (info == schema.attributes.end()) continue;
      if (info->second.value_type == ValueType::kNumeric) {
        expected["static__" + esc(name)] = std::stod(value);
      } else {
        expected["static__" + esc(name) + "=" + esc(value)] = 1.0;
      }
    }
  }

  if (engineered) {
    const Trace& trace = *prefix.trace;
    const std::int64_t t_last = trace.events[prefix.length - 1].timestamp_ms;
    expected["eng__elapsed_time"] =
        static_cast<double>(t_last - trace.events[0].timestamp_ms) / 1000.0;
    expected["eng__time_since_last_event"] =
        prefix.length == 1
            ? 0.0
            : static_cast<double>(t_last -
                                  trace.events[prefix.length - 2].timestamp_ms) /
                  1000.0;
    double open = 0.0;
    for (const Trace& other : log.traces) {
      if (other.case_id == trace.case_id) continue;
      if (other.events.front().timestamp_ms <= t_last &&
          t_last <= other.events.back().timestamp_ms) {
        open += 1.0;
      }
    }
    expected["eng__open_cases"] = open;
  }

  return expected;
}

std::map<std::string, double> encode_index_row(const Prefix& prefix,
                                               const AttributeSchema& schema) {
  std::map<std::string, double> expected;
  for (int k = 1; k <= prefix.length; ++k) {
    const Event& e = prefix.trace->events[k - 1];
    expected["idx__activity_" + std::to_string(k) + "=" + esc(e.activity)] = 1.0;
    expected["idx__resource_" + std::to_string(k) + "=" + esc(resource_of(e))] = 1.0;
    for (const auto& [name, value] : e.attrs) {
      auto info = schema.attributes.find(name);
      if (info == schema.attributes.end()) continue;
      if (info->second.kind == AttributeKind::kStatic) continue;
      if (info->second.value_type == ValueType::kNumeric) {
        expected["idx__" + esc(name) + "_" + std::to_string(k)] = std::stod(value);
      } else {
        expected["idx__" + esc(name) + "_" + std::to_string(k) + "=" + esc(value)] = 1.0;
      }
    }
  }
  return expected;
}

std::map<std::string, std::pair<std::size_t, std::size_t>> dfg_nodes(const EventLog& log) {
  std::map<std::string, std::pair<std::size_t, std::size_t>> nodes;
  for (const Trace& trace : log.traces) {
    for (const Event& e : trace.events) nodes[e.activity].second += 1;
  }
  for (auto& [activity, counts] : nodes) {
    for (const Trace& trace : log.traces) {
      bool found = false;
      for (const Event& e : trace.events) {
        if (e.activity == activity) found = true;
      }
      if (found) counts.first += 1;
    }
  }
  return nodes;
}

std::map<std::pair<std::string, std::string>, std::pair<std::size_t, std::size_t>>
dfg_edges(const EventLog& log) {
  std::map<std::pair<std::string, std::string>, std::pair<std::size_t, std::size_t>> edges;
  for (const Trace& trace : log.traces) {
    for (std::size_t i = 0; i + 1 < trace.events.size(); ++i) {
      edges[{trace.events[i].activity, trace.events[i + 1].activity}].second += 1;
    }
  }
  for (auto& [edge, counts] : edges) {
    for (const Trace& trace : log.traces) {
      bool found = false;
      for (std::size_t i = 0; i + 1 < trace.events.size(); ++i) {
        if (trace.events[i].activity == edge.first &&
            trace.events[i + 1].activity == edge.second) {
          found = true;
        }
      }
      if (found) counts.first += 1;
    }
  }
  return edges;
}

std::optional<int> min_prefix_index_naive(const EventLog& log,
                                          const std::string& activity) {
  std::optional<int> best;
  for (const Trace& trace : log.traces) {
    for (int i = 0; i < trace.length(); ++i) {
      if (trace.events[i].activity == activity) {
        if (!best || i + 1 < *best) best = i + 1;
      }
    }
  }
  return best;
}

double eventually_follows_naive(const EventLog& log, const std::string& a,
                                const std::string& b) {
  std::size_t with_a = 0, followed = 0;
  for (const Trace& trace : log.traces) {
    int first_a = -1;
    for (int i = 0; i < trace.length(); ++i) {
      if (trace.events[i].activity == a) {
        first_a = i;
        break;
      }
    }
    if (first_a < 0) continue;
    ++with_a;
    bool found = false;
    for (int i = 0; i < trace.length(); ++i) {
      for (int j = i + 1; j < trace.length(); ++j) {
        if (i == first_a && trace.events[j].activity == b) found = true;
      }
    }
    if (found) ++followed;
  }
  return static_cast<double>(followed) / static_cast<double>(with_a);
}

double precedes_naive(const EventLog& log, const std::string& a, const std::string& b) {
  std::size_t with_b = 0, preceded = 0;
  for (const Trace& trace : log.traces) {
    int first_b = -1;
    for (int i = 0; i < trace.length(); ++i) {
      if (trace.events[i].activity == b) {
        first_b = i;
        break;
      }
    }
    if (first_b < 0) continue;
    ++with_b;
    bool found = false;
    for (int i = 0; i < first_b; ++i) {
      if (trace.events[i].activity == a) found = true;
    }
    if (found) ++preceded;
  }
  return static_cast<double>(preceded) / static_cast<double>(with_b);
}

bool eventually_follows_label_naive(const Trace& trace, const std::string& a,
                                    const std::string& b) {
  for (int i = 0; i < trace.length(); ++i) {
    if (trace.events[i].activity != a) continue;
    bool has_later_b = false;
    for (int j = 0; j < trace.length(); ++j) {
      if (j > i && trace.events[j].activity == b) has_later_b = true;
    }
    if (!has_later_b) return false;
  }
  return true;
}

std::vector<double> weighted_ridge(const std::vector<std::vector<double>>& design,
                                   const std::vector<double>& weights,
                                   const std::vector<double>& targets, double ridge) {
  const std::size_t n = design.size();
  const std::size_t d = design.front().size();
  Eigen::MatrixXd x(n, d);
  Eigen::VectorXd y(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) x(i, j) = design[i][j];
    y(i) = targets[i];
  }
  Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(weights.data(), n);
  Eigen::MatrixXd xtw = x.transpose() * w.asDiagonal();
  Eigen::MatrixXd lhs = xtw * x;
  for (std::size_t j = 1; j < d; ++j) lhs(j, j) += ridge;  // intercept unpenalised
  Eigen::VectorXd rhs = xtw * y;
  Eigen::VectorXd beta = lhs.fullPivLu().solve(rhs);
  return std::vector<double>(beta.data(), beta.data() + d);
}

}  // namespace ppmi::testoracles
