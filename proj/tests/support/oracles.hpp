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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eventlog.hpp"
#include "explain.hpp"
#include "prep.hpp"

// Brute-force reference implementations, kept deliberately independent of the
// library code they check: naive nested loops, separate name rendering, and
// an elimination-free linear solve. Used to freeze expected values.
namespace ppmi::testoracles {

// O(P*N) pairwise AUC; ties count one half. Integer numerator, so results
// are bit-comparable with the library.
double auc_pairwise(std::span<const double> scores, std::span<const double> labels);

double mae_direct(std::span<const double> predictions, std::span<const double> targets);

// Expected feature values for one prefix, computed with naive loops and the
// oracle's own name rendering. Keys cover exactly the non-zero entries plus
// all numeric-stat columns of attributes observed in the prefix.
std::map<std::string, double> encode_row(const Prefix& prefix, const EventLog& log,
                                         const AttributeSchema& schema, bool aggregation,
                                         bool static_attrs, bool engineered);

// Same for index encoding of a length-L prefix.
std::map<std::string, double> encode_index_row(const Prefix& prefix,
                                               const AttributeSchema& schema);

// Mining statistics by exhaustive double loops.
std::map<std::string, std::pair<std::size_t, std::size_t>> dfg_nodes(const EventLog& log);
std::map<std::pair<std::string, std::string>, std::pair<std::size_t, std::size_t>>
dfg_edges(const EventLog& log);
std::optional<int> min_prefix_index_naive(const EventLog& log, const std::string& activity);
double eventually_follows_naive(const EventLog& log, const std::string& a,
                                const std::string& b);
double precedes_naive(const EventLog& log, const std::string& a, const std::string& b);

// Brute-force double loop over all index pairs.
bool eventually_follows_label_naive(const Trace& trace, const std::string& a,
                                    const std::string& b);

// Weighted ridge regression solved with Eigen's dense decompositions.
// Column 0 of the design matrix is the unpenalised intercept.
std::vector<double> weighted_ridge(const std::vector<std::vector<double>>& design,
                                   const std::vector<double>& weights,
                                   const std::vector<double>& targets, double ridge);

}  // namespace ppmi::testoracles
