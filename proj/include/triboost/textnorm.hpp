/*
 * Copyright 2026 The Triboost Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef TRIBOOST_TEXTNORM_HPP_
#define TRIBOOST_TEXTNORM_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "triboost/json_io.hpp"
#include "triboost/types.hpp"

namespace triboost::textnorm {

// Sentinel category for responses that neither a rule nor a cluster claims.
inline constexpr const char* kUnmapped = "UNMAPPED";

// Lowercases, maps every non-alphanumeric byte to a space, splits on runs of
// whitespace. ASCII-only folding; multibyte characters pass through as-is.
std::vector<std::string> tokenize(const std::string& text);

// Unigrams followed by space-joined bigrams, in reading order.
std::vector<std::string> ngrams(const std::string& text);

// Tokens rejoined with single spaces; the exact-match key for rules.
std::string canonical_key(const std::string& text);

struct TfidfModel {
  std::vector<std::string> vocabulary;  // sorted lexicographically
  Vector idf;                           // ln((1+N)/(1+df)) + 1
};

// Vocabulary selection keeps the max_features terms with the highest document
// frequency (ties: lexicographically smaller wins), then orders the survivors
// lexicographically. An empty corpus or all-empty tokenization is a
// VectorizerError.
TfidfModel fit_tfidf(const std::vector<std::string>& corpus,
                     std::size_t max_features = 5000);

// Sparse L2-normalized tf-idf vector, entries sorted by vocabulary index.
// Out-of-vocabulary terms are ignored; a document with no known term maps to
// the empty (zero) vector.
using SparseVec = std::vector<std::pair<Index, double>>;
SparseVec transform_tfidf(const TfidfModel& model, const std::string& text);

struct ClusterModel {
  Matrix centroids;                 // k x |vocabulary|, rows unit or zero
  std::vector<std::string> labels;  // per-cluster category name
  double threshold = 0.3;           // minimum cosine to claim a response
};

// Spherical k-means with k-means++ seeding over the tf-idf vectors of
// `corpus`; deterministic for a given seed. Each cluster is named after the
// most frequent raw response assigned to it (ties: lexicographically
// smallest; duplicate names get a "_<cluster index>" suffix).
ClusterModel cluster_responses(const TfidfModel& model,
                               const std::vector<std::string>& corpus, int k,
                               std::uint64_t seed, double threshold = 0.3);

// Hand-maintained exact-match mapping, keyed by canonical_key.
struct RuleDictionary {
  std::map<std::string, std::string> rules;
};

// Loads a two-column CSV (raw,label), no header requirements beyond the two
// names "raw" and "label".
RuleDictionary load_rules_csv(const std::string& path);

// Rules first (exact canonical match); otherwise the nearest centroid wins
// when its cosine similarity reaches the threshold; otherwise UNMAPPED.
std::string normalize_response(const std::string& text,
                               const TfidfModel& model,
                               const ClusterModel& clusters,
                               const RuleDictionary& rules);

// Everything needed to normalize one text column, fit on training rows only.
struct TextColumnModel {
  TfidfModel tfidf;
  ClusterModel clusters;
  RuleDictionary rules;
};

TextColumnModel fit_text_column(const std::vector<std::string>& train_texts,
                                int k, std::uint64_t seed,
                                double threshold = 0.3,
                                RuleDictionary rules = {});

// Stable level universe for the resulting nominal column: rule labels (in
// rule order), then cluster labels, then UNMAPPED; duplicates dropped.
std::vector<std::string> label_universe(const TextColumnModel& model);

Json text_column_to_json(const TextColumnModel& model);
TextColumnModel text_column_from_json(const Json& j);

}  // namespace triboost::textnorm

#endif  // TRIBOOST_TEXTNORM_HPP_
