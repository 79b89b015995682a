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

#include "triboost/textnorm.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <unordered_map>

#include "triboost/dataset.hpp"
#include "triboost/error.hpp"
#include "triboost/rng.hpp"

namespace triboost::textnorm {

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::string current;
  for (unsigned char c : text) {
    if (std::isalnum(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else if (c >= 0x80) {
      current.push_back(static_cast<char>(c));  // keep multibyte sequences
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::vector<std::string> ngrams(const std::string& text) {
  std::vector<std::string> grams = tokenize(text);
  const std::size_t n_unigrams = grams.size();
  for (std::size_t i = 0; i + 1 < n_unigrams; ++i) {
    grams.push_back(grams[i] + " " + grams[i + 1]);
  }
  return grams;
}

std::string canonical_key(const std::string& text) {
  const std::vector<std::string> tokens = tokenize(text);
  std::string key;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) key.push_back(' ');
    key += tokens[i];
  }
  return key;
}

TfidfModel fit_tfidf(const std::vector<std::string>& corpus,
                     std::size_t max_features) {
  if (max_features == 0) {
    throw ParameterError("fit_tfidf: max_features must be positive");
  }
  if (corpus.empty()) throw VectorizerError("fit_tfidf: empty corpus");

  std::unordered_map<std::string, Index> df;
  std::vector<std::string> doc_terms;
  for (const std::string& doc : corpus) {
    doc_terms = ngrams(doc);
    std::sort(doc_terms.begin(), doc_terms.end());
    doc_terms.erase(std::unique(doc_terms.begin(), doc_terms.end()),
                    doc_terms.end());
    for (const std::string& t : doc_terms) ++df[t];
  }
  if (df.empty()) {
    throw VectorizerError("fit_tfidf: corpus tokenizes to nothing");
  }

  std::vector<std::pair<std::string, Index>> terms(df.begin(), df.end());
  std::sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (terms.size() > max_features) terms.resize(max_features);
  std::sort(terms.begin(), terms.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  TfidfModel model;
  model.idf = Vector(static_cast<Index>(terms.size()));
  const double n_docs = static_cast<double>(corpus.size());
  for (std::size_t i = 0; i < terms.size(); ++i) {
    model.vocabulary.push_back(terms[i].first);
    model.idf(static_cast<Index>(i)) =
        std::log((1.0 + n_docs) / (1.0 + static_cast<double>(terms[i].second))) +
        1.0;
  }
  return model;
}

SparseVec transform_tfidf(const TfidfModel& model, const std::string& text) {
  // The vocabulary is sorted, so binary search stands in for a hash map.
  std::unordered_map<Index, double> counts;
  for (const std::string& gram : ngrams(text)) {
    const auto it = std::lower_bound(model.vocabulary.begin(),
                                     model.vocabulary.end(), gram);
    if (it == model.vocabulary.end() || *it != gram) continue;
    counts[static_cast<Index>(it - model.vocabulary.begin())] += 1.0;
  }
  SparseVec vec(counts.begin(), counts.end());
  std::sort(vec.begin(), vec.end());
  double norm_sq = 0.0;
  for (auto& [idx, value] : vec) {
    value *= model.idf(idx);
    norm_sq += value * value;
  }
  if (norm_sq > 0.0) {
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (auto& [idx, value] : vec) value *= inv;
  }
  return vec;
}

namespace {

double dot_dense(const SparseVec& x, const Eigen::Ref<const Vector>& c) {
  double dot = 0.0;
  for (const auto& [idx, value] : x) dot += value * c(idx);
  return dot;
}

// Squared Euclidean distance between a unit-or-zero sparse vector and a
// unit-or-zero dense centroid.
double dist_sq(const SparseVec& x, const Eigen::Ref<const Vector>& c,
               double x_norm_sq, double c_norm_sq) {
  return x_norm_sq + c_norm_sq - 2.0 * dot_dense(x, c);
}

}  // namespace

ClusterModel cluster_responses(const TfidfModel& model,
                               const std::vector<std::string>& corpus, int k,
                               std::uint64_t seed, double threshold) {
  if (k < 1) throw ParameterError("cluster_responses: k must be >= 1");
  if (corpus.empty()) throw VectorizerError("cluster_responses: empty corpus");

  const Index n = static_cast<Index>(corpus.size());
  const Index v = static_cast<Index>(model.vocabulary.size());
  std::vector<SparseVec> docs(corpus.size());
  std::vector<double> norm_sq(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    docs[i] = transform_tfidf(model, corpus[i]);
    norm_sq[i] = docs[i].empty() ? 0.0 : 1.0;
  }

  // k cannot exceed the number of distinct vectors.
  {
    std::vector<std::string> keys;
    keys.reserve(corpus.size());
    for (const std::string& doc : corpus) keys.push_back(canonical_key(doc));
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    if (static_cast<std::size_t>(k) > keys.size()) {
      throw ParameterError("cluster_responses: k exceeds distinct responses");
    }
  }

  Rng rng(seed);
  Matrix centroids = Matrix::Zero(k, v);
  Vector centroid_norm_sq = Vector::Zero(k);
  auto set_centroid = [&](int c, const SparseVec& doc, double nsq) {
    centroids.row(c).setZero();
    for (const auto& [idx, value] : doc) centroids(c, idx) = value;
    centroid_norm_sq(c) = nsq;
  };

  // k-means++ seeding: first uniform, then proportional to squared distance.
  std::vector<double> d2(corpus.size());
  {
    const auto first = static_cast<std::size_t>(
        rng.uniform_below(static_cast<std::uint64_t>(n)));
    set_centroid(0, docs[first], norm_sq[first]);
    for (std::size_t i = 0; i < docs.size(); ++i) {
      d2[i] = dist_sq(docs[i], centroids.row(0), norm_sq[i],
                      centroid_norm_sq(0));
    }
    for (int c = 1; c < k; ++c) {
      double total = 0.0;
      for (double w : d2) total += w;
      std::size_t pick = 0;
      if (total <= 0.0) {
        // Everything coincides with a centroid already; any point works.
        pick = static_cast<std::size_t>(
            rng.uniform_below(static_cast<std::uint64_t>(n)));
      } else {
        const double r = rng.uniform() * total;
        double cum = 0.0;
        for (std::size_t i = 0; i < d2.size(); ++i) {
          cum += d2[i];
          if (r < cum) { pick = i; break; }
          pick = i;  // numeric slack: fall through to the last point
        }
      }
      set_centroid(c, docs[pick], norm_sq[pick]);
      for (std::size_t i = 0; i < docs.size(); ++i) {
        d2[i] = std::min(d2[i], dist_sq(docs[i], centroids.row(c), norm_sq[i],
                                        centroid_norm_sq(c)));
      }
    }
  }

  std::vector<int> assign(corpus.size(), -1);
  for (int iter = 0; iter < 100; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < docs.size(); ++i) {
      int best = 0;
      double best_d = dist_sq(docs[i], centroids.row(0), norm_sq[i],
                              centroid_norm_sq(0));
      for (int c = 1; c < k; ++c) {
        const double d = dist_sq(docs[i], centroids.row(c), norm_sq[i],
                                 centroid_norm_sq(c));
        if (d < best_d) { best_d = d; best = c; }
      }
      if (assign[i] != best) { assign[i] = best; changed = true; }
    }
    if (!changed && iter > 0) break;

    // Mean update, then renormalize: spherical k-means.
    centroids.setZero();
    std::vector<Index> counts(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < docs.size(); ++i) {
      for (const auto& [idx, value] : docs[i]) {
        centroids(assign[i], idx) += value;
      }
      ++counts[static_cast<std::size_t>(assign[i])];
    }
    std::vector<int> empties;
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] == 0) {
        empties.push_back(c);
        continue;
      }
      const double norm = centroids.row(c).norm();
      if (norm > 0.0) {
        centroids.row(c) /= norm;
        centroid_norm_sq(c) = 1.0;
      } else {
        centroid_norm_sq(c) = 0.0;
      }
    }
    // Revive empty clusters from the points farthest from their own
    // centroid, never reusing a point within one update.
    std::vector<bool> stolen(docs.size(), false);
    for (int c : empties) {
      std::size_t far = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < docs.size(); ++i) {
        if (stolen[i]) continue;
        const double d = dist_sq(docs[i], centroids.row(assign[i]),
                                 norm_sq[i], centroid_norm_sq(assign[i]));
        if (d > far_d) { far_d = d; far = i; }
      }
      stolen[far] = true;
      set_centroid(c, docs[far], norm_sq[far]);
    }
  }

  // Name each cluster after its most frequent raw response.
  ClusterModel out;
  out.centroids = std::move(centroids);
  out.threshold = threshold;
  out.labels.resize(static_cast<std::size_t>(k));
  for (int c = 0; c < k; ++c) {
    std::map<std::string, int> freq;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      if (assign[i] == c) ++freq[corpus[i]];
    }
    std::string label = "cluster_" + std::to_string(c);
    int best = 0;
    for (const auto& [name, count] : freq) {
      if (count > best) {  // std::map order makes ties lexicographic
        best = count;
        label = name;
      }
    }
    out.labels[static_cast<std::size_t>(c)] = label;
  }
  // Disambiguate duplicate names so they can serve as nominal levels.
  for (std::size_t c = 0; c < out.labels.size(); ++c) {
    for (std::size_t prev = 0; prev < c; ++prev) {
      if (out.labels[prev] == out.labels[c]) {
        out.labels[c] += "_" + std::to_string(c);
        break;
      }
    }
  }
  return out;
}

RuleDictionary load_rules_csv(const std::string& path) {
  const std::vector<data::ColumnSchema> schema{
      {"raw", data::ColumnKind::text, {}},
      {"label", data::ColumnKind::text, {}}};
  const data::DataTable table = data::read_csv(path, schema);
  RuleDictionary dict;
  for (Index i = 0; i < table.n_rows(); ++i) {
    if (table.is_missing(i, 0) || table.is_missing(i, 1)) {
      throw ParseError("rules CSV: row " + std::to_string(i) +
                       " has a missing cell");
    }
    dict.rules[canonical_key(table.text_value(i, 0))] = table.text_value(i, 1);
  }
  return dict;
}

std::string normalize_response(const std::string& text,
                               const TfidfModel& model,
                               const ClusterModel& clusters,
                               const RuleDictionary& rules) {
  const auto it = rules.rules.find(canonical_key(text));
  if (it != rules.rules.end()) return it->second;

  const SparseVec vec = transform_tfidf(model, text);
  if (vec.empty()) return kUnmapped;  // nothing recognizable in the response
  double best = -1.0;
  std::size_t best_c = 0;
  for (Index c = 0; c < clusters.centroids.rows(); ++c) {
    const double cos = dot_dense(vec, clusters.centroids.row(c));
    if (cos > best) {
      best = cos;
      best_c = static_cast<std::size_t>(c);
    }
  }
  if (best < clusters.threshold) return kUnmapped;
  return clusters.labels[best_c];
}

TextColumnModel fit_text_column(const std::vector<std::string>& train_texts,
                                int k, std::uint64_t seed, double threshold,
                                RuleDictionary rules) {
  TextColumnModel model;
  model.tfidf = fit_tfidf(train_texts);
  model.clusters = cluster_responses(model.tfidf, train_texts, k, seed,
                                     threshold);
  model.rules = std::move(rules);
  return model;
}

std::vector<std::string> label_universe(const TextColumnModel& model) {
  std::vector<std::string> levels;
  auto add = [&levels](const std::string& name) {
    if (std::find(levels.begin(), levels.end(), name) == levels.end()) {
      levels.push_back(name);
    }
  };
  for (const auto& [key, label] : model.rules.rules) add(label);
  for (const std::string& label : model.clusters.labels) add(label);
  add(kUnmapped);
  return levels;
}

Json text_column_to_json(const TextColumnModel& model) {
  Json j;
  j["vocabulary"] = model.tfidf.vocabulary;
  j["idf"] = vector_to_json(model.tfidf.idf);
  j["centroids"] = matrix_to_json(model.clusters.centroids);
  j["cluster_labels"] = model.clusters.labels;
  j["threshold"] = model.clusters.threshold;
  j["rules"] = model.rules.rules;
  return j;
}

TextColumnModel text_column_from_json(const Json& j) {
  TextColumnModel model;
  model.tfidf.vocabulary = require_field(j, "vocabulary", "text model")
                               .get<std::vector<std::string>>();
  model.tfidf.idf = vector_from_json(require_field(j, "idf", "text model"));
  model.clusters.centroids =
      matrix_from_json(require_field(j, "centroids", "text model"));
  model.clusters.labels = require_field(j, "cluster_labels", "text model")
                              .get<std::vector<std::string>>();
  model.clusters.threshold =
      require_field(j, "threshold", "text model").get<double>();
  model.rules.rules = require_field(j, "rules", "text model")
                          .get<std::map<std::string, std::string>>();
  if (static_cast<Index>(model.tfidf.vocabulary.size()) !=
          model.tfidf.idf.size() ||
      model.clusters.centroids.cols() != model.tfidf.idf.size()) {
    throw ModelIntegrityError("text model: inconsistent field sizes");
  }
  return model;
}

}  // namespace triboost::textnorm
