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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "triboost/error.hpp"
#include "triboost/textnorm.hpp"

using namespace triboost;
using namespace triboost::textnorm;

TEST_CASE("tokenizer lowercases and strips punctuation") {
  CHECK(tokenize("I feel sad, VERY sad!") ==
        std::vector<std::string>{"i", "feel", "sad", "very", "sad"});
  CHECK(tokenize("  ") == std::vector<std::string>{});
  CHECK(tokenize("can't sleep") ==
        std::vector<std::string>{"can", "t", "sleep"});
  CHECK(canonical_key("  I   FEEL sad. ") == "i feel sad");
}

TEST_CASE("ngrams appends space-joined bigrams") {
  CHECK(ngrams("feel very sad") ==
        std::vector<std::string>{"feel", "very", "sad", "feel very",
                                 "very sad"});
  CHECK(ngrams("sad") == std::vector<std::string>{"sad"});
}

TEST_CASE("tf-idf uses ln((1+N)/(1+df)) + 1 and sorts the vocabulary") {
  const std::vector<std::string> corpus{"good app", "bad app"};
  const TfidfModel model = fit_tfidf(corpus);
  // Terms: app (df 2), bad, good, "bad app", "good app" (df 1 each).
  CHECK(model.vocabulary ==
        std::vector<std::string>{"app", "bad", "bad app", "good", "good app"});
  const Index app = 0;
  CHECK(model.idf(app) == doctest::Approx(1.0).epsilon(1e-15));
  // ln(3/2) + 1, frozen.
  CHECK(model.idf(3) == doctest::Approx(1.4054651081081644).epsilon(1e-15));
}

TEST_CASE("vocabulary caps at max_features by df, ties lexicographic") {
  const std::vector<std::string> corpus{"good app", "bad app"};
  const TfidfModel model = fit_tfidf(corpus, 3);
  // app (df 2) first; among the df-1 ties, "bad" and "bad app" win the
  // lexicographic tie-break; the survivors are then re-sorted.
  CHECK(model.vocabulary ==
        std::vector<std::string>{"app", "bad", "bad app"});
}

TEST_CASE("transform produces L2-normalized sparse vectors") {
  const TfidfModel model = fit_tfidf({"good app", "bad app"});
  const SparseVec vec = transform_tfidf(model, "good app");
  REQUIRE(vec.size() == 3);  // app, good, "good app"
  double norm_sq = 0.0;
  for (const auto& [idx, value] : vec) norm_sq += value * value;
  CHECK(norm_sq == doctest::Approx(1.0).epsilon(1e-12));
  // Unseen text maps to the zero vector.
  CHECK(transform_tfidf(model, "zzz qqq").empty());
  // Repeated terms raise tf: "app app" has a single entry with full weight.
  const SparseVec rep = transform_tfidf(model, "app app");
  bool has_app_app_bigram = false;
  for (const auto& [idx, value] : rep) {
    if (model.vocabulary[static_cast<std::size_t>(idx)] == "app app") {
      has_app_app_bigram = true;
    }
  }
  CHECK_FALSE(has_app_app_bigram);  // bigram never fit -> ignored
}

TEST_CASE("tf-idf rejects degenerate corpora") {
  CHECK_THROWS_AS(fit_tfidf({}), VectorizerError);
  CHECK_THROWS_AS(fit_tfidf({"...", "!!"}), VectorizerError);
  CHECK_THROWS_AS(fit_tfidf({"ok"}, 0), ParameterError);
}

TEST_CASE("clustering separates obvious groups and is seed-stable") {
  const std::vector<std::string> corpus{
      "sad",       "feeling sad", "very sad",  "sad all day",
      "happy",     "so happy",    "happy days"};
  const TfidfModel tfidf = fit_tfidf(corpus);
  const ClusterModel a = cluster_responses(tfidf, corpus, 2, 7);
  const ClusterModel b = cluster_responses(tfidf, corpus, 2, 7);
  CHECK(a.centroids == b.centroids);
  CHECK(a.labels == b.labels);

  // The two groups share no vocabulary, so they must land apart: the sad
  // documents' best centroid differs from the happy documents' best.
  RuleDictionary no_rules;
  const std::string sad_label = normalize_response("very sad", tfidf, a,
                                                   no_rules);
  const std::string happy_label = normalize_response("so happy", tfidf, a,
                                                     no_rules);
  CHECK(sad_label != happy_label);
  CHECK(sad_label != kUnmapped);
  CHECK(happy_label != kUnmapped);
}

TEST_CASE("clustering rejects k beyond the distinct responses") {
  const TfidfModel tfidf = fit_tfidf({"same", "same", "Same!"});
  CHECK_THROWS_AS(cluster_responses(tfidf, {"same", "same", "Same!"}, 2, 1),
                  ParameterError);
  CHECK_THROWS_AS(cluster_responses(tfidf, {"same"}, 0, 1), ParameterError);
}

TEST_CASE("rules win before clustering; gibberish is UNMAPPED") {
  const std::vector<std::string> corpus{"sad", "very sad", "happy", "so happy"};
  const TfidfModel tfidf = fit_tfidf(corpus);
  const ClusterModel clusters = cluster_responses(tfidf, corpus, 2, 3);
  RuleDictionary rules;
  rules.rules[canonical_key("can't sleep")] = "insomnia";

  CHECK(normalize_response("CAN'T   sleep!!", tfidf, clusters, rules) ==
        "insomnia");
  CHECK(normalize_response("qwerty zxcvb", tfidf, clusters, rules) ==
        kUnmapped);
  CHECK(normalize_response("very sad", tfidf, clusters, rules) != kUnmapped);
}

TEST_CASE("threshold gates weak matches") {
  const std::vector<std::string> corpus{"alpha beta gamma", "delta epsilon"};
  const TfidfModel tfidf = fit_tfidf(corpus);
  // threshold 1.01 can never be reached.
  const ClusterModel strict = cluster_responses(tfidf, corpus, 2, 5, 1.01);
  RuleDictionary no_rules;
  CHECK(normalize_response("alpha beta gamma", tfidf, strict, no_rules) ==
        kUnmapped);
  const ClusterModel lax = cluster_responses(tfidf, corpus, 2, 5, 0.3);
  CHECK(normalize_response("alpha beta gamma", tfidf, lax, no_rules) !=
        kUnmapped);
}

TEST_CASE("text column model round-trips through JSON") {
  const std::vector<std::string> corpus{"sad", "very sad", "happy",
                                        "so happy"};
  RuleDictionary rules;
  rules.rules["cant sleep"] = "insomnia";
  const TextColumnModel model = fit_text_column(corpus, 2, 11, 0.3, rules);
  const TextColumnModel back = text_column_from_json(text_column_to_json(model));
  CHECK(back.tfidf.vocabulary == model.tfidf.vocabulary);
  CHECK(back.tfidf.idf == model.tfidf.idf);
  CHECK(back.clusters.centroids == model.clusters.centroids);
  CHECK(back.clusters.labels == model.clusters.labels);
  CHECK(back.clusters.threshold == model.clusters.threshold);
  CHECK(back.rules.rules == model.rules.rules);

  // The label universe covers rules, clusters and the sentinel, no dupes.
  const auto levels = label_universe(model);
  std::set<std::string> uniq(levels.begin(), levels.end());
  CHECK(uniq.size() == levels.size());
  CHECK(uniq.count("insomnia") == 1);
  CHECK(uniq.count(kUnmapped) == 1);
}
