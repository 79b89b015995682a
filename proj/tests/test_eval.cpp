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
#include <vector>

#include "triboost/error.hpp"
#include "triboost/eval.hpp"
#include "triboost/rng.hpp"

using namespace triboost;
using namespace triboost::eval;

namespace {

// tp true positives, then fp, fn, tn — expanded into parallel label arrays.
std::pair<std::vector<int>, std::vector<int>> from_counts(int tp, int fp,
                                                          int fn, int tn) {
  std::vector<int> truth, predicted;
  for (int i = 0; i < tp; ++i) { truth.push_back(1); predicted.push_back(1); }
  for (int i = 0; i < fp; ++i) { truth.push_back(0); predicted.push_back(1); }
  for (int i = 0; i < fn; ++i) { truth.push_back(1); predicted.push_back(0); }
  for (int i = 0; i < tn; ++i) { truth.push_back(0); predicted.push_back(0); }
  return {truth, predicted};
}

// O(n^2) pair-counting AUC used as an oracle for the rank-based version.
double pairwise_auc(const std::vector<int>& truth, const Vector& scores) {
  double wins = 0.0, pairs = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] != 1) continue;
    for (std::size_t j = 0; j < truth.size(); ++j) {
      if (truth[j] != 0) continue;
      pairs += 1.0;
      const double si = scores(static_cast<Index>(i));
      const double sj = scores(static_cast<Index>(j));
      wins += si > sj ? 1.0 : (si == sj ? 0.5 : 0.0);
    }
  }
  return wins / pairs;
}

}  // namespace

TEST_CASE("confusion matrix counts truth rows against predicted columns") {
  const std::vector<int> truth{0, 1, 2, 2, 1};
  const std::vector<int> predicted{0, 2, 2, 1, 1};
  const IntMatrix m = confusion_matrix(truth, predicted, 3);
  CHECK(m(0, 0) == 1);
  CHECK(m(1, 1) == 1);
  CHECK(m(1, 2) == 1);
  CHECK(m(2, 1) == 1);
  CHECK(m(2, 2) == 1);
  CHECK(m.sum() == 5);
  CHECK_THROWS_AS(confusion_matrix(truth, {0, 1}, 3), EvaluationError);
  CHECK_THROWS_AS(confusion_matrix({0, 3}, {0, 1}, 3), EvaluationError);
}

TEST_CASE("binary metrics match hand-computed counts") {
  const auto [truth, predicted] = from_counts(7, 2, 1, 10);
  CHECK(accuracy_score(truth, predicted) == 0.85);
  CHECK(precision_score(truth, predicted) == 7.0 / 9.0);
  CHECK(recall_score(truth, predicted) == 0.875);
  CHECK(f1_score(truth, predicted) ==
        doctest::Approx(14.0 / 17.0).epsilon(1e-12));
}

TEST_CASE("ratios with empty denominators are NaN") {
  const std::vector<int> truth{0, 0, 1};
  CHECK(std::isnan(precision_score(truth, {0, 0, 0})));
  CHECK(std::isnan(recall_score({0, 0, 0}, {0, 1, 0})));
  CHECK(std::isnan(f1_score({0, 0, 0}, {0, 0, 0})));
  CHECK(f1_score(truth, {0, 0, 1}) == 1.0);
}

TEST_CASE("macro metrics average one-vs-rest with zero for undefined") {
  const std::vector<int> truth{0, 0, 1, 2};
  const std::vector<int> predicted{0, 1, 1, 1};
  CHECK(macro_precision_score(truth, predicted, 3) ==
        doctest::Approx(4.0 / 9.0).epsilon(1e-12));
  CHECK(macro_recall_score(truth, predicted, 3) == 0.5);
  CHECK(macro_f1_score(truth, predicted, 3) ==
        doctest::Approx(7.0 / 18.0).epsilon(1e-12));
}

TEST_CASE("rank auc reproduces the classic example and handles ties") {
  Vector scores(4);
  scores << 0.1, 0.4, 0.35, 0.8;
  CHECK(roc_auc_score({0, 0, 1, 1}, scores) == 0.75);

  Vector tied(2);
  tied << 0.5, 0.5;
  CHECK(roc_auc_score({0, 1}, tied) == 0.5);

  Vector perfect(4);
  perfect << 0.1, 0.2, 0.8, 0.9;
  CHECK(roc_auc_score({0, 0, 1, 1}, perfect) == 1.0);
  CHECK(roc_auc_score({1, 1, 0, 0}, perfect) == 0.0);

  CHECK_THROWS_AS(roc_auc_score({1, 1}, tied), EvaluationError);
}

TEST_CASE("rank auc equals the quadratic pair count on tied data") {
  Rng rng(7);
  const std::size_t n = 200;
  std::vector<int> truth;
  Vector scores(static_cast<Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    truth.push_back(rng.uniform() < 0.4 ? 1 : 0);
    // One decimal place forces heavy tie blocks.
    scores(static_cast<Index>(i)) =
        std::floor(rng.uniform() * 10.0) / 10.0;
  }
  CHECK(roc_auc_score(truth, scores) ==
        doctest::Approx(pairwise_auc(truth, scores)).epsilon(1e-12));
}

TEST_CASE("quantile interpolates linearly between order statistics") {
  CHECK(quantile({4, 1, 3, 2}, 0.5) == 2.5);
  CHECK(quantile({4, 1, 3, 2}, 0.0) == 1.0);
  CHECK(quantile({4, 1, 3, 2}, 1.0) == 4.0);
  CHECK(quantile({0, 1, 2, 3}, 0.25) == 0.75);
  CHECK(quantile({5}, 0.9) == 5.0);
  CHECK_THROWS_AS(quantile({}, 0.5), EvaluationError);
  CHECK_THROWS_AS(quantile({1.0}, 1.5), ParameterError);
}

TEST_CASE("bootstrap ci brackets the point value deterministically") {
  std::vector<int> truth, predicted;
  for (int i = 0; i < 100; ++i) {
    truth.push_back(i % 2);
    predicted.push_back(i < 80 ? i % 2 : 1 - i % 2);  // 80% agreement
  }
  const Vector scores = Vector::Zero(100);
  CiConfig config;
  config.n_resamples = 500;
  config.seed = 42;
  const auto metric = metric_by_name("accuracy", 2);
  const MetricCi ci = bootstrap_ci(metric, truth, predicted, scores, config);
  CHECK(ci.value == 0.8);
  CHECK(ci.lo <= ci.value);
  CHECK(ci.hi >= ci.value);
  CHECK(ci.lo > 0.6);
  CHECK(ci.hi < 0.95);
  CHECK(ci.n_used == 500);
  CHECK(ci.n_skipped == 0);

  const MetricCi again = bootstrap_ci(metric, truth, predicted, scores, config);
  CHECK(ci.lo == again.lo);
  CHECK(ci.hi == again.hi);

  // Accuracy lives on a k/n grid, so different seeds can land on the same
  // percentile bounds; a continuous statistic separates the seeds instead.
  Rng rng(3);
  Vector continuous(100);
  for (Index i = 0; i < 100; ++i) {
    continuous(i) = static_cast<double>(truth[static_cast<std::size_t>(i)]) +
                    rng.normal();
  }
  // Note: sub-seeds are seed XOR b, so two base seeds closer than the
  // resample count reuse the same resample set; pick far-apart seeds.
  const auto auc_metric = metric_by_name("auc", 2);
  config.seed = 42;
  const MetricCi a = bootstrap_ci(auc_metric, truth, predicted, continuous, config);
  config.seed = 1u << 20;
  const MetricCi b = bootstrap_ci(auc_metric, truth, predicted, continuous, config);
  CHECK((a.lo != b.lo || a.hi != b.hi));
}

TEST_CASE("bootstrap skips undefined resamples and caps the skip rate") {
  // Two positives in fifty rows: some resamples miss them entirely.
  std::vector<int> truth(50, 0);
  truth[10] = truth[30] = 1;
  const std::vector<int> predicted = truth;
  const Vector scores = Vector::Zero(50);
  CiConfig config;
  config.n_resamples = 400;
  config.seed = 9;
  const MetricCi ci = bootstrap_ci(metric_by_name("precision", 2), truth,
                                   predicted, scores, config);
  CHECK(ci.n_skipped > 0);
  CHECK(ci.n_used + ci.n_skipped == 400);
  CHECK(ci.value == 1.0);

  // A metric that dies on every resample crosses the half threshold.
  int calls = 0;
  const MetricFn flaky = [&calls](const std::vector<int>&,
                                  const std::vector<int>&, const Vector&) {
    return calls++ == 0 ? 0.5 : std::nan("");
  };
  CHECK_THROWS_AS(bootstrap_ci(flaky, truth, predicted, scores, config),
                  CiError);

  const MetricFn undefined = [](const std::vector<int>&,
                                const std::vector<int>&, const Vector&) {
    return std::nan("");
  };
  CHECK_THROWS_AS(bootstrap_ci(undefined, truth, predicted, scores, config),
                  EvaluationError);
}

TEST_CASE("metric_by_name wires the whole catalogue") {
  const auto [truth, predicted] = from_counts(7, 2, 1, 10);
  const Vector scores = Vector::Zero(20);
  CHECK(metric_by_name("f1", 2)(truth, predicted, scores) ==
        doctest::Approx(14.0 / 17.0));
  CHECK(metric_by_name("macro_recall", 2)(truth, predicted, scores) ==
        doctest::Approx((10.0 / 12.0 + 7.0 / 8.0) / 2.0));
  // The bootstrap-friendly auc wrapper reports NaN instead of throwing.
  CHECK(std::isnan(metric_by_name("auc", 2)({1, 1}, {1, 1}, Vector::Zero(2))));
  CHECK_THROWS_AS(metric_by_name("bogus", 2), EvaluationError);
}

TEST_CASE("fixed-point formatting rounds half to even") {
  CHECK(format_fixed2(0.125) == "0.12");
  CHECK(format_fixed2(0.375) == "0.38");
  CHECK(format_fixed2(0.625) == "0.62");
  CHECK(format_fixed2(0.25) == "0.25");
  CHECK(format_fixed2(2.0) == "2.00");
  CHECK(format_fixed2(-0.125) == "-0.12");
  CHECK(format_fixed2(0.0) == "0.00");

  MetricCi ci;
  ci.value = 0.67;
  ci.lo = 0.64;
  ci.hi = 0.70;
  CHECK(format_metric(ci) == "0.67 (±0.03)");
}
