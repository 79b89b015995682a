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

#ifndef TRIBOOST_EVAL_HPP_
#define TRIBOOST_EVAL_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "triboost/types.hpp"

namespace triboost::eval {

// Rows are the true class, columns the predicted class.
IntMatrix confusion_matrix(const std::vector<int>& truth,
                           const std::vector<int>& predicted, int n_classes);

// Binary metrics treat class 1 as positive and return NaN when the defining
// ratio has a zero denominator; callers decide how to handle that.
double accuracy_score(const std::vector<int>& truth,
                      const std::vector<int>& predicted);
double precision_score(const std::vector<int>& truth,
                       const std::vector<int>& predicted);
double recall_score(const std::vector<int>& truth,
                    const std::vector<int>& predicted);
double f1_score(const std::vector<int>& truth,
                const std::vector<int>& predicted);

// One-vs-rest macro averages; a class with an undefined ratio contributes 0.
double macro_precision_score(const std::vector<int>& truth,
                             const std::vector<int>& predicted, int n_classes);
double macro_recall_score(const std::vector<int>& truth,
                          const std::vector<int>& predicted, int n_classes);
double macro_f1_score(const std::vector<int>& truth,
                      const std::vector<int>& predicted, int n_classes);

// Mann-Whitney AUC from midranks of the class-1 scores. Ties share their
// average rank. Throws EvaluationError when either class is absent.
double roc_auc_score(const std::vector<int>& truth, const Vector& scores);

// Linear-interpolation quantile (q in [0, 1]) of an unsorted sample.
double quantile(std::vector<double> values, double q);

struct CiConfig {
  int n_resamples = 1000;
  double alpha = 0.05;
  std::uint64_t seed = 0;
};

struct MetricCi {
  double value = 0.0;  // metric on the full sample
  double lo = 0.0;     // percentile bounds over the resamples
  double hi = 0.0;
  int n_used = 0;
  int n_skipped = 0;
};

using MetricFn = std::function<double(
    const std::vector<int>& truth, const std::vector<int>& predicted,
    const Vector& scores)>;

// Percentile bootstrap: resample b uses sub-seed (seed XOR b). Resamples on
// which the metric is undefined (NaN) are skipped; more than half skipped is
// a CiError, and a metric undefined on the full sample an EvaluationError.
MetricCi bootstrap_ci(const MetricFn& metric, const std::vector<int>& truth,
                      const std::vector<int>& predicted, const Vector& scores,
                      CiConfig config = {});

// accuracy | precision | recall | f1 | auc | macro_precision | macro_recall
// | macro_f1. Throws EvaluationError for anything else.
MetricFn metric_by_name(const std::string& name, int n_classes);

// Two decimals, ties rounded to the even digit.
std::string format_fixed2(double x);

// "x.xx (±y.yy)" with y the half-width of [lo, hi].
std::string format_metric(const MetricCi& ci);

}  // namespace triboost::eval

#endif  // TRIBOOST_EVAL_HPP_
