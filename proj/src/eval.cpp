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

#include <algorithm>
#include <cfenv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "triboost/error.hpp"
#include "triboost/eval.hpp"
#include "triboost/sampling.hpp"

namespace triboost::eval {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

void check_pair(const std::vector<int>& truth,
                const std::vector<int>& predicted) {
  if (truth.empty() || truth.size() != predicted.size()) {
    throw EvaluationError("metric inputs must be equally sized and non-empty");
  }
}

void check_labels(const std::vector<int>& labels, int n_classes) {
  for (int label : labels) {
    if (label < 0 || label >= n_classes) {
      throw EvaluationError("label outside [0, n_classes)");
    }
  }
}

struct Counts {
  double tp = 0, fp = 0, tn = 0, fn = 0;
};

Counts count_binary(const std::vector<int>& truth,
                    const std::vector<int>& predicted, int positive) {
  Counts c;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool t = truth[i] == positive;
    const bool p = predicted[i] == positive;
    if (t && p) c.tp += 1;
    else if (!t && p) c.fp += 1;
    else if (t && !p) c.fn += 1;
    else c.tn += 1;
  }
  return c;
}

double precision_of(const Counts& c) {
  return c.tp + c.fp > 0 ? c.tp / (c.tp + c.fp) : kNan;
}

double recall_of(const Counts& c) {
  return c.tp + c.fn > 0 ? c.tp / (c.tp + c.fn) : kNan;
}

double f1_of(const Counts& c) {
  const double p = precision_of(c);
  const double r = recall_of(c);
  if (std::isnan(p) || std::isnan(r) || p + r == 0.0) return kNan;
  return 2.0 * p * r / (p + r);
}

// Undefined per-class values count as zero in the macro mean.
template <typename PerClass>
double macro_mean(const std::vector<int>& truth,
                  const std::vector<int>& predicted, int n_classes,
                  PerClass per_class) {
  check_pair(truth, predicted);
  if (n_classes < 2) throw EvaluationError("macro metric needs >= 2 classes");
  check_labels(truth, n_classes);
  check_labels(predicted, n_classes);
  double total = 0.0;
  for (int k = 0; k < n_classes; ++k) {
    const double v = per_class(count_binary(truth, predicted, k));
    if (!std::isnan(v)) total += v;
  }
  return total / static_cast<double>(n_classes);
}

}  // namespace

IntMatrix confusion_matrix(const std::vector<int>& truth,
                           const std::vector<int>& predicted, int n_classes) {
  check_pair(truth, predicted);
  if (n_classes < 2) throw EvaluationError("confusion needs >= 2 classes");
  check_labels(truth, n_classes);
  check_labels(predicted, n_classes);
  IntMatrix m = IntMatrix::Zero(n_classes, n_classes);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    m(truth[i], predicted[i]) += 1;
  }
  return m;
}

double accuracy_score(const std::vector<int>& truth,
                      const std::vector<int>& predicted) {
  check_pair(truth, predicted);
  double hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    hits += truth[i] == predicted[i] ? 1 : 0;
  }
  return hits / static_cast<double>(truth.size());
}

double precision_score(const std::vector<int>& truth,
                       const std::vector<int>& predicted) {
  check_pair(truth, predicted);
  return precision_of(count_binary(truth, predicted, 1));
}

double recall_score(const std::vector<int>& truth,
                    const std::vector<int>& predicted) {
  check_pair(truth, predicted);
  return recall_of(count_binary(truth, predicted, 1));
}

double f1_score(const std::vector<int>& truth,
                const std::vector<int>& predicted) {
  check_pair(truth, predicted);
  return f1_of(count_binary(truth, predicted, 1));
}

double macro_precision_score(const std::vector<int>& truth,
                             const std::vector<int>& predicted,
                             int n_classes) {
  return macro_mean(truth, predicted, n_classes, precision_of);
}

double macro_recall_score(const std::vector<int>& truth,
                          const std::vector<int>& predicted, int n_classes) {
  return macro_mean(truth, predicted, n_classes, recall_of);
}

double macro_f1_score(const std::vector<int>& truth,
                      const std::vector<int>& predicted, int n_classes) {
  return macro_mean(truth, predicted, n_classes, f1_of);
}

double roc_auc_score(const std::vector<int>& truth, const Vector& scores) {
  const std::size_t n = truth.size();
  if (n == 0 || static_cast<Index>(n) != scores.size()) {
    throw EvaluationError("auc inputs must be equally sized and non-empty");
  }
  check_labels(truth, 2);
  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(),
            [&](Index a, Index b) { return scores(a) < scores(b); });

  double rank_sum_pos = 0.0;
  double n_pos = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && scores(order[j + 1]) == scores(order[i])) ++j;
    // 1-based midrank shared by the tied block [i, j].
    const double midrank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t t = i; t <= j; ++t) {
      if (truth[static_cast<std::size_t>(order[t])] == 1) {
        rank_sum_pos += midrank;
        n_pos += 1.0;
      }
    }
    i = j + 1;
  }
  const double n_neg = static_cast<double>(n) - n_pos;
  if (n_pos == 0.0 || n_neg == 0.0) {
    throw EvaluationError("auc undefined: only one class present");
  }
  return (rank_sum_pos - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg);
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw EvaluationError("quantile of an empty sample");
  if (!(q >= 0.0) || q > 1.0) {
    throw ParameterError("quantile level outside [0, 1]");
  }
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  const double frac = pos - std::floor(pos);
  return values[lo] + frac * (values[hi] - values[lo]);
}

MetricCi bootstrap_ci(const MetricFn& metric, const std::vector<int>& truth,
                      const std::vector<int>& predicted, const Vector& scores,
                      CiConfig config) {
  check_pair(truth, predicted);
  if (static_cast<Index>(truth.size()) != scores.size()) {
    throw EvaluationError("metric inputs must be equally sized");
  }
  if (config.n_resamples < 2) {
    throw ParameterError("bootstrap needs at least 2 resamples");
  }
  if (!(config.alpha > 0.0) || !(config.alpha < 1.0)) {
    throw ParameterError("alpha must lie strictly inside (0, 1)");
  }

  MetricCi out;
  out.value = metric(truth, predicted, scores);
  if (std::isnan(out.value)) {
    throw EvaluationError("metric undefined on the full sample");
  }

  const auto n = static_cast<Index>(truth.size());
  const auto resamples =
      sampling::bootstrap_indices(n, config.n_resamples, config.seed);
  std::vector<double> values;
  values.reserve(resamples.size());
  std::vector<int> rt(truth.size()), rp(truth.size());
  Vector rs(n);
  for (const IndexList& idx : resamples) {
    for (std::size_t t = 0; t < idx.size(); ++t) {
      const auto src = static_cast<std::size_t>(idx[t]);
      rt[t] = truth[src];
      rp[t] = predicted[src];
      rs(static_cast<Index>(t)) = scores(idx[t]);
    }
    const double v = metric(rt, rp, rs);
    if (std::isnan(v)) {
      ++out.n_skipped;
    } else {
      values.push_back(v);
    }
  }
  if (2 * out.n_skipped > config.n_resamples) {
    throw CiError("metric undefined on more than half of the resamples");
  }
  out.n_used = static_cast<int>(values.size());
  out.lo = quantile(values, config.alpha / 2.0);
  out.hi = quantile(values, 1.0 - config.alpha / 2.0);
  return out;
}

MetricFn metric_by_name(const std::string& name, int n_classes) {
  if (name == "accuracy") {
    return [](const auto& t, const auto& p, const Vector&) {
      return accuracy_score(t, p);
    };
  }
  if (name == "precision") {
    return [](const auto& t, const auto& p, const Vector&) {
      return precision_score(t, p);
    };
  }
  if (name == "recall") {
    return [](const auto& t, const auto& p, const Vector&) {
      return recall_score(t, p);
    };
  }
  if (name == "f1") {
    return [](const auto& t, const auto& p, const Vector&) {
      return f1_score(t, p);
    };
  }
  if (name == "auc") {
    return [](const auto& t, const auto&, const Vector& s) {
      // Undefined resamples (one class only) are skipped, not fatal.
      try {
        return roc_auc_score(t, s);
      } catch (const EvaluationError&) {
        return kNan;
      }
    };
  }
  if (name == "macro_precision") {
    return [n_classes](const auto& t, const auto& p, const Vector&) {
      return macro_precision_score(t, p, n_classes);
    };
  }
  if (name == "macro_recall") {
    return [n_classes](const auto& t, const auto& p, const Vector&) {
      return macro_recall_score(t, p, n_classes);
    };
  }
  if (name == "macro_f1") {
    return [n_classes](const auto& t, const auto& p, const Vector&) {
      return macro_f1_score(t, p, n_classes);
    };
  }
  throw EvaluationError("unknown metric '" + name + "'");
}

std::string format_fixed2(double x) {
  if (!std::isfinite(x)) return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
  // nearbyint resolves .xx5 ties to the even hundredth.
  const double scaled = std::nearbyint(x * 100.0);
  const bool negative = scaled < 0.0;
  const auto cents = static_cast<long long>(std::fabs(scaled));
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%s%lld.%02lld", negative ? "-" : "",
                cents / 100, cents % 100);
  return buf;
}

std::string format_metric(const MetricCi& ci) {
  return format_fixed2(ci.value) + " (±" +
         format_fixed2((ci.hi - ci.lo) / 2.0) + ")";
}

}  // namespace triboost::eval
