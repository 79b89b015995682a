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
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>

#include "triboost/error.hpp"
#include "triboost/eval.hpp"
#include "triboost/learners.hpp"
#include "triboost/rng.hpp"
#include "triboost/sampling.hpp"
#include "triboost/tune.hpp"

namespace triboost::tune {

namespace {

constexpr std::size_t kMaxGridCells = 1000000;

Matrix gather_rows(const Matrix& X, const IndexList& rows) {
  Matrix out(static_cast<Index>(rows.size()), X.cols());
  for (std::size_t t = 0; t < rows.size(); ++t) {
    out.row(static_cast<Index>(t)) = X.row(rows[t]);
  }
  return out;
}

std::vector<int> gather_labels(const std::vector<int>& y,
                               const IndexList& rows) {
  std::vector<int> out;
  out.reserve(rows.size());
  for (Index row : rows) out.push_back(y[static_cast<std::size_t>(row)]);
  return out;
}

}  // namespace

std::size_t ParamGrid::size() const {
  std::size_t total = 1;
  for (const auto& [name, values] : axes) {
    if (values.empty()) {
      throw SearchError("grid axis '" + name + "' has no values");
    }
    if (total > kMaxGridCells / values.size()) {
      throw ComplexityError("grid larger than 1e6 cells");
    }
    total *= values.size();
  }
  return total;
}

Json ParamGrid::decode(std::size_t index) const {
  if (axes.empty()) throw SearchError("grid has no axes");
  if (index >= size()) throw SearchError("grid index out of range");
  Json out = Json::object();
  for (auto it = axes.rbegin(); it != axes.rend(); ++it) {
    const auto radix = it->second.size();
    out[it->first] = it->second[index % radix];
    index /= radix;
  }
  return out;
}

TuneResult randomized_search(const ParamGrid& grid,
                             const FitPredictFn& fit_predict, const Matrix& X,
                             const std::vector<int>& y, int n_classes,
                             TuneConfig config) {
  if (config.n_candidates < 1) {
    throw SearchError("n_candidates must be >= 1");
  }
  if (static_cast<Index>(y.size()) != X.rows() || y.empty()) {
    throw ShapeError("label count does not match feature rows");
  }
  const std::size_t cells = grid.size();

  // Candidate cells: the whole grid in order when it fits, otherwise a
  // without-replacement draw kept in draw order.
  std::vector<std::size_t> picks;
  if (static_cast<std::size_t>(config.n_candidates) >= cells) {
    picks.resize(cells);
    std::iota(picks.begin(), picks.end(), std::size_t{0});
  } else {
    Rng rng(derive_seed(config.seed, "tune/candidates"));
    picks = rng.sample_without_replacement(
        cells, static_cast<std::size_t>(config.n_candidates));
  }

  // One fold plan shared by every candidate keeps the comparison fair.
  const auto folds = sampling::stratified_k_fold(
      y, config.n_folds, derive_seed(config.seed, "tune/folds"));
  const auto metric = eval::metric_by_name(config.metric, n_classes);

  TuneResult result;
  bool any_ok = false;
  for (const std::size_t cell : picks) {
    CandidateResult candidate;
    candidate.params = grid.decode(cell);
    try {
      double total = 0.0;
      for (std::size_t f = 0; f < folds.folds.size(); ++f) {
        const IndexList train_rows = sampling::fold_complement(folds, f);
        const IndexList& valid_rows = folds.folds[f];
        const Matrix proba =
            fit_predict(candidate.params, gather_rows(X, train_rows),
                        gather_labels(y, train_rows),
                        gather_rows(X, valid_rows));
        const std::vector<int> truth = gather_labels(y, valid_rows);
        if (proba.rows() != static_cast<Index>(truth.size()) ||
            proba.cols() != n_classes) {
          throw ShapeError("candidate returned a misshapen proba block");
        }
        Vector scores = n_classes == 2
                            ? Vector(proba.col(1))
                            : Vector(Vector::Zero(proba.rows()));
        const double score =
            metric(truth, learners::predict_classes(proba), scores);
        if (std::isnan(score)) {
          throw EvaluationError("metric undefined on a validation fold");
        }
        candidate.fold_scores.push_back(score);
        total += score;
      }
      candidate.mean_score =
          total / static_cast<double>(candidate.fold_scores.size());
      any_ok = true;
    } catch (const std::exception& err) {
      candidate.failed = true;
      candidate.fold_scores.clear();
      candidate.mean_score = -std::numeric_limits<double>::infinity();
      candidate.error = err.what();
    }
    result.candidates.push_back(std::move(candidate));
  }
  if (!any_ok) {
    throw SearchError("every candidate failed during tuning");
  }
  result.best_index = 0;
  for (std::size_t i = 1; i < result.candidates.size(); ++i) {
    const auto& best = result.candidates[result.best_index];
    const auto& challenger = result.candidates[i];
    if (best.failed ||
        (!challenger.failed && challenger.mean_score > best.mean_score)) {
      if (!challenger.failed) result.best_index = i;
    }
  }
  return result;
}

Json tune_result_to_json(const TuneResult& result) {
  Json candidates = Json::array();
  for (const auto& c : result.candidates) {
    Json entry{{"params", c.params}, {"failed", c.failed}};
    if (c.failed) {
      entry["error"] = c.error;
    } else {
      entry["fold_scores"] = c.fold_scores;
      entry["mean_score"] = c.mean_score;
    }
    candidates.push_back(std::move(entry));
  }
  return Json{{"candidates", std::move(candidates)},
              {"best_index", result.best_index},
              {"best_params", result.candidates[result.best_index].params}};
}

}  // namespace triboost::tune
