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

#ifndef TRIBOOST_TUNE_HPP_
#define TRIBOOST_TUNE_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "triboost/json_io.hpp"
#include "triboost/types.hpp"

namespace triboost::tune {

// A discrete grid: ordered axes, each an ordered list of candidate values.
// Cells are numbered in odometer order with the LAST axis fastest, so cell
// k decodes by peeling radixes from the back.
struct ParamGrid {
  std::vector<std::pair<std::string, std::vector<Json>>> axes;

  std::size_t size() const;           // product of axis lengths
  Json decode(std::size_t index) const;  // {axis name: value}
};

struct TuneConfig {
  int n_candidates = 20;
  int n_folds = 3;
  std::string metric = "accuracy";  // higher is better
  std::uint64_t seed = 0;
};

struct CandidateResult {
  Json params;
  std::vector<double> fold_scores;
  double mean_score = 0.0;
  bool failed = false;
  std::string error;  // first failure message when failed
};

struct TuneResult {
  std::vector<CandidateResult> candidates;  // in draw order
  std::size_t best_index = 0;               // into candidates
};

// Fits on the training block and returns class probabilities for the
// validation block. Exceptions mark the candidate as failed.
using FitPredictFn = std::function<Matrix(
    const Json& params, const Matrix& X_train, const std::vector<int>& y_train,
    const Matrix& X_valid)>;

// Draws n_candidates cells without replacement (every cell when the grid is
// smaller, in ascending order), scores each by stratified k-fold mean, and
// returns them in draw order. All candidates failing is a SearchError; ties
// on the mean keep the earliest draw.
TuneResult randomized_search(const ParamGrid& grid,
                             const FitPredictFn& fit_predict, const Matrix& X,
                             const std::vector<int>& y, int n_classes,
                             TuneConfig config = {});

Json tune_result_to_json(const TuneResult& result);

}  // namespace triboost::tune

#endif  // TRIBOOST_TUNE_HPP_
