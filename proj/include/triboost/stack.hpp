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

#ifndef TRIBOOST_STACK_HPP_
#define TRIBOOST_STACK_HPP_

#include <cstdint>
#include <vector>

#include "triboost/json_io.hpp"
#include "triboost/learners.hpp"
#include "triboost/types.hpp"

namespace triboost::stack {

// Stacked generalization over three boosted bases, one per growth strategy.
// The meta-learner is a logistic regression trained on out-of-fold base
// probabilities, so no base model ever scores a row it was fitted on.

struct StackConfig {
  std::vector<learners::BoostConfig> base;  // exactly 3, distinct growths
  learners::LogisticConfig meta;
  int n_folds = 5;
  // true: refit each base on all rows for inference; false: keep the fold
  // models and average their probabilities instead.
  bool refit_full = true;
  std::uint64_t seed = 0;
};

struct StackModel {
  // base_models[b] holds one model (refit) or n_folds models (averaged).
  std::vector<std::vector<learners::BoostModel>> base_models;
  learners::LogisticModel meta;
  int n_classes = 2;
  int n_folds = 5;
  bool averaged = false;

  // Training artifact for leakage audits; not serialized. Row i holds the
  // concatenated base probabilities predicted by models that never saw i.
  Matrix oof;

  // n x (3 * n_classes) base probabilities under the inference convention.
  Matrix meta_features(const Matrix& X) const;
  Matrix predict_proba(const Matrix& X) const;
};

StackModel fit_stack(const Matrix& X, const std::vector<int>& y,
                     int n_classes, StackConfig config);

Json stack_to_json(const StackModel& model);
StackModel stack_from_json(const Json& j);

}  // namespace triboost::stack

#endif  // TRIBOOST_STACK_HPP_
