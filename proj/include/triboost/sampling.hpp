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

#ifndef TRIBOOST_SAMPLING_HPP_
#define TRIBOOST_SAMPLING_HPP_

#include <cstdint>
#include <vector>

#include "triboost/json_io.hpp"
#include "triboost/types.hpp"

namespace triboost::sampling {

struct SplitPlan {
  IndexList train;  // ascending
  IndexList test;   // ascending
  double ratio = 0.8;
  std::uint64_t seed = 0;
};

// Shuffles each class separately and sends round(ratio * n_c) members to the
// training side. Throws StratificationError when any class would leave either
// side empty; ratio must lie strictly inside (0, 1).
SplitPlan stratified_split(const std::vector<int>& y, double ratio = 0.8,
                           std::uint64_t seed = 0);

struct FoldPlan {
  std::vector<IndexList> folds;  // disjoint, ascending, cover [0, n)
  std::uint64_t seed = 0;
};

// Shuffles each class and deals members round-robin over k folds, so every
// fold sees every class. A class with fewer than k members is a
// StratificationError.
FoldPlan stratified_k_fold(const std::vector<int>& y, int k = 5,
                           std::uint64_t seed = 0);

// All indices outside folds[fold], ascending.
IndexList fold_complement(const FoldPlan& plan, std::size_t fold);

struct SmoteResult {
  Matrix X;             // originals first, synthetics appended
  std::vector<int> y;
  Index n_original = 0;
};

// Oversamples every non-majority class up to the majority count. Each
// synthetic point is p + g * (q - p) with g ~ U[0, 1), p a uniformly drawn
// class member and q one of p's k nearest same-class neighbors (Euclidean,
// ties by index). A class that needs synthesis must have at least 2 members.
SmoteResult smote(const Matrix& X, const std::vector<int>& y, int k = 5,
                  std::uint64_t seed = 0);

// B resamples of size n drawn with replacement; resample b uses the
// sub-seed (seed XOR b) so that individual resamples can be reproduced in
// isolation.
std::vector<IndexList> bootstrap_indices(Index n, int n_resamples,
                                         std::uint64_t seed);

Json split_to_json(const SplitPlan& plan);
SplitPlan split_from_json(const Json& j);
Json folds_to_json(const FoldPlan& plan);
FoldPlan folds_from_json(const Json& j);

}  // namespace triboost::sampling

#endif  // TRIBOOST_SAMPLING_HPP_
