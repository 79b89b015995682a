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

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "triboost/error.hpp"
#include "triboost/rng.hpp"
#include "triboost/sampling.hpp"

using namespace triboost;
using namespace triboost::sampling;

namespace {

std::vector<int> labels_with_counts(const std::vector<int>& counts) {
  std::vector<int> y;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    for (int i = 0; i < counts[c]; ++i) y.push_back(static_cast<int>(c));
  }
  return y;
}

std::map<int, int> count_by_class(const std::vector<int>& y,
                                  const IndexList& idx) {
  std::map<int, int> counts;
  for (Index i : idx) ++counts[y[static_cast<std::size_t>(i)]];
  return counts;
}

}  // namespace

TEST_CASE("stratified split keeps per-class proportions") {
  const std::vector<int> y = labels_with_counts({12, 8});
  const SplitPlan plan = stratified_split(y, 0.8, 42);
  CHECK(plan.train.size() == 16);  // round(0.8*12) + round(0.8*8) = 10 + 6
  CHECK(plan.test.size() == 4);
  const auto train_counts = count_by_class(y, plan.train);
  CHECK(train_counts.at(0) == 10);
  CHECK(train_counts.at(1) == 6);

  // Disjoint union of [0, n).
  std::set<Index> all(plan.train.begin(), plan.train.end());
  for (Index i : plan.test) CHECK(all.insert(i).second);
  CHECK(all.size() == y.size());

  // Deterministic per seed; a different seed reshuffles.
  const SplitPlan again = stratified_split(y, 0.8, 42);
  CHECK(again.train == plan.train);
  const SplitPlan other = stratified_split(y, 0.8, 43);
  CHECK(other.train != plan.train);
}

TEST_CASE("stratified split parameter and degeneracy errors") {
  const std::vector<int> y = labels_with_counts({10, 10});
  CHECK_THROWS_AS(stratified_split(y, 1.0, 0), ParameterError);
  CHECK_THROWS_AS(stratified_split(y, 0.0, 0), ParameterError);
  // A 2-member class rounds to 2 train members -> empty test side.
  CHECK_THROWS_AS(stratified_split(labels_with_counts({10, 2}), 0.8, 0),
                  StratificationError);
  CHECK_THROWS_AS(stratified_split({}, 0.8, 0), DegenerateInputError);
}

TEST_CASE("k-fold deals 13 members into sizes 3,3,3,2,2") {
  const std::vector<int> y = labels_with_counts({8, 5});
  const FoldPlan plan = stratified_k_fold(y, 5, 7);
  REQUIRE(plan.folds.size() == 5);
  std::vector<std::size_t> sizes;
  for (const IndexList& fold : plan.folds) sizes.push_back(fold.size());
  CHECK(sizes == std::vector<std::size_t>{3, 3, 3, 2, 2});

  // Partition of [0, 13) and every fold holds every class.
  std::set<Index> seen;
  for (std::size_t f = 0; f < plan.folds.size(); ++f) {
    for (Index i : plan.folds[f]) CHECK(seen.insert(i).second);
    const auto counts = count_by_class(y, plan.folds[f]);
    CHECK(counts.count(0) == 1);
    CHECK(counts.count(1) == 1);
  }
  CHECK(seen.size() == 13);

  // Complement of fold 0 has the remaining 10 indices.
  const IndexList rest = fold_complement(plan, 0);
  CHECK(rest.size() == 10);
  for (Index i : rest) {
    CHECK(std::find(plan.folds[0].begin(), plan.folds[0].end(), i) ==
          plan.folds[0].end());
  }
}

TEST_CASE("k-fold guards") {
  CHECK_THROWS_AS(stratified_k_fold(labels_with_counts({8, 4}), 5, 0),
                  StratificationError);
  CHECK_THROWS_AS(stratified_k_fold(labels_with_counts({8, 8}), 1, 0),
                  ParameterError);
}

TEST_CASE("SMOTE balances to the majority and interpolates on segments") {
  Rng rng(3);
  const Index d = 4;
  Matrix X(11, d);
  for (Index i = 0; i < X.rows(); ++i) {
    for (Index j = 0; j < d; ++j) X(i, j) = rng.normal();
  }
  const std::vector<int> y = labels_with_counts({6, 3, 2});
  const SmoteResult result = smote(X, y, 2, 99);

  CHECK(result.n_original == 11);
  CHECK(result.X.rows() == 18);  // 6 + 6 + 6
  std::map<int, int> counts;
  for (int label : result.y) ++counts[label];
  CHECK(counts[0] == 6);
  CHECK(counts[1] == 6);
  CHECK(counts[2] == 6);

  // Originals are untouched.
  CHECK(result.X.topRows(11) == X);

  // Every synthetic point lies exactly on a segment between two class
  // members: residual against the best (p, q) pair is ~0.
  for (Index s = 11; s < result.X.rows(); ++s) {
    const int cls = result.y[static_cast<std::size_t>(s)];
    double best = 1e300;
    for (Index a = 0; a < 11; ++a) {
      if (y[static_cast<std::size_t>(a)] != cls) continue;
      for (Index b = 0; b < 11; ++b) {
        if (b == a || y[static_cast<std::size_t>(b)] != cls) continue;
        const Vector pq = (X.row(b) - X.row(a)).transpose();
        const Vector ps = (result.X.row(s) - X.row(a)).transpose();
        const double len_sq = pq.squaredNorm();
        const double g = len_sq > 0 ? ps.dot(pq) / len_sq : 0.0;
        if (g < -1e-12 || g > 1.0 + 1e-12) continue;
        best = std::min(best, (ps - g * pq).norm());
      }
    }
    CHECK(best < 1e-9);
  }

  // Determinism.
  const SmoteResult again = smote(X, y, 2, 99);
  CHECK(again.X == result.X);
}

TEST_CASE("SMOTE guards") {
  Matrix X = Matrix::Zero(3, 2);
  CHECK_THROWS_AS(smote(X, {0, 0, 1}, 0, 1), ParameterError);
  CHECK_THROWS_AS(smote(X, {0, 0}, 5, 1), ShapeError);
  // Minority class of one member has no neighbor to interpolate with.
  CHECK_THROWS_AS(smote(X, {0, 0, 1}, 5, 1), ResamplingError);
  // Already balanced input comes back unchanged.
  Matrix X4 = Matrix::Zero(4, 2);
  const SmoteResult r = smote(X4, {0, 0, 1, 1}, 5, 1);
  CHECK(r.X.rows() == 4);
}

TEST_CASE("bootstrap resamples are sub-seeded with seed xor b") {
  const auto resamples = bootstrap_indices(20, 5, 1234);
  REQUIRE(resamples.size() == 5);
  for (const IndexList& r : resamples) {
    CHECK(r.size() == 20);
    for (Index i : r) {
      CHECK(i >= 0);
      CHECK(i < 20);
    }
  }
  // Resample 3 can be reproduced in isolation from seed ^ 3.
  Rng rng(1234ULL ^ 3ULL);
  IndexList expected;
  for (int i = 0; i < 20; ++i) {
    expected.push_back(static_cast<Index>(rng.uniform_below(20)));
  }
  CHECK(resamples[3] == expected);

  CHECK_THROWS_AS(bootstrap_indices(0, 5, 1), ParameterError);
  CHECK_THROWS_AS(bootstrap_indices(5, 0, 1), ParameterError);
}

TEST_CASE("plans round-trip through JSON") {
  const std::vector<int> y = labels_with_counts({12, 8});
  const SplitPlan plan = stratified_split(y, 0.8, 42);
  const SplitPlan back = split_from_json(split_to_json(plan));
  CHECK(back.train == plan.train);
  CHECK(back.test == plan.test);
  CHECK(back.ratio == plan.ratio);
  CHECK(back.seed == plan.seed);

  const FoldPlan folds = stratified_k_fold(y, 4, 9);
  const FoldPlan fback = folds_from_json(folds_to_json(folds));
  CHECK(fback.folds == folds.folds);
  CHECK(fback.seed == folds.seed);
}
