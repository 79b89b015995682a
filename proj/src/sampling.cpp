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

#include "triboost/sampling.hpp"

#include <algorithm>
#include <cmath>

#include "triboost/error.hpp"
#include "triboost/rng.hpp"

namespace triboost::sampling {

namespace {

// Per-class index lists, ascending within each class; labels validated.
std::vector<IndexList> class_members(const std::vector<int>& y) {
  int n_classes = 0;
  for (int label : y) {
    if (label < 0) throw SchemaError("negative class label");
    n_classes = std::max(n_classes, label + 1);
  }
  if (y.empty()) throw DegenerateInputError("empty label vector");
  std::vector<IndexList> members(static_cast<std::size_t>(n_classes));
  for (std::size_t i = 0; i < y.size(); ++i) {
    members[static_cast<std::size_t>(y[i])].push_back(
        static_cast<Index>(i));
  }
  return members;
}

}  // namespace

SplitPlan stratified_split(const std::vector<int>& y, double ratio,
                           std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw ParameterError("stratified_split: ratio must lie in (0, 1)");
  }
  SplitPlan plan;
  plan.ratio = ratio;
  plan.seed = seed;
  Rng rng(seed);
  for (IndexList& members : class_members(y)) {
    if (members.empty()) continue;  // label value never used
    rng.shuffle(members);
    const auto n_train = static_cast<std::size_t>(
        std::llround(ratio * static_cast<double>(members.size())));
    if (n_train == 0 || n_train >= members.size()) {
      throw StratificationError(
          "stratified_split: a class would leave one side empty");
    }
    plan.train.insert(plan.train.end(), members.begin(),
                      members.begin() + static_cast<std::ptrdiff_t>(n_train));
    plan.test.insert(plan.test.end(),
                     members.begin() + static_cast<std::ptrdiff_t>(n_train),
                     members.end());
  }
  std::sort(plan.train.begin(), plan.train.end());
  std::sort(plan.test.begin(), plan.test.end());
  return plan;
}

FoldPlan stratified_k_fold(const std::vector<int>& y, int k,
                           std::uint64_t seed) {
  if (k < 2) throw ParameterError("stratified_k_fold: k must be >= 2");
  FoldPlan plan;
  plan.seed = seed;
  plan.folds.assign(static_cast<std::size_t>(k), {});
  Rng rng(seed);
  for (IndexList& members : class_members(y)) {
    if (members.empty()) continue;
    if (members.size() < static_cast<std::size_t>(k)) {
      throw StratificationError(
          "stratified_k_fold: a class has fewer members than folds");
    }
    rng.shuffle(members);
    for (std::size_t t = 0; t < members.size(); ++t) {
      plan.folds[t % static_cast<std::size_t>(k)].push_back(members[t]);
    }
  }
  for (IndexList& fold : plan.folds) std::sort(fold.begin(), fold.end());
  return plan;
}

IndexList fold_complement(const FoldPlan& plan, std::size_t fold) {
  if (fold >= plan.folds.size()) {
    throw ParameterError("fold_complement: fold index out of range");
  }
  IndexList out;
  for (std::size_t f = 0; f < plan.folds.size(); ++f) {
    if (f == fold) continue;
    out.insert(out.end(), plan.folds[f].begin(), plan.folds[f].end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

SmoteResult smote(const Matrix& X, const std::vector<int>& y, int k,
                  std::uint64_t seed) {
  if (k < 1) throw ParameterError("smote: k must be >= 1");
  if (static_cast<Index>(y.size()) != X.rows()) {
    throw ShapeError("smote: label count does not match rows");
  }
  const std::vector<IndexList> members = class_members(y);

  std::size_t majority = 0;
  for (const IndexList& m : members) majority = std::max(majority, m.size());

  Index n_new = 0;
  for (const IndexList& m : members) {
    if (!m.empty()) n_new += static_cast<Index>(majority - m.size());
  }

  SmoteResult result;
  result.n_original = X.rows();
  result.X = Matrix(X.rows() + n_new, X.cols());
  result.X.topRows(X.rows()) = X;
  result.y = y;
  result.y.reserve(y.size() + static_cast<std::size_t>(n_new));

  Rng rng(seed);
  Index write = X.rows();
  for (std::size_t cls = 0; cls < members.size(); ++cls) {
    const IndexList& m = members[cls];
    if (m.empty() || m.size() == majority) continue;
    if (m.size() < 2) {
      throw ResamplingError("smote: class " + std::to_string(cls) +
                            " has a single member and cannot be oversampled");
    }
    // k nearest same-class neighbors of every member, ties by index.
    const int n_neighbors =
        std::min<int>(k, static_cast<int>(m.size()) - 1);
    std::vector<IndexList> neighbors(m.size());
    std::vector<std::pair<double, Index>> dists;
    for (std::size_t a = 0; a < m.size(); ++a) {
      dists.clear();
      for (std::size_t b = 0; b < m.size(); ++b) {
        if (a == b) continue;
        const double d = (X.row(m[a]) - X.row(m[b])).squaredNorm();
        dists.emplace_back(d, m[b]);
      }
      std::sort(dists.begin(), dists.end());
      for (int t = 0; t < n_neighbors; ++t) {
        neighbors[a].push_back(dists[static_cast<std::size_t>(t)].second);
      }
    }
    const Index deficit = static_cast<Index>(majority - m.size());
    for (Index s = 0; s < deficit; ++s) {
      const auto a = static_cast<std::size_t>(
          rng.uniform_below(static_cast<std::uint64_t>(m.size())));
      const IndexList& cand = neighbors[a];
      const Index q = cand[static_cast<std::size_t>(
          rng.uniform_below(static_cast<std::uint64_t>(cand.size())))];
      const double gap = rng.uniform();
      result.X.row(write) =
          X.row(m[a]) + gap * (X.row(q) - X.row(m[a]));
      result.y.push_back(static_cast<int>(cls));
      ++write;
    }
  }
  return result;
}

std::vector<IndexList> bootstrap_indices(Index n, int n_resamples,
                                         std::uint64_t seed) {
  if (n < 1) throw ParameterError("bootstrap_indices: n must be >= 1");
  if (n_resamples < 1) {
    throw ParameterError("bootstrap_indices: need at least one resample");
  }
  std::vector<IndexList> out(static_cast<std::size_t>(n_resamples));
  for (int b = 0; b < n_resamples; ++b) {
    // Sub-seeded per resample: any single resample can be regenerated
    // without replaying its predecessors.
    Rng rng(seed ^ static_cast<std::uint64_t>(b));
    IndexList& sample = out[static_cast<std::size_t>(b)];
    sample.reserve(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
      sample.push_back(static_cast<Index>(
          rng.uniform_below(static_cast<std::uint64_t>(n))));
    }
  }
  return out;
}

namespace {

Json index_list_to_json(const IndexList& list) {
  Json out = Json::array();
  for (Index i : list) out.push_back(static_cast<std::int64_t>(i));
  return out;
}

IndexList index_list_from_json(const Json& j, const std::string& what) {
  if (!j.is_array()) throw ModelIntegrityError(what + ": expected an array");
  IndexList out;
  for (const Json& v : j) out.push_back(v.get<std::int64_t>());
  return out;
}

}  // namespace

Json split_to_json(const SplitPlan& plan) {
  Json j;
  j["train"] = index_list_to_json(plan.train);
  j["test"] = index_list_to_json(plan.test);
  j["ratio"] = plan.ratio;
  j["seed"] = plan.seed;
  return j;
}

SplitPlan split_from_json(const Json& j) {
  SplitPlan plan;
  plan.train = index_list_from_json(require_field(j, "train", "split"), "split");
  plan.test = index_list_from_json(require_field(j, "test", "split"), "split");
  plan.ratio = require_field(j, "ratio", "split").get<double>();
  plan.seed = require_field(j, "seed", "split").get<std::uint64_t>();
  return plan;
}

Json folds_to_json(const FoldPlan& plan) {
  Json folds = Json::array();
  for (const IndexList& fold : plan.folds) {
    folds.push_back(index_list_to_json(fold));
  }
  return Json{{"folds", std::move(folds)}, {"seed", plan.seed}};
}

FoldPlan folds_from_json(const Json& j) {
  FoldPlan plan;
  for (const Json& f : require_field(j, "folds", "folds")) {
    plan.folds.push_back(index_list_from_json(f, "folds"));
  }
  plan.seed = require_field(j, "seed", "folds").get<std::uint64_t>();
  return plan;
}

}  // namespace triboost::sampling
