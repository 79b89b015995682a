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

#ifndef TRIBOOST_LEARNERS_HPP_
#define TRIBOOST_LEARNERS_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "triboost/json_io.hpp"
#include "triboost/types.hpp"

namespace triboost::learners {

// --- Shared tree representation ---------------------------------------------
// One arena of nodes per tree; node 0 is the root. Internal nodes route
// x[feature] < threshold to `left`, otherwise to `right`. Leaves carry the
// payload in `value`: a class distribution for CART, a single raw score for
// boosting. `cover` counts the training rows that reached the node.

struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double cover = 0.0;
  std::vector<double> value;

  bool is_leaf() const { return left < 0; }
};

struct Tree {
  std::vector<TreeNode> nodes;

  int leaf_index(const double* x) const;
  const std::vector<double>& predict_row(const double* x) const;
  int max_depth() const;
};

Json tree_to_json(const Tree& tree);
Tree tree_from_json(const Json& j);

// --- Links, losses and Newton gradients --------------------------------------

Matrix softmax_rows(const Matrix& raw);
double sigmoid(double raw);

// Probability matrix (n x n_classes) from raw scores: a single score column
// is treated as a sigmoid margin for the positive class, K columns as
// pre-softmax scores.
Matrix scores_to_proba(const Matrix& raw, int n_classes);

// Mean cross-entropy of the true class probabilities, clamped away from 0.
double log_loss(const Matrix& proba, const std::vector<int>& y);

// First and second derivatives of the summed cross-entropy with respect to
// each raw score. For one column: g = p - y, h = p(1-p); for K columns:
// g_k = p_k - [y = k], h_k = p_k (1 - p_k).
void softmax_grad_hess(const Matrix& raw, const std::vector<int>& y,
                       int n_classes, Matrix* grad, Matrix* hess);

// Newton split gain with L2 leaf regularization lambda and per-split penalty
// gamma: 1/2 (GL^2/(HL+l) + GR^2/(HR+l) - (GL+GR)^2/(HL+HR+l)) - gamma.
double split_gain(double gl, double hl, double gr, double hr, double lambda,
                  double gamma);

// Newton leaf weight -G / (H + lambda).
double leaf_weight(double g, double h, double lambda);

// Argmax with ties to the lowest class index.
std::vector<int> predict_classes(const Matrix& proba);

// --- Logistic regression ------------------------------------------------------

struct LogisticConfig {
  enum class Penalty { l1, l2 };
  Penalty penalty = Penalty::l2;
  double C = 1.0;       // inverse regularization strength
  double tol = 1e-6;    // sup-norm of the proximal gradient map
  int max_iter = 1000;
};

struct LogisticModel {
  Matrix weights;     // (1 or K) x d
  Vector intercepts;  // 1 or K
  int n_classes = 2;
  LogisticConfig config;

  Matrix decision(const Matrix& X) const;       // margins, n x (1 or K)
  Matrix predict_proba(const Matrix& X) const;  // n x n_classes
};

LogisticModel fit_logistic(const Matrix& X, const std::vector<int>& y,
                           int n_classes, LogisticConfig config = {});

// Penalized objective: mean cross-entropy + penalty(w) / (C n); intercepts
// are never penalized. Exposed so tests can check stationarity.
double logistic_objective(const LogisticModel& model, const Matrix& X,
                          const std::vector<int>& y);

// --- CART ---------------------------------------------------------------------

struct TreeConfig {
  enum class Criterion { gini, entropy };
  enum class Splitter { best, random };
  Criterion criterion = Criterion::gini;
  Splitter splitter = Splitter::best;
  int max_depth = -1;          // -1: unlimited
  int min_samples_split = 2;
  int min_samples_leaf = 1;
  int max_features = -1;       // per node; -1: all, 0: floor(sqrt(d))
  std::uint64_t seed = 0;
};

struct TreeModel {
  Tree tree;
  int n_classes = 2;
  TreeConfig config;

  Matrix predict_proba(const Matrix& X) const;
};

TreeModel fit_tree(const Matrix& X, const std::vector<int>& y, int n_classes,
                   TreeConfig config = {});

// --- Random forest -------------------------------------------------------------

struct ForestConfig {
  int n_estimators = 100;
  int max_depth = 20;
  TreeConfig::Criterion criterion = TreeConfig::Criterion::gini;
  int min_samples_split = 2;
  int min_samples_leaf = 1;
  std::uint64_t seed = 0;
};

struct ForestModel {
  std::vector<Tree> trees;
  int n_classes = 2;
  ForestConfig config;

  Matrix predict_proba(const Matrix& X) const;  // mean of tree distributions
};

ForestModel fit_forest(const Matrix& X, const std::vector<int>& y,
                       int n_classes, ForestConfig config = {});

// --- Linear SVM (squared hinge, one-vs-rest) ------------------------------------

struct SvmConfig {
  double C = 1.0;
  double tol = 1e-6;
  int max_iter = 5000;
};

struct SvmModel {
  Matrix weights;     // (1 or K) x d
  Vector intercepts;
  int n_classes = 2;
  SvmConfig config;

  Matrix decision(const Matrix& X) const;
  // Sigmoid of the margin for binary tasks, softmax over the one-vs-rest
  // margins otherwise. A pinned convention, not a calibrated probability.
  Matrix predict_proba(const Matrix& X) const;
};

SvmModel fit_linear_svm(const Matrix& X, const std::vector<int>& y,
                        int n_classes, SvmConfig config = {});

// Primal objective 1/2 ||w||^2 + C sum max(0, 1 - m)^2 for the given
// one-vs-rest column.
double svm_objective(const SvmModel& model, const Matrix& X,
                     const std::vector<int>& y, int column);

// --- Newton-boosted trees --------------------------------------------------------

enum class Growth { level_wise, leaf_wise, oblivious_ordered };

std::string growth_name(Growth growth);
Growth growth_from_name(const std::string& name);

struct BoostConfig {
  Growth growth = Growth::level_wise;
  double learning_rate = 0.1;
  int n_estimators = 100;
  int max_depth = 6;
  int num_leaves = 31;          // leaf_wise budget
  double reg_lambda = 1.0;      // L2 on leaf weights
  double gamma = 0.0;           // per-split penalty
  double min_child_weight = 1e-3;
  double subsample = 1.0;       // Bernoulli row sampling per tree
  double colsample_bytree = 1.0;
  int n_permutations = 1;       //oblivious_ordered only
  std::uint64_t seed = 0;
};

struct BoostModel {
  std::vector<Tree> trees;  // iteration-major, score-column-minor
  int n_classes = 2;
  int n_score_cols = 1;     // 1 for binary, n_classes otherwise
  double base_score = 0.0;
  BoostConfig config;

  Matrix raw_scores(const Matrix& X) const;     // n x n_score_cols
  Matrix predict_proba(const Matrix& X) const;  // n x n_classes
};

BoostModel fit_boost(const Matrix& X, const std::vector<int>& y, int n_classes,
                     BoostConfig config = {});

// --- Serialization ----------------------------------------------------------------

Json logistic_to_json(const LogisticModel& model);
LogisticModel logistic_from_json(const Json& j);
Json tree_model_to_json(const TreeModel& model);
TreeModel tree_model_from_json(const Json& j);
Json forest_to_json(const ForestModel& model);
ForestModel forest_from_json(const Json& j);
Json svm_to_json(const SvmModel& model);
SvmModel svm_from_json(const Json& j);
Json boost_to_json(const BoostModel& model);
BoostModel boost_from_json(const Json& j);

}  // namespace triboost::learners

#endif  // TRIBOOST_LEARNERS_HPP_
