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

#include "triboost/error.hpp"
#include "triboost/learners.hpp"

namespace triboost::learners {

int Tree::leaf_index(const double* x) const {
  if (nodes.empty()) throw ModelIntegrityError("empty tree");
  int idx = 0;
  while (!nodes[static_cast<std::size_t>(idx)].is_leaf()) {
    const TreeNode& node = nodes[static_cast<std::size_t>(idx)];
    idx = x[node.feature] < node.threshold ? node.left : node.right;
  }
  return idx;
}

const std::vector<double>& Tree::predict_row(const double* x) const {
  return nodes[static_cast<std::size_t>(leaf_index(x))].value;
}

int Tree::max_depth() const {
  // Iterative DFS; depth of a lone root is 0.
  int deepest = 0;
  std::vector<std::pair<int, int>> stack{{0, 0}};
  while (!stack.empty()) {
    const auto [idx, depth] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, depth);
    const TreeNode& node = nodes[static_cast<std::size_t>(idx)];
    if (!node.is_leaf()) {
      stack.emplace_back(node.left, depth + 1);
      stack.emplace_back(node.right, depth + 1);
    }
  }
  return deepest;
}

Matrix softmax_rows(const Matrix& raw) {
  Matrix out(raw.rows(), raw.cols());
  for (Index i = 0; i < raw.rows(); ++i) {
    const double m = raw.row(i).maxCoeff();
    double total = 0.0;
    for (Index k = 0; k < raw.cols(); ++k) {
      out(i, k) = std::exp(raw(i, k) - m);
      total += out(i, k);
    }
    out.row(i) /= total;
  }
  return out;
}

double sigmoid(double raw) { return 1.0 / (1.0 + std::exp(-raw)); }

Matrix scores_to_proba(const Matrix& raw, int n_classes) {
  if (raw.cols() == 1) {
    if (n_classes != 2) {
      throw ShapeError("scores_to_proba: one margin column needs 2 classes");
    }
    Matrix out(raw.rows(), 2);
    for (Index i = 0; i < raw.rows(); ++i) {
      const double p = sigmoid(raw(i, 0));
      out(i, 0) = 1.0 - p;
      out(i, 1) = p;
    }
    return out;
  }
  if (raw.cols() != n_classes) {
    throw ShapeError("scores_to_proba: column count does not match classes");
  }
  return softmax_rows(raw);
}

double log_loss(const Matrix& proba, const std::vector<int>& y) {
  if (static_cast<Index>(y.size()) != proba.rows() || y.empty()) {
    throw EvaluationError("log_loss: label count does not match rows");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double p =
        std::max(proba(static_cast<Index>(i), y[i]), 1e-15);
    total -= std::log(p);
  }
  return total / static_cast<double>(y.size());
}

void softmax_grad_hess(const Matrix& raw, const std::vector<int>& y,
                       int n_classes, Matrix* grad, Matrix* hess) {
  const Index n = raw.rows();
  if (static_cast<Index>(y.size()) != n) {
    throw ShapeError("softmax_grad_hess: label count does not match rows");
  }
  const Matrix proba = scores_to_proba(raw, n_classes);
  grad->resize(n, raw.cols());
  hess->resize(n, raw.cols());
  if (raw.cols() == 1) {
    for (Index i = 0; i < n; ++i) {
      const double p = proba(i, 1);
      (*grad)(i, 0) = p - static_cast<double>(y[static_cast<std::size_t>(i)]);
      (*hess)(i, 0) = p * (1.0 - p);
    }
    return;
  }
  for (Index i = 0; i < n; ++i) {
    for (Index k = 0; k < raw.cols(); ++k) {
      const double p = proba(i, k);
      (*grad)(i, k) =
          p - (y[static_cast<std::size_t>(i)] == static_cast<int>(k) ? 1.0
                                                                     : 0.0);
      (*hess)(i, k) = p * (1.0 - p);
    }
  }
}

double split_gain(double gl, double hl, double gr, double hr, double lambda,
                  double gamma) {
  const double g = gl + gr;
  const double h = hl + hr;
  return 0.5 * (gl * gl / (hl + lambda) + gr * gr / (hr + lambda) -
                g * g / (h + lambda)) -
         gamma;
}

double leaf_weight(double g, double h, double lambda) {
  return -g / (h + lambda);
}

std::vector<int> predict_classes(const Matrix& proba) {
  std::vector<int> out(static_cast<std::size_t>(proba.rows()));
  for (Index i = 0; i < proba.rows(); ++i) {
    int best = 0;
    for (Index k = 1; k < proba.cols(); ++k) {
      if (proba(i, k) > proba(i, best)) best = static_cast<int>(k);
    }
    out[static_cast<std::size_t>(i)] = best;
  }
  return out;
}

std::string growth_name(Growth growth) {
  switch (growth) {
    case Growth::level_wise: return "level_wise";
    case Growth::leaf_wise: return "leaf_wise";
    case Growth::oblivious_ordered: return "oblivious_ordered";
  }
  throw ParameterError("unknown growth strategy");
}

Growth growth_from_name(const std::string& name) {
  if (name == "level_wise") return Growth::level_wise;
  if (name == "leaf_wise") return Growth::leaf_wise;
  if (name == "oblivious_ordered") return Growth::oblivious_ordered;
  throw ParameterError("unknown growth strategy: " + name);
}

}  // namespace triboost::learners
