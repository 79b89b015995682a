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
#include <vector>

#include "triboost/error.hpp"
#include "triboost/learners.hpp"

namespace triboost::learners {

namespace {

void validate_labels(const std::vector<int>& y, int n_classes, Index n_rows) {
  if (n_classes < 2) throw ParameterError("need at least two classes");
  if (static_cast<Index>(y.size()) != n_rows || y.empty()) {
    throw ShapeError("label count does not match feature rows");
  }
  for (int label : y) {
    if (label < 0 || label >= n_classes) {
      throw SchemaError("label outside [0, n_classes)");
    }
  }
}

// Largest eigenvalue of Xt~ Xt~ where Xt~ = [X, 1] (the intercept column),
// by power iteration. Slightly inflated so a 1/L step stays safe.
double augmented_gram_norm(const Matrix& X) {
  const Index d = X.cols();
  Vector v = Vector::Ones(d + 1);
  v /= v.norm();
  double lambda = 1.0;
  for (int it = 0; it < 60; ++it) {
    Vector u = X * v.head(d) + Vector::Constant(X.rows(), v(d));
    Vector w(d + 1);
    w.head(d) = X.transpose() * u;
    w(d) = u.sum();
    lambda = w.norm();
    if (lambda <= 0.0) return 1.0;  // X is all zeros
    v = w / lambda;
  }
  return lambda * 1.05;
}

// FISTA over a weight matrix plus unpenalized intercepts with an optional
// L1 prox on the weights and gradient-based adaptive restart. `grad_fn`
// fills the smooth-part gradient at the extrapolated point. Stops when the
// sup-norm of the proximal gradient map drops below tol.
template <typename GradFn>
void fista(Matrix* W, Vector* b, GradFn&& grad_fn, double step, double l1_reg,
           double tol, int max_iter) {
  Matrix Wz = *W;
  Vector bz = *b;
  Matrix gW(W->rows(), W->cols());
  Vector gb(b->size());
  double t = 1.0;
  for (int iter = 0; iter < max_iter; ++iter) {
    grad_fn(Wz, bz, &gW, &gb);
    Matrix W_new = Wz - step * gW;
    if (l1_reg > 0.0) {
      const double cut = step * l1_reg;
      W_new = W_new.unaryExpr([cut](double w) {
        return w > cut ? w - cut : (w < -cut ? w + cut : 0.0);
      });
    }
    Vector b_new = bz - step * gb;

    const double map_norm =
        std::max((Wz - W_new).cwiseAbs().maxCoeff() / step,
                 (bz - b_new).cwiseAbs().maxCoeff() / step);
    // Restart the momentum when it points against the last move.
    const double drift = (Wz - W_new).cwiseProduct(W_new - *W).sum() +
                         (bz - b_new).cwiseProduct(b_new - *b).sum();
    const double t_next =
        drift > 0.0 ? 1.0 : (1.0 + std::sqrt(1.0 + 4.0 * t * t)) / 2.0;
    const double beta = drift > 0.0 ? 0.0 : (t - 1.0) / t_next;
    Wz = W_new + beta * (W_new - *W);
    bz = b_new + beta * (b_new - *b);
    *W = std::move(W_new);
    *b = std::move(b_new);
    t = t_next;
    if (map_norm < tol) return;
  }
}

}  // namespace

// --- Logistic regression -----------------------------------------------------

Matrix LogisticModel::decision(const Matrix& X) const {
  return (X * weights.transpose()).rowwise() + intercepts.transpose();
}

Matrix LogisticModel::predict_proba(const Matrix& X) const {
  return scores_to_proba(decision(X), n_classes);
}

LogisticModel fit_logistic(const Matrix& X, const std::vector<int>& y,
                           int n_classes, LogisticConfig config) {
  validate_labels(y, n_classes, X.rows());
  if (!(config.C > 0.0)) throw ParameterError("fit_logistic: C must be > 0");
  if (!(config.tol > 0.0) || config.max_iter < 1) {
    throw ParameterError("fit_logistic: bad tol or max_iter");
  }
  const Index n = X.rows();
  const Index d = X.cols();
  const Index cols = n_classes == 2 ? 1 : n_classes;
  const double alpha = 1.0 / (config.C * static_cast<double>(n));
  const bool l1 = config.penalty == LogisticConfig::Penalty::l1;

  // Mean cross-entropy has a 1/4 (sigmoid) or 1/2 (softmax) curvature cap.
  const double curve = cols == 1 ? 0.25 : 0.5;
  double lipschitz =
      curve * augmented_gram_norm(X) / static_cast<double>(n);
  if (!l1) lipschitz += alpha;

  LogisticModel model;
  model.n_classes = n_classes;
  model.config = config;
  model.weights = Matrix::Zero(cols, d);
  model.intercepts = Vector::Zero(cols);

  fista(
      &model.weights, &model.intercepts,
      [&](const Matrix& W, const Vector& b, Matrix* gW, Vector* gb) {
        Matrix raw = (X * W.transpose()).rowwise() + b.transpose();
        Matrix proba = scores_to_proba(raw, n_classes);
        Matrix resid(n, cols);  // p - y per score column
        if (cols == 1) {
          for (Index i = 0; i < n; ++i) {
            resid(i, 0) =
                proba(i, 1) -
                static_cast<double>(y[static_cast<std::size_t>(i)]);
          }
        } else {
          for (Index i = 0; i < n; ++i) {
            for (Index k = 0; k < cols; ++k) {
              resid(i, k) =
                  proba(i, k) -
                  (y[static_cast<std::size_t>(i)] == static_cast<int>(k)
                       ? 1.0
                       : 0.0);
            }
          }
        }
        *gW = (resid.transpose() * X) / static_cast<double>(n);
        if (!l1) *gW += alpha * W;
        *gb = resid.colwise().sum().transpose() / static_cast<double>(n);
      },
      1.0 / lipschitz, l1 ? alpha : 0.0, config.tol, config.max_iter);
  return model;
}

double logistic_objective(const LogisticModel& model, const Matrix& X,
                          const std::vector<int>& y) {
  validate_labels(y, model.n_classes, X.rows());
  const double n = static_cast<double>(X.rows());
  double penalty;
  if (model.config.penalty == LogisticConfig::Penalty::l1) {
    penalty = model.weights.cwiseAbs().sum();
  } else {
    penalty = 0.5 * model.weights.squaredNorm();
  }
  return log_loss(model.predict_proba(X), y) +
         penalty / (model.config.C * n);
}

// --- Linear SVM (squared hinge, one-vs-rest) ---------------------------------

Matrix SvmModel::decision(const Matrix& X) const {
  return (X * weights.transpose()).rowwise() + intercepts.transpose();
}

Matrix SvmModel::predict_proba(const Matrix& X) const {
  return scores_to_proba(decision(X), n_classes);
}

SvmModel fit_linear_svm(const Matrix& X, const std::vector<int>& y,
                        int n_classes, SvmConfig config) {
  validate_labels(y, n_classes, X.rows());
  if (!(config.C > 0.0)) throw ParameterError("fit_linear_svm: C must be > 0");
  if (!(config.tol > 0.0) || config.max_iter < 1) {
    throw ParameterError("fit_linear_svm: bad tol or max_iter");
  }
  const Index n = X.rows();
  const Index d = X.cols();
  const Index cols = n_classes == 2 ? 1 : n_classes;

  // Hessian of 1/2 ||w||^2 + C sum (1 - s m)^2_+ is bounded by I + 2C Xt Xt'.
  const double lipschitz = 1.0 + 2.0 * config.C * augmented_gram_norm(X);

  SvmModel model;
  model.n_classes = n_classes;
  model.config = config;
  model.weights = Matrix::Zero(cols, d);
  model.intercepts = Vector::Zero(cols);

  // Each one-vs-rest column is an independent problem.
  for (Index k = 0; k < cols; ++k) {
    Vector signs(n);
    for (Index i = 0; i < n; ++i) {
      const int label = y[static_cast<std::size_t>(i)];
      const bool positive = cols == 1 ? label == 1 : label == static_cast<int>(k);
      signs(i) = positive ? 1.0 : -1.0;
    }
    Matrix w = model.weights.row(k);
    Vector b = model.intercepts.segment(k, 1);
    fista(
        &w, &b,
        [&](const Matrix& W, const Vector& bias, Matrix* gW, Vector* gb) {
          Vector margins = X * W.row(0).transpose();
          margins.array() += bias(0);
          Vector force(n);  // d loss / d margin, zero outside the hinge
          for (Index i = 0; i < n; ++i) {
            const double slack = 1.0 - signs(i) * margins(i);
            force(i) =
                slack > 0.0 ? -2.0 * config.C * signs(i) * slack : 0.0;
          }
          gW->row(0) = (X.transpose() * force).transpose() + W.row(0);
          (*gb)(0) = force.sum();
        },
        1.0 / lipschitz, 0.0, config.tol, config.max_iter);
    model.weights.row(k) = w;
    model.intercepts(k) = b(0);
  }
  return model;
}

double svm_objective(const SvmModel& model, const Matrix& X,
                     const std::vector<int>& y, int column) {
  validate_labels(y, model.n_classes, X.rows());
  const Index cols = model.weights.rows();
  if (column < 0 || column >= static_cast<int>(cols)) {
    throw ParameterError("svm_objective: column out of range");
  }
  Vector margins = X * model.weights.row(column).transpose();
  margins.array() += model.intercepts(column);
  double hinge = 0.0;
  for (Index i = 0; i < X.rows(); ++i) {
    const int label = y[static_cast<std::size_t>(i)];
    const bool positive =
        cols == 1 ? label == 1 : label == column;
    const double s = positive ? 1.0 : -1.0;
    const double slack = 1.0 - s * margins(i);
    if (slack > 0.0) hinge += slack * slack;
  }
  return 0.5 * model.weights.row(column).squaredNorm() +
         model.config.C * hinge;
}

}  // namespace triboost::learners
