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

#include <set>
#include <string>
#include <vector>

#include "triboost/error.hpp"
#include "triboost/rng.hpp"
#include "triboost/sampling.hpp"
#include "triboost/stack.hpp"

namespace triboost::stack {

namespace {

void check_growth_diversity(const std::vector<learners::BoostConfig>& base) {
  if (base.size() != 3) {
    throw FitError("stack: exactly three base learners required");
  }
  std::set<learners::Growth> growths;
  for (const auto& config : base) growths.insert(config.growth);
  if (growths.size() != 3) {
    throw FitError("stack: base learners must cover distinct growths");
  }
}

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

Matrix StackModel::meta_features(const Matrix& X) const {
  if (base_models.size() != 3) {
    throw ModelIntegrityError("stack: expected three base learners");
  }
  Matrix features(X.rows(), 3 * static_cast<Index>(n_classes));
  for (std::size_t b = 0; b < base_models.size(); ++b) {
    const auto& models = base_models[b];
    if (models.empty()) {
      throw ModelIntegrityError("stack: base learner without models");
    }
    Matrix proba = Matrix::Zero(X.rows(), n_classes);
    for (const auto& model : models) proba += model.predict_proba(X);
    proba /= static_cast<double>(models.size());
    features.block(0, static_cast<Index>(b) * n_classes, X.rows(),
                   n_classes) = proba;
  }
  return features;
}

Matrix StackModel::predict_proba(const Matrix& X) const {
  return meta.predict_proba(meta_features(X));
}

StackModel fit_stack(const Matrix& X, const std::vector<int>& y,
                     int n_classes, StackConfig config) {
  check_growth_diversity(config.base);
  if (config.n_folds < 2) throw FitError("stack: n_folds must be >= 2");

  const Index n = X.rows();
  if (static_cast<Index>(y.size()) != n || y.empty()) {
    throw ShapeError("stack: label count does not match feature rows");
  }

  const auto folds = sampling::stratified_k_fold(
      y, config.n_folds, derive_seed(config.seed, "stack/folds"));

  StackModel model;
  model.n_classes = n_classes;
  model.n_folds = config.n_folds;
  model.averaged = !config.refit_full;
  model.oof = Matrix::Zero(n, 3 * static_cast<Index>(n_classes));
  model.base_models.resize(3);

  for (std::size_t b = 0; b < 3; ++b) {
    std::vector<learners::BoostModel> fold_models;
    for (std::size_t f = 0; f < folds.folds.size(); ++f) {
      const IndexList train_rows = sampling::fold_complement(folds, f);
      const IndexList& valid_rows = folds.folds[f];
      learners::BoostConfig fit_config = config.base[b];
      fit_config.seed = derive_seed(
          config.seed, "stack/base" + std::to_string(b) + "/fold" +
                           std::to_string(f));
      const auto fitted =
          learners::fit_boost(gather_rows(X, train_rows),
                              gather_labels(y, train_rows), n_classes,
                              fit_config);
      const Matrix proba = fitted.predict_proba(gather_rows(X, valid_rows));
      for (std::size_t t = 0; t < valid_rows.size(); ++t) {
        model.oof.block(valid_rows[t], static_cast<Index>(b) * n_classes, 1,
                        n_classes) = proba.row(static_cast<Index>(t));
      }
      if (!config.refit_full) fold_models.push_back(fitted);
    }
    if (config.refit_full) {
      learners::BoostConfig fit_config = config.base[b];
      fit_config.seed = derive_seed(
          config.seed, "stack/base" + std::to_string(b) + "/full");
      model.base_models[b] = {learners::fit_boost(X, y, n_classes,
                                                  fit_config)};
    } else {
      model.base_models[b] = std::move(fold_models);
    }
  }

  model.meta = learners::fit_logistic(model.oof, y, n_classes, config.meta);
  return model;
}

Json stack_to_json(const StackModel& model) {
  Json bases = Json::array();
  for (const auto& models : model.base_models) {
    Json fold_models = Json::array();
    for (const auto& m : models) fold_models.push_back(boost_to_json(m));
    bases.push_back(std::move(fold_models));
  }
  return Json{
      {"model", "stack"},
      {"n_classes", model.n_classes},
      {"n_folds", model.n_folds},
      {"averaged", model.averaged},
      {"base_models", std::move(bases)},
      {"meta", logistic_to_json(model.meta)},
  };
}

StackModel stack_from_json(const Json& j) {
  const std::string tag =
      require_field(j, "model", "stack").get<std::string>();
  if (tag != "stack") {
    throw ModelIntegrityError("expected a 'stack' model, found '" + tag + "'");
  }
  StackModel model;
  model.n_classes = require_field(j, "n_classes", "stack").get<int>();
  model.n_folds = require_field(j, "n_folds", "stack").get<int>();
  model.averaged = require_field(j, "averaged", "stack").get<bool>();
  const Json& bases = require_field(j, "base_models", "stack");
  if (!bases.is_array() || bases.size() != 3) {
    throw ModelIntegrityError("stack: expected three base learner entries");
  }
  std::set<learners::Growth> growths;
  for (const Json& fold_models : bases) {
    if (!fold_models.is_array() || fold_models.empty()) {
      throw ModelIntegrityError("stack: base learner without models");
    }
    std::vector<learners::BoostModel> models;
    for (const Json& m : fold_models) {
      models.push_back(learners::boost_from_json(m));
    }
    growths.insert(models.front().config.growth);
    model.base_models.push_back(std::move(models));
  }
  if (growths.size() != 3) {
    throw ModelIntegrityError("stack: base learners must cover distinct growths");
  }
  model.meta = learners::logistic_from_json(require_field(j, "meta", "stack"));
  model.oof = Matrix::Zero(0, 3 * static_cast<Index>(model.n_classes));
  return model;
}

}  // namespace triboost::stack
