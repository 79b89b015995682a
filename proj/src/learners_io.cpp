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

#include <string>

#include "triboost/error.hpp"
#include "triboost/json_io.hpp"
#include "triboost/learners.hpp"

namespace triboost::learners {

namespace {

void check_tag(const Json& j, const std::string& expected) {
  const std::string tag = require_field(j, "model", expected).get<std::string>();
  if (tag != expected) {
    throw ModelIntegrityError("expected a '" + expected + "' model, found '" +
                              tag + "'");
  }
}

}  // namespace

Json tree_to_json(const Tree& tree) {
  Json nodes = Json::array();
  for (const TreeNode& node : tree.nodes) {
    Json entry;
    entry["cover"] = node.cover;
    if (node.is_leaf()) {
      entry["value"] = node.value;
    } else {
      entry["feature"] = node.feature;
      entry["threshold"] = node.threshold;
      entry["children"] = Json::array({node.left, node.right});
    }
    nodes.push_back(std::move(entry));
  }
  return Json{{"nodes", std::move(nodes)}};
}

Tree tree_from_json(const Json& j) {
  const Json& nodes = require_field(j, "nodes", "tree");
  if (!nodes.is_array() || nodes.empty()) {
    throw ModelIntegrityError("tree: 'nodes' must be a non-empty array");
  }
  Tree tree;
  tree.nodes.reserve(nodes.size());
  const int count = static_cast<int>(nodes.size());
  for (const Json& entry : nodes) {
    TreeNode node;
    node.cover = require_field(entry, "cover", "tree node").get<double>();
    if (entry.contains("children")) {
      const Json& children = entry["children"];
      if (!children.is_array() || children.size() != 2) {
        throw ModelIntegrityError("tree node: 'children' must hold two ids");
      }
      node.feature = require_field(entry, "feature", "tree node").get<int>();
      node.threshold =
          require_field(entry, "threshold", "tree node").get<double>();
      node.left = children[0].get<int>();
      node.right = children[1].get<int>();
      if (node.feature < 0 || node.left <= 0 || node.right <= 0 ||
          node.left >= count || node.right >= count) {
        throw ModelIntegrityError("tree node: child ids out of range");
      }
    } else {
      node.value = require_field(entry, "value", "tree node")
                       .get<std::vector<double>>();
      if (node.value.empty()) {
        throw ModelIntegrityError("tree leaf: empty value");
      }
    }
    tree.nodes.push_back(std::move(node));
  }
  return tree;
}

// --- Logistic ------------------------------------------------------------------

Json logistic_to_json(const LogisticModel& model) {
  return Json{
      {"model", "logistic"},
      {"n_classes", model.n_classes},
      {"penalty",
       model.config.penalty == LogisticConfig::Penalty::l1 ? "l1" : "l2"},
      {"C", model.config.C},
      {"tol", model.config.tol},
      {"max_iter", model.config.max_iter},
      {"weights", matrix_to_json(model.weights)},
      {"intercepts", vector_to_json(model.intercepts)},
  };
}

LogisticModel logistic_from_json(const Json& j) {
  check_tag(j, "logistic");
  LogisticModel model;
  model.n_classes = require_field(j, "n_classes", "logistic").get<int>();
  const std::string penalty =
      require_field(j, "penalty", "logistic").get<std::string>();
  if (penalty == "l1") {
    model.config.penalty = LogisticConfig::Penalty::l1;
  } else if (penalty == "l2") {
    model.config.penalty = LogisticConfig::Penalty::l2;
  } else {
    throw ModelIntegrityError("logistic: unknown penalty '" + penalty + "'");
  }
  model.config.C = require_field(j, "C", "logistic").get<double>();
  model.config.tol = require_field(j, "tol", "logistic").get<double>();
  model.config.max_iter = require_field(j, "max_iter", "logistic").get<int>();
  model.weights = matrix_from_json(require_field(j, "weights", "logistic"));
  model.intercepts =
      vector_from_json(require_field(j, "intercepts", "logistic"));
  const Index expected = model.n_classes == 2 ? 1 : model.n_classes;
  if (model.n_classes < 2 || model.weights.rows() != expected ||
      model.intercepts.size() != expected) {
    throw ModelIntegrityError("logistic: weight shape mismatch");
  }
  return model;
}

// --- CART ------------------------------------------------------------------------

namespace {

std::string criterion_name(TreeConfig::Criterion criterion) {
  return criterion == TreeConfig::Criterion::gini ? "gini" : "entropy";
}

TreeConfig::Criterion criterion_from_name(const std::string& name) {
  if (name == "gini") return TreeConfig::Criterion::gini;
  if (name == "entropy") return TreeConfig::Criterion::entropy;
  throw ModelIntegrityError("unknown criterion '" + name + "'");
}

}  // namespace

Json tree_model_to_json(const TreeModel& model) {
  return Json{
      {"model", "tree"},
      {"n_classes", model.n_classes},
      {"criterion", criterion_name(model.config.criterion)},
      {"splitter",
       model.config.splitter == TreeConfig::Splitter::best ? "best"
                                                           : "random"},
      {"max_depth", model.config.max_depth},
      {"min_samples_split", model.config.min_samples_split},
      {"min_samples_leaf", model.config.min_samples_leaf},
      {"max_features", model.config.max_features},
      {"seed", model.config.seed},
      {"tree", tree_to_json(model.tree)},
  };
}

TreeModel tree_model_from_json(const Json& j) {
  check_tag(j, "tree");
  TreeModel model;
  model.n_classes = require_field(j, "n_classes", "tree").get<int>();
  model.config.criterion = criterion_from_name(
      require_field(j, "criterion", "tree").get<std::string>());
  const std::string splitter =
      require_field(j, "splitter", "tree").get<std::string>();
  if (splitter == "best") {
    model.config.splitter = TreeConfig::Splitter::best;
  } else if (splitter == "random") {
    model.config.splitter = TreeConfig::Splitter::random;
  } else {
    throw ModelIntegrityError("tree: unknown splitter '" + splitter + "'");
  }
  model.config.max_depth = require_field(j, "max_depth", "tree").get<int>();
  model.config.min_samples_split =
      require_field(j, "min_samples_split", "tree").get<int>();
  model.config.min_samples_leaf =
      require_field(j, "min_samples_leaf", "tree").get<int>();
  model.config.max_features =
      require_field(j, "max_features", "tree").get<int>();
  model.config.seed =
      require_field(j, "seed", "tree").get<std::uint64_t>();
  model.tree = tree_from_json(require_field(j, "tree", "tree"));
  if (model.n_classes < 2) {
    throw ModelIntegrityError("tree: n_classes must be >= 2");
  }
  return model;
}

// --- Forest ------------------------------------------------------------------------

Json forest_to_json(const ForestModel& model) {
  Json trees = Json::array();
  for (const Tree& tree : model.trees) trees.push_back(tree_to_json(tree));
  return Json{
      {"model", "forest"},
      {"n_classes", model.n_classes},
      {"n_estimators", model.config.n_estimators},
      {"max_depth", model.config.max_depth},
      {"criterion", criterion_name(model.config.criterion)},
      {"min_samples_split", model.config.min_samples_split},
      {"min_samples_leaf", model.config.min_samples_leaf},
      {"seed", model.config.seed},
      {"trees", std::move(trees)},
  };
}

ForestModel forest_from_json(const Json& j) {
  check_tag(j, "forest");
  ForestModel model;
  model.n_classes = require_field(j, "n_classes", "forest").get<int>();
  model.config.n_estimators =
      require_field(j, "n_estimators", "forest").get<int>();
  model.config.max_depth = require_field(j, "max_depth", "forest").get<int>();
  model.config.criterion = criterion_from_name(
      require_field(j, "criterion", "forest").get<std::string>());
  model.config.min_samples_split =
      require_field(j, "min_samples_split", "forest").get<int>();
  model.config.min_samples_leaf =
      require_field(j, "min_samples_leaf", "forest").get<int>();
  model.config.seed =
      require_field(j, "seed", "forest").get<std::uint64_t>();
  const Json& trees = require_field(j, "trees", "forest");
  if (!trees.is_array() || trees.empty()) {
    throw ModelIntegrityError("forest: 'trees' must be a non-empty array");
  }
  for (const Json& tree : trees) model.trees.push_back(tree_from_json(tree));
  if (model.n_classes < 2) {
    throw ModelIntegrityError("forest: n_classes must be >= 2");
  }
  return model;
}

// --- SVM ---------------------------------------------------------------------------

Json svm_to_json(const SvmModel& model) {
  return Json{
      {"model", "svm"},
      {"n_classes", model.n_classes},
      {"C", model.config.C},
      {"tol", model.config.tol},
      {"max_iter", model.config.max_iter},
      {"weights", matrix_to_json(model.weights)},
      {"intercepts", vector_to_json(model.intercepts)},
  };
}

SvmModel svm_from_json(const Json& j) {
  check_tag(j, "svm");
  SvmModel model;
  model.n_classes = require_field(j, "n_classes", "svm").get<int>();
  model.config.C = require_field(j, "C", "svm").get<double>();
  model.config.tol = require_field(j, "tol", "svm").get<double>();
  model.config.max_iter = require_field(j, "max_iter", "svm").get<int>();
  model.weights = matrix_from_json(require_field(j, "weights", "svm"));
  model.intercepts = vector_from_json(require_field(j, "intercepts", "svm"));
  const Index expected = model.n_classes == 2 ? 1 : model.n_classes;
  if (model.n_classes < 2 || model.weights.rows() != expected ||
      model.intercepts.size() != expected) {
    throw ModelIntegrityError("svm: weight shape mismatch");
  }
  return model;
}

// --- Boosting -----------------------------------------------------------------------

Json boost_to_json(const BoostModel& model) {
  Json trees = Json::array();
  for (const Tree& tree : model.trees) trees.push_back(tree_to_json(tree));
  return Json{
      {"model", "boost"},
      {"n_classes", model.n_classes},
      {"n_score_cols", model.n_score_cols},
      {"base_score", model.base_score},
      {"growth", growth_name(model.config.growth)},
      {"learning_rate", model.config.learning_rate},
      {"n_estimators", model.config.n_estimators},
      {"max_depth", model.config.max_depth},
      {"num_leaves", model.config.num_leaves},
      {"reg_lambda", model.config.reg_lambda},
      {"gamma", model.config.gamma},
      {"min_child_weight", model.config.min_child_weight},
      {"subsample", model.config.subsample},
      {"colsample_bytree", model.config.colsample_bytree},
      {"n_permutations", model.config.n_permutations},
      {"seed", model.config.seed},
      {"trees", std::move(trees)},
  };
}

BoostModel boost_from_json(const Json& j) {
  check_tag(j, "boost");
  BoostModel model;
  model.n_classes = require_field(j, "n_classes", "boost").get<int>();
  model.n_score_cols = require_field(j, "n_score_cols", "boost").get<int>();
  model.base_score = require_field(j, "base_score", "boost").get<double>();
  model.config.growth =
      growth_from_name(require_field(j, "growth", "boost").get<std::string>());
  model.config.learning_rate =
      require_field(j, "learning_rate", "boost").get<double>();
  model.config.n_estimators =
      require_field(j, "n_estimators", "boost").get<int>();
  model.config.max_depth = require_field(j, "max_depth", "boost").get<int>();
  model.config.num_leaves = require_field(j, "num_leaves", "boost").get<int>();
  model.config.reg_lambda =
      require_field(j, "reg_lambda", "boost").get<double>();
  model.config.gamma = require_field(j, "gamma", "boost").get<double>();
  model.config.min_child_weight =
      require_field(j, "min_child_weight", "boost").get<double>();
  model.config.subsample = require_field(j, "subsample", "boost").get<double>();
  model.config.colsample_bytree =
      require_field(j, "colsample_bytree", "boost").get<double>();
  model.config.n_permutations =
      require_field(j, "n_permutations", "boost").get<int>();
  model.config.seed = require_field(j, "seed", "boost").get<std::uint64_t>();
  const Json& trees = require_field(j, "trees", "boost");
  if (!trees.is_array()) {
    throw ModelIntegrityError("boost: 'trees' must be an array");
  }
  for (const Json& tree : trees) model.trees.push_back(tree_from_json(tree));
  const int cols = model.n_classes == 2 ? 1 : model.n_classes;
  if (model.n_classes < 2 || model.n_score_cols != cols ||
      model.trees.size() % static_cast<std::size_t>(cols) != 0) {
    throw ModelIntegrityError("boost: inconsistent score columns");
  }
  return model;
}

}  // namespace triboost::learners
