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
#include <limits>
#include <numeric>

#include "triboost/error.hpp"
#include "triboost/learners.hpp"
#include "triboost/rng.hpp"

namespace triboost::learners {

namespace {

double impurity(const std::vector<Index>& counts, Index total,
                TreeConfig::Criterion criterion) {
  if (total == 0) return 0.0;
  const double n = static_cast<double>(total);
  double out = 0.0;
  if (criterion == TreeConfig::Criterion::gini) {
    double sq = 0.0;
    for (Index c : counts) {
      const double p = static_cast<double>(c) / n;
      sq += p * p;
    }
    out = 1.0 - sq;
  } else {
    for (Index c : counts) {
      if (c == 0) continue;
      const double p = static_cast<double>(c) / n;
      out -= p * std::log2(p);
    }
  }
  return out;
}

struct BestSplit {
  double decrease = -1.0;  // any valid candidate (>= 0) beats this
  int feature = -1;
  double threshold = 0.0;
};

struct CartContext {
  const Matrix& X;
  const std::vector<int>& y;
  int n_classes;
  TreeConfig config;
  Rng rng;
  std::vector<Index> rows;  // workspace, partitioned in place
  // scratch reused across nodes
  std::vector<std::pair<double, int>> sorted;  // (value, label)
  std::vector<Index> left_counts;
  std::vector<Index> right_counts;
};

// Best split over one feature by exhaustive midpoint scan.
void scan_feature_best(CartContext& ctx, std::size_t begin, std::size_t end,
                       Index f, double parent_impurity, BestSplit* best) {
  const Index n = static_cast<Index>(end - begin);
  ctx.sorted.clear();
  for (std::size_t t = begin; t < end; ++t) {
    const Index row = ctx.rows[t];
    ctx.sorted.emplace_back(ctx.X(row, f),
                            ctx.y[static_cast<std::size_t>(row)]);
  }
  std::sort(ctx.sorted.begin(), ctx.sorted.end());
  if (ctx.sorted.front().first == ctx.sorted.back().first) return;

  std::fill(ctx.left_counts.begin(), ctx.left_counts.end(), 0);
  std::fill(ctx.right_counts.begin(), ctx.right_counts.end(), 0);
  for (const auto& [value, label] : ctx.sorted) {
    ++ctx.right_counts[static_cast<std::size_t>(label)];
  }

  const Index msl = ctx.config.min_samples_leaf;
  Index n_left = 0;
  for (Index t = 0; t + 1 < n; ++t) {
    const auto& [value, label] = ctx.sorted[static_cast<std::size_t>(t)];
    ++ctx.left_counts[static_cast<std::size_t>(label)];
    --ctx.right_counts[static_cast<std::size_t>(label)];
    ++n_left;
    const double next = ctx.sorted[static_cast<std::size_t>(t + 1)].first;
    if (next == value) continue;
    if (n_left < msl || n - n_left < msl) continue;
    const double mid = value + (next - value) / 2.0;
    if (!(value < mid) || mid > next) continue;  // fp underflow guard
    const double child =
        (static_cast<double>(n_left) *
             impurity(ctx.left_counts, n_left, ctx.config.criterion) +
         static_cast<double>(n - n_left) *
             impurity(ctx.right_counts, n - n_left, ctx.config.criterion)) /
        static_cast<double>(n);
    const double decrease = parent_impurity - child;
    if (decrease > best->decrease) {
      best->decrease = decrease;
      best->feature = static_cast<int>(f);
      best->threshold = mid;
    }
  }
}

// One uniformly drawn threshold per feature (extremely randomized style).
void scan_feature_random(CartContext& ctx, std::size_t begin, std::size_t end,
                         Index f, double parent_impurity, BestSplit* best) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t t = begin; t < end; ++t) {
    const double v = ctx.X(ctx.rows[t], f);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (lo == hi) return;
  const double threshold = ctx.rng.uniform(lo, hi);
  if (!(threshold > lo)) return;  // cannot separate anything

  std::fill(ctx.left_counts.begin(), ctx.left_counts.end(), 0);
  std::fill(ctx.right_counts.begin(), ctx.right_counts.end(), 0);
  Index n_left = 0;
  const Index n = static_cast<Index>(end - begin);
  for (std::size_t t = begin; t < end; ++t) {
    const Index row = ctx.rows[t];
    const int label = ctx.y[static_cast<std::size_t>(row)];
    if (ctx.X(row, f) < threshold) {
      ++ctx.left_counts[static_cast<std::size_t>(label)];
      ++n_left;
    } else {
      ++ctx.right_counts[static_cast<std::size_t>(label)];
    }
  }
  if (n_left < ctx.config.min_samples_leaf ||
      n - n_left < ctx.config.min_samples_leaf || n_left == 0 ||
      n_left == n) {
    return;
  }
  const double child =
      (static_cast<double>(n_left) *
           impurity(ctx.left_counts, n_left, ctx.config.criterion) +
       static_cast<double>(n - n_left) *
           impurity(ctx.right_counts, n - n_left, ctx.config.criterion)) /
      static_cast<double>(n);
  const double decrease = parent_impurity - child;
  if (decrease > best->decrease) {
    best->decrease = decrease;
    best->feature = static_cast<int>(f);
    best->threshold = threshold;
  }
}

Tree grow_cart(CartContext& ctx) {
  const Index d = ctx.X.cols();
  Index m_features;
  if (ctx.config.max_features == -1) {
    m_features = d;
  } else if (ctx.config.max_features == 0) {
    m_features = std::max<Index>(
        1, static_cast<Index>(std::floor(std::sqrt(static_cast<double>(d)))));
  } else if (ctx.config.max_features >= 1 && ctx.config.max_features <= d) {
    m_features = ctx.config.max_features;
  } else {
    throw ParameterError("fit_tree: max_features outside [1, n_features]");
  }

  Tree tree;
  struct Task {
    int slot;
    std::size_t begin, end;
    int depth;
  };
  std::vector<Task> stack;
  tree.nodes.emplace_back();
  stack.push_back({0, 0, ctx.rows.size(), 0});

  std::vector<Index> counts(static_cast<std::size_t>(ctx.n_classes));
  while (!stack.empty()) {
    const Task task = stack.back();
    stack.pop_back();
    const Index n = static_cast<Index>(task.end - task.begin);

    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t t = task.begin; t < task.end; ++t) {
      ++counts[static_cast<std::size_t>(
          ctx.y[static_cast<std::size_t>(ctx.rows[t])])];
    }
    const double node_impurity = impurity(counts, n, ctx.config.criterion);

    auto finalize_leaf = [&]() {
      TreeNode& node = tree.nodes[static_cast<std::size_t>(task.slot)];
      node.cover = static_cast<double>(n);
      node.value.resize(static_cast<std::size_t>(ctx.n_classes));
      for (int k = 0; k < ctx.n_classes; ++k) {
        node.value[static_cast<std::size_t>(k)] =
            static_cast<double>(counts[static_cast<std::size_t>(k)]) /
            static_cast<double>(n);
      }
    };

    const bool depth_capped =
        ctx.config.max_depth >= 0 && task.depth >= ctx.config.max_depth;
    if (depth_capped || n < ctx.config.min_samples_split ||
        node_impurity == 0.0) {
      finalize_leaf();
      continue;
    }

    // Candidate features: all of them, or a per-node random subset.
    BestSplit best;
    if (m_features == d) {
      for (Index f = 0; f < d; ++f) {
        if (ctx.config.splitter == TreeConfig::Splitter::best) {
          scan_feature_best(ctx, task.begin, task.end, f, node_impurity, &best);
        } else {
          scan_feature_random(ctx, task.begin, task.end, f, node_impurity,
                              &best);
        }
      }
    } else {
      auto subset = ctx.rng.sample_without_replacement(
          static_cast<std::size_t>(d), static_cast<std::size_t>(m_features));
      std::sort(subset.begin(), subset.end());
      for (std::size_t fi : subset) {
        const Index f = static_cast<Index>(fi);
        if (ctx.config.splitter == TreeConfig::Splitter::best) {
          scan_feature_best(ctx, task.begin, task.end, f, node_impurity, &best);
        } else {
          scan_feature_random(ctx, task.begin, task.end, f, node_impurity,
                              &best);
        }
      }
    }
    if (best.feature < 0) {  // every candidate degenerate
      finalize_leaf();
      continue;
    }

    const auto mid_it = std::stable_partition(
        ctx.rows.begin() + static_cast<std::ptrdiff_t>(task.begin),
        ctx.rows.begin() + static_cast<std::ptrdiff_t>(task.end),
        [&](Index row) { return ctx.X(row, best.feature) < best.threshold; });
    const std::size_t mid =
        static_cast<std::size_t>(mid_it - ctx.rows.begin());

    const int left_slot = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();
    TreeNode& node = tree.nodes[static_cast<std::size_t>(task.slot)];
    node.feature = best.feature;
    node.threshold = best.threshold;
    node.left = left_slot;
    node.right = left_slot + 1;
    node.cover = static_cast<double>(n);
    // Right first so the left child is processed (and numbered) first.
    stack.push_back({left_slot + 1, mid, task.end, task.depth + 1});
    stack.push_back({left_slot, task.begin, mid, task.depth + 1});
  }
  return tree;
}

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

}  // namespace

TreeModel fit_tree(const Matrix& X, const std::vector<int>& y, int n_classes,
                   TreeConfig config) {
  validate_labels(y, n_classes, X.rows());
  if (config.min_samples_split < 2) {
    throw ParameterError("fit_tree: min_samples_split must be >= 2");
  }
  if (config.min_samples_leaf < 1) {
    throw ParameterError("fit_tree: min_samples_leaf must be >= 1");
  }
  if (config.max_depth < -1 || config.max_depth == 0 ||
      config.max_depth > 64) {
    throw ParameterError("fit_tree: max_depth must be -1 or in [1, 64]");
  }

  CartContext ctx{X, y, n_classes, config, Rng(config.seed), {}, {}, {}, {}};
  ctx.rows.resize(static_cast<std::size_t>(X.rows()));
  std::iota(ctx.rows.begin(), ctx.rows.end(), Index{0});
  ctx.left_counts.resize(static_cast<std::size_t>(n_classes));
  ctx.right_counts.resize(static_cast<std::size_t>(n_classes));

  TreeModel model;
  model.n_classes = n_classes;
  model.config = config;
  model.tree = grow_cart(ctx);
  return model;
}

Matrix TreeModel::predict_proba(const Matrix& X) const {
  Matrix out(X.rows(), n_classes);
  for (Index i = 0; i < X.rows(); ++i) {
    const auto& dist = tree.predict_row(X.row(i).data());
    for (int k = 0; k < n_classes; ++k) {
      out(i, k) = dist[static_cast<std::size_t>(k)];
    }
  }
  return out;
}

ForestModel fit_forest(const Matrix& X, const std::vector<int>& y,
                       int n_classes, ForestConfig config) {
  validate_labels(y, n_classes, X.rows());
  if (config.n_estimators < 1) {
    throw ParameterError("fit_forest: n_estimators must be >= 1");
  }
  ForestModel model;
  model.n_classes = n_classes;
  model.config = config;

  TreeConfig tree_config;
  tree_config.criterion = config.criterion;
  tree_config.splitter = TreeConfig::Splitter::best;
  tree_config.max_depth = config.max_depth;
  tree_config.min_samples_split = config.min_samples_split;
  tree_config.min_samples_leaf = config.min_samples_leaf;
  tree_config.max_features = 0;  // floor(sqrt(d)) per node

  Rng master(config.seed);
  const Index n = X.rows();
  for (int t = 0; t < config.n_estimators; ++t) {
    tree_config.seed = master.next_u64();
    CartContext ctx{X,  y,  n_classes, tree_config, Rng(tree_config.seed),
                    {}, {}, {},        {}};
    // Bootstrap: n draws with replacement, duplicates keep their multiplicity.
    ctx.rows.reserve(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
      ctx.rows.push_back(static_cast<Index>(
          master.uniform_below(static_cast<std::uint64_t>(n))));
    }
    ctx.left_counts.resize(static_cast<std::size_t>(n_classes));
    ctx.right_counts.resize(static_cast<std::size_t>(n_classes));
    model.trees.push_back(grow_cart(ctx));
  }
  return model;
}

Matrix ForestModel::predict_proba(const Matrix& X) const {
  Matrix out = Matrix::Zero(X.rows(), n_classes);
  for (const Tree& tree : trees) {
    for (Index i = 0; i < X.rows(); ++i) {
      const auto& dist = tree.predict_row(X.row(i).data());
      for (int k = 0; k < n_classes; ++k) {
        out(i, k) += dist[static_cast<std::size_t>(k)];
      }
    }
  }
  out /= static_cast<double>(trees.size());
  return out;
}

}  // namespace triboost::learners
