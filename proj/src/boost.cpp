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
#include <numeric>
#include <utility>
#include <vector>

#include "triboost/error.hpp"
#include "triboost/learners.hpp"
#include "triboost/rng.hpp"

namespace triboost::learners {

namespace {

using Entry = std::pair<double, Index>;  // (value, row), value then row order

// One sorted (value, row) list per column, shared by every tree of a fit.
std::vector<std::vector<Entry>> presort_columns(const Matrix& X) {
  std::vector<std::vector<Entry>> sorted(static_cast<std::size_t>(X.cols()));
  for (Index f = 0; f < X.cols(); ++f) {
    auto& list = sorted[static_cast<std::size_t>(f)];
    list.reserve(static_cast<std::size_t>(X.rows()));
    for (Index i = 0; i < X.rows(); ++i) list.emplace_back(X(i, f), i);
    std::sort(list.begin(), list.end());
  }
  return sorted;
}

double emit_value(double g, double h, const BoostConfig& cfg) {
  return cfg.learning_rate * leaf_weight(g, h, cfg.reg_lambda);
}

// Midpoint that still separates lo from hi; 0 width signals "skip".
double midpoint(double lo, double hi) {
  const double mid = lo + (hi - lo) / 2.0;
  return (mid > lo && mid <= hi) ? mid : lo;
}

// --- Level-wise growth: one presorted pass per (level, feature) --------------

Tree grow_level_wise(const Matrix& X,
                     const std::vector<std::vector<Entry>>& sorted_cols,
                     const std::vector<Index>& subset, const Vector& g,
                     const Vector& h, const std::vector<char>& in_sample,
                     const BoostConfig& cfg) {
  const Index n = X.rows();
  Tree tree;
  tree.nodes.emplace_back();

  struct Slot {
    int arena = 0;
    double G = 0.0, H = 0.0, count = 0.0;
    double best_gain = 0.0;  // only strictly positive gains accepted
    int best_feature = -1;
    double best_threshold = 0.0;
  };
  std::vector<int> node_of(static_cast<std::size_t>(n), -1);
  Slot root;
  for (Index i = 0; i < n; ++i) {
    if (!in_sample[static_cast<std::size_t>(i)]) continue;
    node_of[static_cast<std::size_t>(i)] = 0;
    root.G += g(i);
    root.H += h(i);
    root.count += 1.0;
  }
  tree.nodes[0].cover = root.count;
  std::vector<Slot> frontier{root};

  auto emit_leaf = [&](const Slot& s) {
    tree.nodes[static_cast<std::size_t>(s.arena)].value = {
        emit_value(s.G, s.H, cfg)};
  };

  std::vector<double> gl, hl, last;
  std::vector<char> started;
  for (int depth = 0; depth < cfg.max_depth && !frontier.empty(); ++depth) {
    const std::size_t F = frontier.size();
    last.assign(F, 0.0);
    for (Index f : subset) {
      gl.assign(F, 0.0);
      hl.assign(F, 0.0);
      started.assign(F, 0);
      for (const auto& [v, row] : sorted_cols[static_cast<std::size_t>(f)]) {
        const int s = node_of[static_cast<std::size_t>(row)];
        if (s < 0) continue;
        const auto si = static_cast<std::size_t>(s);
        Slot& slot = frontier[si];
        if (started[si] && v != last[si]) {
          const double mid = midpoint(last[si], v);
          const double hr = slot.H - hl[si];
          if (mid > last[si] && hl[si] >= cfg.min_child_weight &&
              hr >= cfg.min_child_weight) {
            const double gain = split_gain(gl[si], hl[si], slot.G - gl[si], hr,
                                           cfg.reg_lambda, cfg.gamma);
            if (gain > slot.best_gain) {
              slot.best_gain = gain;
              slot.best_feature = static_cast<int>(f);
              slot.best_threshold = mid;
            }
          }
        }
        gl[si] += g(row);
        hl[si] += h(row);
        last[si] = v;
        started[si] = 1;
      }
    }

    // Materialize the level: children for split slots, leaves for the rest.
    std::vector<int> child_slot(F, -1);
    std::vector<Slot> next;
    for (std::size_t s = 0; s < F; ++s) {
      Slot& slot = frontier[s];
      if (slot.best_feature < 0) {
        emit_leaf(slot);
        continue;
      }
      const int left = static_cast<int>(tree.nodes.size());
      tree.nodes.emplace_back();
      tree.nodes.emplace_back();
      TreeNode& parent = tree.nodes[static_cast<std::size_t>(slot.arena)];
      parent.feature = slot.best_feature;
      parent.threshold = slot.best_threshold;
      parent.left = left;
      parent.right = left + 1;
      child_slot[s] = static_cast<int>(next.size());
      Slot l, r;
      l.arena = left;
      r.arena = left + 1;
      next.push_back(l);
      next.push_back(r);
    }
    for (Index i = 0; i < n; ++i) {
      int& s = node_of[static_cast<std::size_t>(i)];
      if (s < 0) continue;
      const Slot& slot = frontier[static_cast<std::size_t>(s)];
      if (slot.best_feature < 0) {
        s = -1;
        continue;
      }
      const bool left = X(i, slot.best_feature) < slot.best_threshold;
      s = child_slot[static_cast<std::size_t>(s)] + (left ? 0 : 1);
      Slot& child = next[static_cast<std::size_t>(s)];
      child.G += g(i);
      child.H += h(i);
      child.count += 1.0;
    }
    for (const Slot& c : next) {
      tree.nodes[static_cast<std::size_t>(c.arena)].cover = c.count;
    }
    frontier = std::move(next);
  }
  for (const Slot& s : frontier) emit_leaf(s);
  return tree;
}

// --- Leaf-wise growth: per-node frames, split the largest gain first ---------

struct Frame {
  int arena = 0;
  int depth = 0;
  int created = 0;
  double G = 0.0, H = 0.0, count = 0.0;
  std::vector<std::vector<Entry>> lists;  // parallel to the feature subset
  double best_gain = 0.0;
  int best_feature = -1;
  double best_threshold = 0.0;
};

void frame_best(Frame* fr, const std::vector<Index>& subset, const Vector& g,
                const Vector& h, const BoostConfig& cfg) {
  fr->best_gain = 0.0;
  fr->best_feature = -1;
  if (fr->depth >= cfg.max_depth) return;
  for (std::size_t li = 0; li < fr->lists.size(); ++li) {
    const auto& entries = fr->lists[li];
    double gl = 0.0, hl = 0.0;
    for (std::size_t t = 0; t + 1 < entries.size(); ++t) {
      gl += g(entries[t].second);
      hl += h(entries[t].second);
      const double v = entries[t].first;
      const double next = entries[t + 1].first;
      if (next == v) continue;
      const double mid = midpoint(v, next);
      if (!(mid > v)) continue;
      const double hr = fr->H - hl;
      if (hl < cfg.min_child_weight || hr < cfg.min_child_weight) continue;
      const double gain =
          split_gain(gl, hl, fr->G - gl, hr, cfg.reg_lambda, cfg.gamma);
      if (gain > fr->best_gain) {
        fr->best_gain = gain;
        fr->best_feature = static_cast<int>(subset[li]);
        fr->best_threshold = mid;
      }
    }
  }
}

Tree grow_leaf_wise(const Matrix& X,
                    const std::vector<std::vector<Entry>>& sorted_cols,
                    const std::vector<Index>& subset, const Vector& g,
                    const Vector& h, const std::vector<char>& in_sample,
                    const BoostConfig& cfg) {
  Tree tree;
  tree.nodes.emplace_back();

  Frame root;
  root.lists.resize(subset.size());
  for (std::size_t li = 0; li < subset.size(); ++li) {
    for (const auto& entry :
         sorted_cols[static_cast<std::size_t>(subset[li])]) {
      if (in_sample[static_cast<std::size_t>(entry.second)]) {
        root.lists[li].push_back(entry);
      }
    }
  }
  for (const auto& [v, row] : root.lists[0]) {
    root.G += g(row);
    root.H += h(row);
    root.count += 1.0;
  }
  tree.nodes[0].cover = root.count;
  frame_best(&root, subset, g, h, cfg);
  std::vector<Frame> frontier;
  frontier.push_back(std::move(root));
  int created = 1;

  while (static_cast<int>(frontier.size()) < cfg.num_leaves) {
    int pick = -1;
    for (std::size_t t = 0; t < frontier.size(); ++t) {
      if (frontier[t].best_feature < 0) continue;
      if (pick < 0 ||
          frontier[t].best_gain >
              frontier[static_cast<std::size_t>(pick)].best_gain ||
          (frontier[t].best_gain ==
               frontier[static_cast<std::size_t>(pick)].best_gain &&
           frontier[t].created <
               frontier[static_cast<std::size_t>(pick)].created)) {
        pick = static_cast<int>(t);
      }
    }
    if (pick < 0) break;
    Frame parent = std::move(frontier[static_cast<std::size_t>(pick)]);
    frontier.erase(frontier.begin() + pick);

    const int left = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();
    TreeNode& node = tree.nodes[static_cast<std::size_t>(parent.arena)];
    node.feature = parent.best_feature;
    node.threshold = parent.best_threshold;
    node.left = left;
    node.right = left + 1;

    Frame l, r;
    l.arena = left;
    r.arena = left + 1;
    l.depth = r.depth = parent.depth + 1;
    l.created = created++;
    r.created = created++;
    l.lists.resize(subset.size());
    r.lists.resize(subset.size());
    for (std::size_t li = 0; li < subset.size(); ++li) {
      for (const auto& entry : parent.lists[li]) {
        if (X(entry.second, parent.best_feature) < parent.best_threshold) {
          l.lists[li].push_back(entry);
        } else {
          r.lists[li].push_back(entry);
        }
      }
    }
    for (const auto& [v, row] : l.lists[0]) {
      l.G += g(row);
      l.H += h(row);
      l.count += 1.0;
    }
    r.G = parent.G - l.G;
    r.H = parent.H - l.H;
    r.count = parent.count - l.count;
    tree.nodes[static_cast<std::size_t>(l.arena)].cover = l.count;
    tree.nodes[static_cast<std::size_t>(r.arena)].cover = r.count;
    frame_best(&l, subset, g, h, cfg);
    frame_best(&r, subset, g, h, cfg);
    frontier.push_back(std::move(l));
    frontier.push_back(std::move(r));
  }
  for (const Frame& fr : frontier) {
    tree.nodes[static_cast<std::size_t>(fr.arena)].value = {
        emit_value(fr.G, fr.H, cfg)};
  }
  return tree;
}

// --- Oblivious growth: one shared (feature, threshold) per level -------------

Tree grow_oblivious(const Matrix& X,
                    const std::vector<std::vector<Entry>>& sorted_cols,
                    const std::vector<Index>& subset, const Vector& g,
                    const Vector& h, const std::vector<char>& in_sample,
                    const BoostConfig& cfg) {
  const Index n = X.rows();
  Tree tree;
  tree.nodes.emplace_back();

  struct ONode {
    int arena = 0;
    double G = 0.0, H = 0.0, count = 0.0;
  };
  std::vector<int> node_of(static_cast<std::size_t>(n), -1);
  ONode root;
  for (Index i = 0; i < n; ++i) {
    if (!in_sample[static_cast<std::size_t>(i)]) continue;
    node_of[static_cast<std::size_t>(i)] = 0;
    root.G += g(i);
    root.H += h(i);
    root.count += 1.0;
  }
  tree.nodes[0].cover = root.count;
  std::vector<ONode> active{root};

  auto emit_leaf = [&](const ONode& node) {
    tree.nodes[static_cast<std::size_t>(node.arena)].value = {
        emit_value(node.G, node.H, cfg)};
  };

  auto node_gain = [&](const ONode& node, double gl, double hl) {
    const double hr = node.H - hl;
    if (hl < cfg.min_child_weight || hr < cfg.min_child_weight) return 0.0;
    const double gain =
        split_gain(gl, hl, node.G - gl, hr, cfg.reg_lambda, cfg.gamma);
    return gain > 0.0 ? gain : 0.0;
  };

  std::vector<double> gl, hl, contrib;
  for (int level = 0; level < cfg.max_depth && !active.empty(); ++level) {
    const std::size_t A = active.size();
    double best_total = 0.0;
    int best_f = -1;
    double best_thr = 0.0;
    for (Index f : subset) {
      gl.assign(A, 0.0);
      hl.assign(A, 0.0);
      contrib.assign(A, 0.0);
      double total = 0.0;
      double prev_v = 0.0;
      bool have_prev = false;
      for (const auto& [v, row] : sorted_cols[static_cast<std::size_t>(f)]) {
        const int s = node_of[static_cast<std::size_t>(row)];
        if (s < 0) continue;
        if (have_prev && v != prev_v) {
          const double mid = midpoint(prev_v, v);
          if (mid > prev_v && total > best_total) {
            best_total = total;
            best_f = static_cast<int>(f);
            best_thr = mid;
          }
        }
        const auto si = static_cast<std::size_t>(s);
        gl[si] += g(row);
        hl[si] += h(row);
        // Keep the level total in step with this node's running prefix.
        const double c = node_gain(active[si], gl[si], hl[si]);
        total += c - contrib[si];
        contrib[si] = c;
        prev_v = v;
        have_prev = true;
      }
    }
    if (best_f < 0) break;

    // Apply the shared split; nodes it cannot help become leaves here.
    std::vector<double> GL(A, 0.0), HL(A, 0.0), CL(A, 0.0);
    for (Index i = 0; i < n; ++i) {
      const int s = node_of[static_cast<std::size_t>(i)];
      if (s < 0) continue;
      if (X(i, best_f) < best_thr) {
        const auto si = static_cast<std::size_t>(s);
        GL[si] += g(i);
        HL[si] += h(i);
        CL[si] += 1.0;
      }
    }
    std::vector<int> child_pos(A, -1);
    std::vector<ONode> next;
    for (std::size_t s = 0; s < A; ++s) {
      const ONode& node = active[s];
      const double hr = node.H - HL[s];
      const double cr = node.count - CL[s];
      const bool feasible =
          CL[s] >= 1.0 && cr >= 1.0 && HL[s] >= cfg.min_child_weight &&
          hr >= cfg.min_child_weight &&
          split_gain(GL[s], HL[s], node.G - GL[s], hr, cfg.reg_lambda,
                     cfg.gamma) > 0.0;
      if (!feasible) {
        emit_leaf(node);
        continue;
      }
      const int left = static_cast<int>(tree.nodes.size());
      tree.nodes.emplace_back();
      tree.nodes.emplace_back();
      TreeNode& parent = tree.nodes[static_cast<std::size_t>(node.arena)];
      parent.feature = best_f;
      parent.threshold = best_thr;
      parent.left = left;
      parent.right = left + 1;
      child_pos[s] = static_cast<int>(next.size());
      ONode l, r;
      l.arena = left;
      l.G = GL[s];
      l.H = HL[s];
      l.count = CL[s];
      r.arena = left + 1;
      r.G = node.G - GL[s];
      r.H = hr;
      r.count = cr;
      tree.nodes[static_cast<std::size_t>(l.arena)].cover = l.count;
      tree.nodes[static_cast<std::size_t>(r.arena)].cover = r.count;
      next.push_back(l);
      next.push_back(r);
    }
    for (Index i = 0; i < n; ++i) {
      int& s = node_of[static_cast<std::size_t>(i)];
      if (s < 0) continue;
      const int pos = child_pos[static_cast<std::size_t>(s)];
      if (pos < 0) {
        s = -1;
      } else {
        s = pos + (X(i, best_f) < best_thr ? 0 : 1);
      }
    }
    active = std::move(next);
  }
  for (const ONode& node : active) emit_leaf(node);
  return tree;
}

}  // namespace

// --- Boosting driver ----------------------------------------------------------

BoostModel fit_boost(const Matrix& X, const std::vector<int>& y, int n_classes,
                     BoostConfig config) {
  if (n_classes < 2) throw ParameterError("need at least two classes");
  if (static_cast<Index>(y.size()) != X.rows() || y.empty()) {
    throw ShapeError("label count does not match feature rows");
  }
  for (int label : y) {
    if (label < 0 || label >= n_classes) {
      throw SchemaError("label outside [0, n_classes)");
    }
  }
  if (!(config.learning_rate > 0.0)) {
    throw ParameterError("fit_boost: learning_rate must be > 0");
  }
  if (config.n_estimators < 1) {
    throw ParameterError("fit_boost: n_estimators must be >= 1");
  }
  if (config.n_estimators > 20000) {
    throw ComplexityError("fit_boost: n_estimators above 20000");
  }
  if (config.max_depth < 1) {
    throw ParameterError("fit_boost: max_depth must be >= 1");
  }
  if (config.max_depth > 30) {
    throw ComplexityError("fit_boost: max_depth above 30");
  }
  if (config.num_leaves < 2) {
    throw ParameterError("fit_boost: num_leaves must be >= 2");
  }
  if (config.num_leaves > 65536) {
    throw ComplexityError("fit_boost: num_leaves above 65536");
  }
  if (config.reg_lambda < 0.0 || config.gamma < 0.0 ||
      config.min_child_weight < 0.0) {
    throw ParameterError("fit_boost: negative regularization");
  }
  if (!(config.subsample > 0.0) || config.subsample > 1.0 ||
      !(config.colsample_bytree > 0.0) || config.colsample_bytree > 1.0) {
    throw ParameterError("fit_boost: subsample rates must lie in (0, 1]");
  }
  if (config.n_permutations < 1) {
    throw ParameterError("fit_boost: n_permutations must be >= 1");
  }
  if (config.n_permutations > 64) {
    throw ComplexityError("fit_boost: n_permutations above 64");
  }

  const Index n = X.rows();
  const Index d = X.cols();
  if (d < 1) throw ShapeError("fit_boost: no features");
  const int cols = n_classes == 2 ? 1 : n_classes;
  const auto sorted_cols = presort_columns(X);
  Rng master(config.seed);

  BoostModel model;
  model.n_classes = n_classes;
  model.n_score_cols = cols;
  model.base_score = 0.0;
  model.config = config;
  model.trees.reserve(static_cast<std::size_t>(config.n_estimators) *
                      static_cast<std::size_t>(cols));

  const bool ordered = config.growth == Growth::oblivious_ordered;
  const int P = ordered ? config.n_permutations : 1;
  std::vector<std::vector<Index>> perms;
  std::vector<Matrix> ord_raw;
  if (ordered) {
    for (int p = 0; p < P; ++p) {
      std::vector<Index> perm(static_cast<std::size_t>(n));
      std::iota(perm.begin(), perm.end(), Index{0});
      master.shuffle(perm);
      perms.push_back(std::move(perm));
    }
    ord_raw.assign(static_cast<std::size_t>(P), Matrix::Zero(n, cols));
  }
  Matrix raw = Matrix::Zero(n, cols);

  Matrix grad, hess;
  std::vector<Matrix> grad_q(static_cast<std::size_t>(P)),
      hess_q(static_cast<std::size_t>(P));
  std::vector<char> in_sample;
  std::vector<Index> all_features(static_cast<std::size_t>(d));
  std::iota(all_features.begin(), all_features.end(), Index{0});
  std::vector<int> leaf_of(static_cast<std::size_t>(n));

  for (int iter = 0; iter < config.n_estimators; ++iter) {
    const int p = ordered ? iter % P : 0;
    softmax_grad_hess(ordered ? ord_raw[static_cast<std::size_t>(p)] : raw, y,
                      n_classes, &grad, &hess);
    if (ordered) {
      // Snapshot every permutation stream's gradients for this iteration.
      for (int q = 0; q < P; ++q) {
        const auto qi = static_cast<std::size_t>(q);
        if (q == p) {
          grad_q[qi] = grad;
          hess_q[qi] = hess;
        } else {
          softmax_grad_hess(ord_raw[qi], y, n_classes, &grad_q[qi],
                            &hess_q[qi]);
        }
      }
    }

    for (int col = 0; col < cols; ++col) {
      in_sample.assign(static_cast<std::size_t>(n), 1);
      if (config.subsample < 1.0) {
        std::size_t kept = 0;
        for (Index i = 0; i < n; ++i) {
          const bool keep = master.uniform() < config.subsample;
          in_sample[static_cast<std::size_t>(i)] = keep ? 1 : 0;
          kept += keep ? 1 : 0;
        }
        if (kept == 0) in_sample.assign(static_cast<std::size_t>(n), 1);
      }
      std::vector<Index> subset = all_features;
      if (config.colsample_bytree < 1.0) {
        const auto m = static_cast<std::size_t>(std::max<Index>(
            1, static_cast<Index>(std::floor(config.colsample_bytree *
                                             static_cast<double>(d)))));
        if (m < static_cast<std::size_t>(d)) {
          const auto picks = master.sample_without_replacement(
              static_cast<std::size_t>(d), m);
          subset.assign(picks.begin(), picks.end());
          std::sort(subset.begin(), subset.end());
        }
      }
      const Vector gc = grad.col(col);
      const Vector hc = hess.col(col);

      Tree tree;
      switch (config.growth) {
        case Growth::level_wise:
          tree = grow_level_wise(X, sorted_cols, subset, gc, hc, in_sample,
                                 config);
          break;
        case Growth::leaf_wise:
          tree = grow_leaf_wise(X, sorted_cols, subset, gc, hc, in_sample,
                                config);
          break;
        case Growth::oblivious_ordered:
          tree = grow_oblivious(X, sorted_cols, subset, gc, hc, in_sample,
                                config);
          break;
      }

      for (Index i = 0; i < n; ++i) {
        leaf_of[static_cast<std::size_t>(i)] =
            tree.leaf_index(X.row(i).data());
      }
      if (!ordered) {
        for (Index i = 0; i < n; ++i) {
          raw(i, col) +=
              tree.nodes[static_cast<std::size_t>(
                             leaf_of[static_cast<std::size_t>(i)])]
                  .value[0];
        }
      } else {
        // Ordered update: each row receives the leaf weight fitted on the
        // rows before it in the permutation, never on itself.
        std::vector<double> g_run(tree.nodes.size());
        std::vector<double> h_run(tree.nodes.size());
        for (int q = 0; q < P; ++q) {
          const auto qi = static_cast<std::size_t>(q);
          std::fill(g_run.begin(), g_run.end(), 0.0);
          std::fill(h_run.begin(), h_run.end(), 0.0);
          for (Index row : perms[qi]) {
            const auto leaf = static_cast<std::size_t>(
                leaf_of[static_cast<std::size_t>(row)]);
            ord_raw[qi](row, col) +=
                config.learning_rate *
                leaf_weight(g_run[leaf], h_run[leaf], config.reg_lambda);
            g_run[leaf] += grad_q[qi](row, col);
            h_run[leaf] += hess_q[qi](row, col);
          }
        }
      }
      model.trees.push_back(std::move(tree));
    }
  }
  return model;
}

Matrix BoostModel::raw_scores(const Matrix& X) const {
  if (n_score_cols < 1 ||
      trees.size() % static_cast<std::size_t>(n_score_cols) != 0) {
    throw ModelIntegrityError("boost model: tree count mismatch");
  }
  Matrix raw = Matrix::Constant(X.rows(), n_score_cols, base_score);
  for (std::size_t t = 0; t < trees.size(); ++t) {
    const auto col =
        static_cast<Index>(t % static_cast<std::size_t>(n_score_cols));
    for (Index i = 0; i < X.rows(); ++i) {
      raw(i, col) += trees[t].predict_row(X.row(i).data())[0];
    }
  }
  return raw;
}

Matrix BoostModel::predict_proba(const Matrix& X) const {
  return scores_to_proba(raw_scores(X), n_classes);
}

}  // namespace triboost::learners
