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

#include "triboost/explain.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "triboost/error.hpp"
#include "triboost/rng.hpp"

namespace triboost::explain {

namespace {

using learners::Tree;
using learners::TreeNode;

// One explained tree: its leaf payload column and the weight its output
// carries in the ensemble sum (1/n_trees for forests, +-1 for boosting).
struct TreeTerm {
  const Tree* tree = nullptr;
  double scale = 1.0;
  int value_index = 0;
};

void validate_term(const TreeTerm& term, Index n_features) {
  const auto& nodes = term.tree->nodes;
  if (nodes.empty()) throw ModelIntegrityError("explain: empty tree");
  const int count = static_cast<int>(nodes.size());
  for (const TreeNode& node : nodes) {
    if (!(node.cover > 0.0)) {
      throw ModelIntegrityError("explain: node with zero cover");
    }
    if (node.is_leaf()) {
      if (static_cast<int>(node.value.size()) <= term.value_index) {
        throw ModelIntegrityError("explain: leaf payload too short");
      }
      continue;
    }
    if (node.left <= 0 || node.left >= count || node.right <= 0 ||
        node.right >= count) {
      throw ModelIntegrityError("explain: child index out of range");
    }
    if (node.feature < 0 || node.feature >= n_features) {
      throw ShapeError("explain: tree splits on a feature outside X");
    }
  }
}

// Expected output over the cover distribution, chaining the same
// cover(child)/cover(parent) fractions the recursion uses.
double cover_expectation(const std::vector<TreeNode>& nodes, int idx,
                         int value_index) {
  const TreeNode& node = nodes[static_cast<std::size_t>(idx)];
  if (node.is_leaf()) return node.value[static_cast<std::size_t>(value_index)];
  const double wl = nodes[static_cast<std::size_t>(node.left)].cover / node.cover;
  const double wr = nodes[static_cast<std::size_t>(node.right)].cover / node.cover;
  return wl * cover_expectation(nodes, node.left, value_index) +
         wr * cover_expectation(nodes, node.right, value_index);
}

// --- Path-dependent recursion -------------------------------------------------
// The path holds the unique features split on so far, each with the fraction
// of cover that flows past it when excluded (zero_fraction), an indicator for
// whether x follows it when included (one_fraction), and the permutation
// weight mass (pweight) of subsets of each size.

struct PathElement {
  int feature = -1;
  double zero_fraction = 0.0;
  double one_fraction = 0.0;
  double pweight = 0.0;
};

void extend_path(PathElement* path, unsigned depth, double zero_fraction,
                 double one_fraction, int feature) {
  path[depth].feature = feature;
  path[depth].zero_fraction = zero_fraction;
  path[depth].one_fraction = one_fraction;
  path[depth].pweight = depth == 0 ? 1.0 : 0.0;
  for (int i = static_cast<int>(depth) - 1; i >= 0; --i) {
    path[i + 1].pweight +=
        one_fraction * path[i].pweight * (i + 1.0) / (depth + 1.0);
    path[i].pweight *= zero_fraction * (depth - i) / (depth + 1.0);
  }
}

void unwind_path(PathElement* path, unsigned depth, unsigned index) {
  const double one_fraction = path[index].one_fraction;
  const double zero_fraction = path[index].zero_fraction;
  double next_one = path[depth].pweight;

  for (int i = static_cast<int>(depth) - 1; i >= 0; --i) {
    if (one_fraction != 0.0) {
      const double kept = path[i].pweight;
      path[i].pweight = next_one * (depth + 1.0) / ((i + 1.0) * one_fraction);
      next_one =
          kept - path[i].pweight * zero_fraction * (depth - i) / (depth + 1.0);
    } else {
      path[i].pweight =
          path[i].pweight * (depth + 1.0) / (zero_fraction * (depth - i));
    }
  }
  for (unsigned i = index; i < depth; ++i) {
    path[i].feature = path[i + 1].feature;
    path[i].zero_fraction = path[i + 1].zero_fraction;
    path[i].one_fraction = path[i + 1].one_fraction;
  }
}

// Total pweight the path would carry after removing element `index`, without
// mutating it.
double unwound_path_sum(const PathElement* path, unsigned depth,
                        unsigned index) {
  const double one_fraction = path[index].one_fraction;
  const double zero_fraction = path[index].zero_fraction;
  double next_one = path[depth].pweight;
  double total = 0.0;

  if (one_fraction != 0.0) {
    for (int i = static_cast<int>(depth) - 1; i >= 0; --i) {
      const double piece = next_one / ((i + 1.0) * one_fraction);
      total += piece;
      next_one = path[i].pweight - piece * zero_fraction * (depth - i);
    }
  } else {
    for (int i = static_cast<int>(depth) - 1; i >= 0; --i) {
      total += path[i].pweight / (zero_fraction * (depth - i));
    }
  }
  return total * (depth + 1.0);
}

void shap_recurse(const std::vector<TreeNode>& nodes, int value_index,
                  const double* x, double scale, double* phi, int node_index,
                  unsigned depth, PathElement* parent_path,
                  double parent_zero_fraction, double parent_one_fraction,
                  int parent_feature) {
  // Each level gets its own copy of the path so siblings never interfere.
  PathElement* path = parent_path + depth + 1;
  std::copy(parent_path, parent_path + depth + 1, path);
  extend_path(path, depth, parent_zero_fraction, parent_one_fraction,
              parent_feature);

  const TreeNode& node = nodes[static_cast<std::size_t>(node_index)];
  if (node.is_leaf()) {
    const double leaf =
        scale * node.value[static_cast<std::size_t>(value_index)];
    for (unsigned i = 1; i <= depth; ++i) {
      const double w = unwound_path_sum(path, depth, i);
      phi[path[i].feature] +=
          w * (path[i].one_fraction - path[i].zero_fraction) * leaf;
    }
    return;
  }

  const int hot = x[node.feature] < node.threshold ? node.left : node.right;
  const int cold = hot == node.left ? node.right : node.left;
  const double hot_zero =
      nodes[static_cast<std::size_t>(hot)].cover / node.cover;
  const double cold_zero =
      nodes[static_cast<std::size_t>(cold)].cover / node.cover;

  // A feature met twice on one path is unwound and re-extended so the path
  // keeps one element per unique feature.
  double incoming_zero = 1.0;
  double incoming_one = 1.0;
  unsigned index = 0;
  while (index <= depth && path[index].feature != node.feature) ++index;
  if (index != depth + 1) {
    incoming_zero = path[index].zero_fraction;
    incoming_one = path[index].one_fraction;
    unwind_path(path, depth, index);
    --depth;
  }

  shap_recurse(nodes, value_index, x, scale, phi, hot, depth + 1, path,
               hot_zero * incoming_zero, incoming_one, node.feature);
  shap_recurse(nodes, value_index, x, scale, phi, cold, depth + 1, path,
               cold_zero * incoming_zero, 0.0, node.feature);
}

ShapValues shap_from_terms(const std::vector<TreeTerm>& terms, const Matrix& X,
                           int class_index, double base_offset) {
  const Index n = X.rows();
  const Index d = X.cols();

  ShapValues out;
  out.class_index = class_index;
  out.base_value = base_offset;
  out.phi = Matrix::Zero(n, d);

  std::vector<PathElement> buffer;
  for (const TreeTerm& term : terms) {
    validate_term(term, d);
    out.base_value +=
        term.scale * cover_expectation(term.tree->nodes, 0, term.value_index);

    const unsigned maxd = static_cast<unsigned>(term.tree->max_depth()) + 2;
    buffer.assign((maxd * (maxd + 1)) / 2, PathElement{});
    for (Index i = 0; i < n; ++i) {
      shap_recurse(term.tree->nodes, term.value_index, X.row(i).data(),
                   term.scale, out.phi.row(i).data(), 0, 0, buffer.data(), 1.0,
                   1.0, -1);
    }
  }
  return out;
}

// --- Exhaustive oracle ----------------------------------------------------------

// E[tree | features in `mask` pinned to x], marginalizing the rest with the
// cover fractions. bitpos maps feature index -> bit in the mask (-1 inactive).
double conditional_expectation(const std::vector<TreeNode>& nodes, int idx,
                               int value_index, const double* x,
                               std::uint32_t mask, const int* bitpos) {
  const TreeNode& node = nodes[static_cast<std::size_t>(idx)];
  if (node.is_leaf()) return node.value[static_cast<std::size_t>(value_index)];
  const int pos = bitpos[node.feature];
  if (pos >= 0 && ((mask >> pos) & 1u) != 0u) {
    const int next = x[node.feature] < node.threshold ? node.left : node.right;
    return conditional_expectation(nodes, next, value_index, x, mask, bitpos);
  }
  const double wl = nodes[static_cast<std::size_t>(node.left)].cover / node.cover;
  const double wr = nodes[static_cast<std::size_t>(node.right)].cover / node.cover;
  return wl * conditional_expectation(nodes, node.left, value_index, x, mask,
                                      bitpos) +
         wr * conditional_expectation(nodes, node.right, value_index, x, mask,
                                      bitpos);
}

ShapValues brute_from_terms(const std::vector<TreeTerm>& terms, const Matrix& X,
                            int class_index, double base_offset) {
  const Index n = X.rows();
  const Index d = X.cols();

  std::set<int> active_set;
  for (const TreeTerm& term : terms) {
    validate_term(term, d);
    for (const TreeNode& node : term.tree->nodes) {
      if (!node.is_leaf()) active_set.insert(node.feature);
    }
  }
  const std::vector<int> active(active_set.begin(), active_set.end());
  const int m = static_cast<int>(active.size());
  if (m > 12) {
    throw ComplexityError(
        "brute_shap: more than 12 active features (got " + std::to_string(m) +
        ")");
  }
  std::vector<int> bitpos(static_cast<std::size_t>(d), -1);
  for (int p = 0; p < m; ++p) bitpos[static_cast<std::size_t>(active[p])] = p;

  double factorial[13];
  factorial[0] = 1.0;
  for (int i = 1; i <= 12; ++i) factorial[i] = factorial[i - 1] * i;

  ShapValues out;
  out.class_index = class_index;
  out.phi = Matrix::Zero(n, d);
  out.base_value = base_offset;
  for (const TreeTerm& term : terms) {
    out.base_value +=
        term.scale * cover_expectation(term.tree->nodes, 0, term.value_index);
  }

  const std::uint32_t n_subsets = 1u << m;
  std::vector<double> value(n_subsets);
  for (Index i = 0; i < n; ++i) {
    const double* x = X.row(i).data();
    for (std::uint32_t mask = 0; mask < n_subsets; ++mask) {
      double v = base_offset;
      for (const TreeTerm& term : terms) {
        v += term.scale * conditional_expectation(term.tree->nodes, 0,
                                                  term.value_index, x, mask,
                                                  bitpos.data());
      }
      value[mask] = v;
    }
    for (int p = 0; p < m; ++p) {
      const std::uint32_t bit = 1u << p;
      double phi = 0.0;
      for (std::uint32_t mask = 0; mask < n_subsets; ++mask) {
        if ((mask & bit) != 0u) continue;
        const int s = std::popcount(mask);
        const double w = factorial[s] * factorial[m - 1 - s] / factorial[m];
        phi += w * (value[mask | bit] - value[mask]);
      }
      out.phi(i, active[static_cast<std::size_t>(p)]) = phi;
    }
  }
  return out;
}

// --- Ensemble plans ---------------------------------------------------------------

void check_class_index(int class_index, int n_classes, const char* what) {
  if (class_index < 0 || class_index >= n_classes) {
    throw ParameterError(std::string(what) + ": class_index out of range");
  }
}

std::vector<TreeTerm> tree_terms(const learners::TreeModel& model,
                                 int class_index) {
  check_class_index(class_index, model.n_classes, "tree explain");
  return {{&model.tree, 1.0, class_index}};
}

std::vector<TreeTerm> forest_terms(const learners::ForestModel& model,
                                   int class_index) {
  check_class_index(class_index, model.n_classes, "forest explain");
  if (model.trees.empty()) throw ModelIntegrityError("explain: empty forest");
  std::vector<TreeTerm> terms;
  terms.reserve(model.trees.size());
  const double scale = 1.0 / static_cast<double>(model.trees.size());
  for (const Tree& tree : model.trees) terms.push_back({&tree, scale, class_index});
  return terms;
}

// Boosting is explained on the raw-margin scale of one score column. A binary
// model has a single column: class 1 is that margin, class 0 its negation.
std::vector<TreeTerm> boost_terms(const learners::BoostModel& model,
                                  int score_col, double sign) {
  std::vector<TreeTerm> terms;
  for (std::size_t t = 0; t < model.trees.size(); ++t) {
    if (static_cast<int>(t) % model.n_score_cols == score_col) {
      terms.push_back({&model.trees[t], sign, 0});
    }
  }
  return terms;
}

std::pair<std::vector<TreeTerm>, double> boost_plan(
    const learners::BoostModel& model, int class_index) {
  check_class_index(class_index, model.n_classes, "boost explain");
  if (model.trees.size() % static_cast<std::size_t>(model.n_score_cols) != 0) {
    throw ModelIntegrityError("explain: tree count not a multiple of columns");
  }
  if (model.n_score_cols == 1) {
    const double sign = class_index == 1 ? 1.0 : -1.0;
    return {boost_terms(model, 0, sign), sign * model.base_score};
  }
  return {boost_terms(model, class_index, 1.0), model.base_score};
}

// Margin attribution of one boosting score column, sign-free; used by the
// stack composition.
ShapValues boost_margin_shap(const learners::BoostModel& model, const Matrix& X,
                             int score_col) {
  return shap_from_terms(boost_terms(model, score_col, 1.0), X, score_col,
                         model.base_score);
}

// --- SVG helpers --------------------------------------------------------------------

std::string fixed(double v, int decimals = 2) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

std::string xml_escape(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (const char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string feature_label(const std::vector<std::string>& names, int feature) {
  if (feature >= 0 && static_cast<std::size_t>(feature) < names.size()) {
    return xml_escape(names[static_cast<std::size_t>(feature)]);
  }
  return "f" + std::to_string(feature);
}

// Blue (low) to red (high) channel used by the beeswarm.
std::string value_colour(double v01) {
  const double v = std::clamp(v01, 0.0, 1.0);
  const int r = static_cast<int>(std::lround(59.0 + v * (180.0 - 59.0)));
  const int g = static_cast<int>(std::lround(76.0 + v * (4.0 - 76.0)));
  const int b = static_cast<int>(std::lround(192.0 + v * (38.0 - 192.0)));
  return "rgb(" + std::to_string(r) + "," + std::to_string(g) + "," +
         std::to_string(b) + ")";
}

// Deterministic jitter in [-0.5, 0.5) from (row, feature); keeps two renders
// of the same data byte-identical without storing layout state.
double jitter01(int row, int feature) {
  const std::uint64_t key[2] = {static_cast<std::uint64_t>(row),
                                static_cast<std::uint64_t>(feature)};
  const std::uint64_t h = fnv1a64(key, sizeof(key));
  return static_cast<double>(h >> 11) * 0x1.0p-53 - 0.5;
}

void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("render: cannot open " + path);
  out << body;
  out.flush();
  if (!out.good()) throw IoError("render: write failed for " + path);
}

std::string svg_open(const std::string& title) {
  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"900\" height=\"600\" "
         "viewBox=\"0 0 900 600\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"900\" height=\"600\" fill=\"white\"/>\n";
  svg += "<title>" + xml_escape(title) + "</title>\n";
  svg += "<text x=\"450\" y=\"30\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"18\">" + xml_escape(title) + "</text>\n";
  return svg;
}

}  // namespace

// --- Attribution entry points ---------------------------------------------------

ShapValues tree_shap(const learners::TreeModel& model, const Matrix& X,
                     int class_index) {
  return shap_from_terms(tree_terms(model, class_index), X, class_index, 0.0);
}

ShapValues tree_shap(const learners::ForestModel& model, const Matrix& X,
                     int class_index) {
  return shap_from_terms(forest_terms(model, class_index), X, class_index, 0.0);
}

ShapValues tree_shap(const learners::BoostModel& model, const Matrix& X,
                     int class_index) {
  auto [terms, offset] = boost_plan(model, class_index);
  return shap_from_terms(terms, X, class_index, offset);
}

ShapValues brute_shap(const learners::TreeModel& model, const Matrix& X,
                      int class_index) {
  return brute_from_terms(tree_terms(model, class_index), X, class_index, 0.0);
}

ShapValues brute_shap(const learners::ForestModel& model, const Matrix& X,
                      int class_index) {
  return brute_from_terms(forest_terms(model, class_index), X, class_index,
                          0.0);
}

ShapValues brute_shap(const learners::BoostModel& model, const Matrix& X,
                      int class_index) {
  auto [terms, offset] = boost_plan(model, class_index);
  return brute_from_terms(terms, X, class_index, offset);
}

ShapValues linear_shap(const learners::LogisticModel& model, const Matrix& X,
                       const Vector& mu, int class_index) {
  check_class_index(class_index, model.n_classes, "linear_shap");
  if (model.weights.cols() != X.cols() || mu.size() != X.cols()) {
    throw ShapeError("linear_shap: weights, X and mu disagree on features");
  }
  int row = class_index;
  double sign = 1.0;
  if (model.weights.rows() == 1) {
    row = 0;
    sign = class_index == 1 ? 1.0 : -1.0;
  }
  const Vector w = sign * model.weights.row(row).transpose();
  const double b = sign * model.intercepts(row);

  ShapValues out;
  out.class_index = class_index;
  out.phi = (X.rowwise() - mu.transpose()) * w.asDiagonal();
  out.base_value = w.dot(mu) + b;
  return out;
}

ShapValues stack_shap(const stack::StackModel& model, const Matrix& X,
                      int class_index) {
  check_class_index(class_index, model.n_classes, "stack_shap");
  const int n_classes = model.n_classes;
  const auto& meta = model.meta;
  if (meta.weights.cols() != static_cast<Index>(3 * n_classes)) {
    throw ModelIntegrityError("stack_shap: meta width is not 3 x n_classes");
  }

  int meta_row = class_index;
  double meta_sign = 1.0;
  if (meta.weights.rows() == 1) {
    meta_row = 0;
    meta_sign = class_index == 1 ? 1.0 : -1.0;
  }

  ShapValues out;
  out.class_index = class_index;
  out.phi = Matrix::Zero(X.rows(), X.cols());
  out.base_value = meta_sign * meta.intercepts(meta_row);

  for (std::size_t b = 0; b < model.base_models.size(); ++b) {
    const auto& fold_models = model.base_models[b];
    if (fold_models.empty()) throw ModelIntegrityError("stack_shap: empty base");
    const double fold_weight = 1.0 / static_cast<double>(fold_models.size());

    // Meta weight on base b's class-c probability column, for the explained
    // class.
    const auto meta_weight = [&](int c) {
      return meta_sign *
             meta.weights(meta_row,
                          static_cast<Index>(b) * n_classes + c);
    };

    for (const learners::BoostModel& base : fold_models) {
      const int cols = base.n_score_cols;
      const Matrix raw = base.raw_scores(X);

      if (cols == 1) {
        const ShapValues margin = boost_margin_shap(base, X, 0);
        const double p1_bar = learners::sigmoid(margin.base_value);
        out.base_value += fold_weight * (meta_weight(0) * (1.0 - p1_bar) +
                                         meta_weight(1) * p1_bar);
        // dP1/ds = p(1-p); P0 moves opposite, so the two columns fold into
        // a single (m1 - m0) factor.
        const double span = meta_weight(1) - meta_weight(0);
        for (Index i = 0; i < X.rows(); ++i) {
          const double p = learners::sigmoid(raw(i, 0));
          out.phi.row(i) +=
              fold_weight * span * p * (1.0 - p) * margin.phi.row(i);
        }
        continue;
      }

      Matrix margin_base(1, cols);
      std::vector<ShapValues> margins;
      margins.reserve(static_cast<std::size_t>(cols));
      for (int c = 0; c < cols; ++c) {
        margins.push_back(boost_margin_shap(base, X, c));
        margin_base(0, c) = margins.back().base_value;
      }
      const Matrix p_bar = learners::softmax_rows(margin_base);
      const Matrix proba = learners::softmax_rows(raw);
      for (int c = 0; c < cols; ++c) {
        out.base_value += fold_weight * meta_weight(c) * p_bar(0, c);
        for (Index i = 0; i < X.rows(); ++i) {
          const double jac = proba(i, c) * (1.0 - proba(i, c));
          out.phi.row(i) +=
              fold_weight * meta_weight(c) * jac * margins[static_cast<std::size_t>(c)].phi.row(i);
        }
      }
    }
  }
  return out;
}

// --- Aggregation -----------------------------------------------------------------

SummaryData summarize(const ShapValues& shap, const Matrix& X, int top_n,
                      std::vector<std::string> feature_names) {
  const Index n = shap.phi.rows();
  const Index d = shap.phi.cols();
  if (X.rows() != n || X.cols() != d) {
    throw ShapeError("summarize: X and attributions disagree");
  }
  if (n == 0 || d == 0) throw DegenerateInputError("summarize: no attributions");
  if (top_n < 1) throw ParameterError("summarize: top_n must be >= 1");
  if (!feature_names.empty() &&
      feature_names.size() != static_cast<std::size_t>(d)) {
    throw ShapeError("summarize: feature_names length mismatch");
  }

  std::vector<int> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), 0);
  const Vector mean_abs = shap.phi.cwiseAbs().colwise().mean().transpose();
  const Vector mean = shap.phi.colwise().mean().transpose();
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (mean_abs(a) != mean_abs(b)) return mean_abs(a) > mean_abs(b);
    return a < b;
  });

  SummaryData data;
  data.class_index = shap.class_index;
  data.feature_names = std::move(feature_names);
  const int kept = std::min<int>(top_n, static_cast<int>(d));
  data.ranking.reserve(static_cast<std::size_t>(kept));
  data.points.reserve(static_cast<std::size_t>(kept) *
                      static_cast<std::size_t>(n));
  for (int r = 0; r < kept; ++r) {
    const int f = order[static_cast<std::size_t>(r)];
    data.ranking.push_back({f, mean_abs(f), mean(f)});

    const double lo = X.col(f).minCoeff();
    const double hi = X.col(f).maxCoeff();
    const double range = hi - lo;
    for (Index i = 0; i < n; ++i) {
      const double v01 = range > 0.0 ? (X(i, f) - lo) / range : 0.5;
      data.points.push_back({f, shap.phi(i, f), v01});
    }
  }
  return data;
}

DecisionPathData decision_paths(const ShapValues& shap,
                                const std::vector<int>& rows,
                                std::vector<std::string> feature_names) {
  const Index n = shap.phi.rows();
  const Index d = shap.phi.cols();
  if (!feature_names.empty() &&
      feature_names.size() != static_cast<std::size_t>(d)) {
    throw ShapeError("decision_paths: feature_names length mismatch");
  }

  DecisionPathData data;
  data.base_value = shap.base_value;
  data.class_index = shap.class_index;
  data.feature_names = std::move(feature_names);
  data.paths.reserve(rows.size());
  for (const int row : rows) {
    if (row < 0 || row >= static_cast<int>(n)) {
      throw ParameterError("decision_paths: row index out of range");
    }
    DecisionPath path;
    path.row = row;
    path.feature_order.resize(static_cast<std::size_t>(d));
    std::iota(path.feature_order.begin(), path.feature_order.end(), 0);
    std::sort(path.feature_order.begin(), path.feature_order.end(),
              [&](int a, int b) {
                const double fa = std::abs(shap.phi(row, a));
                const double fb = std::abs(shap.phi(row, b));
                if (fa != fb) return fa > fb;
                return a < b;
              });
    path.cumulative.resize(d + 1);
    path.cumulative(0) = shap.base_value;
    for (Index k = 0; k < d; ++k) {
      path.cumulative(k + 1) =
          path.cumulative(k) +
          shap.phi(row, path.feature_order[static_cast<std::size_t>(k)]);
    }
    data.paths.push_back(std::move(path));
  }
  return data;
}

// --- Rendering -------------------------------------------------------------------

void render_svg(const SummaryData& data, const std::string& path) {
  if (data.ranking.empty()) throw RenderError("render: empty ranking");

  const double bars_left = 150.0, bars_right = 420.0;
  const double swarm_left = 520.0, swarm_right = 870.0;
  const double top = 70.0, bottom = 540.0;
  const std::size_t k = data.ranking.size();
  const double band = (bottom - top) / static_cast<double>(k);

  double max_mean = 0.0;
  for (const SummaryEntry& e : data.ranking) max_mean = std::max(max_mean, e.mean_abs_phi);
  double phi_lim = 0.0;
  for (const BeeswarmPoint& p : data.points) phi_lim = std::max(phi_lim, std::abs(p.phi));
  if (phi_lim == 0.0) phi_lim = 1.0;

  std::string svg = svg_open("Mean |SHAP| and per-sample attributions (class " +
                             std::to_string(data.class_index) + ")");

  // Axis group: frame lines, zero line of the swarm, axis captions.
  svg += "<g class=\"axis\" stroke=\"#444\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg += "<line x1=\"" + fixed(bars_left) + "\" y1=\"" + fixed(bottom) +
         "\" x2=\"" + fixed(bars_right) + "\" y2=\"" + fixed(bottom) + "\"/>\n";
  svg += "<line x1=\"" + fixed(bars_left) + "\" y1=\"" + fixed(top) +
         "\" x2=\"" + fixed(bars_left) + "\" y2=\"" + fixed(bottom) + "\"/>\n";
  const double zero_x = (swarm_left + swarm_right) / 2.0;
  svg += "<line x1=\"" + fixed(zero_x) + "\" y1=\"" + fixed(top) + "\" x2=\"" +
         fixed(zero_x) + "\" y2=\"" + fixed(bottom) +
         "\" stroke-dasharray=\"4 3\"/>\n";
  svg += "<text x=\"" + fixed((bars_left + bars_right) / 2.0) +
         "\" y=\"570\" text-anchor=\"middle\" stroke=\"none\" fill=\"#222\">mean |phi|"
         "</text>\n";
  svg += "<text x=\"" + fixed(zero_x) +
         "\" y=\"570\" text-anchor=\"middle\" stroke=\"none\" fill=\"#222\">SHAP value"
         " (max |phi| = " + fixed(phi_lim, 4) + ")</text>\n";
  svg += "</g>\n";

  // Bars and their feature labels.
  for (std::size_t r = 0; r < k; ++r) {
    const SummaryEntry& e = data.ranking[r];
    const double y0 = top + static_cast<double>(r) * band;
    const double height = band * 0.7;
    const double width =
        max_mean > 0.0 ? (e.mean_abs_phi / max_mean) * (bars_right - bars_left)
                       : 0.0;
    svg += "<rect class=\"bar\" x=\"" + fixed(bars_left) + "\" y=\"" +
           fixed(y0 + band * 0.15) + "\" width=\"" + fixed(width) +
           "\" height=\"" + fixed(height) + "\" fill=\"#4c72b0\"/>\n";
    svg += "<text x=\"" + fixed(bars_left - 6.0) + "\" y=\"" +
           fixed(y0 + band * 0.62) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
           feature_label(data.feature_names, e.feature) + "</text>\n";
    svg += "<text x=\"" + fixed(bars_left + width + 4.0) + "\" y=\"" +
           fixed(y0 + band * 0.62) +
           "\" font-family=\"sans-serif\" font-size=\"10\" fill=\"#555\">" +
           fixed(e.mean_abs_phi, 4) + "</text>\n";
  }

  // Beeswarm: points grouped per ranked feature in the same vertical bands.
  const std::size_t per_feature = data.points.size() / k;
  for (std::size_t idx = 0; idx < data.points.size(); ++idx) {
    const BeeswarmPoint& p = data.points[idx];
    const std::size_t rank_of_feature = per_feature > 0 ? idx / per_feature : 0;
    const double yc = top + (static_cast<double>(rank_of_feature) + 0.5) * band;
    const int row_in_band = static_cast<int>(per_feature > 0 ? idx % per_feature : idx);
    const double jitter = jitter01(row_in_band, p.feature) * band * 0.6;
    const double cx = zero_x + (p.phi / phi_lim) * (swarm_right - swarm_left) / 2.0;
    svg += "<circle class=\"point\" cx=\"" + fixed(cx) + "\" cy=\"" +
           fixed(yc + jitter) + "\" r=\"2.5\" fill=\"" + value_colour(p.value01) +
           "\" fill-opacity=\"0.75\"/>\n";
  }

  svg += "</svg>\n";
  write_text_file(path, svg);
}

void render_svg(const DecisionPathData& data, const std::string& path) {
  if (data.paths.empty()) throw RenderError("render: no decision paths");
  const Index d = data.paths.front().cumulative.size() - 1;
  if (d < 1) throw RenderError("render: decision path without features");
  for (const DecisionPath& p : data.paths) {
    if (p.cumulative.size() != d + 1) {
      throw RenderError("render: decision paths of unequal length");
    }
  }

  const double left = 90.0, right = 860.0;
  const double top = 60.0, bottom = 550.0;

  double lo = data.base_value, hi = data.base_value;
  for (const DecisionPath& p : data.paths) {
    lo = std::min(lo, p.cumulative.minCoeff());
    hi = std::max(hi, p.cumulative.maxCoeff());
  }
  double pad = (hi - lo) * 0.05;
  if (pad == 0.0) pad = 1.0;
  lo -= pad;
  hi += pad;
  const auto x_of = [&](double v) {
    return left + (v - lo) / (hi - lo) * (right - left);
  };
  // Cumulative step k sits at height k: the most influential feature is the
  // first segment above the base line at the bottom.
  const auto y_of = [&](Index k) {
    return bottom - static_cast<double>(k) / static_cast<double>(d) * (bottom - top);
  };

  std::string svg = svg_open("Decision paths (class " +
                             std::to_string(data.class_index) + ")");
  svg += "<g class=\"axis\" stroke=\"#444\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg += "<line x1=\"" + fixed(left) + "\" y1=\"" + fixed(bottom) + "\" x2=\"" +
         fixed(right) + "\" y2=\"" + fixed(bottom) + "\"/>\n";
  svg += "<line x1=\"" + fixed(x_of(data.base_value)) + "\" y1=\"" + fixed(top) +
         "\" x2=\"" + fixed(x_of(data.base_value)) + "\" y2=\"" + fixed(bottom) +
         "\" stroke-dasharray=\"4 3\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double v = lo + (hi - lo) * t / 4.0;
    svg += "<text x=\"" + fixed(x_of(v)) +
           "\" y=\"572\" text-anchor=\"middle\" stroke=\"none\" fill=\"#222\">" +
           fixed(v, 3) + "</text>\n";
  }
  svg += "<text x=\"" + fixed((left + right) / 2.0) +
         "\" y=\"592\" text-anchor=\"middle\" stroke=\"none\" fill=\"#222\">"
         "cumulative raw output (base = " + fixed(data.base_value, 4) + ")</text>\n";
  svg += "</g>\n";

  // Feature labels only for a single path; several paths order differently.
  if (data.paths.size() == 1) {
    const DecisionPath& p = data.paths.front();
    const Index shown = std::min<Index>(d, 12);
    for (Index k = 0; k < shown; ++k) {
      svg += "<text x=\"" + fixed(left - 6.0) + "\" y=\"" +
             fixed(y_of(k + 1) + 4.0) +
             "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" +
             feature_label(data.feature_names,
                           p.feature_order[static_cast<std::size_t>(k)]) +
             "</text>\n";
    }
  }

  const char* palette[6] = {"#4c72b0", "#dd8452", "#55a868",
                            "#c44e52", "#8172b3", "#937860"};
  for (std::size_t i = 0; i < data.paths.size(); ++i) {
    const DecisionPath& p = data.paths[i];
    std::string points;
    for (Index k = 0; k <= d; ++k) {
      points += fixed(x_of(p.cumulative(k))) + "," + fixed(y_of(k)) + " ";
    }
    svg += "<polyline class=\"decision\" fill=\"none\" stroke=\"" +
           std::string(palette[i % 6]) + "\" stroke-width=\"1.5\" points=\"" +
           points + "\"/>\n";
  }

  svg += "</svg>\n";
  write_text_file(path, svg);
}

void write_shap_csv(const ShapValues& shap, const Matrix& X,
                    const std::vector<std::string>& feature_names,
                    const std::string& path) {
  const Index n = shap.phi.rows();
  const Index d = shap.phi.cols();
  if (X.rows() != n || X.cols() != d) {
    throw ShapeError("write_shap_csv: X and attributions disagree");
  }
  if (!feature_names.empty() &&
      feature_names.size() != static_cast<std::size_t>(d)) {
    throw ShapeError("write_shap_csv: feature_names length mismatch");
  }

  const auto csv_field = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (const char c : s) {
      if (c == '"') quoted += "\"\"";
      else quoted += c;
    }
    quoted += "\"";
    return quoted;
  };

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("write_shap_csv: cannot open " + path);
  out << "row_id,feature,phi,feature_value,class\n";
  char buf[64];
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < d; ++j) {
      const std::string name =
          feature_names.empty() ? "f" + std::to_string(j)
                                : feature_names[static_cast<std::size_t>(j)];
      out << i << ',' << csv_field(name) << ',';
      std::snprintf(buf, sizeof(buf), "%.17g", shap.phi(i, j));
      out << buf << ',';
      std::snprintf(buf, sizeof(buf), "%.17g", X(i, j));
      out << buf << ',' << shap.class_index << '\n';
    }
  }
  out.flush();
  if (!out.good()) throw IoError("write_shap_csv: write failed for " + path);
}

std::vector<int> recode_binary_engagement(const std::vector<int>& labels) {
  std::vector<int> binary(labels.size());
  std::transform(labels.begin(), labels.end(), binary.begin(),
                 [](int label) { return label > 0 ? 1 : 0; });
  return binary;
}

}  // namespace triboost::explain
