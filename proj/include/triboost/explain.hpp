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

#ifndef TRIBOOST_EXPLAIN_HPP_
#define TRIBOOST_EXPLAIN_HPP_

#include <string>
#include <vector>

#include "triboost/learners.hpp"
#include "triboost/stack.hpp"
#include "triboost/types.hpp"

namespace triboost::explain {

// Per-feature attributions for one explained class. `phi` is n_rows x
// n_features on the raw-margin scale of the model (tree/forest outputs are
// probabilities, so there the "margin" is the probability itself). Local
// accuracy: for every row, phi.row(i).sum() + base_value equals the model's
// raw output for `class_index` within 1e-6.
struct ShapValues {
  Matrix phi;
  double base_value = 0.0;
  int class_index = 0;
};

// Path-dependent TreeSHAP. The background is the tree-cover distribution:
// a feature outside the coalition is marginalized by descending both children
// weighted by cover(child)/cover(parent). base_value is the cover-weighted
// mean leaf value summed over the explained trees. For a binary BoostModel,
// class 1 is the raw margin and class 0 its negation; multiclass models are
// explained per score column. Any node with cover <= 0 or a leaf payload
// shorter than the explained column raises ModelIntegrityError.
ShapValues tree_shap(const learners::TreeModel& model, const Matrix& X,
                     int class_index);
ShapValues tree_shap(const learners::ForestModel& model, const Matrix& X,
                     int class_index);
ShapValues tree_shap(const learners::BoostModel& model, const Matrix& X,
                     int class_index);

// Exact Shapley values by subset enumeration over the features that actually
// appear in the explained trees, with the same cover-fraction background as
// tree_shap. Validation oracle: more than 12 active features raises
// ComplexityError. Features absent from every tree get phi = 0.
ShapValues brute_shap(const learners::TreeModel& model, const Matrix& X,
                      int class_index);
ShapValues brute_shap(const learners::ForestModel& model, const Matrix& X,
                      int class_index);
ShapValues brute_shap(const learners::BoostModel& model, const Matrix& X,
                      int class_index);

// Closed-form SHAP of a linear margin against background means mu:
// phi_j = w_j (x_j - mu_j), base_value = w . mu + b. Binary models explain
// the positive-class margin (negated for class 0).
ShapValues linear_shap(const learners::LogisticModel& model, const Matrix& X,
                       const Vector& mu, int class_index);

// First-order composition of base TreeSHAP through the meta-learner, mapped
// back to the original feature space:
//   phi(x) = sum_b sum_c m_{b,c} * dP_{b,c}/ds * phi_margin^{(b,c)}(x)
// where m_{b,c} is the meta weight on base b's class-c probability column and
// dP/ds is the diagonal of the sigmoid/softmax Jacobian at x. base_value is
// the meta intercept plus the meta weights applied to the base probabilities
// at their cover-mean margins. This is NOT an exact Shapley decomposition of
// the composite model; Sum(phi) + base tracks the stack margin only to first
// order. Averaged stacks compose each fold model with weight 1/n_folds.
ShapValues stack_shap(const stack::StackModel& model, const Matrix& X,
                      int class_index);

// --- Aggregation for plots ---------------------------------------------------

struct SummaryEntry {
  int feature = -1;
  double mean_abs_phi = 0.0;
  double mean_phi = 0.0;  // signed mean, keeps the direction of the effect
};

struct BeeswarmPoint {
  int feature = -1;
  double phi = 0.0;
  double value01 = 0.0;  // feature value min-max scaled into [0, 1]
};

struct SummaryData {
  // Top-n features sorted by descending mean |phi|, ties by feature index.
  std::vector<SummaryEntry> ranking;
  // One point per (ranked feature, row), grouped in ranking order.
  std::vector<BeeswarmPoint> points;
  std::vector<std::string> feature_names;  // empty -> "f<idx>" when rendered
  int class_index = 0;
};

// Constant columns scale to value01 = 0.5. top_n is clamped to the feature
// count; top_n < 1 raises ParameterError, mismatched shapes ShapeError.
SummaryData summarize(const ShapValues& shap, const Matrix& X, int top_n = 10,
                      std::vector<std::string> feature_names = {});

struct DecisionPath {
  int row = -1;
  // All features ordered by descending |phi| for this row, ties by index.
  std::vector<int> feature_order;
  // cumulative[0] = base_value; cumulative[k] adds phi of feature_order[k-1];
  // the last entry equals the model raw output within 1e-6.
  Vector cumulative;
};

struct DecisionPathData {
  double base_value = 0.0;
  std::vector<DecisionPath> paths;
  std::vector<std::string> feature_names;
  int class_index = 0;
};

DecisionPathData decision_paths(const ShapValues& shap,
                                const std::vector<int>& rows,
                                std::vector<std::string> feature_names = {});

// --- Rendering and export -----------------------------------------------------

// Deterministic standalone SVG on a fixed 900x600 canvas: bar chart of mean
// |phi| beside a beeswarm whose colour encodes the scaled feature value
// (blue = low, red = high) and whose vertical jitter is a hash of
// (row, feature). Empty data raises RenderError, an unwritable path IoError.
void render_svg(const SummaryData& data, const std::string& path);

// Decision plot: one cumulative polyline per instance from base_value to the
// final output, features stacked bottom-up in reverse attribution order.
void render_svg(const DecisionPathData& data, const std::string& path);

// CSV export, one attribution per line: row_id,feature,phi,feature_value,class.
void write_shap_csv(const ShapValues& shap, const Matrix& X,
                    const std::vector<std::string>& feature_names,
                    const std::string& path);

// Collapses three-level message engagement to the binary task: 0 stays 0,
// anything higher becomes 1.
std::vector<int> recode_binary_engagement(const std::vector<int>& labels);

}  // namespace triboost::explain

#endif  // TRIBOOST_EXPLAIN_HPP_
