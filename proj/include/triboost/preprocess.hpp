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

#ifndef TRIBOOST_PREPROCESS_HPP_
#define TRIBOOST_PREPROCESS_HPP_

#include <string>
#include <vector>

#include "triboost/dataset.hpp"
#include "triboost/json_io.hpp"
#include "triboost/types.hpp"

namespace triboost::preprocess {

// --- KNN + median imputation ------------------------------------------------

// Masked Euclidean distance between two partially observed rows of width d:
// sqrt(d / |O| * sum_{j in O} (a_j - b_j)^2) where O is the set of mutually
// observed coordinates. Returns +inf when O is empty.
double masked_distance(const double* a, const bool* a_missing, const double* b,
                       const bool* b_missing, Index d);
double masked_distance(const data::DataTable& ta, Index row_a,
                       const data::DataTable& tb, Index row_b);

struct ImputerModel {
  int k = 5;
  std::vector<std::string> columns;
  std::vector<data::ColumnKind> kinds;
  // Number of levels for ordinal/nominal columns (0 otherwise); imputed
  // values in such columns are rounded to the nearest level and clamped.
  std::vector<int> level_counts;
  Matrix reference;            // training rows used as donor pool
  MaskArray reference_missing;
  Vector medians;              // stage-2 fallback, from observed training cells
};

// k >= 1; every training column must have at least one observed value.
ImputerModel fit_knn_imputer(const data::DataTable& train, int k = 5);

// Fills every missing cell: stage 1 averages the k nearest donors observed at
// the cell's column (ties with the k-th distance are all included); stage 2
// falls back to the training median when no donor exists. The output table
// has no missing cells.
data::DataTable impute(const ImputerModel& model, const data::DataTable& table);

Json imputer_to_json(const ImputerModel& model);
ImputerModel imputer_from_json(const Json& j);

// --- Encoding ----------------------------------------------------------------

struct EncodedColumn {
  enum class Rule { passthrough, ordinal_code, binary_bits };
  std::string source;
  Rule rule = Rule::passthrough;
  // binary_bits only: category names in order of first appearance in the
  // training rows; the category's position is its code, written out over
  // n_bits little-endian binary columns "<source>_b0", "<source>_b1", ...
  std::vector<std::string> categories;
  int n_bits = 0;
};

struct EncoderSpec {
  std::vector<EncodedColumn> columns;
};

// Builds the encoding plan from training data: numeric/binary pass through,
// ordinal columns become their integer code as a numeric column, nominal
// columns become ceil(log2(max(n_categories, 2))) binary bit columns. Text
// columns are rejected; normalize them to nominal first.
EncoderSpec fit_encoder(const data::DataTable& train);

// Applies the plan. A category never seen during fitting is an EncodingError;
// a missing nominal cell yields missing bits.
data::DataTable encode(const data::DataTable& table, const EncoderSpec& spec);

// Reverses one bit pattern back to its category name (round-trip checks).
std::string decode_bits(const EncodedColumn& column,
                        const std::vector<int>& bits);

Json encoder_to_json(const EncoderSpec& spec);
EncoderSpec encoder_from_json(const Json& j);

// --- Standardization ----------------------------------------------------------

struct ScalerModel {
  std::vector<std::string> columns;   // full encoded-table column order
  Vector means;                       // 0 for unscaled columns
  Vector stds;                        // population std; 0 marks a constant
  std::vector<std::uint8_t> scaled;   // 1 where standardization applies
};

// Standardizes numeric columns to zero mean / unit variance; binary columns
// (including encoder bit columns) are left untouched. A constant column
// records std 0 and is centered only.
ScalerModel fit_scaler(const data::DataTable& train);
data::DataTable apply_scaler(const ScalerModel& model,
                             const data::DataTable& table);

Json scaler_to_json(const ScalerModel& model);
ScalerModel scaler_from_json(const Json& j);

// --- Univariate selection ------------------------------------------------------

struct SelectionResult {
  std::vector<Index> selected;  // top_k column indices, best first
  Vector scores;                // ANOVA F per input column
};

// One-way ANOVA F-statistic per feature against the class groups. A feature
// with zero within-group variance scores +inf when group means differ and 0
// when the feature is constant. Ties in F break toward the lower column
// index.
SelectionResult select_univariate(const Matrix& X, const std::vector<int>& y,
                                  int n_classes, Index top_k);

// --- Glue ----------------------------------------------------------------------

// Asserts the table is fully observed and returns its numeric matrix along
// with the column names.
std::pair<Matrix, std::vector<std::string>> to_feature_matrix(
    const data::DataTable& table);

}  // namespace triboost::preprocess

#endif  // TRIBOOST_PREPROCESS_HPP_
