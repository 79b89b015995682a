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

#include "triboost/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "triboost/error.hpp"

namespace triboost::preprocess {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double round_to_kind(double value, data::ColumnKind kind, int level_count) {
  switch (kind) {
    case data::ColumnKind::binary:
      return value < 0.5 ? 0.0 : 1.0;
    case data::ColumnKind::ordinal:
    case data::ColumnKind::nominal: {
      double r = std::floor(value + 0.5);  // ties round up
      r = std::max(0.0, std::min(r, static_cast<double>(level_count - 1)));
      return r;
    }
    default:
      return value;
  }
}

double median_of(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

double masked_distance(const double* a, const bool* a_missing, const double* b,
                       const bool* b_missing, Index d) {
  double sum = 0.0;
  Index overlap = 0;
  for (Index j = 0; j < d; ++j) {
    if (a_missing[j] || b_missing[j]) continue;
    const double diff = a[j] - b[j];
    sum += diff * diff;
    ++overlap;
  }
  if (overlap == 0) return kInf;
  return std::sqrt(sum * static_cast<double>(d) / static_cast<double>(overlap));
}

double masked_distance(const data::DataTable& ta, Index row_a,
                       const data::DataTable& tb, Index row_b) {
  if (ta.n_cols() != tb.n_cols()) {
    throw ShapeError("masked_distance: column counts differ");
  }
  // Rows are contiguous (row-major storage).
  return masked_distance(ta.values().row(row_a).data(),
                         ta.missing().row(row_a).data(),
                         tb.values().row(row_b).data(),
                         tb.missing().row(row_b).data(), ta.n_cols());
}

ImputerModel fit_knn_imputer(const data::DataTable& train, int k) {
  if (k < 1) throw ParameterError("fit_knn_imputer: k must be >= 1");
  if (train.n_rows() == 0) {
    throw DegenerateInputError("fit_knn_imputer: empty training table");
  }
  ImputerModel model;
  model.k = k;
  model.reference = train.values();
  model.reference_missing = train.missing();
  model.medians = Vector::Zero(train.n_cols());
  for (Index j = 0; j < train.n_cols(); ++j) {
    const data::ColumnSchema& col = train.schema()[static_cast<std::size_t>(j)];
    if (col.kind == data::ColumnKind::text) {
      throw SchemaError("fit_knn_imputer: text column '" + col.name +
                        "' cannot be imputed; normalize it first");
    }
    model.columns.push_back(col.name);
    model.kinds.push_back(col.kind);
    model.level_counts.push_back(static_cast<int>(col.levels.size()));
    std::vector<double> observed;
    for (Index i = 0; i < train.n_rows(); ++i) {
      if (!train.is_missing(i, j)) observed.push_back(train.value(i, j));
    }
    if (observed.empty()) {
      throw DegenerateInputError("fit_knn_imputer: column '" + col.name +
                                 "' has no observed training values");
    }
    model.medians(j) = round_to_kind(median_of(std::move(observed)), col.kind,
                                     model.level_counts.back());
  }
  return model;
}

data::DataTable impute(const ImputerModel& model,
                       const data::DataTable& table) {
  const Index d = table.n_cols();
  if (static_cast<std::size_t>(d) != model.columns.size()) {
    throw ShapeError("impute: table width does not match the model");
  }
  for (Index j = 0; j < d; ++j) {
    const data::ColumnSchema& col = table.schema()[static_cast<std::size_t>(j)];
    if (col.name != model.columns[static_cast<std::size_t>(j)] ||
        col.kind != model.kinds[static_cast<std::size_t>(j)]) {
      throw SchemaError("impute: column '" + col.name +
                        "' does not match the fitted model");
    }
  }

  const Index n_ref = model.reference.rows();
  Matrix values = table.values();
  MaskArray missing = table.missing();

  std::vector<double> dist(static_cast<std::size_t>(n_ref));
  std::vector<Index> order(static_cast<std::size_t>(n_ref));

  for (Index i = 0; i < table.n_rows(); ++i) {
    IndexList holes;
    for (Index j = 0; j < d; ++j) {
      if (missing(i, j)) holes.push_back(j);
    }
    if (holes.empty()) continue;

    // One distance pass per target row, shared by all of its missing cells.
    for (Index r = 0; r < n_ref; ++r) {
      dist[static_cast<std::size_t>(r)] = masked_distance(
          values.row(i).data(), missing.row(i).data(),
          model.reference.row(r).data(), model.reference_missing.row(r).data(),
          d);
    }
    std::iota(order.begin(), order.end(), Index{0});
    std::sort(order.begin(), order.end(), [&](Index a, Index b) {
      const double da = dist[static_cast<std::size_t>(a)];
      const double db = dist[static_cast<std::size_t>(b)];
      if (da != db) return da < db;
      return a < b;
    });

    for (Index j : holes) {
      // Donors: nearest reference rows observed at j, at finite distance.
      // All rows tied with the k-th kept distance are included.
      double sum = 0.0;
      int count = 0;
      double cutoff = kInf;
      for (Index r : order) {
        const double dr = dist[static_cast<std::size_t>(r)];
        if (dr == kInf) break;
        if (model.reference_missing(r, j)) continue;
        if (count >= model.k && dr > cutoff) break;
        sum += model.reference(r, j);
        ++count;
        if (count == model.k) cutoff = dr;
      }
      const std::size_t sj = static_cast<std::size_t>(j);
      const double raw = count > 0 ? sum / count : model.medians(j);
      values(i, j) = round_to_kind(raw, model.kinds[sj], model.level_counts[sj]);
      missing(i, j) = false;
    }
  }
  return data::DataTable(table.schema(), std::move(values), std::move(missing),
                         std::vector<std::vector<std::string>>(
                             static_cast<std::size_t>(d)),
                         table.row_ids());
}

Json imputer_to_json(const ImputerModel& model) {
  Json j;
  j["k"] = model.k;
  j["columns"] = model.columns;
  Json kinds = Json::array();
  for (data::ColumnKind kind : model.kinds) {
    kinds.push_back(data::column_kind_name(kind));
  }
  j["kinds"] = std::move(kinds);
  j["level_counts"] = model.level_counts;
  j["medians"] = vector_to_json(model.medians);
  j["reference_values"] = matrix_to_json(model.reference);
  j["reference_mask"] = mask_to_json(model.reference_missing);
  return j;
}

ImputerModel imputer_from_json(const Json& j) {
  ImputerModel model;
  model.k = require_field(j, "k", "imputer").get<int>();
  model.columns =
      require_field(j, "columns", "imputer").get<std::vector<std::string>>();
  for (const auto& name : require_field(j, "kinds", "imputer")) {
    model.kinds.push_back(data::column_kind_from_name(name.get<std::string>()));
  }
  model.level_counts =
      require_field(j, "level_counts", "imputer").get<std::vector<int>>();
  model.medians = vector_from_json(require_field(j, "medians", "imputer"));
  model.reference =
      matrix_from_json(require_field(j, "reference_values", "imputer"));
  model.reference_missing =
      mask_from_json(require_field(j, "reference_mask", "imputer"));
  if (model.columns.size() != model.kinds.size() ||
      static_cast<Index>(model.columns.size()) != model.medians.size() ||
      model.reference.cols() != model.medians.size()) {
    throw ModelIntegrityError("imputer: inconsistent field sizes");
  }
  return model;
}

// --- Encoding ---------------------------------------------------------------

EncoderSpec fit_encoder(const data::DataTable& train) {
  EncoderSpec spec;
  for (Index j = 0; j < train.n_cols(); ++j) {
    const data::ColumnSchema& col = train.schema()[static_cast<std::size_t>(j)];
    EncodedColumn out;
    out.source = col.name;
    switch (col.kind) {
      case data::ColumnKind::numeric:
      case data::ColumnKind::binary:
        out.rule = EncodedColumn::Rule::passthrough;
        break;
      case data::ColumnKind::ordinal:
        out.rule = EncodedColumn::Rule::ordinal_code;
        break;
      case data::ColumnKind::nominal: {
        out.rule = EncodedColumn::Rule::binary_bits;
        // Category codes follow first appearance in the training rows, not
        // the schema's level order, so the fit is a function of the split.
        std::unordered_map<std::string, int> seen;
        for (Index i = 0; i < train.n_rows(); ++i) {
          if (train.is_missing(i, j)) continue;
          const auto& name =
              col.levels[static_cast<std::size_t>(train.value(i, j))];
          if (seen.emplace(name, static_cast<int>(out.categories.size()))
                  .second) {
            out.categories.push_back(name);
          }
        }
        if (out.categories.empty()) {
          throw DegenerateInputError("fit_encoder: nominal column '" +
                                     col.name + "' is entirely missing");
        }
        const auto n_cats = std::max<std::size_t>(out.categories.size(), 2);
        out.n_bits = static_cast<int>(std::ceil(std::log2(
            static_cast<double>(n_cats))));
        break;
      }
      case data::ColumnKind::text:
        throw SchemaError("fit_encoder: text column '" + col.name +
                          "' must be normalized to nominal first");
    }
    spec.columns.push_back(std::move(out));
  }
  return spec;
}

data::DataTable encode(const data::DataTable& table, const EncoderSpec& spec) {
  if (static_cast<std::size_t>(table.n_cols()) != spec.columns.size()) {
    throw ShapeError("encode: table width does not match the encoder");
  }
  const Index n = table.n_rows();

  std::vector<data::ColumnSchema> schema;
  Index width = 0;
  for (const EncodedColumn& col : spec.columns) {
    width += col.rule == EncodedColumn::Rule::binary_bits ? col.n_bits : 1;
  }
  Matrix values = Matrix::Zero(n, width);
  MaskArray missing = MaskArray::Constant(n, width, false);

  Index out = 0;
  for (Index j = 0; j < table.n_cols(); ++j) {
    const EncodedColumn& enc = spec.columns[static_cast<std::size_t>(j)];
    const data::ColumnSchema& col = table.schema()[static_cast<std::size_t>(j)];
    if (col.name != enc.source) {
      throw SchemaError("encode: column '" + col.name +
                        "' does not match encoder source '" + enc.source + "'");
    }
    switch (enc.rule) {
      case EncodedColumn::Rule::passthrough:
        if (col.kind != data::ColumnKind::numeric &&
            col.kind != data::ColumnKind::binary) {
          throw SchemaError("encode: passthrough column '" + col.name +
                            "' is not numeric/binary");
        }
        schema.push_back(col);
        values.col(out) = table.values().col(j);
        missing.col(out) = table.missing().col(j);
        ++out;
        break;
      case EncodedColumn::Rule::ordinal_code:
        if (col.kind != data::ColumnKind::ordinal) {
          throw SchemaError("encode: column '" + col.name +
                            "' is not ordinal");
        }
        schema.push_back({col.name, data::ColumnKind::numeric, {}});
        values.col(out) = table.values().col(j);
        missing.col(out) = table.missing().col(j);
        ++out;
        break;
      case EncodedColumn::Rule::binary_bits: {
        if (col.kind != data::ColumnKind::nominal) {
          throw SchemaError("encode: column '" + col.name +
                            "' is not nominal");
        }
        std::unordered_map<std::string, int> code;
        for (std::size_t c = 0; c < enc.categories.size(); ++c) {
          code.emplace(enc.categories[c], static_cast<int>(c));
        }
        for (int b = 0; b < enc.n_bits; ++b) {
          schema.push_back({col.name + "_b" + std::to_string(b),
                            data::ColumnKind::binary,
                            {}});
        }
        for (Index i = 0; i < n; ++i) {
          if (table.is_missing(i, j)) {
            for (int b = 0; b < enc.n_bits; ++b) missing(i, out + b) = true;
            continue;
          }
          const std::string& name =
              col.levels[static_cast<std::size_t>(table.value(i, j))];
          const auto it = code.find(name);
          if (it == code.end()) {
            throw EncodingError("encode: category '" + name +
                                "' in column '" + col.name +
                                "' was not seen during fitting");
          }
          for (int b = 0; b < enc.n_bits; ++b) {
            values(i, out + b) = (it->second >> b) & 1;
          }
        }
        out += enc.n_bits;
        break;
      }
    }
  }
  return data::DataTable(std::move(schema), std::move(values),
                         std::move(missing),
                         std::vector<std::vector<std::string>>(
                             static_cast<std::size_t>(width)),
                         table.row_ids());
}

std::string decode_bits(const EncodedColumn& column,
                        const std::vector<int>& bits) {
  if (column.rule != EncodedColumn::Rule::binary_bits) {
    throw ParameterError("decode_bits: column is not bit-encoded");
  }
  if (static_cast<int>(bits.size()) != column.n_bits) {
    throw ShapeError("decode_bits: wrong bit count");
  }
  int code = 0;
  for (std::size_t b = 0; b < bits.size(); ++b) {
    if (bits[b] != 0 && bits[b] != 1) {
      throw ParameterError("decode_bits: bits must be 0/1");
    }
    code |= bits[b] << b;
  }
  if (code >= static_cast<int>(column.categories.size())) {
    throw EncodingError("decode_bits: code " + std::to_string(code) +
                        " has no category in column '" + column.source + "'");
  }
  return column.categories[static_cast<std::size_t>(code)];
}

Json encoder_to_json(const EncoderSpec& spec) {
  Json encoders = Json::array();
  for (const EncodedColumn& col : spec.columns) {
    Json e;
    e["source"] = col.source;
    switch (col.rule) {
      case EncodedColumn::Rule::passthrough: e["rule"] = "passthrough"; break;
      case EncodedColumn::Rule::ordinal_code: e["rule"] = "ordinal_code"; break;
      case EncodedColumn::Rule::binary_bits: e["rule"] = "binary_bits"; break;
    }
    e["categories"] = col.categories;
    e["n_bits"] = col.n_bits;
    encoders.push_back(std::move(e));
  }
  return Json{{"encoders", std::move(encoders)}};
}

EncoderSpec encoder_from_json(const Json& j) {
  EncoderSpec spec;
  for (const Json& e : require_field(j, "encoders", "encoder")) {
    EncodedColumn col;
    col.source = require_field(e, "source", "encoder").get<std::string>();
    const std::string rule =
        require_field(e, "rule", "encoder").get<std::string>();
    if (rule == "passthrough") {
      col.rule = EncodedColumn::Rule::passthrough;
    } else if (rule == "ordinal_code") {
      col.rule = EncodedColumn::Rule::ordinal_code;
    } else if (rule == "binary_bits") {
      col.rule = EncodedColumn::Rule::binary_bits;
    } else {
      throw ModelIntegrityError("encoder: unknown rule '" + rule + "'");
    }
    col.categories = require_field(e, "categories", "encoder")
                         .get<std::vector<std::string>>();
    col.n_bits = require_field(e, "n_bits", "encoder").get<int>();
    spec.columns.push_back(std::move(col));
  }
  return spec;
}

// --- Standardization --------------------------------------------------------

ScalerModel fit_scaler(const data::DataTable& train) {
  if (train.n_rows() == 0) {
    throw DegenerateInputError("fit_scaler: empty training table");
  }
  ScalerModel model;
  const Index d = train.n_cols();
  model.means = Vector::Zero(d);
  model.stds = Vector::Zero(d);
  model.scaled.assign(static_cast<std::size_t>(d), 0);
  for (Index j = 0; j < d; ++j) {
    const data::ColumnSchema& col = train.schema()[static_cast<std::size_t>(j)];
    model.columns.push_back(col.name);
    if (col.kind != data::ColumnKind::numeric) continue;  // leave binaries be
    double sum = 0.0;
    Index count = 0;
    for (Index i = 0; i < train.n_rows(); ++i) {
      if (train.is_missing(i, j)) continue;
      sum += train.value(i, j);
      ++count;
    }
    if (count == 0) {
      throw DegenerateInputError("fit_scaler: column '" + col.name +
                                 "' has no observed values");
    }
    const double mean = sum / static_cast<double>(count);
    double ss = 0.0;
    for (Index i = 0; i < train.n_rows(); ++i) {
      if (train.is_missing(i, j)) continue;
      const double diff = train.value(i, j) - mean;
      ss += diff * diff;
    }
    model.means(j) = mean;
    model.stds(j) = std::sqrt(ss / static_cast<double>(count));
    model.scaled[static_cast<std::size_t>(j)] = 1;
  }
  return model;
}

data::DataTable apply_scaler(const ScalerModel& model,
                             const data::DataTable& table) {
  if (static_cast<std::size_t>(table.n_cols()) != model.columns.size()) {
    throw ShapeError("apply_scaler: table width does not match the model");
  }
  Matrix values = table.values();
  for (Index j = 0; j < table.n_cols(); ++j) {
    const std::size_t sj = static_cast<std::size_t>(j);
    if (table.schema()[sj].name != model.columns[sj]) {
      throw SchemaError("apply_scaler: column '" + table.schema()[sj].name +
                        "' does not match the fitted model");
    }
    if (!model.scaled[sj]) continue;
    // A constant training column recorded std 0; it is centered only.
    const double denom = model.stds(j) == 0.0 ? 1.0 : model.stds(j);
    for (Index i = 0; i < table.n_rows(); ++i) {
      if (table.is_missing(i, j)) continue;
      values(i, j) = (values(i, j) - model.means(j)) / denom;
    }
  }
  return data::DataTable(table.schema(), std::move(values), table.missing(),
                         std::vector<std::vector<std::string>>(
                             static_cast<std::size_t>(table.n_cols())),
                         table.row_ids());
}

Json scaler_to_json(const ScalerModel& model) {
  Json j;
  j["columns"] = model.columns;
  j["means"] = vector_to_json(model.means);
  j["stds"] = vector_to_json(model.stds);
  j["scaled"] = model.scaled;
  return j;
}

ScalerModel scaler_from_json(const Json& j) {
  ScalerModel model;
  model.columns =
      require_field(j, "columns", "scaler").get<std::vector<std::string>>();
  model.means = vector_from_json(require_field(j, "means", "scaler"));
  model.stds = vector_from_json(require_field(j, "stds", "scaler"));
  model.scaled =
      require_field(j, "scaled", "scaler").get<std::vector<std::uint8_t>>();
  if (model.means.size() != model.stds.size() ||
      model.columns.size() != model.scaled.size() ||
      static_cast<Index>(model.columns.size()) != model.means.size()) {
    throw ModelIntegrityError("scaler: inconsistent field sizes");
  }
  return model;
}

// --- Univariate selection -----------------------------------------------------

SelectionResult select_univariate(const Matrix& X, const std::vector<int>& y,
                                  int n_classes, Index top_k) {
  const Index n = X.rows();
  const Index d = X.cols();
  if (static_cast<Index>(y.size()) != n) {
    throw ShapeError("select_univariate: label count does not match rows");
  }
  if (top_k < 1 || top_k > d) {
    throw ParameterError("select_univariate: top_k outside [1, n_features]");
  }
  std::vector<Index> group_sizes(static_cast<std::size_t>(n_classes), 0);
  for (int label : y) {
    if (label < 0 || label >= n_classes) {
      throw SchemaError("select_univariate: label out of range");
    }
    ++group_sizes[static_cast<std::size_t>(label)];
  }
  int present = 0;
  for (Index size : group_sizes) present += size > 0 ? 1 : 0;
  if (present < 2) {
    throw EvaluationError("select_univariate: needs at least two classes");
  }
  if (n - present < 1) {
    throw DegenerateInputError(
        "select_univariate: no within-group degrees of freedom");
  }

  SelectionResult result;
  result.scores = Vector::Zero(d);
  const double df_between = static_cast<double>(present - 1);
  const double df_within = static_cast<double>(n - present);

  Vector group_sum(n_classes);
  for (Index j = 0; j < d; ++j) {
    group_sum.setZero();
    double total = 0.0;
    for (Index i = 0; i < n; ++i) {
      group_sum(y[static_cast<std::size_t>(i)]) += X(i, j);
      total += X(i, j);
    }
    const double grand_mean = total / static_cast<double>(n);
    double ssb = 0.0;
    for (int g = 0; g < n_classes; ++g) {
      const double ng = static_cast<double>(group_sizes[static_cast<std::size_t>(g)]);
      if (ng == 0) continue;
      const double diff = group_sum(g) / ng - grand_mean;
      ssb += ng * diff * diff;
    }
    double ssw = 0.0;
    for (Index i = 0; i < n; ++i) {
      const double gm = group_sum(y[static_cast<std::size_t>(i)]) /
                        static_cast<double>(
                            group_sizes[static_cast<std::size_t>(
                                y[static_cast<std::size_t>(i)])]);
      const double diff = X(i, j) - gm;
      ssw += diff * diff;
    }
    // Guard: rounding noise in ssw when the groups are exactly constant.
    const double scale = std::max(ssb + ssw, 1.0);
    if (ssw <= 1e-12 * scale) {
      result.scores(j) =
          ssb <= 1e-12 * scale ? 0.0 : std::numeric_limits<double>::infinity();
    } else {
      result.scores(j) = (ssb / df_between) / (ssw / df_within);
    }
  }

  std::vector<Index> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    if (result.scores(a) != result.scores(b)) {
      return result.scores(a) > result.scores(b);
    }
    return a < b;
  });
  result.selected.assign(order.begin(), order.begin() + top_k);
  return result;
}

std::pair<Matrix, std::vector<std::string>> to_feature_matrix(
    const data::DataTable& table) {
  if (table.missing().any()) {
    throw SchemaError("to_feature_matrix: table still has missing cells");
  }
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(table.n_cols()));
  for (const data::ColumnSchema& col : table.schema()) {
    if (col.kind == data::ColumnKind::text) {
      throw SchemaError("to_feature_matrix: text column '" + col.name +
                        "' cannot feed a learner");
    }
    names.push_back(col.name);
  }
  return {table.values(), std::move(names)};
}

}  // namespace triboost::preprocess
