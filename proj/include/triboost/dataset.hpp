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

#ifndef TRIBOOST_DATASET_HPP_
#define TRIBOOST_DATASET_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "triboost/types.hpp"

namespace triboost::data {

enum class ColumnKind { numeric, ordinal, nominal, text, binary };

std::string column_kind_name(ColumnKind kind);
ColumnKind column_kind_from_name(const std::string& name);

struct ColumnSchema {
  std::string name;
  ColumnKind kind = ColumnKind::numeric;
  // Ordered category labels. Required for ordinal columns (the order is the
  // scale); optional for nominal columns, where an empty list means "discover
  // levels in file order" during read_csv.
  std::vector<std::string> levels;
};

// Columnar table: a dense numeric value matrix plus a missingness mask and
// stable row ids. Ordinal/nominal cells store the level index; text cells
// store an index into a per-column string vector. A cell whose mask bit is
// set is missing and its stored value is meaningless.
class DataTable {
 public:
  DataTable() = default;
  DataTable(std::vector<ColumnSchema> schema, Matrix values, MaskArray missing,
            std::vector<std::vector<std::string>> text,
            std::vector<std::int64_t> row_ids);

  Index n_rows() const { return values_.rows(); }
  Index n_cols() const { return static_cast<Index>(schema_.size()); }

  const std::vector<ColumnSchema>& schema() const { return schema_; }
  const Matrix& values() const { return values_; }
  const MaskArray& missing() const { return missing_; }
  const std::vector<std::int64_t>& row_ids() const { return row_ids_; }

  // Index of the named column; throws SchemaError when absent.
  Index column_index(const std::string& name) const;
  bool has_column(const std::string& name) const;

  double value(Index row, Index col) const { return values_(row, col); }
  bool is_missing(Index row, Index col) const { return missing_(row, col); }
  const std::string& text_value(Index row, Index col) const;

  double column_missing_rate(Index col) const;

  DataTable select_rows(const IndexList& rows) const;
  DataTable select_columns(const std::vector<Index>& cols) const;
  DataTable drop_columns(const std::vector<Index>& cols) const;

  // Returns a copy where every column that also exists in `replacement`
  // (matched by name) is overwritten with the replacement's values, mask,
  // schema and text. Row counts and row ids must agree.
  DataTable with_columns_replaced(const DataTable& replacement) const;

  // Returns a copy with `other`'s columns appended on the right; column names
  // must not collide and row ids must agree.
  DataTable with_columns_appended(const DataTable& other) const;

 private:
  std::vector<ColumnSchema> schema_;
  Matrix values_;
  MaskArray missing_;
  // Per-column string pools; only text columns have a non-empty vector, with
  // one entry per row.
  std::vector<std::vector<std::string>> text_;
  std::vector<std::int64_t> row_ids_;
};

// Label vector for one prediction task.
struct LabelVector {
  std::string name;
  int n_classes = 2;
  std::vector<int> labels;
};

// Validates range and class count; n_classes must be >= 2 and every label in
// [0, n_classes).
LabelVector make_labels(std::string name, std::vector<int> labels,
                        int n_classes);

// --- CSV ------------------------------------------------------------------
// RFC 4180 with a required header row. Missing cells are the empty string,
// "NA" or "NaN" (case-insensitive). The header must match the schema's
// column names in order.

DataTable parse_csv(const std::string& content,
                    const std::vector<ColumnSchema>& schema);
DataTable read_csv(const std::string& path,
                   const std::vector<ColumnSchema>& schema);

std::string format_csv(const DataTable& table);
void write_csv(const DataTable& table, const std::string& path);

// --- Dataset assembly ------------------------------------------------------

// Concatenates several site exports into one table. `rename` maps source
// column names to canonical ones and is applied to every input first. The
// output keeps the first table's order for the columns present in every
// input; extra columns are dropped. Kind mismatches are errors; ordinal
// columns need identical ordered level lists, nominal columns identical level
// sets (indices are remapped onto the first table's ordering). Row ids are
// reassigned sequentially.
DataTable harmonize(const std::vector<DataTable>& tables,
                    const std::map<std::string, std::string>& rename = {});

// Removes exact duplicate rows (same mask and same observed values, text
// included), keeping the first occurrence and preserving order.
DataTable deduplicate(const DataTable& table);

// Drops every column whose missingness rate is strictly greater than
// `threshold`; returns the reduced table and the dropped column names.
std::pair<DataTable, std::vector<std::string>> drop_high_missingness(
    const DataTable& table, double threshold = 0.8);

}  // namespace triboost::data

#endif  // TRIBOOST_DATASET_HPP_
