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

#include "triboost/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "triboost/error.hpp"

namespace triboost::data {

std::string column_kind_name(ColumnKind kind) {
  switch (kind) {
    case ColumnKind::numeric: return "numeric";
    case ColumnKind::ordinal: return "ordinal";
    case ColumnKind::nominal: return "nominal";
    case ColumnKind::text: return "text";
    case ColumnKind::binary: return "binary";
  }
  throw ParameterError("unknown column kind");
}

ColumnKind column_kind_from_name(const std::string& name) {
  if (name == "numeric") return ColumnKind::numeric;
  if (name == "ordinal") return ColumnKind::ordinal;
  if (name == "nominal") return ColumnKind::nominal;
  if (name == "text") return ColumnKind::text;
  if (name == "binary") return ColumnKind::binary;
  throw ParameterError("unknown column kind: " + name);
}

DataTable::DataTable(std::vector<ColumnSchema> schema, Matrix values,
                     MaskArray missing,
                     std::vector<std::vector<std::string>> text,
                     std::vector<std::int64_t> row_ids)
    : schema_(std::move(schema)),
      values_(std::move(values)),
      missing_(std::move(missing)),
      text_(std::move(text)),
      row_ids_(std::move(row_ids)) {
  const Index n = values_.rows();
  const Index d = static_cast<Index>(schema_.size());
  if (values_.cols() != d || missing_.rows() != n || missing_.cols() != d ||
      static_cast<Index>(row_ids_.size()) != n ||
      static_cast<Index>(text_.size()) != d) {
    throw SchemaError("DataTable: inconsistent shapes between schema, values, "
                      "mask, text and row ids");
  }
  std::unordered_set<std::string> seen;
  for (Index j = 0; j < d; ++j) {
    const ColumnSchema& col = schema_[j];
    if (col.name.empty()) throw SchemaError("DataTable: empty column name");
    if (!seen.insert(col.name).second) {
      throw SchemaError("DataTable: duplicate column name '" + col.name + "'");
    }
    if (col.kind == ColumnKind::ordinal && col.levels.empty()) {
      throw SchemaError("DataTable: ordinal column '" + col.name +
                        "' has no levels");
    }
    const bool is_text = col.kind == ColumnKind::text;
    if (is_text && static_cast<Index>(text_[j].size()) != n) {
      throw SchemaError("DataTable: text column '" + col.name +
                        "' pool size does not match row count");
    }
    if (!is_text && !text_[j].empty()) {
      throw SchemaError("DataTable: non-text column '" + col.name +
                        "' carries text values");
    }
    for (Index i = 0; i < n; ++i) {
      if (missing_(i, j)) continue;
      const double v = values_(i, j);
      if (!std::isfinite(v)) {
        throw NumericError("DataTable: non-finite value in column '" +
                           col.name + "'");
      }
      switch (col.kind) {
        case ColumnKind::ordinal:
        case ColumnKind::nominal: {
          const double r = std::round(v);
          if (r != v || v < 0 ||
              v >= static_cast<double>(col.levels.size())) {
            throw SchemaError("DataTable: level index out of range in '" +
                              col.name + "'");
          }
          break;
        }
        case ColumnKind::binary:
          if (v != 0.0 && v != 1.0) {
            throw SchemaError("DataTable: binary column '" + col.name +
                              "' holds a value other than 0/1");
          }
          break;
        default:
          break;
      }
    }
  }
}

Index DataTable::column_index(const std::string& name) const {
  for (Index j = 0; j < n_cols(); ++j) {
    if (schema_[j].name == name) return j;
  }
  throw SchemaError("no column named '" + name + "'");
}

bool DataTable::has_column(const std::string& name) const {
  for (const ColumnSchema& col : schema_) {
    if (col.name == name) return true;
  }
  return false;
}

const std::string& DataTable::text_value(Index row, Index col) const {
  if (schema_[col].kind != ColumnKind::text) {
    throw SchemaError("text_value: column '" + schema_[col].name +
                      "' is not text");
  }
  return text_[col][static_cast<std::size_t>(row)];
}

double DataTable::column_missing_rate(Index col) const {
  if (n_rows() == 0) return 0.0;
  Index miss = 0;
  for (Index i = 0; i < n_rows(); ++i) miss += missing_(i, col) ? 1 : 0;
  return static_cast<double>(miss) / static_cast<double>(n_rows());
}

DataTable DataTable::select_rows(const IndexList& rows) const {
  const Index m = static_cast<Index>(rows.size());
  Matrix values(m, n_cols());
  MaskArray missing(m, n_cols());
  std::vector<std::vector<std::string>> text(schema_.size());
  std::vector<std::int64_t> ids(rows.size());
  for (Index j = 0; j < n_cols(); ++j) {
    if (schema_[j].kind == ColumnKind::text) text[j].resize(rows.size());
  }
  for (Index r = 0; r < m; ++r) {
    const Index i = rows[static_cast<std::size_t>(r)];
    if (i < 0 || i >= n_rows()) throw ShapeError("select_rows: index out of range");
    values.row(r) = values_.row(i);
    missing.row(r) = missing_.row(i);
    ids[static_cast<std::size_t>(r)] = row_ids_[static_cast<std::size_t>(i)];
    for (Index j = 0; j < n_cols(); ++j) {
      if (schema_[j].kind == ColumnKind::text) {
        text[j][static_cast<std::size_t>(r)] = text_[j][static_cast<std::size_t>(i)];
      }
    }
  }
  return DataTable(schema_, std::move(values), std::move(missing),
                   std::move(text), std::move(ids));
}

DataTable DataTable::select_columns(const std::vector<Index>& cols) const {
  const Index d = static_cast<Index>(cols.size());
  std::vector<ColumnSchema> schema(cols.size());
  Matrix values(n_rows(), d);
  MaskArray missing(n_rows(), d);
  std::vector<std::vector<std::string>> text(cols.size());
  for (Index c = 0; c < d; ++c) {
    const Index j = cols[static_cast<std::size_t>(c)];
    if (j < 0 || j >= n_cols()) {
      throw ShapeError("select_columns: index out of range");
    }
    schema[static_cast<std::size_t>(c)] = schema_[static_cast<std::size_t>(j)];
    values.col(c) = values_.col(j);
    missing.col(c) = missing_.col(j);
    text[static_cast<std::size_t>(c)] = text_[static_cast<std::size_t>(j)];
  }
  return DataTable(std::move(schema), std::move(values), std::move(missing),
                   std::move(text), row_ids_);
}

DataTable DataTable::drop_columns(const std::vector<Index>& cols) const {
  std::set<Index> dropped(cols.begin(), cols.end());
  std::vector<Index> keep;
  for (Index j = 0; j < n_cols(); ++j) {
    if (!dropped.count(j)) keep.push_back(j);
  }
  return select_columns(keep);
}

DataTable DataTable::with_columns_replaced(const DataTable& replacement) const {
  if (replacement.n_rows() != n_rows() || replacement.row_ids() != row_ids_) {
    throw ShapeError("with_columns_replaced: row ids do not match");
  }
  std::vector<ColumnSchema> schema = schema_;
  Matrix values = values_;
  MaskArray missing = missing_;
  std::vector<std::vector<std::string>> text = text_;
  for (Index c = 0; c < replacement.n_cols(); ++c) {
    const std::string& name = replacement.schema()[c].name;
    const Index j = column_index(name);
    schema[static_cast<std::size_t>(j)] = replacement.schema()[c];
    values.col(j) = replacement.values().col(c);
    missing.col(j) = replacement.missing().col(c);
    text[static_cast<std::size_t>(j)] =
        replacement.text_[static_cast<std::size_t>(c)];
  }
  return DataTable(std::move(schema), std::move(values), std::move(missing),
                   std::move(text), row_ids_);
}

DataTable DataTable::with_columns_appended(const DataTable& other) const {
  if (other.n_rows() != n_rows() || other.row_ids() != row_ids_) {
    throw ShapeError("with_columns_appended: row ids do not match");
  }
  std::vector<ColumnSchema> schema = schema_;
  schema.insert(schema.end(), other.schema().begin(), other.schema().end());
  Matrix values(n_rows(), n_cols() + other.n_cols());
  values << values_, other.values();
  MaskArray missing(n_rows(), n_cols() + other.n_cols());
  missing << missing_, other.missing();
  std::vector<std::vector<std::string>> text = text_;
  text.insert(text.end(), other.text_.begin(), other.text_.end());
  return DataTable(std::move(schema), std::move(values), std::move(missing),
                   std::move(text), row_ids_);
}

LabelVector make_labels(std::string name, std::vector<int> labels,
                        int n_classes) {
  if (n_classes < 2) throw ParameterError("labels need at least two classes");
  if (labels.empty()) throw DegenerateInputError("empty label vector");
  for (int y : labels) {
    if (y < 0 || y >= n_classes) {
      throw SchemaError("label outside [0, n_classes) in '" + name + "'");
    }
  }
  return LabelVector{std::move(name), n_classes, std::move(labels)};
}

// --- CSV ---------------------------------------------------------------

namespace {

// Splits raw CSV content into records of fields per RFC 4180. Handles quoted
// fields with embedded separators, doubled quotes and newlines; accepts both
// LF and CRLF records and a missing final newline.
std::vector<std::vector<std::string>> split_csv(const std::string& content) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_was_quoted = false;
  std::size_t i = 0;
  // Skip a UTF-8 byte-order mark if present.
  if (content.size() >= 3 && content.compare(0, 3, "\xef\xbb\xbf") == 0) i = 3;
  auto end_field = [&]() {
    record.push_back(std::move(field));
    field.clear();
    field_was_quoted = false;
  };
  auto end_record = [&]() {
    end_field();
    records.push_back(std::move(record));
    record.clear();
  };
  for (; i < content.size(); ++i) {
    const char c = content[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < content.size() && content[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty() || field_was_quoted) {
          throw ParseError("CSV: quote inside unquoted field");
        }
        in_quotes = true;
        field_was_quoted = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        if (i + 1 < content.size() && content[i + 1] == '\n') ++i;
        end_record();
        break;
      case '\n':
        end_record();
        break;
      default:
        field.push_back(c);
    }
  }
  if (in_quotes) throw ParseError("CSV: unterminated quoted field");
  if (!field.empty() || field_was_quoted || !record.empty()) end_record();
  return records;
}

bool is_missing_token(const std::string& cell) {
  if (cell.empty()) return true;
  if (cell.size() == 2) {
    return (cell[0] == 'n' || cell[0] == 'N') && (cell[1] == 'a' || cell[1] == 'A');
  }
  if (cell.size() == 3) {
    return (cell[0] == 'n' || cell[0] == 'N') &&
           (cell[1] == 'a' || cell[1] == 'A') &&
           (cell[2] == 'n' || cell[2] == 'N');
  }
  return false;
}

double parse_double_cell(const std::string& cell, const std::string& col) {
  double out = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last) {
    throw ParseError("CSV: cannot parse numeric cell '" + cell +
                     "' in column '" + col + "'");
  }
  if (!std::isfinite(out)) {
    throw ParseError("CSV: non-finite numeric cell in column '" + col + "'");
  }
  return out;
}

std::string format_double_cell(double v) {
  // Shortest representation that round-trips exactly.
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw NumericError("to_chars failed");
  return std::string(buf, ptr);
}

bool needs_quoting(const std::string& field) {
  return field.find_first_of(",\"\r\n") != std::string::npos;
}

void append_csv_field(std::string& out, const std::string& field) {
  if (!needs_quoting(field)) {
    out += field;
    return;
  }
  out.push_back('"');
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
}

}  // namespace

DataTable parse_csv(const std::string& content,
                    const std::vector<ColumnSchema>& schema) {
  if (schema.empty()) throw SchemaError("parse_csv: empty schema");
  const auto records = split_csv(content);
  if (records.empty()) throw ParseError("CSV: missing header row");
  const std::vector<std::string>& header = records.front();
  if (header.size() != schema.size()) {
    throw SchemaError("CSV: header has " + std::to_string(header.size()) +
                      " columns, schema expects " +
                      std::to_string(schema.size()));
  }
  for (std::size_t j = 0; j < schema.size(); ++j) {
    if (header[j] != schema[j].name) {
      throw SchemaError("CSV: header column '" + header[j] +
                        "' does not match schema column '" + schema[j].name +
                        "'");
    }
  }

  const std::size_t n = records.size() - 1;
  const std::size_t d = schema.size();
  std::vector<ColumnSchema> out_schema = schema;
  // Level lookup per column; nominal columns with no pinned levels discover
  // them in first-occurrence order.
  std::vector<std::unordered_map<std::string, int>> level_index(d);
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t l = 0; l < schema[j].levels.size(); ++l) {
      level_index[j].emplace(schema[j].levels[l], static_cast<int>(l));
    }
  }

  Matrix values = Matrix::Zero(static_cast<Index>(n), static_cast<Index>(d));
  MaskArray missing =
      MaskArray::Constant(static_cast<Index>(n), static_cast<Index>(d), false);
  std::vector<std::vector<std::string>> text(d);
  for (std::size_t j = 0; j < d; ++j) {
    if (schema[j].kind == ColumnKind::text) text[j].resize(n);
  }
  std::vector<std::int64_t> row_ids(n);

  for (std::size_t i = 0; i < n; ++i) {
    const std::vector<std::string>& record = records[i + 1];
    if (record.size() != d) {
      throw ParseError("CSV: row " + std::to_string(i + 1) + " has " +
                       std::to_string(record.size()) + " fields, expected " +
                       std::to_string(d));
    }
    row_ids[i] = static_cast<std::int64_t>(i);
    for (std::size_t j = 0; j < d; ++j) {
      const std::string& cell = record[j];
      const Index r = static_cast<Index>(i);
      const Index c = static_cast<Index>(j);
      if (is_missing_token(cell)) {
        missing(r, c) = true;
        continue;
      }
      switch (schema[j].kind) {
        case ColumnKind::numeric:
          values(r, c) = parse_double_cell(cell, schema[j].name);
          break;
        case ColumnKind::binary: {
          if (cell == "0") {
            values(r, c) = 0.0;
          } else if (cell == "1") {
            values(r, c) = 1.0;
          } else {
            throw ParseError("CSV: binary column '" + schema[j].name +
                             "' holds '" + cell + "'");
          }
          break;
        }
        case ColumnKind::ordinal:
        case ColumnKind::nominal: {
          auto it = level_index[j].find(cell);
          if (it == level_index[j].end()) {
            const bool discoverable = schema[j].kind == ColumnKind::nominal &&
                                      schema[j].levels.empty();
            if (!discoverable) {
              throw ParseError("CSV: unknown level '" + cell +
                               "' in column '" + schema[j].name + "'");
            }
            const int idx = static_cast<int>(out_schema[j].levels.size());
            out_schema[j].levels.push_back(cell);
            it = level_index[j].emplace(cell, idx).first;
          }
          values(r, c) = static_cast<double>(it->second);
          break;
        }
        case ColumnKind::text:
          text[j][i] = cell;
          break;
      }
    }
  }
  return DataTable(std::move(out_schema), std::move(values),
                   std::move(missing), std::move(text), std::move(row_ids));
}

DataTable read_csv(const std::string& path,
                   const std::vector<ColumnSchema>& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_csv(buffer.str(), schema);
}

std::string format_csv(const DataTable& table) {
  std::string out;
  const auto& schema = table.schema();
  for (std::size_t j = 0; j < schema.size(); ++j) {
    if (j) out.push_back(',');
    append_csv_field(out, schema[j].name);
  }
  out.push_back('\n');
  for (Index i = 0; i < table.n_rows(); ++i) {
    for (Index j = 0; j < table.n_cols(); ++j) {
      if (j) out.push_back(',');
      if (table.is_missing(i, j)) continue;  // missing -> empty field
      const ColumnSchema& col = schema[static_cast<std::size_t>(j)];
      switch (col.kind) {
        case ColumnKind::numeric:
          append_csv_field(out, format_double_cell(table.value(i, j)));
          break;
        case ColumnKind::binary:
          out += table.value(i, j) == 0.0 ? "0" : "1";
          break;
        case ColumnKind::ordinal:
        case ColumnKind::nominal:
          append_csv_field(
              out, col.levels[static_cast<std::size_t>(table.value(i, j))]);
          break;
        case ColumnKind::text:
          append_csv_field(out, table.text_value(i, j));
          break;
      }
    }
    out.push_back('\n');
  }
  return out;
}

void write_csv(const DataTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << format_csv(table);
  if (!out) throw IoError("failed writing '" + path + "'");
}

// --- Dataset assembly ----------------------------------------------------

namespace {

std::string renamed(const std::map<std::string, std::string>& rename,
                    const std::string& name) {
  const auto it = rename.find(name);
  return it == rename.end() ? name : it->second;
}

}  // namespace

DataTable harmonize(const std::vector<DataTable>& tables,
                    const std::map<std::string, std::string>& rename) {
  if (tables.empty()) throw DegenerateInputError("harmonize: no tables");

  // Canonical name -> column index per table, after renaming.
  std::vector<std::unordered_map<std::string, Index>> name_to_col(tables.size());
  for (std::size_t t = 0; t < tables.size(); ++t) {
    for (Index j = 0; j < tables[t].n_cols(); ++j) {
      const std::string canon =
          renamed(rename, tables[t].schema()[static_cast<std::size_t>(j)].name);
      if (!name_to_col[t].emplace(canon, j).second) {
        throw HarmonizationError("harmonize: renaming collides on '" + canon +
                                 "' in table " + std::to_string(t));
      }
    }
  }

  // Shared columns, in the first table's order.
  std::vector<std::string> shared;
  for (Index j = 0; j < tables[0].n_cols(); ++j) {
    const std::string canon =
        renamed(rename, tables[0].schema()[static_cast<std::size_t>(j)].name);
    bool everywhere = true;
    for (std::size_t t = 1; t < tables.size(); ++t) {
      if (!name_to_col[t].count(canon)) { everywhere = false; break; }
    }
    if (everywhere) shared.push_back(canon);
  }
  if (shared.empty()) {
    throw HarmonizationError("harmonize: tables share no columns");
  }

  // Validate kinds and levels; build per-table level remaps for nominals.
  const std::size_t d = shared.size();
  std::vector<ColumnSchema> schema(d);
  // remap[t][c][level_in_t] -> level index in output schema
  std::vector<std::vector<std::vector<int>>> remap(
      tables.size(), std::vector<std::vector<int>>(d));
  for (std::size_t c = 0; c < d; ++c) {
    const Index j0 = name_to_col[0].at(shared[c]);
    ColumnSchema out = tables[0].schema()[static_cast<std::size_t>(j0)];
    out.name = shared[c];
    for (std::size_t t = 1; t < tables.size(); ++t) {
      const Index jt = name_to_col[t].at(shared[c]);
      const ColumnSchema& other = tables[t].schema()[static_cast<std::size_t>(jt)];
      if (other.kind != out.kind) {
        throw HarmonizationError("harmonize: column '" + shared[c] +
                                 "' has kind " + column_kind_name(other.kind) +
                                 " in table " + std::to_string(t) + " but " +
                                 column_kind_name(out.kind) + " in table 0");
      }
      if (out.kind == ColumnKind::ordinal && other.levels != out.levels) {
        throw HarmonizationError("harmonize: ordinal column '" + shared[c] +
                                 "' has mismatched level order");
      }
      if (out.kind == ColumnKind::nominal) {
        // Level sets must agree; order may differ and is remapped.
        std::unordered_map<std::string, int> canon_index;
        for (std::size_t l = 0; l < out.levels.size(); ++l) {
          canon_index.emplace(out.levels[l], static_cast<int>(l));
        }
        if (other.levels.size() != out.levels.size()) {
          throw HarmonizationError("harmonize: nominal column '" + shared[c] +
                                   "' has mismatched level sets");
        }
        std::vector<int> m(other.levels.size());
        for (std::size_t l = 0; l < other.levels.size(); ++l) {
          const auto it = canon_index.find(other.levels[l]);
          if (it == canon_index.end()) {
            throw HarmonizationError("harmonize: nominal column '" + shared[c] +
                                     "' has level '" + other.levels[l] +
                                     "' absent from table 0");
          }
          m[l] = it->second;
        }
        remap[t][c] = std::move(m);
      }
    }
    schema[c] = std::move(out);
  }

  Index total_rows = 0;
  for (const DataTable& t : tables) total_rows += t.n_rows();

  Matrix values = Matrix::Zero(total_rows, static_cast<Index>(d));
  MaskArray missing =
      MaskArray::Constant(total_rows, static_cast<Index>(d), false);
  std::vector<std::vector<std::string>> text(d);
  for (std::size_t c = 0; c < d; ++c) {
    if (schema[c].kind == ColumnKind::text) {
      text[c].resize(static_cast<std::size_t>(total_rows));
    }
  }
  std::vector<std::int64_t> row_ids(static_cast<std::size_t>(total_rows));

  Index row = 0;
  for (std::size_t t = 0; t < tables.size(); ++t) {
    const DataTable& table = tables[t];
    for (Index i = 0; i < table.n_rows(); ++i, ++row) {
      row_ids[static_cast<std::size_t>(row)] = row;
      for (std::size_t c = 0; c < d; ++c) {
        const Index jt = name_to_col[t].at(shared[c]);
        const Index oc = static_cast<Index>(c);
        if (table.is_missing(i, jt)) {
          missing(row, oc) = true;
          continue;
        }
        double v = table.value(i, jt);
        if (!remap[t][c].empty()) {
          v = static_cast<double>(remap[t][c][static_cast<std::size_t>(v)]);
        }
        values(row, oc) = v;
        if (schema[c].kind == ColumnKind::text) {
          text[c][static_cast<std::size_t>(row)] = table.text_value(i, jt);
        }
      }
    }
  }
  return DataTable(std::move(schema), std::move(values), std::move(missing),
                   std::move(text), std::move(row_ids));
}

DataTable deduplicate(const DataTable& table) {
  std::unordered_set<std::string> seen;
  IndexList keep;
  std::string key;
  for (Index i = 0; i < table.n_rows(); ++i) {
    key.clear();
    for (Index j = 0; j < table.n_cols(); ++j) {
      if (table.is_missing(i, j)) {
        key.push_back('M');
        continue;
      }
      key.push_back('V');
      if (table.schema()[static_cast<std::size_t>(j)].kind == ColumnKind::text) {
        const std::string& s = table.text_value(i, j);
        const std::size_t len = s.size();
        key.append(reinterpret_cast<const char*>(&len), sizeof(len));
        key.append(s);
      } else {
        const double v = table.value(i, j);
        key.append(reinterpret_cast<const char*>(&v), sizeof(v));
      }
    }
    if (seen.insert(key).second) keep.push_back(i);
  }
  return table.select_rows(keep);
}

std::pair<DataTable, std::vector<std::string>> drop_high_missingness(
    const DataTable& table, double threshold) {
  if (table.n_rows() == 0) {
    throw DegenerateInputError("drop_high_missingness: empty table");
  }
  if (threshold < 0.0 || threshold > 1.0) {
    throw ParameterError("drop_high_missingness: threshold outside [0, 1]");
  }
  std::vector<Index> keep;
  std::vector<std::string> dropped;
  for (Index j = 0; j < table.n_cols(); ++j) {
    if (table.column_missing_rate(j) > threshold) {
      dropped.push_back(table.schema()[static_cast<std::size_t>(j)].name);
    } else {
      keep.push_back(j);
    }
  }
  if (keep.empty()) {
    throw DegenerateInputError(
        "drop_high_missingness: every column exceeds the threshold");
  }
  return {table.select_columns(keep), std::move(dropped)};
}

}  // namespace triboost::data
