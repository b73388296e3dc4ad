// SPDX-License-Identifier: Apache-2.0
#include "kernelcast/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "kernelcast/error.hpp"
#include "kernelcast/random.hpp"

namespace kernelcast {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::string column_label(const CsvTable& table, std::size_t col) {
  std::string out = std::to_string(col + 1);
  if (col < table.header.size() && !table.header[col].empty()) out += " ('" + table.header[col] + "')";
  return out;
}

}  // namespace

std::vector<std::size_t> Dataset::class_counts() const {
  std::vector<std::size_t> counts(n_classes(), 0);
  for (LabelId y : labels) ++counts[y];
  return counts;
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Dataset out;
  out.features = features.select_rows(rows);
  out.labels.reserve(rows.size());
  for (std::size_t r : rows) out.labels.push_back(labels[r]);
  out.label_names = label_names;
  return out;
}

void validate(const Dataset& ds) {
  if (ds.labels.size() != ds.size()) {
    throw Error(ErrorCode::dimension_mismatch, "label count " + std::to_string(ds.labels.size()) +
                                                   " does not match sample count " +
                                                   std::to_string(ds.size()));
  }
  for (std::size_t i = 0; i < ds.labels.size(); ++i) {
    if (ds.labels[i] >= ds.n_classes()) {
      throw Error(ErrorCode::invalid_argument,
                  "label id " + std::to_string(ds.labels[i]) + " at row " + std::to_string(i) +
                      " is outside the vocabulary");
    }
  }
  for (double v : ds.features.data()) {
    if (!std::isfinite(v)) throw Error(ErrorCode::invalid_argument, "dataset contains a non-finite value");
  }
}

std::size_t CsvTable::cols() const noexcept {
  if (!header.empty()) return header.size();
  return rows.empty() ? 0 : rows.front().size();
}

CsvTable parse_csv(std::string_view text, bool has_header) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::size_t> record_lines;

  std::vector<std::string> fields;
  std::string field;
  bool in_quotes = false;
  bool field_quoted = false;
  bool record_has_content = false;
  std::size_t line = 1;
  std::size_t record_line = 1;

  auto end_field = [&] {
    fields.push_back(field_quoted ? field : std::string(trim(field)));
    field.clear();
    field_quoted = false;
  };
  auto end_record = [&] {
    end_field();
    const bool blank = fields.size() == 1 && fields.front().empty() && !record_has_content;
    if (!blank) {
      records.push_back(std::move(fields));
      record_lines.push_back(record_line);
    }
    fields.clear();
    record_has_content = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!trim(field).empty()) {
          throw Error(ErrorCode::parse, "line " + std::to_string(line) + ": quote inside an unquoted field");
        }
        field.clear();
        in_quotes = true;
        field_quoted = true;
        record_has_content = true;
        break;
      case ',':
        end_field();
        record_has_content = true;
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') break;
        [[fallthrough]];
      case '\n':
        end_record();
        ++line;
        record_line = line;
        break;
      default:
        field.push_back(c);
        if (c != ' ' && c != '\t') record_has_content = true;
    }
  }
  if (in_quotes) throw Error(ErrorCode::parse, "unterminated quoted field at end of input");
  if (!field.empty() || !fields.empty() || record_has_content) end_record();

  CsvTable table;
  std::size_t first = 0;
  if (has_header) {
    if (records.empty()) throw Error(ErrorCode::parse, "missing header row");
    table.header = std::move(records.front());
    first = 1;
  }
  const std::size_t width = has_header ? table.header.size() : (records.empty() ? 0 : records.front().size());
  for (std::size_t r = first; r < records.size(); ++r) {
    if (records[r].size() != width) {
      throw Error(ErrorCode::parse, "line " + std::to_string(record_lines[r]) + ": expected " +
                                        std::to_string(width) + " fields, found " +
                                        std::to_string(records[r].size()));
    }
    table.rows.push_back(std::move(records[r]));
    table.lines.push_back(record_lines[r]);
  }
  return table;
}

CsvTable read_csv(const std::filesystem::path& path, bool has_header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  std::string text = buffer.str();
  if (text.starts_with("\xEF\xBB\xBF")) text.erase(0, 3);
  return parse_csv(text, has_header);
}

std::size_t resolve_column(const CsvTable& table, std::string_view spec) {
  const std::size_t width = table.cols();
  if (width == 0) throw Error(ErrorCode::invalid_argument, "table has no columns");
  if (spec.empty()) return width - 1;
  for (std::size_t j = 0; j < table.header.size(); ++j) {
    if (table.header[j] == spec) return j;
  }
  std::size_t index = 0;
  const auto [ptr, ec] = std::from_chars(spec.data(), spec.data() + spec.size(), index);
  if (ec == std::errc() && ptr == spec.data() + spec.size()) {
    if (index < width) return index;
  }
  throw Error(ErrorCode::invalid_argument, "column '" + std::string(spec) + "' not found");
}

Matrix parse_features(const CsvTable& table, std::optional<std::size_t> skip) {
  const std::size_t width = table.cols();
  const std::size_t out_cols = width - (skip ? 1 : 0);
  Matrix out(table.rows.size(), out_cols);
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    std::size_t c = 0;
    for (std::size_t j = 0; j < width; ++j) {
      if (skip && j == *skip) continue;
      std::string_view cell = trim(table.rows[r][j]);
      if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
      double value = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
      const std::string where = "line " + std::to_string(table.lines[r]) + ", column " + column_label(table, j);
      if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size()) {
        throw Error(ErrorCode::parse, where + ": cannot parse '" + table.rows[r][j] + "' as a number");
      }
      if (!std::isfinite(value)) {
        throw Error(ErrorCode::parse, where + ": non-finite value '" + table.rows[r][j] + "'");
      }
      out(r, c++) = value;
    }
  }
  return out;
}

Dataset dataset_from_table(const CsvTable& table, std::size_t label_column) {
  if (label_column >= table.cols()) throw Error(ErrorCode::invalid_argument, "label column out of range");
  if (table.rows.size() < 2) {
    throw Error(ErrorCode::insufficient_data, "need at least 2 rows, found " + std::to_string(table.rows.size()));
  }
  if (table.cols() < 2) throw Error(ErrorCode::insufficient_data, "need at least one feature column");

  Dataset ds;
  ds.features = parse_features(table, label_column);
  std::unordered_map<std::string, LabelId> ids;
  ds.labels.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    const std::string& name = row[label_column];
    auto [it, inserted] = ids.try_emplace(name, static_cast<LabelId>(ds.label_names.size()));
    if (inserted) ds.label_names.push_back(name);
    ds.labels.push_back(it->second);
  }
  if (ds.n_classes() < 2) {
    throw Error(ErrorCode::insufficient_data, "need at least 2 classes, found " + std::to_string(ds.n_classes()));
  }
  return ds;
}

Dataset align_labels(const Dataset& ds, const std::vector<std::string>& vocabulary) {
  Dataset out;
  out.features = ds.features;
  out.label_names = vocabulary;
  std::unordered_map<std::string, LabelId> ids;
  for (std::size_t i = 0; i < vocabulary.size(); ++i) ids.emplace(vocabulary[i], static_cast<LabelId>(i));
  std::vector<LabelId> remap(ds.label_names.size());
  for (std::size_t c = 0; c < ds.label_names.size(); ++c) {
    auto [it, inserted] = ids.try_emplace(ds.label_names[c], static_cast<LabelId>(out.label_names.size()));
    if (inserted) out.label_names.push_back(ds.label_names[c]);
    remap[c] = it->second;
  }
  out.labels.reserve(ds.labels.size());
  for (LabelId y : ds.labels) out.labels.push_back(remap[y]);
  return out;
}

Dataset load_csv(const std::filesystem::path& path, std::string_view label_column, bool has_header) {
  const CsvTable table = read_csv(path, has_header);
  return dataset_from_table(table, resolve_column(table, label_column));
}

std::pair<Dataset, Dataset> stratified_split(const Dataset& ds, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw Error(ErrorCode::invalid_argument, "test fraction must lie in (0, 1)");
  }
  const auto counts = ds.class_counts();
  std::vector<std::vector<std::size_t>> members(ds.n_classes());
  for (std::size_t i = 0; i < ds.size(); ++i) members[ds.labels[i]].push_back(i);

  Rng rng(seed);
  std::vector<char> is_test(ds.size(), 0);
  for (std::size_t c = 0; c < members.size(); ++c) {
    if (counts[c] == 0) continue;
    if (counts[c] < 2) {
      throw Error(ErrorCode::insufficient_data,
                  "class '" + ds.label_names[c] + "' has a single sample and cannot be split");
    }
    auto& idx = members[c];
    shuffle(std::span(idx), rng);
    auto take = static_cast<std::size_t>(std::llround(static_cast<double>(counts[c]) * test_fraction));
    take = std::clamp<std::size_t>(take, 1, counts[c] - 1);
    for (std::size_t t = 0; t < take; ++t) is_test[idx[t]] = 1;
  }

  std::vector<std::size_t> train_rows, test_rows;
  for (std::size_t i = 0; i < ds.size(); ++i) (is_test[i] ? test_rows : train_rows).push_back(i);
  return {ds.subset(train_rows), ds.subset(test_rows)};
}

std::vector<std::size_t> FoldPlan::train_rows(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] != fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldPlan::test_rows(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] == fold) out.push_back(i);
  }
  return out;
}

FoldPlan make_folds(const Dataset& ds, std::size_t fold_count, std::uint64_t seed) {
  if (fold_count < 2) throw Error(ErrorCode::invalid_argument, "fold count must be at least 2");
  const auto counts = ds.class_counts();
  std::vector<std::vector<std::size_t>> members(ds.n_classes());
  for (std::size_t i = 0; i < ds.size(); ++i) members[ds.labels[i]].push_back(i);

  FoldPlan plan;
  plan.fold_count = fold_count;
  plan.assignments.assign(ds.size(), 0);
  Rng rng(seed);
  std::size_t dealt = 0;
  for (std::size_t c = 0; c < members.size(); ++c) {
    if (counts[c] == 0) continue;
    if (counts[c] < fold_count) {
      throw Error(ErrorCode::insufficient_data, "class '" + ds.label_names[c] + "' has " +
                                                    std::to_string(counts[c]) + " samples, fewer than " +
                                                    std::to_string(fold_count) + " folds");
    }
    auto& idx = members[c];
    shuffle(std::span(idx), rng);
    // Rotating the starting fold per class keeps overall fold sizes balanced.
    for (std::size_t j = 0; j < idx.size(); ++j) plan.assignments[idx[j]] = (dealt + j) % fold_count;
    dealt += idx.size();
  }
  return plan;
}

std::string_view to_string(ScalerKind kind) {
  switch (kind) {
    case ScalerKind::none: return "none";
    case ScalerKind::standardize: return "standardize";
    case ScalerKind::minmax: return "minmax";
    case ScalerKind::maxabs: return "maxabs";
  }
  return "none";
}

ScalerKind parse_scaler_kind(std::string_view name) {
  for (auto k : {ScalerKind::none, ScalerKind::standardize, ScalerKind::minmax, ScalerKind::maxabs}) {
    if (to_string(k) == name) return k;
  }
  throw Error(ErrorCode::invalid_argument, "unknown scaler '" + std::string(name) + "'");
}

ScalerSpec fit_scaler(ScalerKind kind, const Matrix& features) {
  ScalerSpec spec;
  spec.kind = kind;
  if (kind == ScalerKind::none) return spec;

  const std::size_t n = features.rows();
  const std::size_t d = features.cols();
  if (n == 0) throw Error(ErrorCode::insufficient_data, "cannot fit a scaler on an empty dataset");
  spec.offset.assign(d, 0.0);
  spec.scale.assign(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    switch (kind) {
      case ScalerKind::standardize: {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) sum += features(i, j);
        const double mean = sum / static_cast<double>(n);
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double dv = features(i, j) - mean;
          ss += dv * dv;
        }
        spec.offset[j] = mean;
        spec.scale[j] = std::sqrt(ss / static_cast<double>(n));
        break;
      }
      case ScalerKind::minmax: {
        double lo = features(0, j), hi = features(0, j);
        for (std::size_t i = 1; i < n; ++i) {
          lo = std::min(lo, features(i, j));
          hi = std::max(hi, features(i, j));
        }
        spec.offset[j] = lo;
        spec.scale[j] = hi - lo;
        break;
      }
      case ScalerKind::maxabs: {
        double m = 0.0;
        for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::fabs(features(i, j)));
        spec.scale[j] = m;
        break;
      }
      case ScalerKind::none: break;
    }
  }
  return spec;
}

Matrix apply_scaler(const ScalerSpec& spec, const Matrix& features) {
  if (spec.kind == ScalerKind::none) return features;
  if (features.cols() != spec.scale.size()) {
    throw Error(ErrorCode::dimension_mismatch, "scaler fitted on " + std::to_string(spec.scale.size()) +
                                                   " columns, data has " + std::to_string(features.cols()));
  }
  Matrix out(features.rows(), features.cols());
  for (std::size_t i = 0; i < features.rows(); ++i) {
    for (std::size_t j = 0; j < features.cols(); ++j) {
      out(i, j) = spec.scale[j] == 0.0 ? 0.0 : (features(i, j) - spec.offset[j]) / spec.scale[j];
    }
  }
  return out;
}

Dataset apply_scaler(const ScalerSpec& spec, const Dataset& ds) {
  Dataset out;
  out.features = apply_scaler(spec, ds.features);
  out.labels = ds.labels;
  out.label_names = ds.label_names;
  return out;
}

}  // namespace kernelcast
