// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kernelcast/matrix.hpp"

namespace kernelcast {

using LabelId = std::uint32_t;

/// Labeled sample matrix. Label ids index `label_names`, which keeps the
/// order in which labels first appeared in the source file.
struct Dataset {
  Matrix features;
  std::vector<LabelId> labels;
  std::vector<std::string> label_names;

  std::size_t size() const noexcept { return features.rows(); }
  std::size_t dims() const noexcept { return features.cols(); }
  std::size_t n_classes() const noexcept { return label_names.size(); }

  std::vector<std::size_t> class_counts() const;
  /// Rows in the given order; the label vocabulary is kept whole.
  Dataset subset(std::span<const std::size_t> rows) const;
};

/// Checks the Dataset invariants (finite features, label range, sizes).
void validate(const Dataset& ds);

/// Parsed CSV: optional header plus string cells.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  /// 1-based file line of each row, for error messages.
  std::vector<std::size_t> lines;

  std::size_t cols() const noexcept;
};

/// RFC 4180 reader: quoted fields, doubled quotes, CRLF or LF line ends.
/// Blank lines are skipped. All rows must have the same number of fields.
CsvTable read_csv(const std::filesystem::path& path, bool has_header);
CsvTable parse_csv(std::string_view text, bool has_header);

/// Resolves a column given by header name or by 0-based index. An empty spec
/// selects the last column.
std::size_t resolve_column(const CsvTable& table, std::string_view spec);

/// Converts every column except `skip` to doubles. Non-numeric and
/// non-finite cells raise a parse error naming the line and column.
Matrix parse_features(const CsvTable& table, std::optional<std::size_t> skip = std::nullopt);

/// Builds a Dataset from a parsed table, encoding labels by first appearance.
Dataset dataset_from_table(const CsvTable& table, std::size_t label_column);

/// Re-encodes labels against a given vocabulary. Labels missing from it are
/// appended in order of first appearance.
Dataset align_labels(const Dataset& ds, const std::vector<std::string>& vocabulary);

Dataset load_csv(const std::filesystem::path& path, std::string_view label_column = {},
                 bool has_header = true);

/// Per-class stratified train/test split. Each class contributes
/// round(count * test_fraction) test rows, clamped so both sides keep at
/// least one row of the class. Rows keep their original relative order.
std::pair<Dataset, Dataset> stratified_split(const Dataset& ds, double test_fraction,
                                             std::uint64_t seed);

struct FoldPlan {
  std::size_t fold_count = 0;
  std::vector<std::size_t> assignments;

  std::vector<std::size_t> train_rows(std::size_t fold) const;
  std::vector<std::size_t> test_rows(std::size_t fold) const;
};

/// Stratified folds: each class is shuffled and dealt round-robin, so every
/// (class, fold) count is floor or ceil of count / fold_count.
FoldPlan make_folds(const Dataset& ds, std::size_t fold_count, std::uint64_t seed);

enum class ScalerKind { none, standardize, minmax, maxabs };

std::string_view to_string(ScalerKind kind);
ScalerKind parse_scaler_kind(std::string_view name);

/// Column statistics learned on training data. The transform is
/// (x - offset) / scale per column; a zero scale marks a degenerate column,
/// which maps to 0. For standardize offset/scale are mean and population
/// std, for minmax min and range, for maxabs 0 and max |x|.
struct ScalerSpec {
  ScalerKind kind = ScalerKind::none;
  std::vector<double> offset;
  std::vector<double> scale;

  friend bool operator==(const ScalerSpec&, const ScalerSpec&) = default;
};

ScalerSpec fit_scaler(ScalerKind kind, const Matrix& features);
inline ScalerSpec fit_scaler(ScalerKind kind, const Dataset& ds) { return fit_scaler(kind, ds.features); }

Matrix apply_scaler(const ScalerSpec& spec, const Matrix& features);
Dataset apply_scaler(const ScalerSpec& spec, const Dataset& ds);

}  // namespace kernelcast
