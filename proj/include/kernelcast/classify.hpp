// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "kernelcast/data.hpp"
#include "kernelcast/geometry.hpp"
#include "kernelcast/kernelmap.hpp"
#include "kernelcast/matrix.hpp"

namespace kernelcast {

enum class Weighting { uniform, distance };

std::string_view to_string(Weighting w);
Weighting parse_weighting(std::string_view name);

struct KnnParams {
  std::size_t neighbors = 1;
  Weighting weighting = Weighting::uniform;
  DistanceKind distance = DistanceKind::euclidean;
  friend bool operator==(const KnnParams&, const KnnParams&) = default;
};

/// Offset in the 1/(eps + d) neighbor weight.
inline constexpr double knn_weight_epsilon = 1e-9;

struct KnnModel {
  KnnParams params;
  Matrix train;
  std::vector<LabelId> labels;
  std::size_t n_classes = 0;
  friend bool operator==(const KnnModel&, const KnnModel&) = default;
};

KnnModel knn_fit(const MappedDataset& mds, const KnnParams& params);
KnnModel knn_fit(Matrix train, std::vector<LabelId> labels, std::size_t n_classes, const KnnParams& params);
/// Neighbors ordered by (distance, row index); k is clamped to the stored
/// row count. Vote ties go to the lowest label id.
std::vector<LabelId> knn_predict(const KnnModel& model, const Matrix& queries);
LabelId knn_predict_one(const KnnModel& model, std::span<const double> query, std::vector<double>& scratch);

/// Gaussian naive Bayes. Classes absent from the training data are never
/// predicted.
struct GnbModel {
  std::vector<double> priors;  ///< per class, 0 for absent classes
  Matrix means;                ///< n_classes x features
  Matrix variances;            ///< n_classes x features, floored
  std::vector<char> present;
  double var_floor = 0.0;
  friend bool operator==(const GnbModel&, const GnbModel&) = default;

  std::size_t n_classes() const noexcept { return priors.size(); }
};

/// Variance floor relative to the mean column variance; an absolute floor of
/// the same value is used when every column is constant.
inline constexpr double gnb_var_smoothing = 1e-9;

GnbModel gnb_fit(const MappedDataset& mds);
GnbModel gnb_fit(const Matrix& train, std::span<const LabelId> labels, std::size_t n_classes);
/// argmax over present classes of log prior + sum of log normal densities.
std::vector<LabelId> gnb_predict(const GnbModel& model, const Matrix& queries);
/// Joint log likelihood per class (-inf for absent classes).
std::vector<double> gnb_log_scores(const GnbModel& model, std::span<const double> query);

}  // namespace kernelcast
