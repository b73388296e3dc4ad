// SPDX-License-Identifier: Apache-2.0
#include "kernelcast/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "kernelcast/error.hpp"
#include "kernelcast/simd/kernels.hpp"

namespace kernelcast {

std::string_view to_string(DistanceKind kind) {
  return kind == DistanceKind::angle ? "angle" : "euclidean";
}

DistanceKind parse_distance_kind(std::string_view name) {
  if (name == "euclidean") return DistanceKind::euclidean;
  if (name == "angle") return DistanceKind::angle;
  throw Error(ErrorCode::invalid_argument, "unknown distance '" + std::string(name) + "'");
}

double angle_from_products(double dot, double x_sq_norm, double c_sq_norm) {
  if (x_sq_norm == 0.0 || c_sq_norm == 0.0) return std::numbers::pi / 2.0;
  const double cosine = std::clamp(dot / std::sqrt(x_sq_norm * c_sq_norm), -1.0, 1.0);
  return std::acos(cosine);
}

double distance(DistanceKind kind, std::span<const double> x, std::span<const double> c) {
  if (x.size() != c.size()) {
    throw Error(ErrorCode::dimension_mismatch, "distance between vectors of dimension " +
                                                   std::to_string(x.size()) + " and " + std::to_string(c.size()));
  }
  const auto& k = simd::active_kernels();
  if (kind == DistanceKind::euclidean) return std::sqrt(k.squared_l2(x.data(), c.data(), x.size()));
  return angle_from_products(k.dot(x.data(), c.data(), x.size()), k.dot(x.data(), x.data(), x.size()),
                             k.dot(c.data(), c.data(), c.size()));
}

std::vector<double> centroid(const Matrix& points) {
  if (points.empty()) throw Error(ErrorCode::invalid_argument, "centroid of an empty set");
  std::vector<double> out(points.cols(), 0.0);
  for (std::size_t i = 0; i < points.rows(); ++i) {
    auto r = points.row(i);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += r[j];
  }
  for (double& v : out) v /= static_cast<double>(points.rows());
  return out;
}

std::vector<double> centroid(const Matrix& points, std::span<const std::size_t> rows) {
  if (rows.empty()) throw Error(ErrorCode::invalid_argument, "centroid of an empty set");
  std::vector<double> out(points.cols(), 0.0);
  for (std::size_t i : rows) {
    auto r = points.row(i);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += r[j];
  }
  for (double& v : out) v /= static_cast<double>(rows.size());
  return out;
}

RowDistances::RowDistances(DistanceKind kind, const Matrix& rows) : kind_(kind), rows_(&rows) {
  if (kind_ == DistanceKind::angle) {
    const auto& k = simd::active_kernels();
    sq_norms_.resize(rows.rows());
    for (std::size_t i = 0; i < rows.rows(); ++i) {
      auto r = rows.row(i);
      sq_norms_[i] = k.dot(r.data(), r.data(), r.size());
    }
  }
}

void RowDistances::compute(std::span<const double> x, std::span<double> out) const {
  const std::size_t dim = rows_->cols();
  if (x.size() != dim) {
    throw Error(ErrorCode::dimension_mismatch, "query has dimension " + std::to_string(x.size()) +
                                                   ", references have " + std::to_string(dim));
  }
  const auto& k = simd::active_kernels();
  const std::size_t count = rows_->rows();
  if (kind_ == DistanceKind::euclidean) {
    k.squared_l2_rows(x.data(), rows_->raw(), count, dim, out.data());
    for (std::size_t i = 0; i < count; ++i) out[i] = std::sqrt(out[i]);
  } else {
    k.dot_rows(x.data(), rows_->raw(), count, dim, out.data());
    const double x_sq = k.dot(x.data(), x.data(), dim);
    for (std::size_t i = 0; i < count; ++i) out[i] = angle_from_products(out[i], x_sq, sq_norms_[i]);
  }
}

Nearest RowDistances::nearest(std::span<const double> x, std::span<double> scratch) const {
  if (size() == 0) throw Error(ErrorCode::invalid_argument, "nearest reference in an empty set");
  compute(x, scratch);
  Nearest best{0, scratch[0]};
  for (std::size_t i = 1; i < size(); ++i) {
    if (scratch[i] < best.distance) best = {i, scratch[i]};
  }
  return best;
}

Nearest nearest_reference(DistanceKind kind, std::span<const double> x, const Matrix& refs) {
  if (refs.empty()) throw Error(ErrorCode::invalid_argument, "nearest reference in an empty set");
  RowDistances scan(kind, refs);
  std::vector<double> scratch(refs.rows());
  return scan.nearest(x, scratch);
}

}  // namespace kernelcast
