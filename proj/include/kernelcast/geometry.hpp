// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "kernelcast/matrix.hpp"

namespace kernelcast {

enum class DistanceKind { euclidean, angle };

std::string_view to_string(DistanceKind kind);
DistanceKind parse_distance_kind(std::string_view name);

/// euclidean: sqrt(sum (x_i - c_i)^2).
/// angle: arccos of the cosine similarity clamped to [-1, 1], in [0, pi].
/// The angle between a zero vector and anything is defined as pi/2.
double distance(DistanceKind kind, std::span<const double> x, std::span<const double> c);

/// Angle from precomputed dot product and squared norms. Shared by the single
/// and batched paths so both produce identical bits.
double angle_from_products(double dot, double x_sq_norm, double c_sq_norm);

/// Coordinate-wise mean of all rows, or of the given rows.
std::vector<double> centroid(const Matrix& points);
std::vector<double> centroid(const Matrix& points, std::span<const std::size_t> rows);

struct Nearest {
  std::size_t index = 0;
  double distance = 0.0;
};

/// Distances from one query to every row of a fixed reference matrix.
/// Caches reference norms for the angle distance. Values match distance()
/// bit for bit.
class RowDistances {
 public:
  RowDistances(DistanceKind kind, const Matrix& rows);

  void compute(std::span<const double> x, std::span<double> out) const;
  /// argmin over rows; ties go to the lowest index.
  Nearest nearest(std::span<const double> x, std::span<double> scratch) const;

  DistanceKind kind() const noexcept { return kind_; }
  std::size_t size() const noexcept { return rows_->rows(); }

 private:
  DistanceKind kind_;
  const Matrix* rows_;
  std::vector<double> sq_norms_;
};

Nearest nearest_reference(DistanceKind kind, std::span<const double> x, const Matrix& refs);

}  // namespace kernelcast
