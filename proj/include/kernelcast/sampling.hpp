// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "kernelcast/geometry.hpp"
#include "kernelcast/matrix.hpp"

namespace kernelcast {

enum class SamplerKind { random, kmeans, density, fft };
enum class RefType { centers, centroids };

std::string_view to_string(SamplerKind kind);
std::string_view to_string(RefType type);
SamplerKind parse_sampler_kind(std::string_view name);
RefType parse_ref_type(std::string_view name);

/// The references R that span the kernelized space, one scale per reference.
struct ReferenceSet {
  Matrix refs;                 ///< k x d
  std::vector<double> sigmas;  ///< k, all finite and > 0
  SamplerKind sampler = SamplerKind::random;
  DistanceKind distance = DistanceKind::euclidean;
  RefType ref_type = RefType::centers;

  std::size_t size() const noexcept { return refs.rows(); }
  friend bool operator==(const ReferenceSet&, const ReferenceSet&) = default;
};

/// Index of each sample's reference (nearest, or the removal batch for the
/// density sampler).
struct RegionAssignment {
  std::vector<std::size_t> region_of;
};

/// Nearest-reference (Voronoi) assignment of every row; ties to the lowest
/// reference index. Also returns each row's distance to its reference.
RegionAssignment assign_regions(const Matrix& data, const Matrix& refs, DistanceKind kind,
                                std::vector<double>* distances = nullptr);

/// k distinct row indices, uniform without replacement.
std::vector<std::size_t> sample_random(const Matrix& data, std::size_t k, std::uint64_t seed);

struct KmeansResult {
  Matrix centroids;
  RegionAssignment assignment;
  /// Inertia after each assignment step, first entry from the seeding.
  std::vector<double> inertia_history;
  std::size_t iterations = 0;
  bool converged = false;
};

/// k-means++ seeding, then Lloyd iterations until the assignment stops
/// changing or max_iters assignment steps have run. An emptied cluster is
/// reseeded at the point farthest from its current centroid.
KmeansResult kmeans(const Matrix& data, std::size_t k, std::uint64_t seed, std::size_t max_iters = 100);

/// K-Means references: always euclidean centroids.
ReferenceSet sample_kmeans(const Matrix& data, std::size_t k, std::uint64_t seed,
                           std::size_t max_iters = 100);

struct DensityResult {
  std::vector<std::size_t> centers;
  RegionAssignment regions;
  std::size_t region_size = 0;  ///< ceil(n / k)
};

/// Density net: repeatedly draw a random remaining row and remove it along
/// with its region_size - 1 nearest remaining rows, until no rows remain.
/// Yields ceil(n / region_size) <= k centers.
DensityResult sample_density(const Matrix& data, std::size_t k, DistanceKind kind, std::uint64_t seed);

struct FftResult {
  std::vector<std::size_t> centers;
  /// d_min of each center at the moment it was picked (none for the first).
  std::vector<double> selection_radii;
  /// Last selection radius; NaN when k == 1.
  double last_radius = 0.0;
};

/// Farthest-first traversal starting from a uniformly random row.
FftResult sample_fft(const Matrix& data, std::size_t k, DistanceKind kind, std::uint64_t seed);
/// Same, starting from a given row. argmax ties go to the lowest row index.
FftResult sample_fft_from(const Matrix& data, std::size_t k, DistanceKind kind, std::size_t first);

enum class SigmaRule {
  per_region,  ///< max distance from the reference to the rows of its region
  fft_radius,  ///< the final farthest-first radius for every reference
};

/// Turns picked rows into a ReferenceSet. For centroids, each pick is
/// replaced by the mean of its Voronoi region over all of `data`. Zero or
/// non-finite sigmas are replaced by the mean of the positive ones, or 1.
ReferenceSet finalize_references(const Matrix& data, std::span<const std::size_t> picks, RefType ref_type,
                                 DistanceKind kind, SamplerKind sampler,
                                 SigmaRule rule = SigmaRule::per_region, double fft_radius = 0.0);

/// Per-region sigma for arbitrary references, before the degenerate fix.
std::vector<double> region_sigmas(const Matrix& data, const Matrix& refs, DistanceKind kind);
/// Applies the degenerate-sigma replacement in place.
void repair_sigmas(std::vector<double>& sigmas);

/// Runs the configured sampler. K-Means requires euclidean centroids.
ReferenceSet select_references(const Matrix& data, SamplerKind sampler, std::size_t k, DistanceKind kind,
                               RefType ref_type, std::uint64_t seed);

}  // namespace kernelcast
