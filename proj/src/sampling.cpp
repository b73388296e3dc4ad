// SPDX-License-Identifier: Apache-2.0
#include "kernelcast/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "kernelcast/error.hpp"
#include "kernelcast/random.hpp"
#include "kernelcast/simd/kernels.hpp"

namespace kernelcast {
namespace {

void check_k(std::size_t k, std::size_t n) {
  if (k == 0) throw Error(ErrorCode::invalid_argument, "number of references must be positive");
  if (k > n) {
    throw Error(ErrorCode::insufficient_data, "requested " + std::to_string(k) + " references from " +
                                                  std::to_string(n) + " samples");
  }
}

// Squared euclidean distance of every row to every centroid, nearest kept.
double assign_squared(const Matrix& data, const Matrix& centroids, std::vector<std::size_t>& region,
                      std::vector<double>& sq_dist) {
  const auto& kern = simd::active_kernels();
  std::vector<double> row_dist(centroids.rows());
  double inertia = 0.0;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    kern.squared_l2_rows(data.row(i).data(), centroids.raw(), centroids.rows(), data.cols(), row_dist.data());
    std::size_t best = 0;
    for (std::size_t j = 1; j < row_dist.size(); ++j) {
      if (row_dist[j] < row_dist[best]) best = j;
    }
    region[i] = best;
    sq_dist[i] = row_dist[best];
    inertia += row_dist[best];
  }
  return inertia;
}

}  // namespace

std::string_view to_string(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::random: return "random";
    case SamplerKind::kmeans: return "kmeans";
    case SamplerKind::density: return "density";
    case SamplerKind::fft: return "fft";
  }
  return "random";
}

std::string_view to_string(RefType type) { return type == RefType::centroids ? "centroids" : "centers"; }

SamplerKind parse_sampler_kind(std::string_view name) {
  for (auto k : {SamplerKind::random, SamplerKind::kmeans, SamplerKind::density, SamplerKind::fft}) {
    if (to_string(k) == name) return k;
  }
  throw Error(ErrorCode::invalid_argument, "unknown sampler '" + std::string(name) + "'");
}

RefType parse_ref_type(std::string_view name) {
  if (name == "centers") return RefType::centers;
  if (name == "centroids") return RefType::centroids;
  throw Error(ErrorCode::invalid_argument, "unknown reference type '" + std::string(name) + "'");
}

RegionAssignment assign_regions(const Matrix& data, const Matrix& refs, DistanceKind kind,
                                std::vector<double>* distances) {
  RowDistances scan(kind, refs);
  std::vector<double> scratch(refs.rows());
  RegionAssignment out;
  out.region_of.resize(data.rows());
  if (distances != nullptr) distances->resize(data.rows());
  for (std::size_t i = 0; i < data.rows(); ++i) {
    const Nearest nn = scan.nearest(data.row(i), scratch);
    out.region_of[i] = nn.index;
    if (distances != nullptr) (*distances)[i] = nn.distance;
  }
  return out;
}

std::vector<std::size_t> sample_random(const Matrix& data, std::size_t k, std::uint64_t seed) {
  const std::size_t n = data.rows();
  check_k(k, n);
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(uniform_index(rng, n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  return idx;
}

KmeansResult kmeans(const Matrix& data, std::size_t k, std::uint64_t seed, std::size_t max_iters) {
  const std::size_t n = data.rows();
  const std::size_t d = data.cols();
  check_k(k, n);
  const auto& kern = simd::active_kernels();
  Rng rng(seed);

  // k-means++ seeding.
  Matrix centroids(k, d);
  std::vector<double> nearest_sq(n);
  {
    const std::size_t first = static_cast<std::size_t>(uniform_index(rng, n));
    std::copy(data.row(first).begin(), data.row(first).end(), centroids.row(0).begin());
    kern.squared_l2_rows(data.row(first).data(), data.raw(), n, d, nearest_sq.data());
    std::vector<double> fresh(n);
    for (std::size_t c = 1; c < k; ++c) {
      double total = 0.0;
      for (double v : nearest_sq) total += v;
      std::size_t pick = 0;
      if (total > 0.0) {
        const double u = uniform_unit(rng) * total;
        double acc = 0.0;
        std::size_t last_positive = 0;
        bool found = false;
        for (std::size_t i = 0; i < n; ++i) {
          if (nearest_sq[i] <= 0.0) continue;
          last_positive = i;
          acc += nearest_sq[i];
          if (acc > u) {
            pick = i;
            found = true;
            break;
          }
        }
        if (!found) pick = last_positive;
      } else {
        pick = static_cast<std::size_t>(uniform_index(rng, n));
      }
      std::copy(data.row(pick).begin(), data.row(pick).end(), centroids.row(c).begin());
      kern.squared_l2_rows(data.row(pick).data(), data.raw(), n, d, fresh.data());
      for (std::size_t i = 0; i < n; ++i) nearest_sq[i] = std::min(nearest_sq[i], fresh[i]);
    }
  }

  KmeansResult result;
  std::vector<std::size_t> region(n, 0), previous;
  std::vector<double> sq_dist(n, 0.0);
  for (;;) {
    const double inertia = assign_squared(data, centroids, region, sq_dist);
    result.inertia_history.push_back(inertia);
    ++result.iterations;
    if (region == previous) {
      result.converged = true;
      break;
    }
    if (result.iterations >= max_iters) break;
    previous = region;

    // Update step.
    Matrix next(k, d, 0.0);
    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      auto dst = next.row(region[i]);
      auto src = data.row(i);
      for (std::size_t j = 0; j < d; ++j) dst[j] += src[j];
      ++sizes[region[i]];
    }
    std::vector<char> taken(n, 0);
    for (std::size_t c = 0; c < k; ++c) {
      auto dst = next.row(c);
      if (sizes[c] > 0) {
        for (double& v : dst) v /= static_cast<double>(sizes[c]);
        continue;
      }
      // Empty cluster: move it onto the point farthest from its centroid.
      std::size_t far = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (taken[i]) continue;
        if (far == n || sq_dist[i] > sq_dist[far]) far = i;
      }
      taken[far] = 1;
      std::copy(data.row(far).begin(), data.row(far).end(), dst.begin());
    }
    centroids = std::move(next);
  }

  result.centroids = std::move(centroids);
  result.assignment.region_of = std::move(region);
  return result;
}

ReferenceSet sample_kmeans(const Matrix& data, std::size_t k, std::uint64_t seed, std::size_t max_iters) {
  KmeansResult km = kmeans(data, k, seed, max_iters);
  ReferenceSet out;
  out.sigmas = region_sigmas(data, km.centroids, DistanceKind::euclidean);
  repair_sigmas(out.sigmas);
  out.refs = std::move(km.centroids);
  out.sampler = SamplerKind::kmeans;
  out.distance = DistanceKind::euclidean;
  out.ref_type = RefType::centroids;
  return out;
}

DensityResult sample_density(const Matrix& data, std::size_t k, DistanceKind kind, std::uint64_t seed) {
  const std::size_t n = data.rows();
  check_k(k, n);
  DensityResult out;
  out.region_size = (n + k - 1) / k;
  out.regions.region_of.assign(n, 0);

  Rng rng(seed);
  RowDistances scan(kind, data);
  std::vector<double> dist(n);
  std::vector<std::size_t> remaining(n);
  std::iota(remaining.begin(), remaining.end(), 0);

  while (!remaining.empty()) {
    const std::size_t center = remaining[uniform_index(rng, remaining.size())];
    scan.compute(data.row(center), dist);
    const std::size_t take = std::min(out.region_size, remaining.size());
    // Center first, then nearest remaining rows; distance ties by row index.
    auto closer = [&](std::size_t a, std::size_t b) {
      if (a == center || b == center) return a == center && b != center;
      if (dist[a] != dist[b]) return dist[a] < dist[b];
      return a < b;
    };
    std::partial_sort(remaining.begin(), remaining.begin() + static_cast<std::ptrdiff_t>(take), remaining.end(),
                      closer);
    const std::size_t region = out.centers.size();
    for (std::size_t t = 0; t < take; ++t) out.regions.region_of[remaining[t]] = region;
    out.centers.push_back(center);
    remaining.erase(remaining.begin(), remaining.begin() + static_cast<std::ptrdiff_t>(take));
    std::sort(remaining.begin(), remaining.end());
  }
  return out;
}

FftResult sample_fft_from(const Matrix& data, std::size_t k, DistanceKind kind, std::size_t first) {
  const std::size_t n = data.rows();
  check_k(k, n);
  if (first >= n) throw Error(ErrorCode::invalid_argument, "first center index out of range");

  RowDistances scan(kind, data);
  std::vector<double> d_min(n), fresh(n);
  std::vector<char> selected(n, 0);
  FftResult out;
  out.centers.push_back(first);
  selected[first] = 1;
  scan.compute(data.row(first), d_min);

  while (out.centers.size() < k) {
    std::size_t far = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (selected[i]) continue;
      if (far == n || d_min[i] > d_min[far]) far = i;
    }
    out.selection_radii.push_back(d_min[far]);
    out.centers.push_back(far);
    selected[far] = 1;
    scan.compute(data.row(far), fresh);
    for (std::size_t i = 0; i < n; ++i) d_min[i] = std::min(d_min[i], fresh[i]);
  }
  out.last_radius =
      out.selection_radii.empty() ? std::numeric_limits<double>::quiet_NaN() : out.selection_radii.back();
  return out;
}

FftResult sample_fft(const Matrix& data, std::size_t k, DistanceKind kind, std::uint64_t seed) {
  check_k(k, data.rows());
  Rng rng(seed);
  return sample_fft_from(data, k, kind, static_cast<std::size_t>(uniform_index(rng, data.rows())));
}

std::vector<double> region_sigmas(const Matrix& data, const Matrix& refs, DistanceKind kind) {
  std::vector<double> dist;
  const RegionAssignment regions = assign_regions(data, refs, kind, &dist);
  std::vector<double> sigmas(refs.rows(), 0.0);
  for (std::size_t i = 0; i < data.rows(); ++i) {
    auto& s = sigmas[regions.region_of[i]];
    s = std::max(s, dist[i]);
  }
  return sigmas;
}

void repair_sigmas(std::vector<double>& sigmas) {
  double sum = 0.0;
  std::size_t positive = 0;
  for (double s : sigmas) {
    if (std::isfinite(s) && s > 0.0) {
      sum += s;
      ++positive;
    }
  }
  const double fallback = positive > 0 ? sum / static_cast<double>(positive) : 1.0;
  for (double& s : sigmas) {
    if (!(std::isfinite(s) && s > 0.0)) s = fallback;
  }
}

ReferenceSet finalize_references(const Matrix& data, std::span<const std::size_t> picks, RefType ref_type,
                                 DistanceKind kind, SamplerKind sampler, SigmaRule rule, double fft_radius) {
  if (picks.empty()) throw Error(ErrorCode::invalid_argument, "no references were picked");
  ReferenceSet out;
  out.sampler = sampler;
  out.distance = kind;
  out.ref_type = ref_type;
  out.refs = data.select_rows(picks);

  if (ref_type == RefType::centroids) {
    const RegionAssignment regions = assign_regions(data, out.refs, kind);
    std::vector<std::vector<std::size_t>> members(out.refs.rows());
    for (std::size_t i = 0; i < data.rows(); ++i) members[regions.region_of[i]].push_back(i);
    for (std::size_t c = 0; c < members.size(); ++c) {
      // A duplicate pick loses every tie and keeps its own position.
      if (members[c].empty()) continue;
      const auto mean = centroid(data, members[c]);
      std::copy(mean.begin(), mean.end(), out.refs.row(c).begin());
    }
  }

  if (rule == SigmaRule::fft_radius && std::isfinite(fft_radius) && fft_radius > 0.0) {
    out.sigmas.assign(out.refs.rows(), fft_radius);
  } else {
    out.sigmas = region_sigmas(data, out.refs, kind);
  }
  repair_sigmas(out.sigmas);
  return out;
}

ReferenceSet select_references(const Matrix& data, SamplerKind sampler, std::size_t k, DistanceKind kind,
                               RefType ref_type, std::uint64_t seed) {
  switch (sampler) {
    case SamplerKind::kmeans:
      if (kind != DistanceKind::euclidean || ref_type != RefType::centroids) {
        throw Error(ErrorCode::invalid_argument, "k-means references must be euclidean centroids");
      }
      return sample_kmeans(data, k, seed);
    case SamplerKind::random: {
      const auto picks = sample_random(data, k, seed);
      return finalize_references(data, picks, ref_type, kind, sampler);
    }
    case SamplerKind::density: {
      const auto net = sample_density(data, k, kind, seed);
      return finalize_references(data, net.centers, ref_type, kind, sampler);
    }
    case SamplerKind::fft: {
      const auto fft = sample_fft(data, k, kind, seed);
      return finalize_references(data, fft.centers, ref_type, kind, sampler);
    }
  }
  throw Error(ErrorCode::invalid_argument, "unknown sampler");
}

}  // namespace kernelcast
