// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kernelcast/modelsel.hpp"
#include "kernelcast/serialize.hpp"

namespace kernelcast {

struct ManifestSplit {
  std::filesystem::path train;
  std::filesystem::path test;
};

struct ManifestDataset {
  std::string name;
  std::string label_column;  ///< empty = last column
  std::vector<ManifestSplit> splits;
};

struct Manifest {
  std::vector<ManifestDataset> datasets;
};

/// {datasets: [{name, label_column?, splits: [{train, test}]}]}. Relative
/// paths are resolved against the manifest's directory.
Manifest load_manifest(const std::filesystem::path& path);
Manifest manifest_from_json(const Json& j, const std::filesystem::path& base_dir);

/// Benchmark method: single model or ensemble on top of a random or grid
/// search, optionally restricted to one sampler. Names look like kms-rs,
/// kmse-rs, kms-gs, kmse-gs, kms-fft, kmse-density, kms-kmeans, kms-random.
struct Method {
  std::string name;
  bool ensemble = false;
  bool grid = false;
  std::optional<SamplerKind> sampler;
};

Method parse_method(std::string_view name);

/// Ascending mid-ranks: rank 1 for the smallest value, tied values share the
/// mean of the ranks they span.
std::vector<double> mid_ranks(std::span<const double> values);

struct BenchmarkOptions {
  std::vector<Method> methods;
  std::uint64_t seed = 0;
  std::size_t max_splits = 0;  ///< 0 = all splits in the manifest
  std::size_t budget = 128;
  std::size_t folds = 3;
  std::size_t ensemble_size = 15;
  ScalerKind scaler = ScalerKind::none;
  BerVariant search_ber = BerVariant::paper;
  BerVariant rank_ber = BerVariant::paper;
  std::size_t threads = 0;
};

struct BenchmarkCell {
  std::string dataset;
  std::string method;
  std::vector<double> paper_ber;         ///< per split
  std::vector<double> conventional_ber;  ///< per split
  double mean_paper = 0.0;
  double mean_conventional = 0.0;
};

struct BenchmarkReport {
  std::vector<std::string> datasets;
  std::vector<std::string> methods;  ///< sorted by average rank, then name order given
  std::vector<BenchmarkCell> cells;  ///< dataset-major, methods in option order
  /// ranks[d][m] for dataset d and method m (indices into the option order).
  std::vector<std::vector<double>> ranks;
  std::vector<double> average_rank;  ///< per method, option order
  std::vector<std::size_t> splits_used;
  std::vector<std::size_t> splits_available;
  BenchmarkOptions options;

  const BenchmarkCell& cell(std::size_t dataset, std::size_t method) const {
    return cells.at(dataset * options.methods.size() + method);
  }
};

/// Seed for one (dataset, split) pair.
std::uint64_t split_seed(std::uint64_t seed, std::string_view dataset, std::size_t split);

/// Test-set BER of every method on every split; searches are shared between
/// the single-model and ensemble form of one method.
BenchmarkReport run_benchmark(const Manifest& manifest, const BenchmarkOptions& options);

Json to_json(const BenchmarkReport& report);

}  // namespace kernelcast
