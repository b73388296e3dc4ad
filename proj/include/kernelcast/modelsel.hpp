// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "kernelcast/classify.hpp"
#include "kernelcast/data.hpp"
#include "kernelcast/kernelmap.hpp"
#include "kernelcast/sampling.hpp"

namespace kernelcast {

enum class ClassifierKind { gnb, knn };

std::string_view to_string(ClassifierKind kind);
ClassifierKind parse_classifier_kind(std::string_view name);

/// One point of the search space.
struct Configuration {
  std::size_t k_references = 16;
  DistanceKind sampling_distance = DistanceKind::euclidean;
  SamplerKind sampler = SamplerKind::random;
  KernelKind kernel = KernelKind::gaussian;
  RefType ref_type = RefType::centers;
  ClassifierKind classifier = ClassifierKind::gnb;
  std::optional<KnnParams> knn;  ///< present iff classifier == knn
  ScalerKind scaler = ScalerKind::none;

  friend bool operator==(const Configuration&, const Configuration&) = default;
};

inline constexpr std::size_t grid_reference_counts[] = {4, 8, 16, 32, 64};
inline constexpr std::size_t grid_neighbor_counts[] = {1, 5, 11, 21};

/// Throws invalid_argument when the configuration breaks a space constraint.
void validate(const Configuration& cfg);

/// Canonical text form, e.g.
/// "k=16 dist=angle sampler=fft kernel=cauchy ref=centers clf=knn nn=5 weight=distance nndist=euclidean scaler=none".
std::string config_key(const Configuration& cfg);
/// Inverse of config_key.
Configuration parse_config_key(std::string_view key);
std::uint64_t config_hash(const Configuration& cfg);

/// Every valid configuration in a fixed nested-loop order, optionally limited
/// to one sampler. Unfiltered size is 4420.
std::vector<Configuration> enumerate_grid(std::optional<SamplerKind> sampler = std::nullopt,
                                          ScalerKind scaler = ScalerKind::none);

enum class BerVariant {
  paper,         ///< mean over classes of (FP_c + FN_c) / n_c
  conventional,  ///< mean over classes of FN_c / n_c
};

std::string_view to_string(BerVariant v);
BerVariant parse_ber_variant(std::string_view name);

struct BerDetail {
  double value = 0.0;
  std::vector<std::string> warnings;
};

/// With the paper variant a class without truth samples contributes FP_c / 1
/// and a warning. The conventional variant averages over classes that have
/// truth samples only.
BerDetail balanced_error_rate_detail(std::span<const LabelId> truth, std::span<const LabelId> predicted,
                                     std::size_t n_classes, BerVariant variant = BerVariant::paper);
double balanced_error_rate(std::span<const LabelId> truth, std::span<const LabelId> predicted,
                           std::size_t n_classes, BerVariant variant = BerVariant::paper);

using InnerModel = std::variant<KnnModel, GnbModel>;

/// A fitted pipeline: scaler, references, kernel map and inner classifier.
struct KmsModel {
  Configuration config;
  ScalerSpec scaler;
  ReferenceSet refs;
  InnerModel inner;
  double cv_ber = 0.0;
  std::vector<std::string> label_names;
  std::size_t n_features = 0;

  friend bool operator==(const KmsModel&, const KmsModel&) = default;
};

/// Seed a configuration's sampler gets under a master seed.
std::uint64_t config_seed(std::uint64_t master_seed, const Configuration& cfg);

/// Fits the pipeline on `ds`; `seed` drives the sampler directly.
KmsModel kms_fit(const Configuration& cfg, const Dataset& ds, std::uint64_t seed);
std::vector<LabelId> kms_predict(const KmsModel& model, const Matrix& queries);
inline std::vector<LabelId> kms_predict(const KmsModel& model, const Dataset& queries) {
  return kms_predict(model, queries.features);
}

struct Evaluation {
  double cv_ber = 0.0;  ///< +inf when any fold failed
  std::vector<double> fold_bers;
  std::string error;
  std::vector<std::string> warnings;
};

/// Cross-validated BER. Fit errors are caught and reported as +inf.
Evaluation evaluate_config(const Configuration& cfg, const Dataset& ds, const FoldPlan& folds,
                           std::uint64_t seed, BerVariant variant = BerVariant::paper);

struct SearchOptions {
  std::size_t budget = 128;
  std::size_t folds = 3;
  std::uint64_t seed = 0;
  std::optional<SamplerKind> sampler;
  ScalerKind scaler = ScalerKind::none;
  BerVariant ber = BerVariant::paper;
  std::size_t threads = 0;  ///< 0 = thread_count()
};

struct SearchEntry {
  Configuration config;
  double cv_ber = 0.0;
  std::vector<double> fold_bers;
  std::uint64_t seed = 0;  ///< config_seed of this entry
  double wall_seconds = 0.0;
  std::string error;
  std::vector<std::string> warnings;
};

struct SearchReport {
  std::string mode;  ///< "random" or "grid"
  std::uint64_t seed = 0;
  std::uint64_t fold_seed = 0;
  std::size_t folds = 3;
  std::size_t budget = 0;
  std::optional<SamplerKind> sampler;
  ScalerKind scaler = ScalerKind::none;
  BerVariant ber = BerVariant::paper;
  std::size_t n_samples = 0;
  std::size_t n_features = 0;
  std::vector<std::string> label_names;
  std::vector<SearchEntry> evaluated;
  std::optional<std::size_t> best;  ///< first minimal finite cv_ber
  double wall_seconds = 0.0;

  const SearchEntry& best_entry() const;
};

/// Fold plan shared by every configuration of one search.
FoldPlan search_folds(const Dataset& ds, const SearchOptions& opts);

/// Evaluates the given configurations in parallel on one fold plan.
SearchReport run_search(const Dataset& ds, std::vector<Configuration> configs, const SearchOptions& opts,
                        std::string mode);
/// Uniform sample of `budget` configurations without replacement.
SearchReport random_search(const Dataset& ds, const SearchOptions& opts);
/// Every configuration of the (filtered) grid; budget is ignored.
SearchReport grid_search(const Dataset& ds, const SearchOptions& opts);

/// Configurations with finite cv_ber, stable-sorted by cv_ber.
std::vector<const SearchEntry*> ranked_entries(const SearchReport& report);

/// Refits the best configuration on `ds` with the report's seed.
KmsModel fit_best(const SearchReport& report, const Dataset& ds);

}  // namespace kernelcast
