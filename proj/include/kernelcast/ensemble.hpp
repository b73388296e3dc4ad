// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "kernelcast/modelsel.hpp"

namespace kernelcast {

/// Majority-vote ensemble of refitted top configurations, best first.
struct Ensemble {
  std::vector<KmsModel> members;
  std::uint64_t vote_seed = 0;

  std::size_t size() const noexcept { return members.size(); }
  friend bool operator==(const Ensemble&, const Ensemble&) = default;
};

inline constexpr std::size_t default_ensemble_size = 15;

/// Seed of the vote tie-breaker for a master seed.
std::uint64_t vote_seed_for(std::uint64_t seed);

/// Refits the `ell` best finite-score configurations of `report` on `ds`.
/// Member i uses config_seed(seed, config), so a single-member ensemble
/// matches fit_best when seed is the report seed.
Ensemble build_ensemble(const SearchReport& report, const Dataset& ds, std::size_t ell = default_ensemble_size,
                        std::uint64_t seed = 0);

struct VoteResult {
  std::vector<LabelId> labels;
  std::size_t ties = 0;  ///< queries decided by the random tie-break
};

/// Plurality vote over member predictions (members x queries). Ties are
/// broken uniformly among the tied labels with an RNG seeded by
/// (vote_seed, query index).
VoteResult majority_vote(std::span<const std::vector<LabelId>> member_predictions, std::size_t n_classes,
                         std::uint64_t vote_seed);

/// Each member's predictions, in member order.
std::vector<std::vector<LabelId>> member_predictions(const Ensemble& ens, const Matrix& queries);

VoteResult ensemble_predict_detail(const Ensemble& ens, const Matrix& queries);
std::vector<LabelId> ensemble_predict(const Ensemble& ens, const Matrix& queries);
inline std::vector<LabelId> ensemble_predict(const Ensemble& ens, const Dataset& queries) {
  return ensemble_predict(ens, queries.features);
}

/// Fraction of positions where two prediction vectors differ.
double discordance(std::span<const LabelId> a, std::span<const LabelId> b);

struct ConsensusCurve {
  std::size_t step = 2;
  std::vector<std::size_t> ells;
  std::vector<double> raw;
  std::vector<double> normalized;  ///< raw / max(raw), or raw when max is 0

  std::string to_csv() const;
};

struct ConsensusOptions {
  std::size_t ell_start = 3;
  std::size_t step = 2;
  std::size_t ell_max = default_ensemble_size;
  std::uint64_t seed = 0;
};

/// Discordance between the ell- and (ell+step)-member prefixes of one
/// ensemble of ell_max + step members, evaluated on `eval`.
ConsensusCurve consensus_curve(const SearchReport& report, const Dataset& train, const Matrix& eval,
                               const ConsensusOptions& opts);
/// Same from precomputed member predictions.
ConsensusCurve consensus_curve(std::span<const std::vector<LabelId>> member_predictions, std::size_t n_classes,
                               std::uint64_t vote_seed, const ConsensusOptions& opts);

}  // namespace kernelcast
