// SPDX-License-Identifier: Apache-2.0
#include "kernelcast/ensemble.hpp"

#include <algorithm>
#include <sstream>

#include "kernelcast/error.hpp"
#include "kernelcast/parallel.hpp"
#include "kernelcast/random.hpp"

namespace kernelcast {

std::uint64_t vote_seed_for(std::uint64_t seed) { return derive_seed(seed, fnv1a("vote")); }

Ensemble build_ensemble(const SearchReport& report, const Dataset& ds, std::size_t ell, std::uint64_t seed) {
  if (ell == 0) throw Error(ErrorCode::invalid_argument, "ensemble size must be positive");
  const auto ranked = ranked_entries(report);
  if (ranked.size() < ell) {
    throw Error(ErrorCode::insufficient_data, "ensemble of " + std::to_string(ell) + " needs as many scored " +
                                                  "configurations, the report has " +
                                                  std::to_string(ranked.size()));
  }
  Ensemble ens;
  ens.vote_seed = vote_seed_for(seed);
  ens.members.resize(ell);
  parallel_for(ell, [&](std::size_t i) {
    ens.members[i] = kms_fit(ranked[i]->config, ds, config_seed(seed, ranked[i]->config));
    ens.members[i].cv_ber = ranked[i]->cv_ber;
  });
  return ens;
}

VoteResult majority_vote(std::span<const std::vector<LabelId>> member_predictions, std::size_t n_classes,
                         std::uint64_t vote_seed) {
  if (member_predictions.empty()) throw Error(ErrorCode::invalid_argument, "vote without members");
  const std::size_t n = member_predictions.front().size();
  for (const auto& p : member_predictions) {
    if (p.size() != n) throw Error(ErrorCode::dimension_mismatch, "members predicted different query counts");
  }
  VoteResult out;
  out.labels.resize(n);
  std::vector<std::size_t> counts(n_classes);
  std::vector<LabelId> tied;
  for (std::size_t q = 0; q < n; ++q) {
    std::fill(counts.begin(), counts.end(), 0);
    for (const auto& p : member_predictions) {
      if (p[q] >= n_classes) throw Error(ErrorCode::invalid_argument, "label id out of range in vote");
      ++counts[p[q]];
    }
    const std::size_t top = *std::max_element(counts.begin(), counts.end());
    tied.clear();
    for (std::size_t c = 0; c < n_classes; ++c) {
      if (counts[c] == top) tied.push_back(static_cast<LabelId>(c));
    }
    if (tied.size() == 1) {
      out.labels[q] = tied.front();
    } else {
      Rng rng(derive_seed(vote_seed, q));
      out.labels[q] = tied[uniform_index(rng, tied.size())];
      ++out.ties;
    }
  }
  return out;
}

std::vector<std::vector<LabelId>> member_predictions(const Ensemble& ens, const Matrix& queries) {
  std::vector<std::vector<LabelId>> preds(ens.size());
  parallel_for(ens.size(), [&](std::size_t i) { preds[i] = kms_predict(ens.members[i], queries); });
  return preds;
}

VoteResult ensemble_predict_detail(const Ensemble& ens, const Matrix& queries) {
  if (ens.members.empty()) throw Error(ErrorCode::invalid_argument, "empty ensemble");
  const auto preds = member_predictions(ens, queries);
  return majority_vote(preds, ens.members.front().label_names.size(), ens.vote_seed);
}

std::vector<LabelId> ensemble_predict(const Ensemble& ens, const Matrix& queries) {
  return ensemble_predict_detail(ens, queries).labels;
}

double discordance(std::span<const LabelId> a, std::span<const LabelId> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::dimension_mismatch, "prediction vectors differ in length");
  if (a.empty()) throw Error(ErrorCode::insufficient_data, "discordance of empty predictions");
  std::size_t differ = 0;
  for (std::size_t i = 0; i < a.size(); ++i) differ += a[i] != b[i] ? 1 : 0;
  return static_cast<double>(differ) / static_cast<double>(a.size());
}

std::string ConsensusCurve::to_csv() const {
  std::ostringstream out;
  out.precision(17);
  out << "ell,raw_ratio,normalized_ratio\n";
  for (std::size_t i = 0; i < ells.size(); ++i) out << ells[i] << ',' << raw[i] << ',' << normalized[i] << '\n';
  return out.str();
}

ConsensusCurve consensus_curve(std::span<const std::vector<LabelId>> member_predictions, std::size_t n_classes,
                               std::uint64_t vote_seed, const ConsensusOptions& opts) {
  if (opts.ell_start == 0 || opts.step == 0) {
    throw Error(ErrorCode::invalid_argument, "consensus start and step must be positive");
  }
  if (opts.ell_max < opts.ell_start) throw Error(ErrorCode::invalid_argument, "ell_max is below ell_start");
  if (member_predictions.size() < opts.ell_max + opts.step) {
    throw Error(ErrorCode::insufficient_data, "consensus up to " + std::to_string(opts.ell_max) + " with step " +
                                                  std::to_string(opts.step) + " needs " +
                                                  std::to_string(opts.ell_max + opts.step) + " members");
  }
  ConsensusCurve curve;
  curve.step = opts.step;
  for (std::size_t ell = opts.ell_start; ell <= opts.ell_max; ell += opts.step) {
    const auto small = majority_vote(member_predictions.first(ell), n_classes, vote_seed);
    const auto large = majority_vote(member_predictions.first(ell + opts.step), n_classes, vote_seed);
    curve.ells.push_back(ell);
    curve.raw.push_back(discordance(small.labels, large.labels));
  }
  const double peak = *std::max_element(curve.raw.begin(), curve.raw.end());
  for (double r : curve.raw) curve.normalized.push_back(peak > 0.0 ? r / peak : r);
  return curve;
}

ConsensusCurve consensus_curve(const SearchReport& report, const Dataset& train, const Matrix& eval,
                               const ConsensusOptions& opts) {
  const Ensemble ens = build_ensemble(report, train, opts.ell_max + opts.step, opts.seed);
  const auto preds = member_predictions(ens, eval);
  return consensus_curve(preds, train.n_classes(), ens.vote_seed, opts);
}

}  // namespace kernelcast
