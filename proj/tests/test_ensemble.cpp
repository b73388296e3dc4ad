// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "kernelcast/ensemble.hpp"
#include "kernelcast/error.hpp"
#include "test_util.hpp"

using namespace kernelcast;

namespace {

SearchReport small_search(const Dataset& ds, std::size_t budget, std::uint64_t seed) {
  SearchOptions opts;
  opts.budget = budget;
  opts.seed = seed;
  return random_search(ds, opts);
}

}  // namespace

TEST(Vote, PluralityAndSeededTies) {
  const std::vector<std::vector<LabelId>> plural = {{0, 1}, {0, 1}, {1, 0}};
  const auto v = majority_vote(plural, 2, 5);
  EXPECT_EQ(v.labels, (std::vector<LabelId>{0, 1}));
  EXPECT_EQ(v.ties, 0u);

  std::vector<std::vector<LabelId>> tie = {std::vector<LabelId>(200, 0), std::vector<LabelId>(200, 1)};
  const auto t1 = majority_vote(tie, 2, 42);
  EXPECT_EQ(t1.labels, majority_vote(tie, 2, 42).labels);
  EXPECT_EQ(t1.ties, 200u);
  std::size_t zeros = 0;
  for (auto l : t1.labels) zeros += l == 0;
  EXPECT_GT(zeros, 60u);
  EXPECT_LT(zeros, 140u);
}

TEST(Vote, OddBinaryNeverTies) {
  Rng rng(3);
  for (std::size_t members : {1u, 3u, 5u, 15u}) {
    std::vector<std::vector<LabelId>> preds(members, std::vector<LabelId>(50));
    for (auto& p : preds) {
      for (auto& l : p) l = static_cast<LabelId>(uniform_index(rng, 2));
    }
    EXPECT_EQ(majority_vote(preds, 2, 1).ties, 0u);
  }
}

TEST(Discordance, CountsAndSymmetry) {
  const std::vector<LabelId> a = {0, 1, 0, 1}, b = {0, 0, 1, 1};
  EXPECT_EQ(discordance(a, b), 0.5);
  EXPECT_EQ(discordance(b, a), 0.5);
  EXPECT_EQ(discordance(a, a), 0.0);
  EXPECT_THROW(discordance(a, std::vector<LabelId>{0}), Error);
}

TEST(Ensemble, SingletonEqualsBestModel) {
  auto ds = kctest::blobs(20, 3, 2, 1, 2.5);
  const auto report = small_search(ds, 20, 4);
  const auto ens = build_ensemble(report, ds, 1, report.seed);
  const auto best = fit_best(report, ds);
  EXPECT_EQ(ens.members.front(), best);
  const Matrix qs = kctest::random_matrix(60, 2, 3, -2.0, 9.0);
  EXPECT_EQ(ensemble_predict(ens, qs), kms_predict(best, qs));
}

TEST(Ensemble, MembersSortedAndUnanimousCopies) {
  auto ds = kctest::blobs(20, 2, 2, 2, 2.5);
  const auto report = small_search(ds, 25, 9);
  const auto ens = build_ensemble(report, ds, 7, 9);
  for (std::size_t i = 1; i < ens.size(); ++i) EXPECT_LE(ens.members[i - 1].cv_ber, ens.members[i].cv_ber);

  Ensemble same;
  same.vote_seed = 1;
  same.members.assign(4, ens.members[2]);
  const Matrix qs = kctest::random_matrix(40, 2, 8, -2.0, 6.0);
  EXPECT_EQ(ensemble_predict(same, qs), kms_predict(ens.members[2], qs));
}

TEST(Ensemble, TooFewViableConfigurations) {
  auto ds = kctest::blobs(20, 2, 2, 2);
  const auto report = small_search(ds, 5, 1);
  EXPECT_THROW(build_ensemble(report, ds, 6, 1), Error);
  EXPECT_THROW(build_ensemble(report, ds, 0, 1), Error);
}

TEST(Consensus, CurveShapeAndNormalization) {
  const std::vector<std::vector<LabelId>> preds = {
      {0, 0, 0, 0}, {1, 1, 1, 1}, {1, 1, 0, 0}, {1, 0, 1, 0}, {0, 1, 1, 1}, {1, 1, 1, 0}, {0, 0, 1, 1}};
  ConsensusOptions o;
  o.ell_start = 1;
  o.step = 2;
  o.ell_max = 5;
  const auto c = consensus_curve(preds, 2, 3, o);
  EXPECT_EQ(c.ells, (std::vector<std::size_t>{1, 3, 5}));
  double peak = 0.0;
  for (std::size_t i = 0; i < c.raw.size(); ++i) {
    EXPECT_GE(c.raw[i], 0.0);
    EXPECT_LE(c.raw[i], 1.0);
    peak = std::max(peak, c.raw[i]);
  }
  ASSERT_GT(peak, 0.0);
  EXPECT_EQ(*std::max_element(c.normalized.begin(), c.normalized.end()), 1.0);
  EXPECT_EQ(c.to_csv().substr(0, 31), "ell,raw_ratio,normalized_ratio\n");
  o.ell_max = 7;
  EXPECT_THROW(consensus_curve(preds, 2, 3, o), Error);
}

TEST(Consensus, IdenticalMembersAgree) {
  const std::vector<std::vector<LabelId>> preds(9, std::vector<LabelId>{0, 1, 1, 0});
  ConsensusOptions o;
  o.ell_max = 7;
  const auto c = consensus_curve(preds, 2, 3, o);
  for (double r : c.raw) EXPECT_EQ(r, 0.0);
  for (double r : c.normalized) EXPECT_EQ(r, 0.0);
}

TEST(Consensus, FromReport) {
  auto ds = kctest::blobs(20, 2, 2, 5, 3.0);
  const auto report = small_search(ds, 20, 2);
  ConsensusOptions o;
  o.ell_max = 7;
  o.seed = 2;
  const auto c = consensus_curve(report, ds, ds.features, o);
  EXPECT_EQ(c.ells, (std::vector<std::size_t>{3, 5, 7}));
  EXPECT_EQ(c.raw, consensus_curve(report, ds, ds.features, o).raw);
}
