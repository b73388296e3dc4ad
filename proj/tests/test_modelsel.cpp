// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "kernelcast/error.hpp"
#include "kernelcast/modelsel.hpp"
#include "kernelcast/serialize.hpp"
#include "test_util.hpp"

using namespace kernelcast;

namespace {

Configuration knn_config(std::size_t k, SamplerKind s = SamplerKind::random, KernelKind kern = KernelKind::gaussian) {
  Configuration cfg;
  cfg.k_references = k;
  cfg.sampler = s;
  cfg.kernel = kern;
  cfg.ref_type = s == SamplerKind::kmeans ? RefType::centroids : RefType::centers;
  cfg.classifier = ClassifierKind::knn;
  cfg.knn = KnnParams{1, Weighting::uniform, DistanceKind::euclidean};
  return cfg;
}

// Confusion-matrix BER written independently of the library.
double oracle_ber(const std::vector<LabelId>& t, const std::vector<LabelId>& p, std::size_t n_classes) {
  std::vector<std::vector<double>> cm(n_classes, std::vector<double>(n_classes, 0.0));
  for (std::size_t i = 0; i < t.size(); ++i) cm[t[i]][p[i]] += 1.0;
  double total = 0.0;
  for (std::size_t c = 0; c < n_classes; ++c) {
    double row = 0.0, col = 0.0;
    for (std::size_t o = 0; o < n_classes; ++o) {
      row += cm[c][o];
      col += cm[o][c];
    }
    const double fn = row - cm[c][c], fp = col - cm[c][c];
    total += (fp + fn) / (row > 0.0 ? row : 1.0);
  }
  return total / static_cast<double>(n_classes);
}

}  // namespace

TEST(Grid, CardinalityAndInvariants) {
  const auto grid = enumerate_grid();
  EXPECT_EQ(grid.size(), 4420u);
  EXPECT_EQ(enumerate_grid(SamplerKind::kmeans).size(), 340u);
  EXPECT_EQ(enumerate_grid(SamplerKind::fft).size(), 1360u);
  std::set<std::string> keys;
  std::set<std::uint64_t> hashes;
  for (const auto& cfg : grid) {
    EXPECT_NO_THROW(validate(cfg));
    EXPECT_EQ(cfg.classifier == ClassifierKind::knn, cfg.knn.has_value());
    if (cfg.sampler == SamplerKind::kmeans) {
      EXPECT_EQ(cfg.ref_type, RefType::centroids);
      EXPECT_EQ(cfg.sampling_distance, DistanceKind::euclidean);
    }
    keys.insert(config_key(cfg));
    hashes.insert(config_hash(cfg));
    EXPECT_EQ(parse_config_key(config_key(cfg)), cfg);
  }
  EXPECT_EQ(keys.size(), grid.size());
  EXPECT_EQ(hashes.size(), grid.size());
}

TEST(Grid, InvalidConfigurationsRejected) {
  auto cfg = knn_config(16, SamplerKind::kmeans);
  cfg.ref_type = RefType::centers;
  EXPECT_THROW(validate(cfg), Error);
  cfg = knn_config(16);
  cfg.knn.reset();
  EXPECT_THROW(validate(cfg), Error);
  cfg = knn_config(7);
  EXPECT_THROW(validate(cfg), Error);
  EXPECT_THROW(parse_config_key("k=4 dist=euclidean"), Error);
}

TEST(Ber, Examples) {
  std::vector<LabelId> t(20), p(20);
  for (std::size_t i = 0; i < 20; ++i) t[i] = p[i] = i < 10 ? 0 : 1;
  EXPECT_EQ(balanced_error_rate(t, p, 2), 0.0);
  p[0] = p[1] = 1;
  p[10] = 0;
  EXPECT_DOUBLE_EQ(balanced_error_rate(t, p, 2), 0.3);
  std::vector<LabelId> zeros(20, 0);
  EXPECT_EQ(balanced_error_rate(t, zeros, 2), 1.0);
  EXPECT_EQ(balanced_error_rate(t, zeros, 2, BerVariant::conventional), 0.5);
}

TEST(Ber, ClassWithoutTruthSamples) {
  const std::vector<LabelId> t = {0, 0, 0, 0};
  const std::vector<LabelId> p = {0, 0, 1, 1};
  const auto d = balanced_error_rate_detail(t, p, 2);
  EXPECT_DOUBLE_EQ(d.value, (2.0 / 4.0 + 2.0 / 1.0) / 2.0);
  EXPECT_EQ(d.warnings.size(), 1u);
  EXPECT_DOUBLE_EQ(balanced_error_rate(t, p, 2, BerVariant::conventional), 0.5);
  EXPECT_THROW(balanced_error_rate(t, std::vector<LabelId>{0}, 2), Error);
}

TEST(Ber, MatchesConfusionMatrixOracle) {
  Rng rng(17);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t classes = 2 + uniform_index(rng, 4);
    const std::size_t n = 1 + uniform_index(rng, 200);
    std::vector<LabelId> t(n), p(n);
    for (std::size_t i = 0; i < n; ++i) {
      t[i] = static_cast<LabelId>(uniform_index(rng, classes));
      p[i] = static_cast<LabelId>(uniform_index(rng, classes));
    }
    ASSERT_EQ(balanced_error_rate(t, p, classes), oracle_ber(t, p, classes));
  }
}

TEST(Evaluate, SeparableBlobsNearZero) {
  auto ds = kctest::blobs(30, 2, 2, 3);
  const auto folds = make_folds(ds, 3, 1);
  for (auto s : {SamplerKind::random, SamplerKind::kmeans, SamplerKind::density, SamplerKind::fft}) {
    const auto ev = evaluate_config(knn_config(4, s), ds, folds, 5);
    EXPECT_LE(ev.cv_ber, 0.05) << to_string(s);
    EXPECT_EQ(ev.fold_bers.size(), 3u);
  }
  Configuration gnb = knn_config(8);
  gnb.classifier = ClassifierKind::gnb;
  gnb.knn.reset();
  EXPECT_LE(evaluate_config(gnb, ds, folds, 5).cv_ber, 0.05);
}

TEST(Evaluate, ShuffledLabelsNearOne) {
  double sum = 0.0;
  int count = 0;
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    auto ds = kctest::noise_labels(150, 3, seed);
    const auto folds = make_folds(ds, 3, seed);
    sum += evaluate_config(knn_config(16), ds, folds, seed).cv_ber;
    ++count;
  }
  EXPECT_NEAR(sum / count, 1.0, 0.15);
}

TEST(Evaluate, DeterministicAndFailureIsInfinite) {
  auto ds = kctest::blobs(10, 2, 2, 3);
  const auto folds = make_folds(ds, 3, 1);
  const auto a = evaluate_config(knn_config(8), ds, folds, 5);
  const auto b = evaluate_config(knn_config(8), ds, folds, 5);
  EXPECT_EQ(a.cv_ber, b.cv_ber);
  EXPECT_EQ(a.fold_bers, b.fold_bers);
  const auto bad = evaluate_config(knn_config(64), ds, folds, 5);
  EXPECT_TRUE(std::isinf(bad.cv_ber));
  EXPECT_FALSE(bad.error.empty());
}

TEST(Evaluate, HeldOutRowsDoNotReachTheFit) {
  auto ds = kctest::blobs(12, 2, 3, 4);
  const auto folds = make_folds(ds, 3, 2);
  auto noisy = ds;
  const auto held_out = folds.test_rows(0);
  const Matrix noise = kctest::random_matrix(held_out.size(), 3, 77, -100.0, 100.0);
  for (std::size_t r = 0; r < held_out.size(); ++r) {
    for (std::size_t j = 0; j < 3; ++j) noisy.features(held_out[r], j) = noise(r, j);
  }
  for (auto scaler : {ScalerKind::none, ScalerKind::standardize}) {
    auto cfg = knn_config(8, SamplerKind::kmeans);
    cfg.scaler = scaler;
    const auto train_rows = folds.train_rows(0);
    EXPECT_EQ(kms_fit(cfg, ds.subset(train_rows), 9), kms_fit(cfg, noisy.subset(train_rows), 9));
  }
}

TEST(Kms, ReproducesTrainingLabelsWithOneNeighbor) {
  auto ds = kctest::noise_labels(30, 2, 4);
  auto cfg = knn_config(16, SamplerKind::random, KernelKind::linear);
  const auto m = kms_fit(cfg, ds, 1);
  EXPECT_EQ(kms_predict(m, ds), ds.labels);
  EXPECT_THROW(kms_predict(m, Matrix(2, 3)), Error);
}

TEST(Search, BudgetBestAndDeterminism) {
  auto ds = kctest::blobs(15, 2, 2, 6, 2.0);
  SearchOptions opts;
  opts.budget = 1;
  opts.seed = 3;
  EXPECT_EQ(random_search(ds, opts).evaluated.size(), 1u);

  opts.budget = 40;
  const auto a = random_search(ds, opts);
  const auto b = random_search(ds, opts);
  EXPECT_EQ(a.evaluated.size(), 40u);
  EXPECT_EQ(to_json(a, false).dump(), to_json(b, false).dump());
  ASSERT_TRUE(a.best);
  for (std::size_t i = 0; i < a.evaluated.size(); ++i) {
    EXPECT_GE(a.evaluated[i].cv_ber, a.best_entry().cv_ber);
    if (a.evaluated[i].cv_ber == a.best_entry().cv_ber) { EXPECT_GE(i, *a.best); }
  }
  std::set<std::string> keys;
  for (const auto& e : a.evaluated) keys.insert(config_key(e.config));
  EXPECT_EQ(keys.size(), 40u);
}

TEST(Search, SaturatedBudgetExhaustsFilteredGrid) {
  auto ds = kctest::blobs(20, 2, 2, 7, 2.0);
  SearchOptions opts;
  opts.budget = 100000;
  opts.sampler = SamplerKind::kmeans;
  const auto rs = random_search(ds, opts);
  const auto gs = grid_search(ds, opts);
  EXPECT_EQ(rs.evaluated.size(), 340u);
  EXPECT_EQ(gs.evaluated.size(), 340u);
  EXPECT_EQ(rs.best_entry().cv_ber, gs.best_entry().cv_ber);
  opts.budget = 30;
  EXPECT_LE(gs.best_entry().cv_ber, random_search(ds, opts).best_entry().cv_ber);
}

TEST(Search, ThreadCountDoesNotChangeResults) {
  auto ds = kctest::blobs(15, 3, 2, 8, 2.0);
  SearchOptions opts;
  opts.budget = 24;
  opts.threads = 1;
  const auto one = random_search(ds, opts);
  opts.threads = 4;
  const auto four = random_search(ds, opts);
  EXPECT_EQ(to_json(one, false).dump(), to_json(four, false).dump());
}
