// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <filesystem>

#include "kernelcast/error.hpp"
#include "kernelcast/serialize.hpp"
#include "test_util.hpp"

using namespace kernelcast;

namespace {

Json roundtrip_text(const Json& j) { return Json::parse(j.dump(2)); }

}  // namespace

TEST(Serialize, ModelRoundTripEveryClassifierAndScaler) {
  auto ds = kctest::blobs(15, 3, 3, 2, 2.0);
  const Matrix qs = kctest::random_matrix(30, 3, 1, -1.0, 8.0);
  std::size_t checked = 0;
  for (const auto& cfg : enumerate_grid()) {
    if (config_hash(cfg) % 97 != 0) continue;
    auto c = cfg;
    c.scaler = static_cast<ScalerKind>(checked % 4);
    if (c.k_references > ds.size()) continue;
    const auto m = kms_fit(c, ds, config_hash(c));
    const auto back = kms_model_from_json(roundtrip_text(to_json(m)));
    EXPECT_EQ(back, m) << config_key(c);
    EXPECT_EQ(kms_predict(back, qs), kms_predict(m, qs));
    ++checked;
  }
  EXPECT_GT(checked, 20u);
}

TEST(Serialize, EnsembleAndReportRoundTrip) {
  auto ds = kctest::blobs(12, 2, 2, 4, 2.0);
  SearchOptions opts;
  opts.budget = 12;
  opts.seed = 11;
  const auto report = random_search(ds, opts);
  const auto back = search_report_from_json(roundtrip_text(to_json(report)));
  EXPECT_EQ(to_json(back).dump(), to_json(report).dump());

  const auto ens = build_ensemble(report, ds, 3, 11);
  const auto ens_back = ensemble_from_json(roundtrip_text(to_json(ens)));
  EXPECT_EQ(ens_back, ens);
  const auto p = predictor_from_json(to_json(ens));
  EXPECT_EQ(predict(p, ds.features), ensemble_predict(ens, ds.features));
  EXPECT_EQ(label_names(p), ds.label_names);
}

TEST(Serialize, FailedScoresAreNull) {
  auto ds = kctest::blobs(5, 2, 2, 4);
  SearchOptions opts;
  opts.budget = 30;
  const auto report = random_search(ds, opts);
  const Json j = to_json(report);
  bool saw_null = false;
  for (const auto& e : j.at("evaluated")) saw_null |= e.at("cv_ber").is_null();
  EXPECT_TRUE(saw_null);
  const auto back = search_report_from_json(j);
  for (std::size_t i = 0; i < back.evaluated.size(); ++i) {
    EXPECT_EQ(back.evaluated[i].cv_ber, report.evaluated[i].cv_ber);
  }
}

TEST(Serialize, RejectsWrongFormatAndVersion) {
  auto ds = kctest::blobs(10, 2, 2, 4);
  Configuration cfg;
  cfg.k_references = 4;
  Json j = to_json(kms_fit(cfg, ds, 1));
  Json wrong = j;
  wrong["version"] = 99;
  EXPECT_THROW(kms_model_from_json(wrong), Error);
  wrong = j;
  wrong["format"] = "other";
  EXPECT_THROW(kms_model_from_json(wrong), Error);
  wrong = j;
  wrong.erase("refs");
  EXPECT_THROW(kms_model_from_json(wrong), Error);
  EXPECT_THROW(ensemble_from_json(j), Error);
}

TEST(Serialize, FilesAndFoldPlans) {
  const auto dir = std::filesystem::temp_directory_path() / "kc_serialize";
  std::filesystem::create_directories(dir);
  FoldPlan p;
  p.fold_count = 3;
  p.assignments = {0, 1, 2, 0};
  write_json(dir / "folds.json", to_json(p));
  const auto q = fold_plan_from_json(read_json(dir / "folds.json"));
  EXPECT_EQ(q.assignments, p.assignments);
  EXPECT_THROW(read_json(dir / "missing.json"), Error);
  write_text(dir / "bad.json", "{ nope");
  EXPECT_THROW(read_json(dir / "bad.json"), Error);
  std::filesystem::remove_all(dir);
}
