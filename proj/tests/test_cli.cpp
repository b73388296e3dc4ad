// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;

namespace {

struct CmdResult {
  int status = 0;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("kc_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  CmdResult run(const std::string& args, const std::string& env = "") {
    const fs::path out = dir_ / "stdout.txt", err = dir_ / "stderr.txt";
    const std::string cmd = env + " " KERNELCAST_CLI " " + args + " >" + out.string() + " 2>" + err.string();
    CmdResult r;
    const int raw = std::system(cmd.c_str());
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string write_blobs(const std::string& name, std::size_t per_class, std::uint64_t seed, double spread = 0.5) {
    const auto ds = kctest::blobs(per_class, 2, 2, seed, spread);
    std::ofstream out(path(name));
    out << "x1,x2,label\n";
    out.precision(17);
    for (std::size_t i = 0; i < ds.size(); ++i) {
      out << ds.features(i, 0) << "," << ds.features(i, 1) << "," << (ds.labels[i] ? "\"big, b\"" : "small")
          << "\n";
    }
    return path(name);
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, SearchBudgetAndDeterminism) {
  const auto data = write_blobs("d.csv", 15, 1);
  ASSERT_EQ(run("search --data " + data + " --budget 1 --out " + path("one.json")).status, 0);
  EXPECT_EQ(nlohmann::json::parse(slurp(path("one.json")))["evaluated"].size(), 1u);

  ASSERT_EQ(run("search --data " + data + " --budget 20 --seed 4 --no-timing --out " + path("a.json")).status, 0);
  ASSERT_EQ(run("--threads 3 search --data " + data + " --budget 20 --seed 4 --no-timing --out " + path("b.json")).status, 0);
  ASSERT_EQ(run("search --data " + data + " --budget 20 --seed 4 --no-timing --out " + path("c.json"),
                "KERNELCAST_SIMD=scalar")
                .status,
            0);
  EXPECT_EQ(slurp(path("a.json")), slurp(path("b.json")));
  EXPECT_EQ(slurp(path("a.json")), slurp(path("c.json")));
}

TEST_F(Cli, GridModeOnTinyData) {
  const auto data = write_blobs("tiny.csv", 6, 2);
  ASSERT_EQ(run("search --data " + data + " --mode grid --out " + path("g.json")).status, 0);
  EXPECT_EQ(nlohmann::json::parse(slurp(path("g.json")))["evaluated"].size(), 4420u);
}

TEST_F(Cli, TrainPredictRoundTrip) {
  const auto data = write_blobs("d.csv", 20, 3);
  ASSERT_EQ(run("search --data " + data + " --budget 24 --seed 2 --out " + path("r.json")).status, 0);
  ASSERT_EQ(run("train --data " + data + " --report " + path("r.json") + " --out " + path("m.json")).status, 0);
  ASSERT_EQ(run("train --data " + data + " --report " + path("r.json") + " --ensemble-size 1 --out " +
                path("e1.json"))
                .status,
            0);
  ASSERT_EQ(run("train --data " + data + " --report " + path("r.json") + " --ensemble-size --out " +
                path("e15.json"))
                .status,
            0);
  EXPECT_EQ(nlohmann::json::parse(slurp(path("e15.json")))["members"].size(), 15u);

  ASSERT_EQ(run("predict --model " + path("m.json") + " --data " + data + " --truth-col label --out " +
                path("p_single.csv"))
                .status,
            0);
  ASSERT_EQ(run("predict --model " + path("e1.json") + " --data " + data + " --truth-col label --out " +
                path("p_e1.csv"))
                .status,
            0);
  const std::string single = slurp(path("p_single.csv"));
  EXPECT_EQ(single, slurp(path("p_e1.csv")));
  EXPECT_EQ(std::count(single.begin(), single.end(), '\n'), 41);
  EXPECT_NE(single.find("\"big, b\""), std::string::npos);
}

TEST_F(Cli, PerfectModelPrintsZeroBer) {
  const auto data = write_blobs("d.csv", 10, 5);
  const std::string cfg =
      "\"k=4 dist=euclidean sampler=fft kernel=gaussian ref=centers clf=knn nn=1 weight=uniform nndist=euclidean\"";
  ASSERT_EQ(run("train --data " + data + " --config " + cfg + " --out " + path("m.json")).status, 0);
  const auto r = run("predict --model " + path("m.json") + " --data " + data + " --truth-col label --out " +
                     path("p.csv"));
  ASSERT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("ber_paper 0\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("ber_conventional 0\n"), std::string::npos);
}

TEST_F(Cli, ErrorsAreReportedWithPrefixAndNonZeroExit) {
  const auto data = write_blobs("d.csv", 10, 5);
  auto r = run("predict --model " + path("missing.json") + " --data " + data);
  EXPECT_NE(r.status, 0);
  EXPECT_EQ(r.err.rfind("kernelcast: error[io]:", 0), 0u) << r.err;

  std::ofstream(path("bad.csv")) << "a,label\n1,x\nfoo,y\n";
  r = run("search --data " + path("bad.csv") + " --out " + path("r.json"));
  EXPECT_NE(r.status, 0);
  EXPECT_EQ(r.err.rfind("kernelcast: error[parse]:", 0), 0u) << r.err;

  r = run("search --data " + data + " --mode sideways --out " + path("r.json"));
  EXPECT_NE(r.status, 0);
  r = run("");
  EXPECT_NE(r.status, 0);
}

TEST_F(Cli, ConsensusAndMap) {
  const auto data = write_blobs("d.csv", 15, 7, 2.0);
  ASSERT_EQ(run("search --data " + data + " --budget 20 --out " + path("r.json")).status, 0);
  auto r = run("consensus --data " + data + " --report " + path("r.json") + " --ell-max 7 --out " + path("c.csv"));
  ASSERT_EQ(r.status, 0) << r.err;
  const std::string curve = slurp(path("c.csv"));
  EXPECT_EQ(curve.rfind("ell,raw_ratio,normalized_ratio\n3,", 0), 0u);
  EXPECT_EQ(std::count(curve.begin(), curve.end(), '\n'), 4);

  ASSERT_EQ(run("train --data " + data + " --report " + path("r.json") + " --out " + path("m.json")).status, 0);
  r = run("map --model " + path("m.json") + " --data " + data + " --label-col label");
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 31);
}

TEST_F(Cli, Benchmark) {
  nlohmann::json manifest = {{"datasets", nlohmann::json::array()}};
  nlohmann::json splits = nlohmann::json::array();
  for (int s = 0; s < 2; ++s) {
    write_blobs("tr" + std::to_string(s) + ".csv", 12, 10 + s, 1.5);
    write_blobs("te" + std::to_string(s) + ".csv", 6, 20 + s, 1.5);
    splits.push_back({{"train", "tr" + std::to_string(s) + ".csv"}, {"test", "te" + std::to_string(s) + ".csv"}});
  }
  manifest["datasets"].push_back({{"name", "blobs"}, {"splits", splits}});
  std::ofstream(path("manifest.json")) << manifest.dump();
  const auto r = run("benchmark --manifest " + path("manifest.json") +
                     " --methods kms-rs,kmse-rs --budget 10 --ensemble-size 3 --max-splits 1 --out " +
                     path("b.json"));
  ASSERT_EQ(r.status, 0) << r.err;
  const auto b = nlohmann::json::parse(slurp(path("b.json")));
  EXPECT_EQ(b["datasets"][0]["splits_used"], 1);
  EXPECT_EQ(b["methods_by_rank"].size(), 2u);
}
