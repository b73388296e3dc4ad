// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "kernelcast/error.hpp"
#include "kernelcast/kernelmap.hpp"
#include "test_util.hpp"

using namespace kernelcast;

TEST(Kernel, Examples) {
  EXPECT_EQ(kernel_value(KernelKind::gaussian, 0.0, 2.0), 1.0);
  EXPECT_EQ(kernel_value(KernelKind::cauchy, 2.0, 2.0), 0.5);
  EXPECT_EQ(kernel_value(KernelKind::sigmoid, 2.0, 2.0), 0.5);
  EXPECT_NEAR(kernel_value(KernelKind::gaussian, 3.0, 3.0), 0.367879, 1e-6);
  EXPECT_EQ(kernel_value(KernelKind::linear, 4.25, 1.0), 4.25);
  EXPECT_THROW(kernel_value(KernelKind::gaussian, 1.0, 0.0), Error);
  EXPECT_THROW(kernel_value(KernelKind::linear, 1.0, -1.0), Error);
}

TEST(Kernel, ExtremeArgumentsStayFinite) {
  for (auto k : {KernelKind::gaussian, KernelKind::sigmoid, KernelKind::cauchy}) {
    for (double d : {0.0, 1e-300, 1e300}) {
      for (double s : {1e-300, 1.0, 1e300}) {
        const double v = kernel_value(k, d, s);
        EXPECT_TRUE(std::isfinite(v)) << d << " " << s;
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
      }
    }
  }
}

TEST(Kernel, Monotonicity) {
  auto dists = kctest::random_matrix(1, 200, 4, 0.0, 5.0).data();
  std::sort(dists.begin(), dists.end());
  dists.erase(std::unique(dists.begin(), dists.end()), dists.end());
  for (std::size_t i = 1; i < dists.size(); ++i) {
    const double a = dists[i - 1], b = dists[i];
    EXPECT_GT(kernel_value(KernelKind::gaussian, a, 1.5), kernel_value(KernelKind::gaussian, b, 1.5));
    EXPECT_GT(kernel_value(KernelKind::cauchy, a, 1.5), kernel_value(KernelKind::cauchy, b, 1.5));
    EXPECT_LT(kernel_value(KernelKind::sigmoid, a, 1.5), kernel_value(KernelKind::sigmoid, b, 1.5));
    EXPECT_EQ(kernel_value(KernelKind::linear, a, 1.5), a);
  }
}

TEST(Map, CauchyExample) {
  ReferenceSet refs;
  refs.refs = Matrix(2, 2, std::vector<double>{3, 4, 0, 1});
  refs.sigmas = {5, 1};
  const Matrix x(1, 2, 0.0);
  const Matrix out = map_features(x, refs, KernelKind::cauchy);
  EXPECT_EQ(out(0, 0), 0.5);
  EXPECT_EQ(out(0, 1), 0.5);
}

TEST(Map, LinearIsDistanceMatrixAndSelfColumnIsOne) {
  const Matrix data = kctest::random_matrix(12, 3, 2);
  for (auto kind : {DistanceKind::euclidean, DistanceKind::angle}) {
    ReferenceSet refs;
    refs.distance = kind;
    refs.refs = data.select_rows(std::vector<std::size_t>{0, 5, 7});
    refs.sigmas = {1.0, 2.0, 3.0};
    const Matrix lin = map_features(data, refs, KernelKind::linear);
    const Matrix gau = map_features(data, refs, KernelKind::gaussian);
    ASSERT_EQ(lin.rows(), 12u);
    ASSERT_EQ(lin.cols(), 3u);
    for (std::size_t i = 0; i < 12; ++i) {
      for (std::size_t j = 0; j < 3; ++j) {
        EXPECT_EQ(lin(i, j), distance(kind, data.row(i), refs.refs.row(j)));
        EXPECT_EQ(gau(i, j), kernel_value(KernelKind::gaussian, lin(i, j), refs.sigmas[j]));
      }
    }
    EXPECT_EQ(gau(5, 1), 1.0);
  }
}

TEST(Map, RowMatchesBatchAndRanges) {
  const Matrix data = kctest::random_matrix(20, 4, 8);
  ReferenceSet refs;
  refs.refs = kctest::random_matrix(5, 4, 9);
  refs.sigmas = {0.5, 1, 2, 3, 4};
  for (auto k : {KernelKind::linear, KernelKind::gaussian, KernelKind::sigmoid, KernelKind::cauchy}) {
    const Matrix batch = map_features(data, refs, k);
    EXPECT_EQ(batch, map_features(data, refs, k));
    std::vector<double> row(5);
    for (std::size_t i = 0; i < 20; ++i) {
      map_row(data.row(i), refs, k, row);
      for (std::size_t j = 0; j < 5; ++j) {
        EXPECT_EQ(row[j], batch(i, j));
        if (k == KernelKind::linear) {
          EXPECT_GE(row[j], 0.0);
        } else if (k == KernelKind::sigmoid) {
          EXPECT_GT(row[j], 0.0);
          EXPECT_LT(row[j], 1.0);
        } else {
          EXPECT_GT(row[j], 0.0);
          EXPECT_LE(row[j], 1.0);
        }
      }
    }
  }
}

TEST(Map, DatasetKeepsLabelsAndChecksDims) {
  auto ds = kctest::blobs(3, 2, 2, 1);
  ReferenceSet refs;
  refs.refs = Matrix(1, 2, 0.0);
  refs.sigmas = {1.0};
  const auto mds = map_dataset(ds, refs, KernelKind::gaussian);
  EXPECT_EQ(mds.labels, ds.labels);
  EXPECT_EQ(mds.n_classes, 2u);
  refs.refs = Matrix(1, 3, 0.0);
  try {
    map_dataset(ds, refs, KernelKind::gaussian);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::dimension_mismatch);
  }
}
