// SPDX-License-Identifier: Apache-2.0
#include "kernelcast/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "kernelcast/error.hpp"

namespace kernelcast {
namespace {

void check_training(std::size_t rows, std::size_t labels, std::size_t n_classes) {
  if (rows == 0) throw Error(ErrorCode::insufficient_data, "cannot fit a classifier on an empty dataset");
  if (rows != labels) throw Error(ErrorCode::invalid_argument, "feature and label counts differ");
  if (n_classes == 0) throw Error(ErrorCode::invalid_argument, "classifier needs at least one class");
}

void check_query_dims(std::size_t got, std::size_t want) {
  if (got != want) {
    throw Error(ErrorCode::dimension_mismatch,
                "query has dimension " + std::to_string(got) + ", model expects " + std::to_string(want));
  }
}

LabelId argmax_lowest(std::span<const double> scores) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < scores.size(); ++c) {
    if (scores[c] > scores[best]) best = c;
  }
  return static_cast<LabelId>(best);
}

}  // namespace

std::string_view to_string(Weighting w) { return w == Weighting::distance ? "distance" : "uniform"; }

Weighting parse_weighting(std::string_view name) {
  if (name == "uniform") return Weighting::uniform;
  if (name == "distance") return Weighting::distance;
  throw Error(ErrorCode::invalid_argument, "unknown weighting '" + std::string(name) + "'");
}

KnnModel knn_fit(Matrix train, std::vector<LabelId> labels, std::size_t n_classes, const KnnParams& params) {
  check_training(train.rows(), labels.size(), n_classes);
  if (params.neighbors == 0) throw Error(ErrorCode::invalid_argument, "neighbor count must be positive");
  for (LabelId y : labels) {
    if (y >= n_classes) throw Error(ErrorCode::invalid_argument, "label id out of range");
  }
  return {params, std::move(train), std::move(labels), n_classes};
}

KnnModel knn_fit(const MappedDataset& mds, const KnnParams& params) {
  return knn_fit(mds.features, mds.labels, mds.n_classes, params);
}

LabelId knn_predict_one(const KnnModel& model, std::span<const double> query, std::vector<double>& scratch) {
  check_query_dims(query.size(), model.train.cols());
  const std::size_t n = model.train.rows();
  scratch.resize(n);
  RowDistances(model.params.distance, model.train).compute(query, scratch);

  const std::size_t k = std::min(model.params.neighbors, n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto closer = [&](std::size_t a, std::size_t b) {
    if (scratch[a] != scratch[b]) return scratch[a] < scratch[b];
    return a < b;
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(), closer);

  std::vector<double> votes(model.n_classes, 0.0);
  for (std::size_t t = 0; t < k; ++t) {
    const std::size_t i = order[t];
    votes[model.labels[i]] +=
        model.params.weighting == Weighting::uniform ? 1.0 : 1.0 / (knn_weight_epsilon + scratch[i]);
  }
  return argmax_lowest(votes);
}

std::vector<LabelId> knn_predict(const KnnModel& model, const Matrix& queries) {
  check_query_dims(queries.cols(), model.train.cols());
  std::vector<LabelId> out(queries.rows());
  std::vector<double> scratch;
  for (std::size_t i = 0; i < queries.rows(); ++i) out[i] = knn_predict_one(model, queries.row(i), scratch);
  return out;
}

GnbModel gnb_fit(const Matrix& train, std::span<const LabelId> labels, std::size_t n_classes) {
  check_training(train.rows(), labels.size(), n_classes);
  const std::size_t n = train.rows();
  const std::size_t d = train.cols();

  GnbModel m;
  m.priors.assign(n_classes, 0.0);
  m.present.assign(n_classes, 0);
  m.means = Matrix(n_classes, d, 0.0);
  m.variances = Matrix(n_classes, d, 0.0);
  std::vector<std::size_t> counts(n_classes, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const LabelId y = labels[i];
    if (y >= n_classes) throw Error(ErrorCode::invalid_argument, "label id out of range");
    ++counts[y];
    auto mu = m.means.row(y);
    auto x = train.row(i);
    for (std::size_t j = 0; j < d; ++j) mu[j] += x[j];
  }
  for (std::size_t c = 0; c < n_classes; ++c) {
    if (counts[c] == 0) continue;
    m.present[c] = 1;
    m.priors[c] = static_cast<double>(counts[c]) / static_cast<double>(n);
    for (double& v : m.means.row(c)) v /= static_cast<double>(counts[c]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    auto mu = m.means.row(labels[i]);
    auto var = m.variances.row(labels[i]);
    auto x = train.row(i);
    for (std::size_t j = 0; j < d; ++j) var[j] += (x[j] - mu[j]) * (x[j] - mu[j]);
  }
  for (std::size_t c = 0; c < n_classes; ++c) {
    if (counts[c] == 0) continue;
    for (double& v : m.variances.row(c)) v /= static_cast<double>(counts[c]);
  }

  // Floor from the mean of the whole-sample column variances.
  double mean_var = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += train(i, j);
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) var += (train(i, j) - mean) * (train(i, j) - mean);
    mean_var += var / static_cast<double>(n);
  }
  if (d > 0) mean_var /= static_cast<double>(d);
  m.var_floor = mean_var > 0.0 ? gnb_var_smoothing * mean_var : gnb_var_smoothing;
  for (std::size_t c = 0; c < n_classes; ++c) {
    for (double& v : m.variances.row(c)) v = std::max(v, m.var_floor);
  }
  return m;
}

GnbModel gnb_fit(const MappedDataset& mds) { return gnb_fit(mds.features, mds.labels, mds.n_classes); }

std::vector<double> gnb_log_scores(const GnbModel& model, std::span<const double> query) {
  check_query_dims(query.size(), model.means.cols());
  std::vector<double> scores(model.n_classes(), -std::numeric_limits<double>::infinity());
  for (std::size_t c = 0; c < model.n_classes(); ++c) {
    if (!model.present[c]) continue;
    double s = std::log(model.priors[c]);
    auto mu = model.means.row(c);
    auto var = model.variances.row(c);
    for (std::size_t j = 0; j < query.size(); ++j) {
      const double diff = query[j] - mu[j];
      s -= 0.5 * std::log(2.0 * std::numbers::pi * var[j]) + diff * diff / (2.0 * var[j]);
    }
    scores[c] = s;
  }
  return scores;
}

std::vector<LabelId> gnb_predict(const GnbModel& model, const Matrix& queries) {
  check_query_dims(queries.cols(), model.means.cols());
  std::vector<LabelId> out(queries.rows());
  for (std::size_t i = 0; i < queries.rows(); ++i) out[i] = argmax_lowest(gnb_log_scores(model, queries.row(i)));
  return out;
}

}  // namespace kernelcast
