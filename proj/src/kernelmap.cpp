// SPDX-License-Identifier: Apache-2.0
#include "kernelcast/kernelmap.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kernelcast/error.hpp"

namespace kernelcast {
namespace {

double clamped_exp(double x) { return std::exp(std::clamp(x, -700.0, 700.0)); }

void check_dims(std::size_t dims, const ReferenceSet& refs) {
  if (dims != refs.refs.cols()) {
    throw Error(ErrorCode::dimension_mismatch, "data has dimension " + std::to_string(dims) +
                                                   ", references have " + std::to_string(refs.refs.cols()));
  }
  if (refs.sigmas.size() != refs.size()) {
    throw Error(ErrorCode::invalid_argument, "reference set has " + std::to_string(refs.size()) +
                                                 " rows but " + std::to_string(refs.sigmas.size()) + " sigmas");
  }
}

}  // namespace

std::string_view to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::linear: return "linear";
    case KernelKind::gaussian: return "gaussian";
    case KernelKind::sigmoid: return "sigmoid";
    case KernelKind::cauchy: return "cauchy";
  }
  return "linear";
}

KernelKind parse_kernel_kind(std::string_view name) {
  for (auto k : {KernelKind::linear, KernelKind::gaussian, KernelKind::sigmoid, KernelKind::cauchy}) {
    if (to_string(k) == name) return k;
  }
  throw Error(ErrorCode::invalid_argument, "unknown kernel '" + std::string(name) + "'");
}

double kernel_value(KernelKind kind, double dist, double sigma) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::invalid_argument, "kernel scale must be positive");
  switch (kind) {
    case KernelKind::linear: return dist;
    case KernelKind::gaussian: return clamped_exp(-dist / sigma);
    case KernelKind::sigmoid: return 1.0 / (1.0 + clamped_exp(sigma - dist));
    case KernelKind::cauchy: return 1.0 / (1.0 + dist / sigma);
  }
  return dist;
}

void map_row(std::span<const double> x, const ReferenceSet& refs, KernelKind kind, std::span<double> out) {
  check_dims(x.size(), refs);
  RowDistances scan(refs.distance, refs.refs);
  scan.compute(x, out);
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = kernel_value(kind, out[j], refs.sigmas[j]);
}

Matrix map_features(const Matrix& features, const ReferenceSet& refs, KernelKind kind) {
  check_dims(features.cols(), refs);
  const std::size_t k = refs.size();
  Matrix out(features.rows(), k);
  RowDistances scan(refs.distance, refs.refs);
  for (std::size_t i = 0; i < features.rows(); ++i) {
    auto row = out.row(i);
    scan.compute(features.row(i), row);
    for (std::size_t j = 0; j < k; ++j) row[j] = kernel_value(kind, row[j], refs.sigmas[j]);
  }
  return out;
}

MappedDataset map_dataset(const Dataset& ds, const ReferenceSet& refs, KernelKind kind) {
  return {map_features(ds.features, refs, kind), ds.labels, ds.n_classes()};
}

}  // namespace kernelcast
