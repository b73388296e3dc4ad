// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "kernelcast/data.hpp"
#include "kernelcast/matrix.hpp"
#include "kernelcast/sampling.hpp"

namespace kernelcast {

enum class KernelKind { linear, gaussian, sigmoid, cauchy };

std::string_view to_string(KernelKind kind);
KernelKind parse_kernel_kind(std::string_view name);

/// linear: d; gaussian: exp(-d/s); sigmoid: 1/(1+exp(s-d)); cauchy: 1/(1+d/s).
/// The sigmoid grows with distance. exp arguments are clamped to [-700, 700].
double kernel_value(KernelKind kind, double dist, double sigma);

struct MappedDataset {
  Matrix features;  ///< n x k
  std::vector<LabelId> labels;
  std::size_t n_classes = 0;

  std::size_t size() const noexcept { return features.rows(); }
};

/// Row i, column j is kernel_value(kind, d(x_i, c_j), sigma_j).
Matrix map_features(const Matrix& features, const ReferenceSet& refs, KernelKind kind);
/// One row into `out` (size k).
void map_row(std::span<const double> x, const ReferenceSet& refs, KernelKind kind, std::span<double> out);
MappedDataset map_dataset(const Dataset& ds, const ReferenceSet& refs, KernelKind kind);

}  // namespace kernelcast
