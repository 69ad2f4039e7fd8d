// Copyright 2026 The voxelconv Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>

#include "voxelconv/sparse_tensor.hpp"
#include "voxelconv/weights.hpp"

// Brute-force dense reference implementations. Everything here is written
// against the core tensor types only and stays independent of the rule-table
// and engine code paths it is used to validate.
namespace voxelconv::oracle {

/// Textbook cross-correlation over a dense grid, one naive loop nest, zero
/// padding. Output extent per axis: floor((extent + 2*pad - k)/stride) + 1.
DenseGrid dense_conv(const DenseGrid& g, const WeightTensor& w, std::int32_t kernel,
                     std::int32_t stride, std::array<std::int32_t, 3> padding);

/// Per-fine-site product formula for the upsampling operator, evaluated with
/// its own floor arithmetic and a linear scan for the parent row. Returns the
/// fine feature matrix row-major; fine sites without a parent get zeros.
std::vector<float> inverse_reference(const IndexSet& fine, const SparseTensor& coarse,
                                     const WeightTensor& w, std::int32_t stride);

/// Sequential set-based count of distinct (batch, floor(coord/stride)) cells.
std::int64_t unique_cells_reference(const SparseTensor& t, std::int32_t stride);

/// Deterministic random tensor: round(density * total_cells) unique sites
/// drawn by a seeded shuffle, features uniform in [-1, 1]. Identical output
/// for identical arguments on every platform.
SparseTensor random_sparse_tensor(std::uint64_t seed, const GridShape& shape, double density,
                                  std::int32_t channels);

/// Deterministic random weights, values uniform in [-1, 1].
WeightTensor random_weights(std::uint64_t seed, std::int32_t out_channels,
                            std::int32_t in_channels, std::int32_t kernel_volume);

/// Deterministic random feature values uniform in [-1, 1].
std::vector<float> random_features(std::uint64_t seed, std::size_t count);

}  // namespace voxelconv::oracle
