// Copyright 2026 The voxelconv Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "voxelconv/location_table.hpp"
#include "voxelconv/sparse_tensor.hpp"
#include "voxelconv/weights.hpp"

namespace voxelconv {

// .spt binary tensor format, all multi-byte values little-endian:
//   magic "SPT1"
//   u32 version(=1), batches, n, channels, max_x, max_y, max_z
//   i32 batch[n], x[n], y[n], z[n]
//   f32 features[n*channels] row-major
// Total size is exactly 32 + 16*n + 4*n*channels bytes.

void save_tensor(const SparseTensor& t, std::ostream& out);
void save_tensor(const SparseTensor& t, const std::filesystem::path& path);

std::string tensor_to_bytes(const SparseTensor& t);

/// Throws BadMagicError, VersionUnsupportedError, TruncatedError or
/// InvariantViolationError; a successful load satisfies every tensor
/// invariant.
SparseTensor load_tensor(std::istream& in);
SparseTensor load_tensor(const std::filesystem::path& path);
SparseTensor tensor_from_bytes(const std::string& bytes);

// Weight files are JSON documents with fields out_channels, in_channels,
// kernel (k for submanifold, s otherwise), layout "oc_koff_ic" and a flat
// values array of length oc * kernel^3 * ic.

void save_weights(const WeightTensor& w, std::int32_t kernel,
                  const std::filesystem::path& path);

struct LoadedWeights {
    WeightTensor weights;
    std::int32_t kernel = 0;
};

LoadedWeights load_weights(const std::filesystem::path& path);

/// Plain-text points: one `batch,fx,fy,fz,f0,...,fC-1` line per point, an
/// optional header line detected by a non-numeric first field.
std::vector<PointRecord> load_points(std::istream& in);
std::vector<PointRecord> load_points(const std::filesystem::path& path);

struct EngineConfig {
    std::int64_t lct_dense_threshold = kDefaultDenseThreshold;
};

/// JSON config; accepts {"lct":{"dense_threshold":N}} or the flat
/// {"lct.dense_threshold":N} spelling.
EngineConfig load_config(const std::filesystem::path& path);

}  // namespace voxelconv
