// Copyright 2026 The voxelconv Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "voxelconv/grid.hpp"

namespace voxelconv {

/// Active-site coordinates in structure-of-arrays layout: one contiguous
/// array per component so bulk scans touch consecutive memory.
struct IndexSet {
    GridShape shape;
    std::vector<std::int32_t> batch;
    std::vector<std::int32_t> x;
    std::vector<std::int32_t> y;
    std::vector<std::int32_t> z;

    std::int32_t size() const { return static_cast<std::int32_t>(batch.size()); }

    VoxelCoord coord(std::int32_t row) const {
        return {batch[row], x[row], y[row], z[row]};
    }

    void push_back(const VoxelCoord& c) {
        batch.push_back(c.batch);
        x.push_back(c.x);
        y.push_back(c.y);
        z.push_back(c.z);
    }

    friend bool operator==(const IndexSet&, const IndexSet&) = default;
};

enum class IssueKind { OutOfBounds, DuplicateCoordinate, LengthMismatch };

struct ValidationIssue {
    IssueKind kind;
    std::int64_t row_a = -1;
    std::int64_t row_b = -1;
    std::string detail;
};

/// Sparse voxel tensor: unique in-bounds sites plus a row-major feature
/// matrix (row = site, column = channel). Immutable once constructed; the
/// constructor rejects any input that violates an invariant.
class SparseTensor {
  public:
    SparseTensor() = default;

    /// Throws OutOfBoundsError, DuplicateCoordinateError or
    /// LengthMismatchError instead of admitting invalid state.
    SparseTensor(GridShape shape, std::vector<std::int32_t> batch, std::vector<std::int32_t> x,
                 std::vector<std::int32_t> y, std::vector<std::int32_t> z,
                 std::vector<float> features, std::int32_t channels);

    SparseTensor(IndexSet sites, std::vector<float> features, std::int32_t channels);

    const IndexSet& sites() const { return sites_; }
    const GridShape& shape() const { return sites_.shape; }
    std::int32_t n() const { return sites_.size(); }
    std::int32_t channels() const { return channels_; }
    const std::vector<float>& features() const { return features_; }

    VoxelCoord coord(std::int32_t row) const { return sites_.coord(row); }

    float feature(std::int32_t row, std::int32_t c) const {
        return features_[static_cast<std::size_t>(row) * channels_ + c];
    }

    std::span<const float> feature_row(std::int32_t row) const {
        return {features_.data() + static_cast<std::size_t>(row) * channels_,
                static_cast<std::size_t>(channels_)};
    }

    friend bool operator==(const SparseTensor&, const SparseTensor&) = default;

  private:
    IndexSet sites_;
    std::int32_t channels_ = 0;
    std::vector<float> features_;
};

/// Reports every invariant violation in the raw parts of a would-be tensor.
/// Empty result iff the parts form a valid SparseTensor.
std::vector<ValidationIssue> validate(const GridShape& shape,
                                      std::span<const std::int32_t> batch,
                                      std::span<const std::int32_t> x,
                                      std::span<const std::int32_t> y,
                                      std::span<const std::int32_t> z,
                                      std::size_t feature_count, std::int32_t channels);

std::vector<ValidationIssue> validate(const SparseTensor& t);

std::string to_string(const ValidationIssue& issue);

/// Dense counterpart of a SparseTensor; zero wherever no site is active.
/// Value layout: ((batch * volume + linear(x,y,z)) * channels + c).
struct DenseGrid {
    GridShape shape;
    std::int32_t channels = 0;
    std::vector<float> values;

    std::int64_t offset(std::int32_t b, std::int32_t x, std::int32_t y, std::int32_t z,
                        std::int32_t c) const {
        const std::int64_t lin = linearize({b, x, y, z}, shape);
        return (static_cast<std::int64_t>(b) * shape.volume() + lin) * channels + c;
    }

    float at(std::int32_t b, std::int32_t x, std::int32_t y, std::int32_t z,
             std::int32_t c) const {
        return values[offset(b, x, y, z, c)];
    }

    float& at(std::int32_t b, std::int32_t x, std::int32_t y, std::int32_t z, std::int32_t c) {
        return values[offset(b, x, y, z, c)];
    }
};

DenseGrid to_dense(const SparseTensor& t);

/// Densifies into a larger grid (extents >= t.shape(), same batch count);
/// the extension cells stay zero.
DenseGrid to_dense(const SparseTensor& t, const GridShape& target);

/// Drops all-zero cells and returns the remaining sites in canonical order
/// (ascending batch, then linearized coordinate).
SparseTensor sparsify(const DenseGrid& g);

/// Rows reordered into canonical (batch, linearized coordinate) order.
SparseTensor canonical_sorted(const SparseTensor& t);

/// One raw input point: continuous position plus an opaque feature vector.
struct PointRecord {
    std::int32_t batch = 0;
    float x = 0.0f;
    float y = 0.0f;
    float z = 0.0f;
    std::vector<float> features;
};

enum class Reducer { Mean, Sum, First };

/// Quantizes points to voxels via floor((p - origin) / voxel_size), merging
/// points that share a voxel with the reducer. Output rows are in canonical
/// order. Throws OutOfBoundsError (with the point index) if a quantized
/// point leaves the grid.
SparseTensor voxelize(std::span<const PointRecord> points, float voxel_size,
                      std::array<float, 3> origin, const GridShape& shape, Reducer reducer);

}  // namespace voxelconv
