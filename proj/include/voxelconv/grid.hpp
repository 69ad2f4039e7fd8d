// Copyright 2026 The voxelconv Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <string>

#include "voxelconv/error.hpp"

namespace voxelconv {

/// Bounded voxel grid: per-axis extents plus a batch count.
struct GridShape {
    std::int32_t max_x = 0;
    std::int32_t max_y = 0;
    std::int32_t max_z = 0;
    std::int32_t batches = 1;

    /// Cells per batch (max_x * max_y * max_z).
    std::int64_t volume() const {
        return static_cast<std::int64_t>(max_x) * max_y * max_z;
    }

    /// Cells across all batches.
    std::int64_t total_cells() const { return volume() * batches; }

    bool valid() const {
        if (max_x < 1 || max_y < 1 || max_z < 1 || batches < 1) return false;
        // total_cells must fit the signed 64-bit index range
        constexpr std::int64_t kLimit = INT64_MAX;
        std::int64_t acc = max_x;
        for (std::int64_t v : {static_cast<std::int64_t>(max_y),
                               static_cast<std::int64_t>(max_z),
                               static_cast<std::int64_t>(batches)}) {
            if (acc > kLimit / v) return false;
            acc *= v;
        }
        return true;
    }

    void ensure_valid() const {
        if (!valid()) {
            throw InvalidShapeError("invalid grid shape " + std::to_string(max_x) + "x" +
                                    std::to_string(max_y) + "x" + std::to_string(max_z) +
                                    " batches=" + std::to_string(batches));
        }
    }

    friend bool operator==(const GridShape&, const GridShape&) = default;
};

/// One active site: batch id plus non-negative voxel coordinates.
struct VoxelCoord {
    std::int32_t batch = 0;
    std::int32_t x = 0;
    std::int32_t y = 0;
    std::int32_t z = 0;

    friend auto operator<=>(const VoxelCoord&, const VoxelCoord&) = default;
};

inline bool in_bounds(const VoxelCoord& c, const GridShape& shape) {
    return c.batch >= 0 && c.batch < shape.batches && c.x >= 0 && c.x < shape.max_x &&
           c.y >= 0 && c.y < shape.max_y && c.z >= 0 && c.z < shape.max_z;
}

/// Isotropic stride used by the downsampling and upsampling operators.
struct StrideSpec {
    std::int32_t s = 1;
};

/// Where an input coordinate lands after stride-s downsampling: the coarse
/// cell it belongs to and its linearized position within that cell.
struct CellMapping {
    VoxelCoord out_coord;
    std::int32_t kernel_offset = 0;
};

/// index = x + y*max_x + z*max_x*max_y, batch-local, in [0, volume()).
inline std::int64_t linearize(const VoxelCoord& c, const GridShape& shape) {
    if (!in_bounds(c, shape)) {
        throw OutOfBoundsError("coordinate (" + std::to_string(c.batch) + "," +
                               std::to_string(c.x) + "," + std::to_string(c.y) + "," +
                               std::to_string(c.z) + ") outside grid");
    }
    return c.x + static_cast<std::int64_t>(c.y) * shape.max_x +
           static_cast<std::int64_t>(c.z) * shape.max_x * shape.max_y;
}

/// Exact inverse of linearize; returns (x, y, z).
inline std::array<std::int32_t, 3> delinearize(std::int64_t index, const GridShape& shape) {
    if (index < 0 || index >= shape.volume()) {
        throw OutOfBoundsError("linear index " + std::to_string(index) + " outside grid");
    }
    const std::int64_t plane = static_cast<std::int64_t>(shape.max_x) * shape.max_y;
    const std::int32_t z = static_cast<std::int32_t>(index / plane);
    index -= static_cast<std::int64_t>(z) * plane;
    const std::int32_t y = static_cast<std::int32_t>(index / shape.max_x);
    const std::int32_t x = static_cast<std::int32_t>(index % shape.max_x);
    return {x, y, z};
}

/// Batch-aware table key: batch * volume + linearize(x, y, z).
inline std::int64_t cell_key(const VoxelCoord& c, const GridShape& shape) {
    return static_cast<std::int64_t>(c.batch) * shape.volume() + linearize(c, shape);
}

inline VoxelCoord coord_from_key(std::int64_t key, const GridShape& shape) {
    const std::int64_t vol = shape.volume();
    const std::int32_t batch = static_cast<std::int32_t>(key / vol);
    const auto xyz = delinearize(key % vol, shape);
    return {batch, xyz[0], xyz[1], xyz[2]};
}

/// Maps a fine coordinate to its stride-s cell. The start cell is the
/// stride-aligned corner floor(coord/s)*s; the offsets within the cell give
/// the kernel slot offset_x*s^2 + offset_y*s + offset_z. Coordinates are
/// non-negative, so integer division is the floor.
inline CellMapping cell_map(const VoxelCoord& c, StrideSpec stride) {
    const std::int32_t s = stride.s;
    const std::int32_t start_x = (c.x / s) * s;
    const std::int32_t start_y = (c.y / s) * s;
    const std::int32_t start_z = (c.z / s) * s;
    const std::int32_t off_x = c.x - start_x;
    const std::int32_t off_y = c.y - start_y;
    const std::int32_t off_z = c.z - start_z;
    CellMapping m;
    m.out_coord = {c.batch, start_x / s, start_y / s, start_z / s};
    m.kernel_offset = off_x * s * s + off_y * s + off_z;
    return m;
}

/// Coarse grid covering every stride-s cell touched by `shape`: ceil(extent/s)
/// per axis, batches unchanged.
inline GridShape downsampled_shape(const GridShape& shape, StrideSpec stride) {
    const std::int32_t s = stride.s;
    return {(shape.max_x + s - 1) / s, (shape.max_y + s - 1) / s, (shape.max_z + s - 1) / s,
            shape.batches};
}

}  // namespace voxelconv
