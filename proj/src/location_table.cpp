// Copyright 2026 The voxelconv Authors
// SPDX-License-Identifier: Apache-2.0

#include "voxelconv/location_table.hpp"

#include <atomic>

#include "voxelconv/error.hpp"
#include "voxelconv/parallel.hpp"

namespace voxelconv {

LctBackend LocationTable::resolve_backend(const GridShape& shape, const LctConfig& config) {
    if (config.backend != LctBackend::Auto) return config.backend;
    return shape.total_cells() <= config.dense_threshold ? LctBackend::Dense : LctBackend::Hash;
}

LocationTable LocationTable::build(const IndexSet& sites, const LctConfig& config, int workers) {
    sites.shape.ensure_valid();
    LocationTable lct;
    lct.shape_ = sites.shape;
    lct.backend_ = resolve_backend(sites.shape, config);
    const std::int32_t n = sites.size();

    if (lct.backend_ == LctBackend::Dense) {
        lct.dense_.assign(static_cast<std::size_t>(sites.shape.total_cells()), -1);
        std::int32_t* table = lct.dense_.data();
        const GridShape shape = sites.shape;
        parallel_for(0, n, workers, [&](std::int64_t begin, std::int64_t end) {
            for (std::int64_t row = begin; row < end; ++row) {
                const std::int64_t key = cell_key(sites.coord(static_cast<std::int32_t>(row)),
                                                  shape);
                // exchange rather than store so a duplicate coordinate is
                // detected even when two workers write the same slot
                const std::int32_t prev = std::atomic_ref<std::int32_t>(table[key]).exchange(
                    static_cast<std::int32_t>(row));
                if (prev != -1) {
                    throw DuplicateCoordinateError("rows " + std::to_string(prev) + " and " +
                                                       std::to_string(row) +
                                                       " share a coordinate",
                                                   prev, row);
                }
            }
        });
    } else {
        lct.hash_.reserve(static_cast<std::size_t>(n) * 2);
        for (std::int32_t row = 0; row < n; ++row) {
            const std::int64_t key = cell_key(sites.coord(row), sites.shape);
            auto [it, inserted] = lct.hash_.emplace(key, row);
            if (!inserted) {
                throw DuplicateCoordinateError("rows " + std::to_string(it->second) + " and " +
                                                   std::to_string(row) + " share a coordinate",
                                               it->second, row);
            }
        }
    }
    return lct;
}

std::optional<std::int32_t> LocationTable::lookup(const VoxelCoord& c) const {
    return lookup_key(cell_key(c, shape_));  // cell_key bounds-checks
}

std::optional<std::int32_t> LocationTable::lookup_key(std::int64_t key) const {
    if (backend_ == LctBackend::Dense) {
        const std::int32_t row = dense_[key];
        if (row == -1) return std::nullopt;
        return row;
    }
    const auto it = hash_.find(key);
    if (it == hash_.end()) return std::nullopt;
    return it->second;
}

ClaimTable::ClaimTable(const GridShape& shape, const LctConfig& config)
    : shape_(shape), backend_(LocationTable::resolve_backend(shape, config)) {
    shape_.ensure_valid();
    if (backend_ == LctBackend::Dense) {
        dense_.assign(static_cast<std::size_t>(shape.total_cells()), -1);
    } else {
        hash_mutex_ = std::make_unique<std::mutex>();
    }
}

bool ClaimTable::claim(std::int64_t key, std::int32_t marker) {
    if (backend_ == LctBackend::Dense) {
        std::int32_t expected = -1;
        return std::atomic_ref<std::int32_t>(dense_[key]).compare_exchange_strong(expected,
                                                                                  marker);
    }
    std::lock_guard<std::mutex> lock(*hash_mutex_);
    return hash_.emplace(key, marker).second;
}

bool ClaimTable::occupied(std::int64_t key) const {
    if (backend_ == LctBackend::Dense) return dense_[key] != -1;
    return hash_.contains(key);
}

std::int64_t ClaimTable::occupied_count() const {
    if (backend_ == LctBackend::Hash) return static_cast<std::int64_t>(hash_.size());
    std::int64_t count = 0;
    for (std::int32_t v : dense_) count += v != -1;
    return count;
}

}  // namespace voxelconv
