// Copyright 2026 The voxelconv Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <unordered_map>
#include <vector>

#include "voxelconv/sparse_tensor.hpp"

namespace voxelconv {

enum class LctBackend { Dense, Hash, Auto };

/// Auto picks the dense array while batches*volume stays at or below this
/// many entries (256 MiB of int32), the hash map beyond.
inline constexpr std::int64_t kDefaultDenseThreshold = std::int64_t{1} << 26;

struct LctConfig {
    LctBackend backend = LctBackend::Auto;
    std::int64_t dense_threshold = kDefaultDenseThreshold;
};

/// Location table: coordinate -> row of the sparse tensor that occupies it.
/// Dense backend is a flat -1-initialized array indexed by cell key; hash
/// backend is an exact-key map. Both answer every lookup identically.
/// Immutable once built, safe for concurrent reads.
class LocationTable {
  public:
    static LocationTable build(const IndexSet& sites, const LctConfig& config = {},
                               int workers = 0);
    static LocationTable build(const SparseTensor& t, const LctConfig& config = {},
                               int workers = 0) {
        return build(t.sites(), config, workers);
    }

    /// Row index of the site at `c`, or nullopt when the cell is inactive.
    /// Throws OutOfBoundsError when `c` lies outside the table's grid.
    std::optional<std::int32_t> lookup(const VoxelCoord& c) const;

    std::optional<std::int32_t> lookup_key(std::int64_t key) const;

    const GridShape& shape() const { return shape_; }
    LctBackend backend() const { return backend_; }

    static LctBackend resolve_backend(const GridShape& shape, const LctConfig& config);

  private:
    GridShape shape_;
    LctBackend backend_ = LctBackend::Dense;
    std::vector<std::int32_t> dense_;
    std::unordered_map<std::int64_t, std::int32_t> hash_;
};

/// Occupancy table with claim-once semantics over a grid, used for unique
/// output counting. Dense backend claims with a compare-exchange on the -1
/// sentinel so concurrent claimants race safely; hash backend serializes
/// claims behind a mutex. Exactly one claimant per cell observes `true`.
class ClaimTable {
  public:
    ClaimTable() = default;
    ClaimTable(const GridShape& shape, const LctConfig& config);

    /// Claims the cell; returns true iff this call is the first claimant.
    bool claim(std::int64_t key, std::int32_t marker);

    bool occupied(std::int64_t key) const;

    std::int64_t occupied_count() const;

    const GridShape& shape() const { return shape_; }
    LctBackend backend() const { return backend_; }

  private:
    GridShape shape_;
    LctBackend backend_ = LctBackend::Dense;
    std::vector<std::int32_t> dense_;
    std::unordered_map<std::int64_t, std::int32_t> hash_;
    std::unique_ptr<std::mutex> hash_mutex_;
};

}  // namespace voxelconv
