// Copyright 2026 The voxelconv Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "voxelconv/location_table.hpp"
#include "voxelconv/sparse_tensor.hpp"

namespace voxelconv {

/// Rule table: for each output site, the input row contributing through each
/// kernel offset, -1 where no contributor exists.
struct OffsetTable {
    std::int32_t rows = 0;
    std::int32_t kernel_volume = 0;
    std::vector<std::int32_t> entries;  // rows * kernel_volume

    std::int32_t entry(std::int32_t row, std::int32_t koff) const {
        return entries[static_cast<std::size_t>(row) * kernel_volume + koff];
    }

    friend bool operator==(const OffsetTable&, const OffsetTable&) = default;
};

/// Per-input (output row, kernel offset) pairs produced by downsampling,
/// plus the coarse index set in canonical order.
struct DownsampleMap {
    std::vector<std::int32_t> out_row;        // one per input row
    std::vector<std::int32_t> kernel_offset;  // one per input row
    std::int32_t out_count = 0;
    IndexSet out_indices;  // coarse sites, sorted by (batch, linear coordinate)

    friend bool operator==(const DownsampleMap&, const DownsampleMap&) = default;
};

struct DownsampleRules {
    DownsampleMap map;
    OffsetTable oft;
};

/// Per-fine-row link back into the coarse index set.
struct InverseMap {
    std::vector<std::int32_t> coarse_row;     // one per fine row
    std::vector<std::int32_t> kernel_offset;  // one per fine row

    std::int32_t rows() const { return static_cast<std::int32_t>(coarse_row.size()); }

    friend bool operator==(const InverseMap&, const InverseMap&) = default;
};

/// Result of the two-step unique-output counter: the claimed occupancy table
/// and the number of distinct coarse cells.
struct UniqueCounterState {
    ClaimTable status;
    std::int32_t count = 0;
};

/// Builds the submanifold rule table for an odd k*k*k neighborhood: output
/// sites equal input sites; entry[m, dx*k^2 + dy*k + dz] is the row of the
/// neighbor at p + (dx - r, dy - r, dz - r), r = (k-1)/2, within the same
/// batch. Out-of-bounds or inactive neighbors stay -1.
OffsetTable build_subm_oft(const SparseTensor& t, const LocationTable& lct, std::int32_t k,
                           int workers = 0);

/// Counts distinct (batch, floor(coord/s)) cells. Each worker claims its
/// cell with an atomic exchange against the -1 sentinel and increments a
/// shared counter only when it observed the unclaimed marker, so the result
/// is independent of execution order.
UniqueCounterState count_unique_outputs(const SparseTensor& t, StrideSpec stride,
                                        const LctConfig& config = {}, int workers = 0);

/// Two-stage rule construction for strided downsampling. Stage one maps each
/// input row to its coarse cell and kernel offset and counts unique cells;
/// the cells are then canonicalized by ascending (batch, linear coordinate)
/// and become output rows 0..M_out-1. Stage two scatters each input row into
/// entry[out_row, kernel_offset] of an s^3 offset table.
DownsampleRules build_downsample_oft(const SparseTensor& t, StrideSpec stride,
                                     const LctConfig& config = {}, int workers = 0);

/// Links each fine site to its coarse parent: parent coordinate and kernel
/// offset come from the stride-s cell mapping, the parent row from a location
/// table over `coarse`. Throws MissingParentError (with the fine row) when a
/// fine site's cell is absent from the coarse set.
InverseMap build_inverse_map(const IndexSet& fine, const SparseTensor& coarse, StrideSpec stride,
                             const LctConfig& config = {}, int workers = 0);

}  // namespace voxelconv
