// Copyright 2026 The voxelconv Authors
// SPDX-License-Identifier: Apache-2.0

#include "voxelconv/rulegen.hpp"

#include <algorithm>
#include <atomic>

#include "voxelconv/error.hpp"
#include "voxelconv/parallel.hpp"

namespace voxelconv {

OffsetTable build_subm_oft(const SparseTensor& t, const LocationTable& lct, std::int32_t k,
                           int workers) {
    if (k < 1 || k % 2 == 0) throw EvenKernelError(k);
    if (lct.shape() != t.shape()) {
        throw ShapeMismatchError("location table was built over a different grid");
    }
    const std::int32_t k_vol = k * k * k;
    const std::int32_t r = (k - 1) / 2;
    const GridShape& shape = t.shape();

    OffsetTable oft;
    oft.rows = t.n();
    oft.kernel_volume = k_vol;
    oft.entries.assign(static_cast<std::size_t>(t.n()) * k_vol, -1);

    parallel_for(0, t.n(), workers, [&](std::int64_t begin, std::int64_t end) {
        for (std::int64_t row = begin; row < end; ++row) {
            const VoxelCoord p = t.coord(static_cast<std::int32_t>(row));
            std::int32_t* out = oft.entries.data() + row * k_vol;
            for (std::int32_t dx = 0; dx < k; ++dx) {
                for (std::int32_t dy = 0; dy < k; ++dy) {
                    for (std::int32_t dz = 0; dz < k; ++dz) {
                        const VoxelCoord q{p.batch, p.x + dx - r, p.y + dy - r, p.z + dz - r};
                        if (!in_bounds(q, shape)) continue;  // boundary acts as inactive
                        if (const auto neighbor = lct.lookup(q)) {
                            out[dx * k * k + dy * k + dz] = *neighbor;
                        }
                    }
                }
            }
        }
    });
    return oft;
}

namespace {

// Claims each key once and counts first claims. The claimant stores its own
// row as the marker; only the "was unclaimed" observation increments the
// shared counter, so the count is order-independent.
UniqueCounterState count_unique_keys(std::span<const std::int64_t> keys,
                                     const GridShape& coarse_shape, const LctConfig& config,
                                     int workers) {
    UniqueCounterState state;
    state.status = ClaimTable(coarse_shape, config);
    std::atomic<std::int32_t> counter{0};
    parallel_for(0, static_cast<std::int64_t>(keys.size()), workers,
                 [&](std::int64_t begin, std::int64_t end) {
                     for (std::int64_t row = begin; row < end; ++row) {
                         if (state.status.claim(keys[row], static_cast<std::int32_t>(row))) {
                             counter.fetch_add(1, std::memory_order_relaxed);
                         }
                     }
                 });
    state.count = counter.load();
    return state;
}

std::vector<std::int64_t> coarse_keys(const SparseTensor& t, StrideSpec stride,
                                      const GridShape& coarse_shape,
                                      std::vector<std::int32_t>* kernel_offsets, int workers) {
    std::vector<std::int64_t> keys(t.n());
    if (kernel_offsets) kernel_offsets->resize(t.n());
    parallel_for(0, t.n(), workers, [&](std::int64_t begin, std::int64_t end) {
        for (std::int64_t row = begin; row < end; ++row) {
            const CellMapping m = cell_map(t.coord(static_cast<std::int32_t>(row)), stride);
            keys[row] = cell_key(m.out_coord, coarse_shape);
            if (kernel_offsets) (*kernel_offsets)[row] = m.kernel_offset;
        }
    });
    return keys;
}

}  // namespace

UniqueCounterState count_unique_outputs(const SparseTensor& t, StrideSpec stride,
                                        const LctConfig& config, int workers) {
    if (stride.s < 1) throw Error("stride must be >= 1");
    const GridShape coarse_shape = downsampled_shape(t.shape(), stride);
    const std::vector<std::int64_t> keys = coarse_keys(t, stride, coarse_shape, nullptr, workers);
    return count_unique_keys(keys, coarse_shape, config, workers);
}

DownsampleRules build_downsample_oft(const SparseTensor& t, StrideSpec stride,
                                     const LctConfig& config, int workers) {
    if (stride.s < 1) throw Error("stride must be >= 1");
    const std::int32_t s = stride.s;
    const std::int32_t k_vol = s * s * s;
    const GridShape coarse_shape = downsampled_shape(t.shape(), stride);

    // stage one: per-input (cell, kernel offset) pairs plus the unique count
    std::vector<std::int32_t> kernel_offsets;
    const std::vector<std::int64_t> keys =
        coarse_keys(t, stride, coarse_shape, &kernel_offsets, workers);
    const UniqueCounterState counter = count_unique_keys(keys, coarse_shape, config, workers);

    // canonicalize: claimed cells sorted ascending by (batch, linear) become
    // output rows, making the result independent of claim arrival order
    std::vector<std::int64_t> sorted_cells(keys);
    std::sort(sorted_cells.begin(), sorted_cells.end());
    sorted_cells.erase(std::unique(sorted_cells.begin(), sorted_cells.end()),
                       sorted_cells.end());

    DownsampleRules rules;
    rules.map.out_count = counter.count;
    rules.map.out_indices.shape = coarse_shape;
    for (std::int64_t key : sorted_cells) {
        rules.map.out_indices.push_back(coord_from_key(key, coarse_shape));
    }

    rules.map.out_row.resize(t.n());
    rules.map.kernel_offset = std::move(kernel_offsets);

    // stage two: scatter each input row into its (out_row, kernel_offset)
    // slot; sites are unique, so no slot is written twice
    rules.oft.rows = counter.count;
    rules.oft.kernel_volume = k_vol;
    rules.oft.entries.assign(static_cast<std::size_t>(counter.count) * k_vol, -1);
    parallel_for(0, t.n(), workers, [&](std::int64_t begin, std::int64_t end) {
        for (std::int64_t row = begin; row < end; ++row) {
            const auto it = std::lower_bound(sorted_cells.begin(), sorted_cells.end(), keys[row]);
            const std::int32_t out_row =
                static_cast<std::int32_t>(it - sorted_cells.begin());
            rules.map.out_row[row] = out_row;
            rules.oft.entries[static_cast<std::size_t>(out_row) * k_vol +
                              rules.map.kernel_offset[row]] = static_cast<std::int32_t>(row);
        }
    });
    return rules;
}

InverseMap build_inverse_map(const IndexSet& fine, const SparseTensor& coarse, StrideSpec stride,
                             const LctConfig& config, int workers) {
    if (stride.s < 1) throw Error("stride must be >= 1");
    const LocationTable coarse_lct = LocationTable::build(coarse, config, workers);
    const GridShape& coarse_shape = coarse.shape();

    InverseMap imap;
    imap.coarse_row.resize(fine.size());
    imap.kernel_offset.resize(fine.size());
    parallel_for(0, fine.size(), workers, [&](std::int64_t begin, std::int64_t end) {
        for (std::int64_t row = begin; row < end; ++row) {
            const CellMapping m = cell_map(fine.coord(static_cast<std::int32_t>(row)), stride);
            std::optional<std::int32_t> parent;
            if (in_bounds(m.out_coord, coarse_shape)) parent = coarse_lct.lookup(m.out_coord);
            if (!parent) {
                throw MissingParentError("fine row " + std::to_string(row) +
                                             " has no parent in the coarse index set",
                                         row);
            }
            imap.coarse_row[row] = *parent;
            imap.kernel_offset[row] = m.kernel_offset;
        }
    });
    return imap;
}

}  // namespace voxelconv
