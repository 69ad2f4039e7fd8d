// Copyright 2026 The voxelconv Authors
// SPDX-License-Identifier: Apache-2.0

#include "voxelconv/engine.hpp"

#include <string>
#include <vector>

#include "voxelconv/error.hpp"
#include "voxelconv/parallel.hpp"

namespace voxelconv {

namespace {

// Shared gather-compute core for the rule-table operators. Every output
// element is accumulated kernel-offset-major, input-channel-minor into a
// double, then stored as float; both paths follow exactly that order, which
// is what makes their outputs bitwise identical.
void conv_over_table(const float* in_features, std::int32_t in_ch, const std::int32_t* entries,
                     std::int64_t out_rows, std::int32_t k_vol, const WeightTensor& w,
                     float* out, ComputePath path, int workers) {
    const std::int32_t out_ch = w.out_channels;
    const float* weights = w.values.data();

    if (path == ComputePath::Reference) {
        parallel_for(0, out_rows, workers, [&](std::int64_t begin, std::int64_t end) {
            for (std::int64_t row = begin; row < end; ++row) {
                const std::int32_t* rules = entries + row * k_vol;
                for (std::int32_t oc = 0; oc < out_ch; ++oc) {
                    double acc = 0.0;
                    for (std::int32_t k = 0; k < k_vol; ++k) {
                        const std::int32_t n_idx = rules[k];
                        if (n_idx == -1) continue;
                        const float* in_row =
                            in_features + static_cast<std::int64_t>(n_idx) * in_ch;
                        const float* w_row =
                            weights + (static_cast<std::int64_t>(oc) * k_vol + k) * in_ch;
                        for (std::int32_t ic = 0; ic < in_ch; ++ic) {
                            acc += static_cast<double>(in_row[ic]) * w_row[ic];
                        }
                    }
                    out[row * out_ch + oc] = static_cast<float>(acc);
                }
            }
        });
        return;
    }

    // Optimized: work is partitioned over (row tile, output channel). Per
    // tile the valid rule entries are gathered once, in kernel-offset order,
    // so the per-channel sweeps skip the absent-neighbor branches; per
    // output channel the k_vol*in_ch weight slice is staged once in local
    // storage and reused across the tile's rows.
    constexpr std::int64_t kRowTile = 64;
    parallel_for(0, out_rows, workers, [&](std::int64_t begin, std::int64_t end) {
        std::vector<float> staged(static_cast<std::size_t>(k_vol) * in_ch);
        std::vector<std::int32_t> pair_koff, pair_idx;
        std::vector<std::size_t> row_first;
        for (std::int64_t tile = begin; tile < end; tile += kRowTile) {
            const std::int64_t tile_end = std::min(end, tile + kRowTile);
            pair_koff.clear();
            pair_idx.clear();
            row_first.clear();
            for (std::int64_t row = tile; row < tile_end; ++row) {
                row_first.push_back(pair_koff.size());
                const std::int32_t* rules = entries + row * k_vol;
                for (std::int32_t k = 0; k < k_vol; ++k) {
                    if (rules[k] != -1) {
                        pair_koff.push_back(k);
                        pair_idx.push_back(rules[k]);
                    }
                }
            }
            row_first.push_back(pair_koff.size());
            for (std::int32_t oc = 0; oc < out_ch; ++oc) {
                const float* slice = weights + static_cast<std::int64_t>(oc) * k_vol * in_ch;
                std::copy(slice, slice + staged.size(), staged.begin());
                for (std::int64_t row = tile; row < tile_end; ++row) {
                    double acc = 0.0;
                    const std::size_t first = row_first[row - tile];
                    const std::size_t last = row_first[row - tile + 1];
                    for (std::size_t p = first; p < last; ++p) {
                        const float* in_row =
                            in_features + static_cast<std::int64_t>(pair_idx[p]) * in_ch;
                        const float* w_row =
                            staged.data() + static_cast<std::size_t>(pair_koff[p]) * in_ch;
                        for (std::int32_t ic = 0; ic < in_ch; ++ic) {
                            acc += static_cast<double>(in_row[ic]) * w_row[ic];
                        }
                    }
                    out[row * out_ch + oc] = static_cast<float>(acc);
                }
            }
        }
    });
}

}  // namespace

SparseTensor subm_conv(const SparseTensor& t, const OffsetTable& oft, const WeightTensor& w,
                       ComputePath path, int workers) {
    if (oft.rows != t.n()) {
        throw ShapeMismatchError("offset table rows " + std::to_string(oft.rows) +
                                 " do not match tensor sites " + std::to_string(t.n()));
    }
    if (w.kernel_volume != oft.kernel_volume) {
        throw ShapeMismatchError("weight kernel volume does not match the offset table");
    }
    if (w.in_channels != t.channels()) {
        throw ShapeMismatchError("weight in_channels " + std::to_string(w.in_channels) +
                                 " do not match tensor channels " + std::to_string(t.channels()));
    }
    std::vector<float> out(static_cast<std::size_t>(t.n()) * w.out_channels);
    conv_over_table(t.features().data(), t.channels(), oft.entries.data(), t.n(),
                    oft.kernel_volume, w, out.data(), path, workers);
    return SparseTensor(t.sites(), std::move(out), w.out_channels);
}

SparseTensor sparse_conv(const SparseTensor& t, const DownsampleMap& dmap, const OffsetTable& oft,
                         const WeightTensor& w, ComputePath path, int workers) {
    if (static_cast<std::int32_t>(dmap.out_row.size()) != t.n()) {
        throw ShapeMismatchError("downsample map was built for a different tensor");
    }
    if (oft.rows != dmap.out_count || dmap.out_indices.size() != dmap.out_count) {
        throw ShapeMismatchError("offset table rows do not match the downsample map");
    }
    if (w.kernel_volume != oft.kernel_volume) {
        throw ShapeMismatchError("weight kernel volume does not match the offset table");
    }
    if (w.in_channels != t.channels()) {
        throw ShapeMismatchError("weight in_channels " + std::to_string(w.in_channels) +
                                 " do not match tensor channels " + std::to_string(t.channels()));
    }
    std::vector<float> out(static_cast<std::size_t>(dmap.out_count) * w.out_channels);
    conv_over_table(t.features().data(), t.channels(), oft.entries.data(), dmap.out_count,
                    oft.kernel_volume, w, out.data(), path, workers);
    return SparseTensor(dmap.out_indices, std::move(out), w.out_channels);
}

SparseTensor inverse_conv(const SparseTensor& coarse, const InverseMap& imap,
                          const IndexSet& fine, const WeightTensor& w, ComputePath path,
                          int workers) {
    if (imap.rows() != fine.size()) {
        throw ShapeMismatchError("inverse map rows do not match the fine index set");
    }
    if (w.in_channels != coarse.channels()) {
        throw ShapeMismatchError("weight in_channels " + std::to_string(w.in_channels) +
                                 " do not match coarse channels " +
                                 std::to_string(coarse.channels()));
    }
    const std::int32_t in_ch = coarse.channels();
    const std::int32_t out_ch = w.out_channels;
    const std::int32_t k_vol = w.kernel_volume;
    const float* in_features = coarse.features().data();
    const float* weights = w.values.data();
    std::vector<float> out(static_cast<std::size_t>(fine.size()) * out_ch);

    auto check_pair = [&](std::int64_t row) {
        const std::int32_t parent = imap.coarse_row[row];
        if (parent < 0 || parent >= coarse.n()) {
            throw MissingParentError("fine row " + std::to_string(row) +
                                         " references a missing coarse row",
                                     row);
        }
        if (imap.kernel_offset[row] < 0 || imap.kernel_offset[row] >= k_vol) {
            throw ShapeMismatchError("kernel offset out of range for the weight tensor");
        }
    };

    if (path == ComputePath::Reference) {
        parallel_for(0, fine.size(), workers, [&](std::int64_t begin, std::int64_t end) {
            for (std::int64_t row = begin; row < end; ++row) {
                check_pair(row);
                const float* in_row =
                    in_features + static_cast<std::int64_t>(imap.coarse_row[row]) * in_ch;
                const std::int32_t koff = imap.kernel_offset[row];
                for (std::int32_t oc = 0; oc < out_ch; ++oc) {
                    const float* w_row =
                        weights + (static_cast<std::int64_t>(oc) * k_vol + koff) * in_ch;
                    double acc = 0.0;
                    for (std::int32_t ic = 0; ic < in_ch; ++ic) {
                        acc += static_cast<double>(in_row[ic]) * w_row[ic];
                    }
                    out[row * out_ch + oc] = static_cast<float>(acc);
                }
            }
        });
    } else {
        constexpr std::int64_t kRowTile = 64;
        parallel_for(0, fine.size(), workers, [&](std::int64_t begin, std::int64_t end) {
            for (std::int64_t row = begin; row < end; ++row) check_pair(row);
            std::vector<float> staged(static_cast<std::size_t>(k_vol) * in_ch);
            for (std::int64_t tile = begin; tile < end; tile += kRowTile) {
                const std::int64_t tile_end = std::min(end, tile + kRowTile);
                for (std::int32_t oc = 0; oc < out_ch; ++oc) {
                    const float* slice = weights + static_cast<std::int64_t>(oc) * k_vol * in_ch;
                    std::copy(slice, slice + staged.size(), staged.begin());
                    for (std::int64_t row = tile; row < tile_end; ++row) {
                        const float* in_row =
                            in_features +
                            static_cast<std::int64_t>(imap.coarse_row[row]) * in_ch;
                        const float* w_row =
                            staged.data() +
                            static_cast<std::size_t>(imap.kernel_offset[row]) * in_ch;
                        double acc = 0.0;
                        for (std::int32_t ic = 0; ic < in_ch; ++ic) {
                            acc += static_cast<double>(in_row[ic]) * w_row[ic];
                        }
                        out[row * out_ch + oc] = static_cast<float>(acc);
                    }
                }
            }
        });
    }
    return SparseTensor(fine, std::move(out), out_ch);
}

SparseTensor run_pipeline(std::span<const ConvLayerSpec> layers, const SparseTensor& input,
                          ComputePath path, const LctConfig& config, int workers) {
    SparseTensor current = input;
    std::vector<IndexSet> fine_stack;

    for (std::size_t i = 0; i < layers.size(); ++i) {
        const ConvLayerSpec& layer = layers[i];
        const WeightTensor& w = layer.weights;
        if (w.in_channels != current.channels()) {
            throw ChannelMismatchError("layer " + std::to_string(i) + " expects " +
                                           std::to_string(w.in_channels) + " channels, got " +
                                           std::to_string(current.channels()),
                                       static_cast<std::int64_t>(i));
        }
        const std::int64_t expected_vol = static_cast<std::int64_t>(layer.kernel) * layer.kernel *
                                          layer.kernel;
        if (layer.kernel < 1 || expected_vol != w.kernel_volume) {
            throw ShapeMismatchError("layer " + std::to_string(i) +
                                     " weight kernel volume does not match kernel size " +
                                     std::to_string(layer.kernel));
        }

        switch (layer.mode) {
            case ConvLayerSpec::Mode::Submanifold: {
                const LocationTable lct = LocationTable::build(current, config, workers);
                const OffsetTable oft = build_subm_oft(current, lct, layer.kernel, workers);
                current = subm_conv(current, oft, w, path, workers);
                break;
            }
            case ConvLayerSpec::Mode::Downsample: {
                fine_stack.push_back(current.sites());
                const DownsampleRules rules =
                    build_downsample_oft(current, {layer.kernel}, config, workers);
                current = sparse_conv(current, rules.map, rules.oft, w, path, workers);
                break;
            }
            case ConvLayerSpec::Mode::Inverse: {
                if (fine_stack.empty()) {
                    throw UnmatchedInverseError("layer " + std::to_string(i) +
                                                    " has no preceding downsample to invert",
                                                static_cast<std::int64_t>(i));
                }
                IndexSet fine = std::move(fine_stack.back());
                fine_stack.pop_back();
                const InverseMap imap =
                    build_inverse_map(fine, current, {layer.kernel}, config, workers);
                current = inverse_conv(current, imap, fine, w, path, workers);
                break;
            }
        }
    }
    return current;
}

}  // namespace voxelconv
