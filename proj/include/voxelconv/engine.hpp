// Copyright 2026 The voxelconv Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "voxelconv/rulegen.hpp"
#include "voxelconv/weights.hpp"

namespace voxelconv {

/// Reference walks the plain loop nest; Optimized partitions work over
/// (output row block, output channel) and stages each output channel's
/// weight slice in worker-local storage before sweeping its rows. Both
/// accumulate every output element in the same fixed order (kernel offset
/// major, input channel minor), so their results are bitwise identical.
enum class ComputePath { Reference, Optimized };

/// Convolution over a submanifold rule table: output sites equal input
/// sites; out[m, oc] = sum over kernel offsets and input channels of
/// feature[entry[m, koff], ic] * w(oc, koff, ic).
SparseTensor subm_conv(const SparseTensor& t, const OffsetTable& oft, const WeightTensor& w,
                       ComputePath path = ComputePath::Reference, int workers = 0);

/// Strided downsampling convolution: same accumulation as subm_conv but over
/// the two-stage table, with output sites on the coarse grid.
SparseTensor sparse_conv(const SparseTensor& t, const DownsampleMap& dmap, const OffsetTable& oft,
                         const WeightTensor& w, ComputePath path = ComputePath::Reference,
                         int workers = 0);

/// Upsampling convolution: each fine site takes exactly one (coarse feature
/// row, kernel offset) pair, so out[p, oc] = sum over input channels of
/// coarse_feature[parent(p), ic] * w(oc, koff(p), ic).
SparseTensor inverse_conv(const SparseTensor& coarse, const InverseMap& imap,
                          const IndexSet& fine, const WeightTensor& w,
                          ComputePath path = ComputePath::Reference, int workers = 0);

struct ConvLayerSpec {
    enum class Mode { Submanifold, Downsample, Inverse };
    Mode mode = Mode::Submanifold;
    std::int32_t kernel = 3;  // kernel size k for submanifold, stride s otherwise
    WeightTensor weights;
};

/// Runs layers sequentially. A downsample layer pushes its input index set;
/// an inverse layer pops the most recent one as its fine target, so
/// downsample/inverse pairs nest like brackets.
SparseTensor run_pipeline(std::span<const ConvLayerSpec> layers, const SparseTensor& input,
                          ComputePath path = ComputePath::Reference,
                          const LctConfig& config = {}, int workers = 0);

}  // namespace voxelconv
