// Copyright 2026 The voxelconv Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "voxelconv/error.hpp"

namespace voxelconv {

/// Convolution weights in [out-channel][kernel-offset][in-channel] order:
/// w(oc, koff, ic) lives at oc*kernel_volume*in_channels + koff*in_channels + ic.
struct WeightTensor {
    std::int32_t out_channels = 0;
    std::int32_t in_channels = 0;
    std::int32_t kernel_volume = 0;
    std::vector<float> values;

    static WeightTensor create(std::int32_t out_channels, std::int32_t in_channels,
                               std::int32_t kernel_volume, std::vector<float> values) {
        if (out_channels < 1 || in_channels < 1 || kernel_volume < 1) {
            throw LengthMismatchError("weight tensor dimensions must be positive");
        }
        const std::size_t expected = static_cast<std::size_t>(out_channels) * kernel_volume *
                                     static_cast<std::size_t>(in_channels);
        if (values.size() != expected) {
            throw LengthMismatchError("weight value count " + std::to_string(values.size()) +
                                      " does not match oc*k_vol*ic = " + std::to_string(expected));
        }
        WeightTensor w;
        w.out_channels = out_channels;
        w.in_channels = in_channels;
        w.kernel_volume = kernel_volume;
        w.values = std::move(values);
        return w;
    }

    static WeightTensor zeros(std::int32_t out_channels, std::int32_t in_channels,
                              std::int32_t kernel_volume) {
        return create(out_channels, in_channels, kernel_volume,
                      std::vector<float>(static_cast<std::size_t>(out_channels) * kernel_volume *
                                             in_channels,
                                         0.0f));
    }

    std::int64_t index(std::int32_t oc, std::int32_t koff, std::int32_t ic) const {
        return (static_cast<std::int64_t>(oc) * kernel_volume + koff) * in_channels + ic;
    }

    float at(std::int32_t oc, std::int32_t koff, std::int32_t ic) const {
        return values[index(oc, koff, ic)];
    }

    float& at(std::int32_t oc, std::int32_t koff, std::int32_t ic) {
        return values[index(oc, koff, ic)];
    }

    friend bool operator==(const WeightTensor&, const WeightTensor&) = default;
};

}  // namespace voxelconv
