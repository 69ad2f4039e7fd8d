// Copyright 2026 The voxelconv Authors
// SPDX-License-Identifier: Apache-2.0

#include "voxelconv/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <set>
#include <tuple>

#include "voxelconv/error.hpp"

namespace voxelconv::oracle {

DenseGrid dense_conv(const DenseGrid& g, const WeightTensor& w, std::int32_t kernel,
                     std::int32_t stride, std::array<std::int32_t, 3> padding) {
    if (kernel < 1 || stride < 1) throw ShapeMismatchError("kernel and stride must be positive");
    if (static_cast<std::int64_t>(kernel) * kernel * kernel != w.kernel_volume) {
        throw ShapeMismatchError("weight kernel volume does not match the kernel size");
    }
    if (w.in_channels != g.channels) {
        throw ShapeMismatchError("weight in_channels do not match the grid");
    }
    const auto out_extent = [&](std::int32_t extent, std::int32_t pad) {
        return (extent + 2 * pad - kernel) / stride + 1;
    };
    DenseGrid out;
    out.shape = {out_extent(g.shape.max_x, padding[0]), out_extent(g.shape.max_y, padding[1]),
                 out_extent(g.shape.max_z, padding[2]), g.shape.batches};
    if (out.shape.max_x < 1 || out.shape.max_y < 1 || out.shape.max_z < 1) {
        throw ShapeMismatchError("kernel larger than the padded input grid");
    }
    out.channels = w.out_channels;
    out.values.assign(static_cast<std::size_t>(out.shape.total_cells()) * w.out_channels, 0.0f);

    for (std::int32_t b = 0; b < g.shape.batches; ++b) {
        for (std::int32_t oz = 0; oz < out.shape.max_z; ++oz) {
            for (std::int32_t oy = 0; oy < out.shape.max_y; ++oy) {
                for (std::int32_t ox = 0; ox < out.shape.max_x; ++ox) {
                    for (std::int32_t oc = 0; oc < w.out_channels; ++oc) {
                        double acc = 0.0;
                        for (std::int32_t dx = 0; dx < kernel; ++dx) {
                            const std::int32_t ix = ox * stride - padding[0] + dx;
                            if (ix < 0 || ix >= g.shape.max_x) continue;
                            for (std::int32_t dy = 0; dy < kernel; ++dy) {
                                const std::int32_t iy = oy * stride - padding[1] + dy;
                                if (iy < 0 || iy >= g.shape.max_y) continue;
                                for (std::int32_t dz = 0; dz < kernel; ++dz) {
                                    const std::int32_t iz = oz * stride - padding[2] + dz;
                                    if (iz < 0 || iz >= g.shape.max_z) continue;
                                    const std::int32_t koff = dx * kernel * kernel + dy * kernel +
                                                              dz;
                                    for (std::int32_t ic = 0; ic < g.channels; ++ic) {
                                        acc += static_cast<double>(g.at(b, ix, iy, iz, ic)) *
                                               w.at(oc, koff, ic);
                                    }
                                }
                            }
                        }
                        out.at(b, ox, oy, oz, oc) = static_cast<float>(acc);
                    }
                }
            }
        }
    }
    return out;
}

std::vector<float> inverse_reference(const IndexSet& fine, const SparseTensor& coarse,
                                     const WeightTensor& w, std::int32_t stride) {
    std::vector<float> out(static_cast<std::size_t>(fine.size()) * w.out_channels, 0.0f);
    for (std::int32_t p = 0; p < fine.size(); ++p) {
        const std::int32_t cx = fine.x[p] / stride;
        const std::int32_t cy = fine.y[p] / stride;
        const std::int32_t cz = fine.z[p] / stride;
        const std::int32_t koff = (fine.x[p] - cx * stride) * stride * stride +
                                  (fine.y[p] - cy * stride) * stride + (fine.z[p] - cz * stride);
        std::int32_t parent = -1;
        for (std::int32_t row = 0; row < coarse.n(); ++row) {
            const VoxelCoord c = coarse.coord(row);
            if (c.batch == fine.batch[p] && c.x == cx && c.y == cy && c.z == cz) {
                parent = row;
                break;
            }
        }
        if (parent == -1) continue;
        for (std::int32_t oc = 0; oc < w.out_channels; ++oc) {
            double acc = 0.0;
            for (std::int32_t ic = 0; ic < w.in_channels; ++ic) {
                acc += static_cast<double>(coarse.feature(parent, ic)) * w.at(oc, koff, ic);
            }
            out[static_cast<std::size_t>(p) * w.out_channels + oc] = static_cast<float>(acc);
        }
    }
    return out;
}

std::int64_t unique_cells_reference(const SparseTensor& t, std::int32_t stride) {
    std::set<std::tuple<std::int32_t, std::int32_t, std::int32_t, std::int32_t>> cells;
    for (std::int32_t row = 0; row < t.n(); ++row) {
        const VoxelCoord c = t.coord(row);
        cells.emplace(c.batch, c.x / stride, c.y / stride, c.z / stride);
    }
    return static_cast<std::int64_t>(cells.size());
}

namespace {

// Explicit draws on top of the standardized mt19937 stream; the standard
// library distributions are implementation-defined and would break
// cross-platform reproducibility.
float unit_symmetric(std::mt19937& rng) {
    const std::uint32_t bits = rng() >> 9;  // 23 bits
    return static_cast<float>(bits) * (2.0f / 8388608.0f) - 1.0f;
}

std::uint32_t bounded(std::mt19937& rng, std::uint32_t n) { return rng() % n; }

}  // namespace

SparseTensor random_sparse_tensor(std::uint64_t seed, const GridShape& shape, double density,
                                  std::int32_t channels) {
    shape.ensure_valid();
    if (!(density > 0.0 && density <= 1.0)) throw Error("density must be in (0, 1]");
    const std::int64_t total = shape.total_cells();
    std::int64_t target = std::llround(density * static_cast<double>(total));
    target = std::clamp<std::int64_t>(target, 0, total);

    std::mt19937 rng(static_cast<std::uint32_t>(seed ^ (seed >> 32)));

    // partial Fisher-Yates: the first `target` slots end up holding a
    // uniform sample of all cell keys
    std::vector<std::int64_t> keys(static_cast<std::size_t>(total));
    std::iota(keys.begin(), keys.end(), std::int64_t{0});
    for (std::int64_t i = 0; i < target; ++i) {
        const std::int64_t j =
            i + bounded(rng, static_cast<std::uint32_t>(total - i));
        std::swap(keys[i], keys[j]);
    }
    keys.resize(static_cast<std::size_t>(target));
    std::sort(keys.begin(), keys.end());

    IndexSet sites;
    sites.shape = shape;
    for (std::int64_t key : keys) sites.push_back(coord_from_key(key, shape));

    std::vector<float> features(static_cast<std::size_t>(target) * channels);
    for (float& v : features) v = unit_symmetric(rng);
    return SparseTensor(std::move(sites), std::move(features), channels);
}

WeightTensor random_weights(std::uint64_t seed, std::int32_t out_channels,
                            std::int32_t in_channels, std::int32_t kernel_volume) {
    std::mt19937 rng(static_cast<std::uint32_t>(seed ^ (seed >> 32)) ^ 0x9e3779b9u);
    std::vector<float> values(static_cast<std::size_t>(out_channels) * kernel_volume *
                              in_channels);
    for (float& v : values) v = unit_symmetric(rng);
    return WeightTensor::create(out_channels, in_channels, kernel_volume, std::move(values));
}

std::vector<float> random_features(std::uint64_t seed, std::size_t count) {
    std::mt19937 rng(static_cast<std::uint32_t>(seed ^ (seed >> 32)) ^ 0x7f4a7c15u);
    std::vector<float> values(count);
    for (float& v : values) v = unit_symmetric(rng);
    return values;
}

}  // namespace voxelconv::oracle
