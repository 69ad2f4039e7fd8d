// Copyright 2026 The voxelconv Authors
// SPDX-License-Identifier: Apache-2.0

#include "voxelconv/sparse_tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "voxelconv/error.hpp"

namespace voxelconv {

std::vector<ValidationIssue> validate(const GridShape& shape,
                                      std::span<const std::int32_t> batch,
                                      std::span<const std::int32_t> x,
                                      std::span<const std::int32_t> y,
                                      std::span<const std::int32_t> z,
                                      std::size_t feature_count, std::int32_t channels) {
    std::vector<ValidationIssue> issues;
    const std::size_t n = batch.size();
    if (x.size() != n || y.size() != n || z.size() != n) {
        issues.push_back({IssueKind::LengthMismatch, -1, -1,
                          "coordinate arrays have unequal lengths"});
        return issues;  // row-wise checks are meaningless past this point
    }
    if (feature_count != n * static_cast<std::size_t>(channels)) {
        issues.push_back({IssueKind::LengthMismatch, -1, -1,
                          "feature count " + std::to_string(feature_count) + " != n*channels = " +
                              std::to_string(n * static_cast<std::size_t>(channels))});
    }
    std::unordered_map<std::int64_t, std::int64_t> seen;
    seen.reserve(n * 2);
    for (std::size_t r = 0; r < n; ++r) {
        const VoxelCoord c{batch[r], x[r], y[r], z[r]};
        if (!in_bounds(c, shape)) {
            issues.push_back({IssueKind::OutOfBounds, static_cast<std::int64_t>(r), -1,
                              "row " + std::to_string(r) + " coordinate out of bounds"});
            continue;
        }
        const std::int64_t key = cell_key(c, shape);
        auto [it, inserted] = seen.emplace(key, static_cast<std::int64_t>(r));
        if (!inserted) {
            issues.push_back({IssueKind::DuplicateCoordinate, it->second,
                              static_cast<std::int64_t>(r),
                              "rows " + std::to_string(it->second) + " and " + std::to_string(r) +
                                  " share a coordinate"});
        }
    }
    return issues;
}

std::vector<ValidationIssue> validate(const SparseTensor& t) {
    const IndexSet& s = t.sites();
    return validate(s.shape, s.batch, s.x, s.y, s.z, t.features().size(), t.channels());
}

std::string to_string(const ValidationIssue& issue) {
    switch (issue.kind) {
        case IssueKind::OutOfBounds:
            return "OutOfBounds: " + issue.detail;
        case IssueKind::DuplicateCoordinate:
            return "DuplicateCoordinate: " + issue.detail;
        case IssueKind::LengthMismatch:
            return "LengthMismatch: " + issue.detail;
    }
    return issue.detail;
}

namespace {

void throw_first_issue(const std::vector<ValidationIssue>& issues) {
    if (issues.empty()) return;
    const ValidationIssue& first = issues.front();
    switch (first.kind) {
        case IssueKind::OutOfBounds:
            throw OutOfBoundsError(first.detail, first.row_a);
        case IssueKind::DuplicateCoordinate:
            throw DuplicateCoordinateError(first.detail, first.row_a, first.row_b);
        case IssueKind::LengthMismatch:
            throw LengthMismatchError(first.detail);
    }
}

}  // namespace

SparseTensor::SparseTensor(GridShape shape, std::vector<std::int32_t> batch,
                           std::vector<std::int32_t> x, std::vector<std::int32_t> y,
                           std::vector<std::int32_t> z, std::vector<float> features,
                           std::int32_t channels)
    : SparseTensor(IndexSet{shape, std::move(batch), std::move(x), std::move(y), std::move(z)},
                   std::move(features), channels) {}

SparseTensor::SparseTensor(IndexSet sites, std::vector<float> features, std::int32_t channels) {
    sites.shape.ensure_valid();
    if (channels < 0) throw LengthMismatchError("channels must be non-negative");
    throw_first_issue(validate(sites.shape, sites.batch, sites.x, sites.y, sites.z,
                               features.size(), channels));
    sites_ = std::move(sites);
    channels_ = channels;
    features_ = std::move(features);
}

DenseGrid to_dense(const SparseTensor& t) { return to_dense(t, t.shape()); }

DenseGrid to_dense(const SparseTensor& t, const GridShape& target) {
    target.ensure_valid();
    if (target.batches != t.shape().batches || target.max_x < t.shape().max_x ||
        target.max_y < t.shape().max_y || target.max_z < t.shape().max_z) {
        throw InvalidShapeError("densify target must enclose the tensor's grid");
    }
    DenseGrid g;
    g.shape = target;
    g.channels = t.channels();
    g.values.assign(static_cast<std::size_t>(target.total_cells()) * t.channels(), 0.0f);
    for (std::int32_t row = 0; row < t.n(); ++row) {
        const VoxelCoord c = t.coord(row);
        const std::int64_t base = g.offset(c.batch, c.x, c.y, c.z, 0);
        for (std::int32_t ch = 0; ch < t.channels(); ++ch) {
            g.values[base + ch] = t.feature(row, ch);
        }
    }
    return g;
}

SparseTensor sparsify(const DenseGrid& g) {
    IndexSet sites;
    sites.shape = g.shape;
    std::vector<float> features;
    // batch-then-linear iteration emits rows already in canonical order
    for (std::int32_t b = 0; b < g.shape.batches; ++b) {
        for (std::int32_t z = 0; z < g.shape.max_z; ++z) {
            for (std::int32_t y = 0; y < g.shape.max_y; ++y) {
                for (std::int32_t x = 0; x < g.shape.max_x; ++x) {
                    const std::int64_t base = g.offset(b, x, y, z, 0);
                    bool active = false;
                    for (std::int32_t c = 0; c < g.channels; ++c) {
                        if (g.values[base + c] != 0.0f) {
                            active = true;
                            break;
                        }
                    }
                    if (!active) continue;
                    sites.push_back({b, x, y, z});
                    features.insert(features.end(), g.values.begin() + base,
                                    g.values.begin() + base + g.channels);
                }
            }
        }
    }
    return SparseTensor(std::move(sites), std::move(features), g.channels);
}

SparseTensor canonical_sorted(const SparseTensor& t) {
    std::vector<std::int32_t> order(t.n());
    std::iota(order.begin(), order.end(), 0);
    const GridShape& shape = t.shape();
    std::sort(order.begin(), order.end(), [&](std::int32_t a, std::int32_t b) {
        return cell_key(t.coord(a), shape) < cell_key(t.coord(b), shape);
    });
    IndexSet sites;
    sites.shape = shape;
    std::vector<float> features;
    features.reserve(t.features().size());
    for (std::int32_t row : order) {
        sites.push_back(t.coord(row));
        const auto src = t.feature_row(row);
        features.insert(features.end(), src.begin(), src.end());
    }
    return SparseTensor(std::move(sites), std::move(features), t.channels());
}

SparseTensor voxelize(std::span<const PointRecord> points, float voxel_size,
                      std::array<float, 3> origin, const GridShape& shape, Reducer reducer) {
    shape.ensure_valid();
    if (!(voxel_size > 0.0f)) throw Error("voxel_size must be positive");

    const std::int32_t channels =
        points.empty() ? 0 : static_cast<std::int32_t>(points.front().features.size());

    struct Quantized {
        std::int64_t key;
        std::size_t point;
    };
    std::vector<Quantized> cells;
    cells.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        const PointRecord& p = points[i];
        if (static_cast<std::int32_t>(p.features.size()) != channels) {
            throw LengthMismatchError("point " + std::to_string(i) +
                                      " has a different feature width");
        }
        const VoxelCoord c{
            p.batch,
            static_cast<std::int32_t>(std::floor((p.x - origin[0]) / voxel_size)),
            static_cast<std::int32_t>(std::floor((p.y - origin[1]) / voxel_size)),
            static_cast<std::int32_t>(std::floor((p.z - origin[2]) / voxel_size))};
        if (!in_bounds(c, shape)) {
            throw OutOfBoundsError("point " + std::to_string(i) + " quantizes outside the grid",
                                   static_cast<std::int64_t>(i));
        }
        cells.push_back({cell_key(c, shape), i});
    }
    // stable sort keeps input order within a voxel, which the First reducer
    // relies on for its tie-break
    std::stable_sort(cells.begin(), cells.end(),
                     [](const Quantized& a, const Quantized& b) { return a.key < b.key; });

    IndexSet sites;
    sites.shape = shape;
    std::vector<float> features;
    std::size_t i = 0;
    while (i < cells.size()) {
        std::size_t j = i;
        while (j < cells.size() && cells[j].key == cells[i].key) ++j;
        sites.push_back(coord_from_key(cells[i].key, shape));
        switch (reducer) {
            case Reducer::First: {
                const auto& f = points[cells[i].point].features;
                features.insert(features.end(), f.begin(), f.end());
                break;
            }
            case Reducer::Sum:
            case Reducer::Mean: {
                std::vector<double> acc(channels, 0.0);
                for (std::size_t m = i; m < j; ++m) {
                    const auto& f = points[cells[m].point].features;
                    for (std::int32_t c = 0; c < channels; ++c) acc[c] += f[c];
                }
                const double scale = reducer == Reducer::Mean ? 1.0 / (j - i) : 1.0;
                for (std::int32_t c = 0; c < channels; ++c) {
                    features.push_back(static_cast<float>(acc[c] * scale));
                }
                break;
            }
        }
        i = j;
    }
    return SparseTensor(std::move(sites), std::move(features), channels);
}

}  // namespace voxelconv
