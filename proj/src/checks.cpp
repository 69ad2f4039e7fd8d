// Copyright 2026 The voxelconv Authors
// SPDX-License-Identifier: Apache-2.0

#include "voxelconv/checks.hpp"

#include <cmath>

namespace voxelconv {

void EquivalenceReport::merge(const EquivalenceReport& other) {
    cases_run += other.cases_run;
    cases_passed += other.cases_passed;
    max_abs_err = std::max(max_abs_err, other.max_abs_err);
    if (!first_failure && other.first_failure) first_failure = other.first_failure;
}

void EquivalenceReport::record(std::uint64_t seed, const VoxelCoord& site, std::int32_t channel,
                               double expected, double actual, double tol) {
    const double err = std::abs(expected - actual);
    ++cases_run;
    max_abs_err = std::max(max_abs_err, err);
    if (err <= tol) {
        ++cases_passed;
    } else if (!first_failure) {
        first_failure = FailureDetail{seed, site, channel, expected, actual};
    }
}

EquivalenceReport check_subm(const SparseTensor& t, const WeightTensor& w, std::int32_t k,
                             double tol, ComputePath path, std::uint64_t seed, int workers) {
    const LocationTable lct = LocationTable::build(t, {}, workers);
    const OffsetTable oft = build_subm_oft(t, lct, k, workers);
    const SparseTensor got = subm_conv(t, oft, w, path, workers);

    const std::int32_t r = (k - 1) / 2;
    const DenseGrid expected = oracle::dense_conv(to_dense(t), w, k, 1, {r, r, r});

    EquivalenceReport report;
    for (std::int32_t row = 0; row < t.n(); ++row) {
        const VoxelCoord c = t.coord(row);
        for (std::int32_t oc = 0; oc < w.out_channels; ++oc) {
            report.record(seed, c, oc, expected.at(c.batch, c.x, c.y, c.z, oc),
                          got.feature(row, oc), tol);
        }
    }
    return report;
}

EquivalenceReport check_downsample(const SparseTensor& t, const WeightTensor& w, std::int32_t s,
                                   double tol, ComputePath path, std::uint64_t seed,
                                   int workers) {
    const DownsampleRules rules = build_downsample_oft(t, {s}, {}, workers);
    const SparseTensor got = sparse_conv(t, rules.map, rules.oft, w, path, workers);

    // extend the dense grid to a multiple of s so the no-pad strided oracle
    // covers the partial cells at the high boundary
    const GridShape coarse = downsampled_shape(t.shape(), {s});
    const GridShape padded{coarse.max_x * s, coarse.max_y * s, coarse.max_z * s,
                           t.shape().batches};
    const DenseGrid expected = oracle::dense_conv(to_dense(t, padded), w, s, s, {0, 0, 0});

    EquivalenceReport report;
    const UniqueCounterState counter = count_unique_outputs(t, {s}, {}, workers);
    report.record(seed, {}, -1, static_cast<double>(oracle::unique_cells_reference(t, s)),
                  static_cast<double>(counter.count), 0.0);

    for (std::int32_t row = 0; row < got.n(); ++row) {
        const VoxelCoord c = got.coord(row);
        for (std::int32_t oc = 0; oc < w.out_channels; ++oc) {
            report.record(seed, c, oc, expected.at(c.batch, c.x, c.y, c.z, oc),
                          got.feature(row, oc), tol);
        }
    }
    return report;
}

EquivalenceReport check_inverse(const SparseTensor& t, const WeightTensor& w, std::int32_t s,
                                double tol, ComputePath path, std::uint64_t seed, int workers) {
    const DownsampleRules rules = build_downsample_oft(t, {s}, {}, workers);

    // coarse features drawn from the seed; the downsample stage only
    // supplies the index sets
    const SparseTensor coarse(
        rules.map.out_indices,
        oracle::random_features(seed ^ 0xc0a5ef00u,
                                static_cast<std::size_t>(rules.map.out_count) * w.in_channels),
        w.in_channels);

    const InverseMap imap = build_inverse_map(t.sites(), coarse, {s}, {}, workers);
    const SparseTensor got = inverse_conv(coarse, imap, t.sites(), w, path, workers);
    const std::vector<float> expected = oracle::inverse_reference(t.sites(), coarse, w, s);

    EquivalenceReport report;
    for (std::int32_t row = 0; row < t.n(); ++row) {
        const VoxelCoord c = t.coord(row);
        for (std::int32_t oc = 0; oc < w.out_channels; ++oc) {
            report.record(seed, c, oc,
                          expected[static_cast<std::size_t>(row) * w.out_channels + oc],
                          got.feature(row, oc), tol);
        }
    }
    return report;
}

}  // namespace voxelconv
