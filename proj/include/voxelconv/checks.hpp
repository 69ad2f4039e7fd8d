// Copyright 2026 The voxelconv Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>

#include "voxelconv/engine.hpp"
#include "voxelconv/oracle.hpp"

namespace voxelconv {

struct FailureDetail {
    std::uint64_t seed = 0;
    VoxelCoord site;
    std::int32_t channel = -1;
    double expected = 0.0;
    double actual = 0.0;
};

/// Outcome of one engine-vs-oracle comparison. A case is one compared output
/// element (plus, for downsampling, one unique-count comparison); the report
/// passes when every case passes.
struct EquivalenceReport {
    std::int64_t cases_run = 0;
    std::int64_t cases_passed = 0;
    double max_abs_err = 0.0;
    std::optional<FailureDetail> first_failure;

    bool passed() const { return cases_passed == cases_run; }
    void merge(const EquivalenceReport& other);
    void record(std::uint64_t seed, const VoxelCoord& site, std::int32_t channel,
                double expected, double actual, double tol);
};

/// Compares subm_conv against the dense oracle (stride 1, pad (k-1)/2)
/// sampled at the active sites.
EquivalenceReport check_subm(const SparseTensor& t, const WeightTensor& w, std::int32_t k,
                             double tol, ComputePath path = ComputePath::Reference,
                             std::uint64_t seed = 0, int workers = 0);

/// Compares sparse_conv against the stride-s dense oracle (input extended to
/// a multiple of s so every occupied coarse cell is covered) and the unique
/// output count against the set-based oracle.
EquivalenceReport check_downsample(const SparseTensor& t, const WeightTensor& w, std::int32_t s,
                                   double tol, ComputePath path = ComputePath::Reference,
                                   std::uint64_t seed = 0, int workers = 0);

/// Runs downsample then inverse over `t` (coarse features drawn from the
/// seed) and compares inverse_conv against the per-site product oracle.
EquivalenceReport check_inverse(const SparseTensor& t, const WeightTensor& w, std::int32_t s,
                                double tol, ComputePath path = ComputePath::Reference,
                                std::uint64_t seed = 0, int workers = 0);

}  // namespace voxelconv
