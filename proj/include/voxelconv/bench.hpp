// Copyright 2026 The voxelconv Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>

#include "voxelconv/engine.hpp"

namespace voxelconv {

struct StageTiming {
    double median_ms = 0.0;
    double min_ms = 0.0;
    double max_ms = 0.0;
};

struct BenchReport {
    std::string op;    // "subm" | "down" | "inv"
    std::string path;  // "reference" | "optimized"
    std::int64_t n = 0;
    std::int32_t in_channels = 0;
    std::int32_t out_channels = 0;
    std::int32_t kernel = 0;
    std::int32_t repeats = 0;
    StageTiming table_build;
    StageTiming rule_gen;
    StageTiming compute;
    double sites_per_second = 0.0;  // output sites / median compute time
};

/// Times table build, rule generation and compute separately, `repeats`
/// runs each, on a monotonic clock.
BenchReport run_bench(const SparseTensor& t, const WeightTensor& w, ConvLayerSpec::Mode mode,
                      std::int32_t kernel, std::int32_t repeats, ComputePath path,
                      const LctConfig& config = {}, int workers = 0);

std::string to_json(const BenchReport& report);

}  // namespace voxelconv
