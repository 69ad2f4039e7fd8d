// Copyright 2026 The voxelconv Authors
// SPDX-License-Identifier: Apache-2.0

#include "voxelconv/bench.hpp"

#include <algorithm>
#include <chrono>
#include <vector>

#include <json.hpp>

#include "voxelconv/error.hpp"
#include "voxelconv/oracle.hpp"

namespace voxelconv {

namespace {

using Clock = std::chrono::steady_clock;

template <typename Fn>
StageTiming time_stage(std::int32_t repeats, Fn&& fn) {
    std::vector<double> samples;
    samples.reserve(repeats);
    for (std::int32_t i = 0; i < repeats; ++i) {
        const auto start = Clock::now();
        fn();
        const auto stop = Clock::now();
        samples.push_back(std::chrono::duration<double, std::milli>(stop - start).count());
    }
    std::sort(samples.begin(), samples.end());
    StageTiming t;
    t.min_ms = samples.front();
    t.max_ms = samples.back();
    t.median_ms = samples[samples.size() / 2];
    return t;
}

}  // namespace

BenchReport run_bench(const SparseTensor& t, const WeightTensor& w, ConvLayerSpec::Mode mode,
                      std::int32_t kernel, std::int32_t repeats, ComputePath path,
                      const LctConfig& config, int workers) {
    if (repeats < 1) throw Error("repeats must be >= 1");
    BenchReport report;
    report.path = path == ComputePath::Reference ? "reference" : "optimized";
    report.n = t.n();
    report.in_channels = w.in_channels;
    report.out_channels = w.out_channels;
    report.kernel = kernel;
    report.repeats = repeats;

    std::int64_t out_sites = 0;
    switch (mode) {
        case ConvLayerSpec::Mode::Submanifold: {
            report.op = "subm";
            LocationTable lct;
            report.table_build = time_stage(
                repeats, [&] { lct = LocationTable::build(t, config, workers); });
            OffsetTable oft;
            report.rule_gen =
                time_stage(repeats, [&] { oft = build_subm_oft(t, lct, kernel, workers); });
            report.compute =
                time_stage(repeats, [&] { (void)subm_conv(t, oft, w, path, workers); });
            out_sites = t.n();
            break;
        }
        case ConvLayerSpec::Mode::Downsample: {
            report.op = "down";
            UniqueCounterState counter;
            report.table_build = time_stage(
                repeats, [&] { counter = count_unique_outputs(t, {kernel}, config, workers); });
            DownsampleRules rules;
            report.rule_gen = time_stage(
                repeats, [&] { rules = build_downsample_oft(t, {kernel}, config, workers); });
            report.compute = time_stage(
                repeats, [&] { (void)sparse_conv(t, rules.map, rules.oft, w, path, workers); });
            out_sites = rules.map.out_count;
            break;
        }
        case ConvLayerSpec::Mode::Inverse: {
            report.op = "inv";
            DownsampleRules rules = build_downsample_oft(t, {kernel}, config, workers);
            const SparseTensor coarse(
                rules.map.out_indices,
                oracle::random_features(
                    1, static_cast<std::size_t>(rules.map.out_count) * w.in_channels),
                w.in_channels);
            LocationTable lct;
            report.table_build = time_stage(
                repeats, [&] { lct = LocationTable::build(coarse, config, workers); });
            InverseMap imap;
            report.rule_gen = time_stage(repeats, [&] {
                imap = build_inverse_map(t.sites(), coarse, {kernel}, config, workers);
            });
            report.compute = time_stage(repeats, [&] {
                (void)inverse_conv(coarse, imap, t.sites(), w, path, workers);
            });
            out_sites = t.n();
            break;
        }
    }
    report.sites_per_second =
        report.compute.median_ms > 0.0 ? out_sites / (report.compute.median_ms / 1000.0) : 0.0;
    return report;
}

std::string to_json(const BenchReport& report) {
    const auto stage = [](const StageTiming& t) {
        return nlohmann::json{
            {"median_ms", t.median_ms}, {"min_ms", t.min_ms}, {"max_ms", t.max_ms}};
    };
    nlohmann::json doc{{"operator", report.op},
                       {"path", report.path},
                       {"n", report.n},
                       {"in_channels", report.in_channels},
                       {"out_channels", report.out_channels},
                       {"kernel", report.kernel},
                       {"repeats", report.repeats},
                       {"stages",
                        {{"table_build", stage(report.table_build)},
                         {"rule_gen", stage(report.rule_gen)},
                         {"compute", stage(report.compute)}}},
                       {"sites_per_second", report.sites_per_second}};
    return doc.dump(2);
}

}  // namespace voxelconv
