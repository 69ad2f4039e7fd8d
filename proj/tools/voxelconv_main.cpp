// Copyright 2026 The voxelconv Authors
// SPDX-License-Identifier: Apache-2.0
//
// voxelconv command line: voxelize point clouds, run sparse convolutions,
// verify operators against the dense oracle, benchmark and inspect tensors.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "voxelconv/bench.hpp"
#include "voxelconv/checks.hpp"
#include "voxelconv/engine.hpp"
#include "voxelconv/io.hpp"
#include "voxelconv/oracle.hpp"

namespace {

using namespace voxelconv;

struct CommonOpts {
    int workers = 0;
    std::string lct = "auto";
    std::string config_path;
    std::string path = "reference";

    LctConfig lct_config() const {
        LctConfig config;
        if (!config_path.empty()) {
            config.dense_threshold = load_config(config_path).lct_dense_threshold;
        }
        if (lct == "dense") {
            config.backend = LctBackend::Dense;
        } else if (lct == "hash") {
            config.backend = LctBackend::Hash;
        }
        return config;
    }

    ComputePath compute_path() const {
        return path == "optimized" ? ComputePath::Optimized : ComputePath::Reference;
    }
};

int default_workers_from_env() {
    if (const char* env = std::getenv("VOXELCONV_WORKERS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return 0;
}

void add_common(CLI::App* cmd, CommonOpts* opts, bool with_path) {
    cmd->add_option("--workers", opts->workers, "Worker threads (0 = auto)");
    cmd->add_option("--lct", opts->lct, "Location table backend")
        ->check(CLI::IsMember({"dense", "hash", "auto"}));
    cmd->add_option("--config", opts->config_path, "Engine config file (JSON)");
    if (with_path) {
        cmd->add_option("--path", opts->path, "Compute path")
            ->check(CLI::IsMember({"reference", "optimized"}));
    }
}

GridShape shape_from(const std::vector<std::int32_t>& extents, std::int32_t batches) {
    if (extents.size() != 3) throw Error("--shape expects X,Y,Z");
    return {extents[0], extents[1], extents[2], batches};
}

int run_voxelize(const std::string& input, const std::string& output, float voxel_size,
                 const std::vector<float>& origin, const std::vector<std::int32_t>& extents,
                 std::int32_t batches, const std::string& reducer_name) {
    if (origin.size() != 3) throw Error("--origin expects three values");
    const std::vector<PointRecord> points = load_points(input);
    std::int32_t b = batches;
    if (b <= 0) {
        b = 1;
        for (const PointRecord& p : points) b = std::max(b, p.batch + 1);
    }
    Reducer reducer = Reducer::Mean;
    if (reducer_name == "sum") reducer = Reducer::Sum;
    if (reducer_name == "first") reducer = Reducer::First;
    const SparseTensor t = voxelize(points, voxel_size, {origin[0], origin[1], origin[2]},
                                    shape_from(extents, b), reducer);
    save_tensor(t, output);
    std::cout << "wrote " << output << ": n=" << t.n() << " channels=" << t.channels() << "\n";
    return 0;
}

int run_conv(const std::string& input, const std::string& weights, const std::string& output,
             const std::string& mode, const std::string& fine_path, const CommonOpts& common) {
    const SparseTensor t = load_tensor(input);
    const LoadedWeights loaded = load_weights(weights);
    const LctConfig config = common.lct_config();
    const ComputePath path = common.compute_path();
    const int workers = common.workers;

    if (loaded.weights.in_channels != t.channels()) {
        throw ChannelMismatchError("channel mismatch: weights expect " +
                                   std::to_string(loaded.weights.in_channels) +
                                   " input channels, tensor has " +
                                   std::to_string(t.channels()));
    }

    SparseTensor result;
    if (mode == "subm") {
        const LocationTable lct = LocationTable::build(t, config, workers);
        const OffsetTable oft = build_subm_oft(t, lct, loaded.kernel, workers);
        result = subm_conv(t, oft, loaded.weights, path, workers);
    } else if (mode == "down") {
        const DownsampleRules rules = build_downsample_oft(t, {loaded.kernel}, config, workers);
        result = sparse_conv(t, rules.map, rules.oft, loaded.weights, path, workers);
    } else {
        if (fine_path.empty()) throw Error("--fine is required for --mode inv");
        const SparseTensor fine = load_tensor(fine_path);
        const InverseMap imap =
            build_inverse_map(fine.sites(), t, {loaded.kernel}, config, workers);
        result = inverse_conv(t, imap, fine.sites(), loaded.weights, path, workers);
    }
    save_tensor(result, output);
    std::cout << "wrote " << output << ": n=" << result.n()
              << " channels=" << result.channels() << "\n";
    return 0;
}

int run_verify(std::uint64_t seed, const std::vector<std::int32_t>& extents,
               std::int32_t batches, double density, std::int32_t channels,
               std::int32_t out_channels, const std::string& modes, std::int32_t cases,
               double tol, std::int32_t k, std::int32_t s, const CommonOpts& common) {
    const GridShape shape = shape_from(extents, batches);
    const ComputePath path = common.compute_path();
    if (out_channels <= 0) out_channels = channels;

    bool all_passed = true;
    std::stringstream mode_stream(modes);
    std::string mode;
    while (std::getline(mode_stream, mode, ',')) {
        EquivalenceReport report;
        for (std::int32_t i = 0; i < cases; ++i) {
            const std::uint64_t case_seed = seed + static_cast<std::uint64_t>(i);
            const SparseTensor t =
                oracle::random_sparse_tensor(case_seed, shape, density, channels);
            if (mode == "subm") {
                const WeightTensor w =
                    oracle::random_weights(case_seed, out_channels, channels, k * k * k);
                report.merge(check_subm(t, w, k, tol, path, case_seed, common.workers));
            } else if (mode == "down") {
                const WeightTensor w =
                    oracle::random_weights(case_seed, out_channels, channels, s * s * s);
                report.merge(check_downsample(t, w, s, tol, path, case_seed, common.workers));
            } else if (mode == "inv") {
                const WeightTensor w =
                    oracle::random_weights(case_seed, out_channels, channels, s * s * s);
                report.merge(check_inverse(t, w, s, tol, path, case_seed, common.workers));
            } else {
                throw Error("unknown mode '" + mode + "' (expected subm, down or inv)");
            }
        }
        std::printf("%-5s %s  elements=%lld/%lld  max_abs_err=%.3e\n", mode.c_str(),
                    report.passed() ? "PASS" : "FAIL",
                    static_cast<long long>(report.cases_passed),
                    static_cast<long long>(report.cases_run), report.max_abs_err);
        if (!report.passed()) {
            all_passed = false;
            if (report.first_failure) {
                const FailureDetail& f = *report.first_failure;
                std::fprintf(stderr,
                             "first failure: seed=%llu site=(%d,%d,%d,%d) channel=%d "
                             "expected=%.8g actual=%.8g\n",
                             static_cast<unsigned long long>(f.seed), f.site.batch, f.site.x,
                             f.site.y, f.site.z, f.channel, f.expected, f.actual);
            }
        }
    }
    return all_passed ? 0 : 1;
}

int run_bench_cmd(const std::vector<std::int32_t>& extents, std::int32_t batches,
                  double density, std::int32_t channels, std::int32_t out_channels,
                  const std::string& mode, std::int32_t k, std::int32_t s,
                  std::int32_t repeats, std::uint64_t seed, const std::string& output,
                  const CommonOpts& common) {
    const GridShape shape = shape_from(extents, batches);
    if (out_channels <= 0) out_channels = channels;
    const SparseTensor t = oracle::random_sparse_tensor(seed, shape, density, channels);

    ConvLayerSpec::Mode op = ConvLayerSpec::Mode::Submanifold;
    std::int32_t kernel = k;
    if (mode == "down") {
        op = ConvLayerSpec::Mode::Downsample;
        kernel = s;
    } else if (mode == "inv") {
        op = ConvLayerSpec::Mode::Inverse;
        kernel = s;
    }
    const WeightTensor w =
        oracle::random_weights(seed, out_channels, channels, kernel * kernel * kernel);
    const BenchReport report = run_bench(t, w, op, kernel, repeats, common.compute_path(),
                                         common.lct_config(), common.workers);
    const std::string json = to_json(report);
    if (output.empty()) {
        std::cout << json << "\n";
    } else {
        std::ofstream out(output);
        if (!out) throw Error("cannot open " + output + " for writing");
        out << json << "\n";
        std::cout << "wrote " << output << "\n";
    }
    return 0;
}

int run_info(const std::string& input) {
    const SparseTensor t = load_tensor(input);
    const GridShape& s = t.shape();
    std::cout << "shape: " << s.max_x << "x" << s.max_y << "x" << s.max_z
              << " batches=" << s.batches << "\n"
              << "n: " << t.n() << "\n"
              << "channels: " << t.channels() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sparse 3D convolution engine for voxelized point clouds"};
    app.require_subcommand(1);

    // voxelize
    auto* vox = app.add_subcommand("voxelize", "Quantize a points text file into a .spt tensor");
    std::string vox_input, vox_output, vox_reducer = "mean";
    float vox_size = 1.0f;
    std::vector<float> vox_origin{0.0f, 0.0f, 0.0f};
    std::vector<std::int32_t> vox_shape;
    std::int32_t vox_batches = 0;
    vox->add_option("--input", vox_input, "Points text file")->required();
    vox->add_option("--output", vox_output, "Output .spt file")->required();
    vox->add_option("--voxel-size", vox_size, "Voxel edge length")->required();
    vox->add_option("--origin", vox_origin, "Grid origin ox,oy,oz")->delimiter(',')->expected(3);
    vox->add_option("--shape", vox_shape, "Grid extents X,Y,Z")->delimiter(',')->required();
    vox->add_option("--batches", vox_batches, "Batch count (0 = infer from points)");
    vox->add_option("--reducer", vox_reducer, "Merge rule for colliding points")
        ->check(CLI::IsMember({"mean", "sum", "first"}));

    // conv
    auto* conv = app.add_subcommand("conv", "Apply one sparse convolution layer");
    std::string conv_input, conv_weights, conv_output, conv_mode, conv_fine;
    CommonOpts conv_common;
    conv->add_option("--input", conv_input, "Input .spt file")->required();
    conv->add_option("--weights", conv_weights, "Weight JSON file")->required();
    conv->add_option("--output", conv_output, "Output .spt file")->required();
    conv->add_option("--mode", conv_mode, "Operator")
        ->check(CLI::IsMember({"subm", "down", "inv"}))
        ->required();
    conv->add_option("--fine", conv_fine, "Fine index set (.spt) for --mode inv");
    add_common(conv, &conv_common, true);

    // verify
    auto* verify = app.add_subcommand("verify", "Check operators against the dense oracle");
    std::uint64_t verify_seed = 42;
    std::vector<std::int32_t> verify_shape{32, 32, 32};
    std::int32_t verify_batches = 1, verify_channels = 8, verify_out_channels = 0;
    std::int32_t verify_cases = 100, verify_k = 3, verify_s = 2;
    double verify_density = 0.05, verify_tol = 1e-4;
    std::string verify_modes = "subm,down,inv";
    CommonOpts verify_common;
    verify->add_option("--seed", verify_seed, "Base seed");
    verify->add_option("--shape", verify_shape, "Grid extents X,Y,Z")->delimiter(',');
    verify->add_option("--batches", verify_batches, "Batch count");
    verify->add_option("--density", verify_density, "Active site fraction");
    verify->add_option("--channels", verify_channels, "Input channels");
    verify->add_option("--out-channels", verify_out_channels, "Output channels (0 = channels)");
    verify->add_option("--modes", verify_modes, "Comma-separated operators to check");
    verify->add_option("--cases", verify_cases, "Seeded cases per operator");
    verify->add_option("--tol", verify_tol, "Absolute tolerance");
    verify->add_option("--k", verify_k, "Submanifold kernel size");
    verify->add_option("--s", verify_s, "Downsample/inverse stride");
    add_common(verify, &verify_common, true);

    // bench
    auto* bench = app.add_subcommand("bench", "Time table build, rule generation and compute");
    std::vector<std::int32_t> bench_shape{64, 64, 64};
    std::int32_t bench_batches = 1, bench_channels = 16, bench_out_channels = 0;
    std::int32_t bench_k = 3, bench_s = 2, bench_repeats = 20;
    std::uint64_t bench_seed = 42;
    double bench_density = 0.05;
    std::string bench_mode = "subm", bench_output;
    CommonOpts bench_common;
    bench->add_option("--shape", bench_shape, "Grid extents X,Y,Z")->delimiter(',');
    bench->add_option("--batches", bench_batches, "Batch count");
    bench->add_option("--density", bench_density, "Active site fraction");
    bench->add_option("--channels", bench_channels, "Input channels");
    bench->add_option("--out-channels", bench_out_channels, "Output channels (0 = channels)");
    bench->add_option("--mode", bench_mode, "Operator")
        ->check(CLI::IsMember({"subm", "down", "inv"}));
    bench->add_option("--k", bench_k, "Submanifold kernel size");
    bench->add_option("--s", bench_s, "Downsample/inverse stride");
    bench->add_option("--repeats", bench_repeats, "Timing repeats");
    bench->add_option("--seed", bench_seed, "Tensor seed");
    bench->add_option("--output", bench_output, "Write the JSON report here instead of stdout");
    add_common(bench, &bench_common, true);

    // info
    auto* info = app.add_subcommand("info", "Print a tensor file's header summary");
    std::string info_input;
    info->add_option("--input", info_input, "Input .spt file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    const int env_workers = default_workers_from_env();
    for (CommonOpts* opts : {&conv_common, &verify_common, &bench_common}) {
        if (opts->workers == 0 && env_workers > 0) opts->workers = env_workers;
    }

    try {
        if (vox->parsed()) {
            return run_voxelize(vox_input, vox_output, vox_size, vox_origin, vox_shape,
                                vox_batches, vox_reducer);
        }
        if (conv->parsed()) {
            return run_conv(conv_input, conv_weights, conv_output, conv_mode, conv_fine,
                            conv_common);
        }
        if (verify->parsed()) {
            return run_verify(verify_seed, verify_shape, verify_batches, verify_density,
                              verify_channels, verify_out_channels, verify_modes, verify_cases,
                              verify_tol, verify_k, verify_s, verify_common);
        }
        if (bench->parsed()) {
            return run_bench_cmd(bench_shape, bench_batches, bench_density, bench_channels,
                                 bench_out_channels, bench_mode, bench_k, bench_s, bench_repeats,
                                 bench_seed, bench_output, bench_common);
        }
        if (info->parsed()) {
            return run_info(info_input);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
