// Copyright 2026 The voxelconv Authors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "voxelconv/io.hpp"
#include "voxelconv/oracle.hpp"

using namespace voxelconv;

namespace {

namespace fs = std::filesystem;

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

RunResult run_cli(const std::string& args) {
    const fs::path out_path = fs::temp_directory_path() / "voxelconv_cli_out.txt";
    const fs::path err_path = fs::temp_directory_path() / "voxelconv_cli_err.txt";
    const std::string cmd = std::string(VOXELCONV_CLI_PATH) + " " + args + " > " +
                            out_path.string() + " 2> " + err_path.string();
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    const auto slurp = [](const fs::path& p) {
        std::ifstream in(p);
        std::ostringstream buffer;
        buffer << in.rdbuf();
        return buffer.str();
    };
    r.out = slurp(out_path);
    r.err = slurp(err_path);
    fs::remove(out_path);
    fs::remove(err_path);
    return r;
}

fs::path temp_file(const std::string& name) {
    return fs::temp_directory_path() / ("voxelconv_cli_" + name);
}

}  // namespace

TEST_CASE("info reports the header of an empty tensor") {
    const auto path = temp_file("empty.spt");
    save_tensor(SparseTensor(GridShape{4, 4, 4, 1}, {}, {}, {}, {}, {}, 2), path);
    const RunResult r = run_cli("info --input " + path.string());
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("n: 0") != std::string::npos);
    CHECK(r.out.find("channels: 2") != std::string::npos);
    fs::remove(path);
}

TEST_CASE("usage errors exit with status 2") {
    CHECK(run_cli("frobnicate").exit_code == 2);
    CHECK(run_cli("conv --mode subm").exit_code == 2);  // missing required flags
    CHECK(run_cli("conv --input a --weights b --output c --mode sideways").exit_code == 2);
}

TEST_CASE("conv with mismatched weight channels exits 1") {
    const auto tensor_path = temp_file("mismatch.spt");
    const auto weights_path = temp_file("mismatch.json");
    const auto out_path = temp_file("mismatch_out.spt");
    save_tensor(oracle::random_sparse_tensor(1, {8, 8, 8, 1}, 0.1, 2), tensor_path);
    save_weights(oracle::random_weights(1, 4, 5, 27), 3, weights_path);
    const RunResult r = run_cli("conv --input " + tensor_path.string() + " --weights " +
                                weights_path.string() + " --output " + out_path.string() +
                                " --mode subm");
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("channels") != std::string::npos);
    fs::remove(tensor_path);
    fs::remove(weights_path);
}

TEST_CASE("voxelize, conv and info compose") {
    const auto points_path = temp_file("points.txt");
    const auto tensor_path = temp_file("compose.spt");
    const auto weights_path = temp_file("compose.json");
    const auto out_path = temp_file("compose_out.spt");
    std::ofstream(points_path) << "batch,fx,fy,fz,f0\n"
                               << "0,0.1,0.1,0.1,1.0\n"
                               << "0,1.1,1.1,1.1,2.0\n"
                               << "0,1.2,1.1,1.1,4.0\n";
    CHECK(run_cli("voxelize --input " + points_path.string() + " --output " +
                  tensor_path.string() + " --voxel-size 1.0 --shape 4,4,4 --reducer mean")
              .exit_code == 0);
    const SparseTensor t = load_tensor(tensor_path);
    CHECK(t.n() == 2);
    CHECK(t.feature(1, 0) == 3.0f);  // mean of 2 and 4

    save_weights(oracle::random_weights(7, 3, 1, 27), 3, weights_path);
    CHECK(run_cli("conv --input " + tensor_path.string() + " --weights " +
                  weights_path.string() + " --output " + out_path.string() +
                  " --mode subm --path optimized")
              .exit_code == 0);
    const RunResult info = run_cli("info --input " + out_path.string());
    CHECK(info.exit_code == 0);
    CHECK(info.out.find("n: 2") != std::string::npos);
    CHECK(info.out.find("channels: 3") != std::string::npos);

    for (const auto& p : {points_path, tensor_path, weights_path, out_path}) fs::remove(p);
}

TEST_CASE("verify runs a small suite and exits 0") {
    const RunResult r = run_cli(
        "verify --seed 7 --shape 12,12,12 --density 0.08 --channels 2 "
        "--modes subm,down,inv --cases 3 --tol 1e-4");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("subm  PASS") != std::string::npos);
    CHECK(r.out.find("down  PASS") != std::string::npos);
    CHECK(r.out.find("inv   PASS") != std::string::npos);
}

TEST_CASE("bench emits a JSON report") {
    const RunResult r = run_cli(
        "bench --shape 16,16,16 --density 0.1 --channels 4 --mode subm --k 3 --repeats 3");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("\"operator\": \"subm\"") != std::string::npos);
    CHECK(r.out.find("\"sites_per_second\"") != std::string::npos);
}
