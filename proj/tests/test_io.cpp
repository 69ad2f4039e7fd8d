// Copyright 2026 The voxelconv Authors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "voxelconv/io.hpp"
#include "voxelconv/oracle.hpp"

using namespace voxelconv;

namespace {

const GridShape kShape4{4, 4, 4, 1};

SparseTensor two_row_tensor() {
    return SparseTensor(kShape4, {0, 0}, {1, 2}, {1, 1}, {1, 1}, {1.5f, -2.25f}, 1);
}

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("voxelconv_io_" + name);
}

}  // namespace

TEST_CASE("tensor bytes round-trip") {
    const SparseTensor t = two_row_tensor();
    const std::string bytes = tensor_to_bytes(t);
    CHECK(bytes.size() == 32 + 16 * 2 + 4 * 2);
    const SparseTensor back = tensor_from_bytes(bytes);
    CHECK(back == t);
    CHECK(tensor_to_bytes(back) == bytes);
}

TEST_CASE("empty tensor serializes to a bare header") {
    const SparseTensor t(kShape4, {}, {}, {}, {}, {}, 3);
    const std::string bytes = tensor_to_bytes(t);
    CHECK(bytes.size() == 32);
    const SparseTensor back = tensor_from_bytes(bytes);
    CHECK(back.n() == 0);
    CHECK(back.channels() == 3);
    CHECK(back.shape() == kShape4);
}

TEST_CASE("tensor file round-trip on disk") {
    const auto path = temp_file("roundtrip.spt");
    const SparseTensor t = oracle::random_sparse_tensor(5, {9, 7, 5, 2}, 0.2, 3);
    save_tensor(t, path);
    CHECK(load_tensor(path) == t);
    std::filesystem::remove(path);
}

TEST_CASE("malformed tensor files are rejected by class") {
    const std::string good = tensor_to_bytes(two_row_tensor());

    SUBCASE("bad magic") {
        std::string bytes = good;
        bytes[0] = 'X';
        CHECK_THROWS_AS(tensor_from_bytes(bytes), BadMagicError);
    }
    SUBCASE("unsupported version") {
        std::string bytes = good;
        bytes[4] = 2;
        CHECK_THROWS_AS(tensor_from_bytes(bytes), VersionUnsupportedError);
    }
    SUBCASE("truncated payload") {
        CHECK_THROWS_AS(tensor_from_bytes(good.substr(0, good.size() - 1)), TruncatedError);
        CHECK_THROWS_AS(tensor_from_bytes(good.substr(0, 17)), TruncatedError);
        CHECK_THROWS_AS(tensor_from_bytes(good.substr(0, 2)), TruncatedError);
    }
    SUBCASE("trailing bytes") {
        CHECK_THROWS_AS(tensor_from_bytes(good + '\0'), InvariantViolationError);
    }
    SUBCASE("duplicate coordinates in the payload") {
        std::string bytes = good;
        bytes[44] = 1;  // x[1]: 2 -> 1, colliding with row 0
        CHECK_THROWS_AS(tensor_from_bytes(bytes), InvariantViolationError);
    }
    SUBCASE("out-of-bounds coordinate in the payload") {
        std::string bytes = good;
        bytes[44] = 9;  // x[1] past max_x
        CHECK_THROWS_AS(tensor_from_bytes(bytes), InvariantViolationError);
    }
}

TEST_CASE("weight files round-trip") {
    const auto path = temp_file("weights.json");
    const WeightTensor w = oracle::random_weights(3, 4, 2, 27);
    save_weights(w, 3, path);
    const LoadedWeights loaded = load_weights(path);
    CHECK(loaded.kernel == 3);
    CHECK(loaded.weights == w);
    std::filesystem::remove(path);
}

TEST_CASE("weight file validation") {
    const auto path = temp_file("bad_weights.json");
    std::ofstream(path) << R"({"out_channels":1,"in_channels":1,"kernel":2,)"
                        << R"("layout":"oc_koff_ic","values":[1,2,3]})";
    CHECK_THROWS_AS(load_weights(path), LengthMismatchError);  // 3 != 8
    std::ofstream(path) << R"({"out_channels":1,"in_channels":1,"kernel":1,)"
                        << R"("layout":"ic_first","values":[1]})";
    CHECK_THROWS_AS(load_weights(path), Error);
    std::filesystem::remove(path);
}

TEST_CASE("points parse with and without a header") {
    SUBCASE("header detected by non-numeric first field") {
        std::istringstream in("batch,fx,fy,fz,f0\n0,0.5,0.5,0.5,1.0\n1,1.5,0.5,0.5,2.0\n");
        const auto points = load_points(in);
        REQUIRE(points.size() == 2);
        CHECK(points[0].batch == 0);
        CHECK(points[1].x == 1.5f);
        CHECK(points[1].features == std::vector<float>{2.0f});
    }
    SUBCASE("no header") {
        std::istringstream in("0,0.5,0.5,0.5,1.0,2.0\n");
        const auto points = load_points(in);
        REQUIRE(points.size() == 1);
        CHECK(points[0].features.size() == 2);
    }
    SUBCASE("inconsistent widths are rejected") {
        std::istringstream in("0,0.5,0.5,0.5,1.0\n0,1.5,0.5,0.5,1.0,2.0\n");
        CHECK_THROWS_AS(load_points(in), LengthMismatchError);
    }
    SUBCASE("points with no features are allowed") {
        std::istringstream in("0,0.5,0.5,0.5\n");
        CHECK(load_points(in).size() == 1);
    }
}

TEST_CASE("config accepts nested and flat keys") {
    const auto path = temp_file("config.json");
    std::ofstream(path) << R"({"lct":{"dense_threshold":1024}})";
    CHECK(load_config(path).lct_dense_threshold == 1024);
    std::ofstream(path) << R"({"lct.dense_threshold":4096})";
    CHECK(load_config(path).lct_dense_threshold == 4096);
    std::ofstream(path) << R"({})";
    CHECK(load_config(path).lct_dense_threshold == kDefaultDenseThreshold);
    std::filesystem::remove(path);
}
