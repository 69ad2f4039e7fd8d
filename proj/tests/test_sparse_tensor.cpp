// Copyright 2026 The voxelconv Authors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <random>

#include "voxelconv/oracle.hpp"
#include "voxelconv/sparse_tensor.hpp"

using namespace voxelconv;

namespace {

const GridShape kShape4{4, 4, 4, 1};

SparseTensor two_row_tensor() {
    return SparseTensor(kShape4, {0, 0}, {1, 2}, {1, 1}, {1, 1}, {1.0f, 2.0f}, 1);
}

}  // namespace

TEST_CASE("empty tensor is valid") {
    const SparseTensor t(kShape4, {}, {}, {}, {}, {}, 2);
    CHECK(t.n() == 0);
    CHECK(t.channels() == 2);
    CHECK(validate(t).empty());
}

TEST_CASE("two distinct rows construct") {
    const SparseTensor t = two_row_tensor();
    CHECK(t.n() == 2);
    CHECK(t.feature(0, 0) == 1.0f);
    CHECK(t.feature(1, 0) == 2.0f);
}

TEST_CASE("construction rejects invalid input") {
    CHECK_THROWS_AS(SparseTensor(kShape4, {0, 0}, {1, 1}, {1, 1}, {1, 1}, {1.0f, 2.0f}, 1),
                    DuplicateCoordinateError);
    CHECK_THROWS_AS(SparseTensor(kShape4, {0}, {4}, {1}, {1}, {1.0f}, 1), OutOfBoundsError);
    CHECK_THROWS_AS(SparseTensor(kShape4, {0}, {1}, {1}, {1}, {1.0f, 2.0f}, 1),
                    LengthMismatchError);
    CHECK_THROWS_AS(SparseTensor(kShape4, {0, 0}, {1}, {1, 2}, {1, 2}, {1.0f, 2.0f}, 1),
                    LengthMismatchError);
}

TEST_CASE("validate reports every violation with rows") {
    SUBCASE("valid tensor yields an empty report") {
        CHECK(validate(two_row_tensor()).empty());
    }
    SUBCASE("x == max_x is out of bounds") {
        const std::vector<std::int32_t> batch{0}, x{4}, y{0}, z{0};
        const auto issues = validate(kShape4, batch, x, y, z, 1, 1);
        REQUIRE(issues.size() == 1);
        CHECK(issues[0].kind == IssueKind::OutOfBounds);
        CHECK(issues[0].row_a == 0);
    }
    SUBCASE("duplicate names both rows") {
        const std::vector<std::int32_t> batch{0, 0, 0}, x{1, 2, 1}, y{1, 1, 1}, z{1, 1, 1};
        const auto issues = validate(kShape4, batch, x, y, z, 3, 1);
        REQUIRE(issues.size() == 1);
        CHECK(issues[0].kind == IssueKind::DuplicateCoordinate);
        CHECK(issues[0].row_a == 0);
        CHECK(issues[0].row_b == 2);
    }
}

TEST_CASE("voxelize quantizes with floor") {
    std::vector<PointRecord> points{{0, 0.12f, 0.07f, 0.0f, {1.0f}}};
    const SparseTensor t = voxelize(points, 0.05f, {0, 0, 0}, {8, 8, 8, 1}, Reducer::Mean);
    REQUIRE(t.n() == 1);
    CHECK(t.coord(0) == VoxelCoord{0, 2, 1, 0});
}

TEST_CASE("voxelize merges colliding points per reducer") {
    std::vector<PointRecord> points{{0, 2.1f, 1.2f, 0.3f, {1.0f}}, {0, 2.9f, 1.8f, 0.1f, {3.0f}}};
    SUBCASE("mean") {
        const SparseTensor t = voxelize(points, 1.0f, {0, 0, 0}, kShape4, Reducer::Mean);
        REQUIRE(t.n() == 1);
        CHECK(t.coord(0) == VoxelCoord{0, 2, 1, 0});
        CHECK(t.feature(0, 0) == doctest::Approx(2.0f));
    }
    SUBCASE("sum") {
        const SparseTensor t = voxelize(points, 1.0f, {0, 0, 0}, kShape4, Reducer::Sum);
        CHECK(t.feature(0, 0) == doctest::Approx(4.0f));
    }
    SUBCASE("first keeps input order") {
        const SparseTensor t = voxelize(points, 1.0f, {0, 0, 0}, kShape4, Reducer::First);
        CHECK(t.feature(0, 0) == 1.0f);
    }
}

TEST_CASE("voxelize edge cases") {
    CHECK(voxelize({}, 0.5f, {0, 0, 0}, kShape4, Reducer::Mean).n() == 0);
    std::vector<PointRecord> outside{{0, 9.0f, 0.0f, 0.0f, {1.0f}}};
    CHECK_THROWS_AS(voxelize(outside, 1.0f, {0, 0, 0}, kShape4, Reducer::Mean),
                    OutOfBoundsError);
    std::vector<PointRecord> negative{{0, -0.5f, 0.0f, 0.0f, {1.0f}}};
    CHECK_THROWS_AS(voxelize(negative, 1.0f, {0, 0, 0}, kShape4, Reducer::Mean),
                    OutOfBoundsError);
}

TEST_CASE("voxelize output is canonically sorted") {
    std::vector<PointRecord> points{{0, 3.5f, 3.5f, 3.5f, {1.0f}},
                                    {0, 0.5f, 0.5f, 0.5f, {2.0f}},
                                    {0, 2.5f, 0.5f, 0.5f, {3.0f}}};
    const SparseTensor t = voxelize(points, 1.0f, {0, 0, 0}, kShape4, Reducer::Mean);
    REQUIRE(t.n() == 3);
    CHECK(t.coord(0) == VoxelCoord{0, 0, 0, 0});
    CHECK(t.coord(1) == VoxelCoord{0, 2, 0, 0});
    CHECK(t.coord(2) == VoxelCoord{0, 3, 3, 3});
}

TEST_CASE("voxelize with sum preserves feature mass") {
    std::mt19937 rng(5);
    std::vector<PointRecord> points;
    double mass[2] = {0.0, 0.0};
    for (int i = 0; i < 500; ++i) {
        PointRecord p;
        p.batch = static_cast<std::int32_t>(rng() % 2);
        p.x = static_cast<float>(rng() % 4000) / 1000.0f;
        p.y = static_cast<float>(rng() % 4000) / 1000.0f;
        p.z = static_cast<float>(rng() % 4000) / 1000.0f;
        p.features = {static_cast<float>(rng() % 100) / 50.0f - 1.0f,
                      static_cast<float>(rng() % 100) / 50.0f - 1.0f};
        mass[0] += p.features[0];
        mass[1] += p.features[1];
        points.push_back(std::move(p));
    }
    const SparseTensor t = voxelize(points, 0.25f, {0, 0, 0}, {16, 16, 16, 2}, Reducer::Sum);
    double got[2] = {0.0, 0.0};
    for (std::int32_t row = 0; row < t.n(); ++row) {
        got[0] += t.feature(row, 0);
        got[1] += t.feature(row, 1);
    }
    CHECK(got[0] == doctest::Approx(mass[0]).epsilon(1e-6));
    CHECK(got[1] == doctest::Approx(mass[1]).epsilon(1e-6));
}

TEST_CASE("to_dense places features and zeros elsewhere") {
    SUBCASE("empty tensor densifies to zeros") {
        const SparseTensor t(kShape4, {}, {}, {}, {}, {}, 1);
        const DenseGrid g = to_dense(t);
        for (float v : g.values) CHECK(v == 0.0f);
    }
    SUBCASE("single site") {
        const SparseTensor t(kShape4, {0}, {1}, {1}, {1}, {7.0f}, 1);
        const DenseGrid g = to_dense(t);
        std::int64_t nonzero = 0;
        for (float v : g.values) nonzero += v != 0.0f;
        CHECK(nonzero == 1);
        CHECK(g.at(0, 1, 1, 1, 0) == 7.0f);
    }
}

TEST_CASE("densify then sparsify round-trips active sites") {
    for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
        const SparseTensor t =
            oracle::random_sparse_tensor(seed, {6, 5, 7, 2}, 0.2, 3);
        const SparseTensor back = sparsify(to_dense(t));
        CHECK(back == canonical_sorted(t));
    }
}

TEST_CASE("construction never yields a tensor validate flags") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const SparseTensor t = oracle::random_sparse_tensor(seed, {9, 8, 7, 2}, 0.15, 2);
        CHECK(validate(t).empty());
    }
}
