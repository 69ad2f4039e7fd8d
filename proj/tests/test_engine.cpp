// Copyright 2026 The voxelconv Authors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <vector>

#include "voxelconv/engine.hpp"
#include "voxelconv/oracle.hpp"

using namespace voxelconv;

namespace {

const GridShape kShape4{4, 4, 4, 1};

SparseTensor two_point_tensor() {
    return SparseTensor(kShape4, {0, 0}, {1, 2}, {1, 1}, {1, 1}, {1.0f, 1.0f}, 1);
}

SparseTensor three_point_tensor() {
    return SparseTensor(kShape4, {0, 0, 0}, {0, 1, 2}, {0, 1, 0}, {0, 1, 0},
                        {1.0f, 1.0f, 1.0f}, 1);
}

WeightTensor ones(std::int32_t oc, std::int32_t ic, std::int32_t k_vol) {
    return WeightTensor::create(
        oc, ic, k_vol, std::vector<float>(static_cast<std::size_t>(oc) * k_vol * ic, 1.0f));
}

WeightTensor channel_identity(std::int32_t channels) {
    WeightTensor w = WeightTensor::zeros(channels, channels, 1);
    for (std::int32_t c = 0; c < channels; ++c) w.at(c, 0, c) = 1.0f;
    return w;
}

OffsetTable subm_rules(const SparseTensor& t, std::int32_t k) {
    return build_subm_oft(t, LocationTable::build(t), k);
}

}  // namespace

TEST_CASE("identity kernel reproduces the input") {
    const SparseTensor t = oracle::random_sparse_tensor(1, {8, 8, 8, 2}, 0.1, 3);
    const SparseTensor out = subm_conv(t, subm_rules(t, 1), channel_identity(3));
    CHECK(out.sites() == t.sites());
    CHECK(out.features() == t.features());
}

TEST_CASE("two neighbors with all-ones weights sum to two") {
    const SparseTensor t = two_point_tensor();
    const SparseTensor out = subm_conv(t, subm_rules(t, 3), ones(1, 1, 27));
    CHECK(out.features() == std::vector<float>{2.0f, 2.0f});
}

TEST_CASE("submanifold convolution of an empty tensor is empty") {
    const SparseTensor t(kShape4, {}, {}, {}, {}, {}, 1);
    const SparseTensor out = subm_conv(t, subm_rules(t, 3), ones(2, 1, 27));
    CHECK(out.n() == 0);
    CHECK(out.channels() == 2);
}

TEST_CASE("subm_conv rejects mismatched shapes") {
    const SparseTensor t = two_point_tensor();
    const OffsetTable oft = subm_rules(t, 3);
    CHECK_THROWS_AS(subm_conv(t, oft, ones(1, 2, 27)), ShapeMismatchError);
    CHECK_THROWS_AS(subm_conv(t, oft, ones(1, 1, 8)), ShapeMismatchError);
}

TEST_CASE("strided convolution of the three-point example") {
    const SparseTensor t = three_point_tensor();
    const DownsampleRules rules = build_downsample_oft(t, {2});
    const SparseTensor out = sparse_conv(t, rules.map, rules.oft, ones(1, 1, 8));
    CHECK(out.shape() == GridShape{2, 2, 2, 1});
    CHECK(out.features() == std::vector<float>{2.0f, 1.0f});
}

TEST_CASE("strided convolution edge cases") {
    SUBCASE("single input produces a one-term sum") {
        const SparseTensor t(kShape4, {0}, {1}, {1}, {1}, {0.5f, -2.0f}, 2);
        const WeightTensor w = oracle::random_weights(3, 3, 2, 8);
        const DownsampleRules rules = build_downsample_oft(t, {2});
        const SparseTensor out = sparse_conv(t, rules.map, rules.oft, w);
        REQUIRE(out.n() == 1);
        const std::int32_t koff = rules.map.kernel_offset[0];
        for (std::int32_t oc = 0; oc < 3; ++oc) {
            const double expected = 0.5 * w.at(oc, koff, 0) + -2.0 * w.at(oc, koff, 1);
            CHECK(out.feature(0, oc) == doctest::Approx(expected).epsilon(1e-6));
        }
    }
    SUBCASE("zero weights give zero features") {
        const SparseTensor t = three_point_tensor();
        const DownsampleRules rules = build_downsample_oft(t, {2});
        const SparseTensor out = sparse_conv(t, rules.map, rules.oft, WeightTensor::zeros(2, 1, 8));
        for (float v : out.features()) CHECK(v == 0.0f);
    }
}

TEST_CASE("inverse convolution scatters coarse features") {
    const SparseTensor coarse(GridShape{2, 2, 2, 1}, {0, 0}, {0, 1}, {0, 0}, {0, 0},
                              {5.0f, 7.0f}, 1);
    const IndexSet fine = three_point_tensor().sites();
    const InverseMap imap = build_inverse_map(fine, coarse, {2});
    const SparseTensor out = inverse_conv(coarse, imap, fine, ones(1, 1, 8));
    CHECK(out.features() == std::vector<float>{5.0f, 5.0f, 7.0f});
    CHECK(out.sites() == fine);
}

TEST_CASE("inverse convolution edge cases") {
    const SparseTensor coarse(GridShape{2, 2, 2, 1}, {0, 0}, {0, 1}, {0, 0}, {0, 0},
                              {0.0f, 0.0f}, 1);
    const IndexSet fine = three_point_tensor().sites();
    const InverseMap imap = build_inverse_map(fine, coarse, {2});
    SUBCASE("zero coarse features give zero fine features") {
        const SparseTensor out = inverse_conv(coarse, imap, fine, ones(3, 1, 8));
        for (float v : out.features()) CHECK(v == 0.0f);
    }
    SUBCASE("stride 1 with identity weights reproduces the coarse tensor") {
        const SparseTensor t = oracle::random_sparse_tensor(5, {6, 6, 6, 1}, 0.2, 2);
        const InverseMap self = build_inverse_map(t.sites(), t, {1});
        const SparseTensor out = inverse_conv(t, self, t.sites(), channel_identity(2));
        CHECK(out.features() == t.features());
    }
    SUBCASE("channel mismatch is rejected") {
        CHECK_THROWS_AS(inverse_conv(coarse, imap, fine, ones(1, 3, 8)), ShapeMismatchError);
    }
}

TEST_CASE("both compute paths agree bitwise") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const SparseTensor t = oracle::random_sparse_tensor(seed, {12, 12, 12, 2}, 0.1, 5);
        const WeightTensor w = oracle::random_weights(seed, 4, 5, 27);
        const OffsetTable oft = subm_rules(t, 3);
        const SparseTensor ref = subm_conv(t, oft, w, ComputePath::Reference);
        const SparseTensor opt = subm_conv(t, oft, w, ComputePath::Optimized);
        CHECK(ref.features() == opt.features());

        const WeightTensor wd = oracle::random_weights(seed + 100, 3, 5, 8);
        const DownsampleRules rules = build_downsample_oft(t, {2});
        const SparseTensor dref = sparse_conv(t, rules.map, rules.oft, wd, ComputePath::Reference);
        const SparseTensor dopt = sparse_conv(t, rules.map, rules.oft, wd, ComputePath::Optimized);
        CHECK(dref.features() == dopt.features());

        const SparseTensor coarse(rules.map.out_indices,
                                  oracle::random_features(seed, static_cast<std::size_t>(
                                                                    rules.map.out_count) *
                                                                    5),
                                  5);
        const InverseMap imap = build_inverse_map(t.sites(), coarse, {2});
        const SparseTensor iref =
            inverse_conv(coarse, imap, t.sites(), wd, ComputePath::Reference);
        const SparseTensor iopt =
            inverse_conv(coarse, imap, t.sites(), wd, ComputePath::Optimized);
        CHECK(iref.features() == iopt.features());
    }
}

TEST_CASE("outputs are bitwise identical for any worker count") {
    const SparseTensor t = oracle::random_sparse_tensor(77, {16, 16, 16, 1}, 0.1, 4);
    const WeightTensor w = oracle::random_weights(77, 4, 4, 27);
    const OffsetTable oft = subm_rules(t, 3);
    for (ComputePath path : {ComputePath::Reference, ComputePath::Optimized}) {
        const SparseTensor lone = subm_conv(t, oft, w, path, 1);
        const SparseTensor many = subm_conv(t, oft, w, path, 8);
        CHECK(lone.features() == many.features());
    }
}

TEST_CASE("operators are linear in features and weights") {
    const double tol = 1e-4;
    const SparseTensor t = oracle::random_sparse_tensor(31, {10, 10, 10, 1}, 0.12, 3);
    const WeightTensor w1 = oracle::random_weights(31, 2, 3, 27);
    WeightTensor w2 = oracle::random_weights(32, 2, 3, 27);
    WeightTensor w_sum = w1;
    for (std::size_t i = 0; i < w_sum.values.size(); ++i) w_sum.values[i] += w2.values[i];

    std::vector<float> scaled(t.features());
    for (float& v : scaled) v *= 3.0f;
    const SparseTensor t3(t.sites(), std::move(scaled), t.channels());

    const OffsetTable oft = subm_rules(t, 3);
    const SparseTensor base = subm_conv(t, oft, w1);
    const SparseTensor from_scaled = subm_conv(t3, oft, w1);
    const SparseTensor from_w2 = subm_conv(t, oft, w2);
    const SparseTensor from_sum = subm_conv(t, oft, w_sum);
    for (std::int32_t row = 0; row < t.n(); ++row) {
        for (std::int32_t oc = 0; oc < 2; ++oc) {
            CHECK(from_scaled.feature(row, oc) ==
                  doctest::Approx(3.0f * base.feature(row, oc)).epsilon(tol));
            CHECK(from_sum.feature(row, oc) ==
                  doctest::Approx(base.feature(row, oc) + from_w2.feature(row, oc))
                      .epsilon(tol));
        }
    }
}

TEST_CASE("pipeline chains layers and matches single calls") {
    const SparseTensor t = oracle::random_sparse_tensor(41, {12, 12, 12, 1}, 0.1, 2);

    SUBCASE("empty layer list returns the input unchanged") {
        const SparseTensor out = run_pipeline({}, t);
        CHECK(out == t);
    }
    SUBCASE("a single submanifold layer equals a direct call") {
        const WeightTensor w = oracle::random_weights(41, 3, 2, 27);
        const std::vector<ConvLayerSpec> layers{{ConvLayerSpec::Mode::Submanifold, 3, w}};
        const SparseTensor direct = subm_conv(t, subm_rules(t, 3), w);
        CHECK(run_pipeline(layers, t) == direct);
    }
    SUBCASE("downsample then inverse restores the index set") {
        const std::vector<ConvLayerSpec> layers{
            {ConvLayerSpec::Mode::Downsample, 2, oracle::random_weights(1, 4, 2, 8)},
            {ConvLayerSpec::Mode::Inverse, 2, oracle::random_weights(2, 2, 4, 8)}};
        const SparseTensor out = run_pipeline(layers, t);
        CHECK(out.sites() == t.sites());
        CHECK(out.channels() == 2);
    }
    SUBCASE("deep stack pairs downsample and inverse like brackets") {
        const std::vector<ConvLayerSpec> layers{
            {ConvLayerSpec::Mode::Submanifold, 3, oracle::random_weights(3, 4, 2, 27)},
            {ConvLayerSpec::Mode::Downsample, 2, oracle::random_weights(4, 4, 4, 8)},
            {ConvLayerSpec::Mode::Downsample, 2, oracle::random_weights(5, 8, 4, 8)},
            {ConvLayerSpec::Mode::Inverse, 2, oracle::random_weights(6, 4, 8, 8)},
            {ConvLayerSpec::Mode::Inverse, 2, oracle::random_weights(7, 1, 4, 8)}};
        const SparseTensor out = run_pipeline(layers, t);
        CHECK(out.sites() == t.sites());
        CHECK(out.channels() == 1);
    }
    SUBCASE("channel mismatch names the layer") {
        const std::vector<ConvLayerSpec> layers{
            {ConvLayerSpec::Mode::Submanifold, 3, oracle::random_weights(1, 2, 5, 27)}};
        CHECK_THROWS_AS(run_pipeline(layers, t), ChannelMismatchError);
    }
    SUBCASE("inverse without a downsample is rejected") {
        const std::vector<ConvLayerSpec> layers{
            {ConvLayerSpec::Mode::Inverse, 2, oracle::random_weights(1, 2, 2, 8)}};
        CHECK_THROWS_AS(run_pipeline(layers, t), UnmatchedInverseError);
    }
}
