#include <doctest.h>

#include <cmath>

#include "specedit/errors.hpp"
#include "specedit/grid.hpp"
#include "test_util.hpp"

using namespace specedit;

TEST_CASE("downsample averages each block") {
    LatentGrid g(2, 2, 1, {1, 2, 3, 4});
    const auto d = downsample(g, 2);
    CHECK(d.height() == 1);
    CHECK(d.width() == 1);
    CHECK(d.at(0, 0) == 2.5);
}

TEST_CASE("scale 1 is the identity for both operators") {
    const auto g = testutil::random_grid(6, 10, 3, 1);
    CHECK(downsample(g, 1) == g);
    CHECK(upsample_nearest(g, 1) == g);
}

TEST_CASE("downsample to a single token matches a summation loop") {
    const auto g = testutil::random_grid(16, 16, 3, 2);
    const auto d = downsample(g, 16);
    REQUIRE(d.tokens() == 1);
    for (std::size_t c = 0; c < 3; ++c) {
        double sum = 0.0;
        for (std::size_t y = 0; y < 16; ++y) {
            for (std::size_t x = 0; x < 16; ++x) sum += g.at(y, x, c);
        }
        CHECK(d.at(0, 0, c) == doctest::Approx(sum / 256.0).epsilon(1e-14));
    }
}

TEST_CASE("non-divisible shapes are rejected") {
    const auto g = testutil::random_grid(12, 12, 1, 3);
    try {
        (void)downsample(g, 8);
        FAIL("expected NonDivisibleShape");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonDivisibleShape);
    }
    CHECK_THROWS_AS((void)downsample(g, 3), Error);
}

TEST_CASE("upsample replicates tokens") {
    LatentGrid g(1, 1, 1, {7});
    const auto u = upsample_nearest(g, 2);
    CHECK(u == LatentGrid(2, 2, 1, {7, 7, 7, 7}));
}

TEST_CASE("downsample undoes upsample on random grids") {
    const std::size_t scales[] = {2, 4, 8, 16};
    for (int i = 0; i < 50; ++i) {
        const std::size_t s = scales[i % 4];
        const auto g = testutil::random_grid(1 + i % 3, 2 + i % 4, 1 + i % 5, 100 + i);
        CHECK(max_abs_diff(downsample(upsample_nearest(g, s), s), g) <= 1e-12);
    }
}

TEST_CASE("downsample is linear and keeps channel means") {
    for (int i = 0; i < 20; ++i) {
        const auto a = testutil::random_grid(16, 32, 3, 200 + i);
        const auto b = testutil::random_grid(16, 32, 3, 300 + i);
        const double ca = 0.3 + i * 0.1;
        const double cb = -1.7 + i * 0.05;
        LatentGrid mix(16, 32, 3);
        for (std::size_t k = 0; k < mix.size(); ++k) mix.data()[k] = ca * a.data()[k] + cb * b.data()[k];
        for (std::size_t s : {2, 4, 8, 16}) {
            const auto da = downsample(a, s);
            const auto db = downsample(b, s);
            const auto dm = downsample(mix, s);
            for (std::size_t k = 0; k < dm.size(); ++k) {
                CHECK(std::abs(dm.data()[k] - (ca * da.data()[k] + cb * db.data()[k])) <= 1e-12);
            }
            const auto m0 = channel_means(a);
            const auto m1 = channel_means(da);
            for (std::size_t c = 0; c < 3; ++c) CHECK(std::abs(m0[c] - m1[c]) <= 1e-12);
        }
    }
}

TEST_CASE("grid construction validates its data") {
    CHECK_THROWS_AS(LatentGrid(2, 2, 1, {1, 2, 3}), Error);
    try {
        LatentGrid g(1, 2, 1, {1.0, std::nan("")});
        FAIL("expected NonFiniteValue");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonFiniteValue);
    }
}

TEST_CASE("valid scales") {
    CHECK(is_valid_scale(1));
    CHECK(is_valid_scale(16));
    CHECK_FALSE(is_valid_scale(3));
    CHECK_FALSE(is_valid_scale(0));
}
