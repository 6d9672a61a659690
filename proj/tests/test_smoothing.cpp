#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "vidiff/smoothing.hpp"

using namespace vidiff;

TEST_SUITE("smoothing") {

TEST_CASE("disk masks: degenerate radii") {
    const std::vector<Vec2> flow = {{0, 0}, {1, 1}};

    const auto empty = disk_masks(4, 4, {1.0, 1.0, 0.0}, flow);
    REQUIRE(empty.size() == 2);
    for (const auto& mask : empty) {
        for (uint8_t v : mask.m) REQUIRE(v == 0);
    }

    // Radius covering the whole grid marks everything.
    const auto full = disk_masks(4, 4, {1.5, 1.5, 10.0}, flow);
    for (uint8_t v : full[0].m) REQUIRE(v == 1);

    CHECK_THROWS_AS(disk_masks(4, 4, {1.0, 1.0, -1.0}, flow), std::invalid_argument);
}

TEST_CASE("disk mask radius 1 is the 5-pixel cross") {
    // Enumerate all 16 pixels of a 4x4 grid against the definition.
    const auto masks = disk_masks(4, 4, {1.0, 1.0, 1.0}, {{0, 0}});
    const ForegroundMask& mask = masks[0];
    int count = 0;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            const double d2 = (i - 1.0) * (i - 1.0) + (j - 1.0) * (j - 1.0);
            const uint8_t expected = d2 <= 1.0 ? 1 : 0;
            REQUIRE(mask.at(i, j) == expected);
            count += mask.at(i, j);
        }
    }
    CHECK(count == 5);
    CHECK(mask.at(1, 1) == 1);
    CHECK(mask.at(0, 1) == 1);
    CHECK(mask.at(2, 1) == 1);
    CHECK(mask.at(1, 0) == 1);
    CHECK(mask.at(1, 2) == 1);
    CHECK(mask.at(0, 0) == 0);
}

TEST_CASE("disk masks follow the translation flow") {
    const std::vector<Vec2> flow = {{0, 0}, {2, 0}};
    const auto masks = disk_masks(6, 6, {1.0, 1.0, 0.6}, flow);
    CHECK(masks[0].at(1, 1) == 1);
    CHECK(masks[0].at(3, 1) == 0);
    CHECK(masks[1].at(3, 1) == 1);
    CHECK(masks[1].at(1, 1) == 0);
}

TEST_CASE("threshold masks mark large channel-mean magnitudes") {
    FrameSequence seq;
    seq.t = 0;
    Tensor f(2, 2, 2);
    f.at(0, 0, 0) = 3.0;
    f.at(0, 0, 1) = 1.0;  // mean |.| = 2
    f.at(0, 1, 0) = -0.5;
    f.at(0, 1, 1) = 0.5;  // mean 0.5
    f.at(1, 0, 0) = -4.0;
    f.at(1, 0, 1) = -2.0;  // mean 3
    seq.frames.push_back(f);

    const auto masks = threshold_masks(seq, 1.0);
    REQUIRE(masks.size() == 1);
    CHECK(masks[0].at(0, 0) == 1);
    CHECK(masks[0].at(0, 1) == 0);
    CHECK(masks[0].at(1, 0) == 1);
    CHECK(masks[0].at(1, 1) == 0);
}

TEST_CASE("all-ones mask and alpha = 0 return the frame bitwise") {
    RngStream rng(7);
    const Tensor x_k = rng.gaussian_tensor(5, 5, 2);
    const Tensor x_1 = rng.gaussian_tensor(5, 5, 2);

    const ForegroundMask ones(5, 5, 1);
    const Tensor kept = background_smooth(x_k, x_1, ones, {2, 1}, 0.6, WarpMode::wrap_integer);
    CHECK(oracles::bitwise_equal(kept, x_k));

    const ForegroundMask zeros(5, 5, 0);
    const Tensor alpha0 = background_smooth(x_k, x_1, zeros, {2, 1}, 0.0, WarpMode::wrap_integer);
    CHECK(oracles::bitwise_equal(alpha0, x_k));
}

TEST_CASE("all-zeros mask with alpha = 1 returns the warped first frame") {
    RngStream rng(9);
    const Tensor x_k = rng.gaussian_tensor(4, 6, 1);
    const Tensor x_1 = rng.gaussian_tensor(4, 6, 1);
    const Vec2 shift{1, 3};

    const ForegroundMask zeros(4, 6, 0);
    const Tensor out = background_smooth(x_k, x_1, zeros, shift, 1.0, WarpMode::wrap_integer);
    const Tensor warped = warp_translate(x_1, shift, WarpMode::wrap_integer);
    CHECK(oracles::bitwise_equal(out, warped));
}

TEST_CASE("default alpha 0.6 blends on the background only") {
    Tensor x_k(1, 2, 1);
    x_k.v = {10.0, 20.0};
    Tensor x_1(1, 2, 1);
    x_1.v = {1.0, 2.0};

    ForegroundMask mask(1, 2, 0);
    mask.at(0, 0) = 1;
    const Tensor out = background_smooth(x_k, x_1, mask, {0, 0}, 0.6, WarpMode::wrap_integer);
    CHECK(out.v[0] == 10.0);
    CHECK(out.v[1] == doctest::Approx(0.6 * 2.0 + 0.4 * 20.0).epsilon(1e-15));
}

TEST_CASE("convexity: every output pixel lies between its two sources") {
    RngStream rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const Tensor x_k = rng.gaussian_tensor(6, 6, 2);
        const Tensor x_1 = rng.gaussian_tensor(6, 6, 2);
        const double alpha = rng.uniform();
        const Vec2 shift{std::floor(rng.uniform() * 6), std::floor(rng.uniform() * 6)};

        ForegroundMask mask(6, 6, 0);
        for (uint8_t& v : mask.m) v = rng.uniform() < 0.5 ? 1 : 0;

        const Tensor warped = warp_translate(x_1, shift, WarpMode::wrap_integer);
        const Tensor out =
            background_smooth(x_k, x_1, mask, shift, alpha, WarpMode::wrap_integer);
        for (int i = 0; i < 6; ++i) {
            for (int j = 0; j < 6; ++j) {
                for (int ch = 0; ch < 2; ++ch) {
                    const double lo = std::min(x_k.at(i, j, ch), warped.at(i, j, ch));
                    const double hi = std::max(x_k.at(i, j, ch), warped.at(i, j, ch));
                    REQUIRE(out.at(i, j, ch) >= lo - 1e-12);
                    REQUIRE(out.at(i, j, ch) <= hi + 1e-12);
                }
            }
        }
    }
}

TEST_CASE("frame 1 with zero shift is a fixed point for any alpha") {
    RngStream rng(13);
    const Tensor x_1 = rng.gaussian_tensor(5, 5, 1);
    ForegroundMask mask(5, 5, 0);
    for (uint8_t& v : mask.m) v = rng.uniform() < 0.3 ? 1 : 0;

    for (double alpha : {0.0, 0.3, 0.6, 1.0}) {
        const Tensor out =
            background_smooth(x_1, x_1, mask, {0, 0}, alpha, WarpMode::wrap_integer);
        REQUIRE(oracles::bitwise_equal(out, x_1));
    }
}

TEST_CASE("parameter validation") {
    const Tensor x(2, 2, 1);
    CHECK_THROWS_AS(background_smooth(x, Tensor(3, 3, 1), ForegroundMask(2, 2), {0, 0}, 0.5,
                                      WarpMode::wrap_integer),
                    std::invalid_argument);
    CHECK_THROWS_AS(background_smooth(x, x, ForegroundMask(3, 3), {0, 0}, 0.5,
                                      WarpMode::wrap_integer),
                    std::invalid_argument);
    CHECK_THROWS_AS(background_smooth(x, x, ForegroundMask(2, 2), {0, 0}, 1.5,
                                      WarpMode::wrap_integer),
                    std::invalid_argument);
}

}  // TEST_SUITE
