#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"
#include "tvphi/energy.hpp"
#include "tvphi/multiscale.hpp"

using namespace tvphi;

TEST_CASE("discrete gaussian kernels are nonnegative, normalized and symmetric") {
    for (double eps : {0.25, 0.5, 1.0, 2.0, 8.0}) {
        const Kernel1D k = discrete_gaussian(eps);
        REQUIRE(k.radius == static_cast<int>(std::ceil(4.0 * eps)) + 1);
        double sum = 0.0;
        for (int d = -k.radius; d <= k.radius; ++d) {
            const double v = k.taps[static_cast<std::size_t>(d + k.radius)];
            REQUIRE(v >= 0.0);
            REQUIRE(v == k.taps[static_cast<std::size_t>(k.radius - d)]);
            sum += v;
        }
        REQUIRE(sum == Catch::Approx(1.0).epsilon(1e-14));
    }
    REQUIRE_THROWS_AS(discrete_gaussian(0.0), std::invalid_argument);
}

TEST_CASE("family scales halve per level and the semigroup defect stays small") {
    const MollifierFamily f = MollifierFamily::make(1.0, 3);
    REQUIRE(f.levels() == 3);
    REQUIRE(f.scales[0] == 1.0);
    REQUIRE(f.scales[1] == 0.5);
    REQUIRE(f.scales[2] == 0.25);
    for (int l = 1; l < f.levels(); ++l) {
        REQUIRE(f.scales[l] < f.scales[l - 1]);
        REQUIRE(f.semigroup_defect(l) <= 1e-3);
    }
    const MollifierFamily wide = MollifierFamily::make(8.0, 3);
    for (int l = 1; l < wide.levels(); ++l) REQUIRE(wide.semigroup_defect(l) <= 1e-3);
    REQUIRE_THROWS_AS(f.kernel(0), std::out_of_range);
    REQUIRE_THROWS_AS(f.kernel(4), std::out_of_range);
}

TEST_CASE("dense 2d materialization matches the separable pass") {
    const MollifierFamily f = MollifierFamily::make(1.0, 1);
    const Image u = testsupport::random_image(20, 14, 6);
    const Image dense = convolve(u, f.kernel2d(1));
    GradientField asfield(u.width, u.height);
    asfield.gx = u.data;
    const GradientField sep = smooth_field(asfield, f.kernel(1));
    for (std::size_t i = 0; i < u.size(); ++i)
        REQUIRE(sep.gx[i] == Catch::Approx(dense.data[i]).margin(1e-12));
}

TEST_CASE("lifting a constant image gives unit vectors") {
    Image u(6, 6, 1.0, 9.0);
    const LiftedGradient L = lift(u);
    for (std::size_t i = 0; i < L.g.size(); ++i) {
        REQUIRE(L.g.gx[i] == 0.0);
        REQUIRE(L.g.gy[i] == 0.0);
        REQUIRE(L.magnitude(i) == 1.0);
    }
}

TEST_CASE("lifted magnitude sums to the area functional") {
    const Image u = testsupport::random_image(13, 11, 17);
    const LiftedGradient L = lift(u);
    double acc = 0.0;
    for (std::size_t i = 0; i < L.g.size(); ++i) acc += L.magnitude(i);
    REQUIRE(u.h * u.h * acc == Catch::Approx(area_functional(u)).epsilon(1e-13));
    const GradientField g = gradient(u);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double m = g.magnitude(i);
        REQUIRE(L.magnitude(i) == Catch::Approx(std::sqrt(1.0 + m * m)).epsilon(1e-14));
    }
}

TEST_CASE("eta vanishes on constants at every level") {
    const MollifierFamily f = MollifierFamily::make(1.0, 3);
    Image u(24, 24, 1.0, 123.0);
    for (int l = 1; l <= 3; ++l) REQUIRE(eta_level(u, f, l) == 0.0);
    REQUIRE(eta(u, f, 3) == 0.0);
    REQUIRE_THROWS_AS(eta_level(u, f, 4), std::out_of_range);
    REQUIRE_THROWS_AS(eta(u, f, 5), std::invalid_argument);
}

TEST_CASE("eta is nonnegative and monotone in the level count") {
    const MollifierFamily f = MollifierFamily::make(1.0, 3);
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const Image u = testsupport::random_image(24, 24, seed);
        double prev = 0.0;
        for (int K = 1; K <= 3; ++K) {
            const double v = eta(u, f, K);
            REQUIRE(v >= 0.0);
            REQUIRE(v >= prev - 1e-9);
            prev = v;
        }
    }
    const MollifierFamily off = MollifierFamily::make(1.0, 3, 0.0);
    REQUIRE(eta(testsupport::random_image(24, 24, 4), off, 3) == 0.0);
}

TEST_CASE("eta weight enters linearly") {
    const Image u = testsupport::random_image(20, 20, 31);
    const MollifierFamily f1 = MollifierFamily::make(1.0, 2, 1.0);
    const MollifierFamily f7 = MollifierFamily::make(1.0, 2, 7.0);
    REQUIRE(eta(u, f7, 2) == Catch::Approx(7.0 * eta(u, f1, 2)).epsilon(1e-12));
}

TEST_CASE("level terms decrease for the nested family") {
    const MollifierFamily f = MollifierFamily::make(1.0, 3);
    Image c(16, 16, 1.0, 2.0);
    REQUIRE(eta_level_decreasing_check(c, f));
    for (std::uint64_t seed : {5u, 6u, 7u, 8u}) {
        const Image u = testsupport::random_image(32, 32, seed);
        REQUIRE(eta_level_decreasing_check(u, f));
        const Image smoothed = convolve(u, MollifierFamily::make(1.5, 1).kernel2d(1));
        REQUIRE(eta_level_decreasing_check(smoothed, f));
    }
    // mismatched scale order is the negative control
    const MollifierFamily reversed = MollifierFamily::from_scales({0.25, 0.5, 1.0});
    const Image u = testsupport::random_image(32, 32, 9);
    REQUIRE_FALSE(eta_level_decreasing_check(u, reversed));
}

TEST_CASE("lp gap of the zero field is zero and an impulse scores the kernel deficit") {
    const MollifierFamily f = MollifierFamily::make(1.0, 2);
    GradientField zero(16, 16);
    REQUIRE(eta_bar_level(zero, f, 1, 2.0) == 0.0);
    GradientField g(17, 15);
    g.gx[g.idx(8, 7)] = -2.5;
    const double k2 = f.kernel(1).l2_norm();
    const double expect = 2.5 * (1.0 - k2 * k2);  // 2d kernel l2 norm is the square
    REQUIRE(eta_bar_level(g, f, 1, 2.0) == Catch::Approx(expect).epsilon(1e-12));
    REQUIRE(expect > 0.0);
    REQUIRE_THROWS_AS(eta_bar_level(g, f, 1, 1.0), std::invalid_argument);
}

TEST_CASE("lp gap is nonnegative at p=2") {
    const MollifierFamily f = MollifierFamily::make(1.0, 2);
    for (std::uint64_t seed : {11u, 12u, 13u}) {
        const GradientField g = testsupport::random_field(20, 20, seed, 5.0);
        REQUIRE(eta_bar_level(g, f, 1, 2.0) >= 0.0);
        REQUIRE(eta_bar_level(g, f, 2, 2.0) >= 0.0);
    }
}

TEST_CASE("raw-measure gap: lone spikes score zero, cancelling pairs score their mass") {
    const MollifierFamily f = MollifierFamily::make(8.0, 3);
    const int n = 200;
    Image single(n, 1);
    for (int i = 100; i < n; ++i) single.at(i, 0) = 1.0;
    REQUIRE(eta_measure(gradient(single), f, 3) == Catch::Approx(0.0).margin(1e-9));

    Image pair(n, 1);
    pair.at(100, 0) = 1.0;  // boxcar of width one: +1/-1 spikes one cell apart
    const double v = eta_measure(gradient(pair), f, 3);
    REQUIRE(v > 0.5 * 2.0);  // most of the mass of 2 survives per level sum

    // a single spike carrying the pair's total mass still scores zero:
    // the cancellation, not the mass, is what the gap detects
    Image tall(n, 1);
    for (int i = 100; i < n; ++i) tall.at(i, 0) = 2.0;
    REQUIRE(eta_measure(gradient(tall), f, 3) == Catch::Approx(0.0).margin(1e-9));
    REQUIRE(v > eta_measure(gradient(tall), f, 3) + 0.5);
}

TEST_CASE("eta gradient matches finite differences") {
    const MollifierFamily f = MollifierFamily::make(1.0, 2, 0.7);
    const Image u = testsupport::random_image(16, 16, 99);
    const Image grad_eta = eta_gradient(u, f, 2);

    std::mt19937_64 rng(123);
    const double e = 1e-4;
    for (int trial = 0; trial < 3; ++trial) {
        Image dir(16, 16);
        for (double& v : dir.data) v = 2.0 * testsupport::uniform01(rng) - 1.0;
        Image up = u, dn = u;
        for (std::size_t i = 0; i < u.size(); ++i) {
            up.data[i] += e * dir.data[i];
            dn.data[i] -= e * dir.data[i];
        }
        const double fd = (eta(up, f, 2) - eta(dn, f, 2)) / (2.0 * e);
        const double an = testsupport::plain_dot(grad_eta.data, dir.data);
        REQUIRE(an == Catch::Approx(fd).epsilon(1e-5));
    }
}

TEST_CASE("eta gradient is zero on constants and linear in the weight") {
    const MollifierFamily f = MollifierFamily::make(1.0, 2, 0.7);
    Image c(12, 12, 1.0, 50.0);
    const Image g0 = eta_gradient(c, f, 2);
    for (double v : g0.data) REQUIRE(v == Catch::Approx(0.0).margin(1e-14));

    const Image u = testsupport::random_image(12, 12, 55);
    const MollifierFamily f2 = MollifierFamily::make(1.0, 2, 1.4);
    const Image a = eta_gradient(u, f, 2);
    const Image b = eta_gradient(u, f2, 2);
    for (std::size_t i = 0; i < u.size(); ++i)
        REQUIRE(b.data[i] == Catch::Approx(2.0 * a.data[i]).margin(1e-12));
}
