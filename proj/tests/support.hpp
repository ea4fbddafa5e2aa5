#pragma once

// Shared fixtures for the test suites: deterministic synthetic images and
// a tiny uniform RNG wrapper so expected values never depend on library
// distribution internals.

#include <cmath>
#include <random>
#include <vector>

#include "tvphi/image.hpp"

namespace testsupport {

inline double uniform01(std::mt19937_64& rng) {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1p-53;
}

inline tvphi::Image random_image(int w, int h, std::uint64_t seed, double lo = 0.0,
                                 double hi = 255.0) {
    tvphi::Image u(w, h);
    std::mt19937_64 rng(seed);
    for (double& v : u.data) v = lo + (hi - lo) * uniform01(rng);
    return u;
}

inline tvphi::GradientField random_field(int w, int h, std::uint64_t seed, double scale = 1.0) {
    tvphi::GradientField g(w, h);
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < g.size(); ++i) {
        g.gx[i] = scale * (2.0 * uniform01(rng) - 1.0);
        g.gy[i] = scale * (2.0 * uniform01(rng) - 1.0);
    }
    return g;
}

/// The 64x64 piecewise-constant benchmark: background 64, centered 32x32
/// block at 192.
inline tvphi::Image benchmark64() {
    tvphi::Image u(64, 64, 1.0, 64.0);
    for (int y = 16; y < 48; ++y)
        for (int x = 16; x < 48; ++x) u.at(x, y) = 192.0;
    return u;
}

/// Deterministic textured fixture for the SSIM tests.
inline tvphi::Image textured(int n = 64) {
    tvphi::Image u(n, n);
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x)
            u.at(x, y) = 128.0 + 60.0 * std::sin(0.35 * x) * std::cos(0.22 * y) +
                         40.0 * std::sin(0.09 * (x + 2 * y));
    return u;
}

inline double plain_dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace testsupport
