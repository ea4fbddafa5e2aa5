#pragma once

// Reconstruction quality metrics: PSNR on the [0,255] range and mean local
// SSIM with the standard 11x11 Gaussian window (sigma 1.5) and constants
// K1 = 0.01, K2 = 0.03, L = 255. Windows are aggregated only where they
// fit fully inside the image, so small fixtures carry no boundary bias.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "tvphi/image.hpp"

namespace tvphi {

inline double mse(const Image& u, const Image& ref) {
    if (u.width != ref.width || u.height != ref.height)
        throw std::invalid_argument("mse: dimension mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double d = u.data[i] - ref.data[i];
        acc += d * d;
    }
    return acc / static_cast<double>(u.size());
}

/// 10 log10(255^2 / MSE); +inf for identical images.
inline double psnr(const Image& u, const Image& ref) {
    const double m = mse(u, ref);
    if (m == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(255.0 * 255.0 / m);
}

namespace detail {
inline const std::vector<double>& ssim_window() {
    static const std::vector<double> w = [] {
        std::vector<double> v(11 * 11);
        const double s2 = 2.0 * 1.5 * 1.5;
        double sum = 0.0;
        for (int j = -5; j <= 5; ++j)
            for (int i = -5; i <= 5; ++i) {
                const double g = std::exp(-(i * i + j * j) / s2);
                v[static_cast<std::size_t>(j + 5) * 11 + (i + 5)] = g;
                sum += g;
            }
        for (double& g : v) g /= sum;
        return v;
    }();
    return w;
}
}  // namespace detail

inline double ssim(const Image& u, const Image& ref) {
    if (u.width != ref.width || u.height != ref.height)
        throw std::invalid_argument("ssim: dimension mismatch");
    if (u.width < 11 || u.height < 11)
        throw std::invalid_argument("ssim: image smaller than the 11x11 window");
    const std::vector<double>& w = detail::ssim_window();
    const double C1 = (0.01 * 255.0) * (0.01 * 255.0);
    const double C2 = (0.03 * 255.0) * (0.03 * 255.0);
    double total = 0.0;
    std::size_t count = 0;
    for (int y = 0; y + 11 <= u.height; ++y) {
        for (int x = 0; x + 11 <= u.width; ++x) {
            double mx = 0.0, my = 0.0;
            for (int j = 0; j < 11; ++j)
                for (int i = 0; i < 11; ++i) {
                    const double g = w[static_cast<std::size_t>(j) * 11 + i];
                    mx += g * u.at(x + i, y + j);
                    my += g * ref.at(x + i, y + j);
                }
            double vx = 0.0, vy = 0.0, vxy = 0.0;
            for (int j = 0; j < 11; ++j)
                for (int i = 0; i < 11; ++i) {
                    const double g = w[static_cast<std::size_t>(j) * 11 + i];
                    const double dx = u.at(x + i, y + j) - mx;
                    const double dy = ref.at(x + i, y + j) - my;
                    vx += g * dx * dx;
                    vy += g * dy * dy;
                    vxy += g * dx * dy;
                }
            const double num = (2.0 * mx * my + C1) * (2.0 * vxy + C2);
            const double den = (mx * mx + my * my + C1) * (vx + vy + C2);
            total += num / den;
            ++count;
        }
    }
    return total / static_cast<double>(count);
}

struct MetricPair {
    double psnr = 0.0;
    double ssim = 0.0;
};

inline MetricPair metrics(const Image& u, const Image& ref) {
    return MetricPair{psnr(u, ref), ssim(u, ref)};
}

}  // namespace tvphi
