#pragma once

// Grid functions on a regular 2D lattice: the image container, forward
// difference operators with their exact adjoint, dense convolution and
// seeded Gaussian noise. Everything downstream builds on these.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace tvphi {

/// 2D grid function with spacing h. Values are stored row-major as 64-bit
/// reals in the nominal [0,255] gray-level convention; clamping happens
/// only when writing 8-bit files.
struct Image {
    int width = 0;
    int height = 0;
    double h = 1.0;
    std::vector<double> data;

    Image() = default;
    Image(int w, int ht, double spacing = 1.0, double fill = 0.0)
        : width(w), height(ht), h(spacing),
          data(static_cast<std::size_t>(w) * ht, fill) {
        if (w <= 0 || ht <= 0 || !(spacing > 0.0))
            throw std::invalid_argument("Image: bad dimensions or spacing");
    }

    double& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
    double at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
    std::size_t size() const { return data.size(); }

    bool finite() const {
        for (double v : data)
            if (!std::isfinite(v)) return false;
        return true;
    }
};

/// Per-pixel forward-difference 2-vector (units: gray levels per h).
/// The far row/column in each direction holds zero by the boundary rule.
struct GradientField {
    int width = 0;
    int height = 0;
    std::vector<double> gx, gy;

    GradientField() = default;
    GradientField(int w, int ht)
        : width(w), height(ht),
          gx(static_cast<std::size_t>(w) * ht, 0.0),
          gy(static_cast<std::size_t>(w) * ht, 0.0) {}

    std::size_t idx(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }
    std::size_t size() const { return gx.size(); }

    double magnitude(std::size_t i) const { return std::hypot(gx[i], gy[i]); }
};

/// Forward differences divided by h; zero at the last row/column.
inline GradientField gradient(const Image& u) {
    GradientField g(u.width, u.height);
    const double inv_h = 1.0 / u.h;
    for (int y = 0; y < u.height; ++y) {
        for (int x = 0; x < u.width; ++x) {
            const std::size_t i = g.idx(x, y);
            g.gx[i] = (x + 1 < u.width) ? (u.at(x + 1, y) - u.at(x, y)) * inv_h : 0.0;
            g.gy[i] = (y + 1 < u.height) ? (u.at(x, y + 1) - u.at(x, y)) * inv_h : 0.0;
        }
    }
    return g;
}

/// Negative adjoint of gradient(): <grad u, g> = -<u, div g> with plain
/// (unweighted) sums. Entries of g on the far boundary do not contribute,
/// mirroring the zero rows of the forward-difference operator.
inline Image divergence(const GradientField& g, double h = 1.0) {
    Image d(g.width, g.height, h);
    const double inv_h = 1.0 / h;
    for (int y = 0; y < g.height; ++y) {
        for (int x = 0; x < g.width; ++x) {
            double v = 0.0;
            if (x + 1 < g.width) v += g.gx[g.idx(x, y)];
            if (x > 0) v -= g.gx[g.idx(x - 1, y)];
            if (y + 1 < g.height) v += g.gy[g.idx(x, y)];
            if (y > 0) v -= g.gy[g.idx(x, y - 1)];
            d.at(x, y) = v * inv_h;
        }
    }
    return d;
}

/// Dense square convolution kernel with odd side 2*radius+1.
struct Kernel {
    int radius = 0;
    std::vector<double> w;  // (2r+1)^2, row-major, index (dy+r)*(2r+1)+(dx+r)

    int side() const { return 2 * radius + 1; }
    double at(int dx, int dy) const {
        return w[static_cast<std::size_t>(dy + radius) * side() + (dx + radius)];
    }
    double sum() const {
        double s = 0.0;
        for (double v : w) s += v;
        return s;
    }

    static Kernel identity() {
        Kernel k;
        k.radius = 0;
        k.w = {1.0};
        return k;
    }
    static Kernel box(int radius) {
        Kernel k;
        k.radius = radius;
        const int n = k.side() * k.side();
        k.w.assign(n, 1.0 / n);
        return k;
    }
};

/// Zero-padded linear convolution restricted to the original grid.
/// The kernel must be normalized to unit sum; mass may leave the grid.
inline Image convolve(const Image& u, const Kernel& k) {
    if (std::abs(k.sum() - 1.0) > 1e-9)
        throw std::invalid_argument("convolve: kernel entries must sum to 1");
    Image out(u.width, u.height, u.h);
    for (int y = 0; y < u.height; ++y) {
        for (int x = 0; x < u.width; ++x) {
            double acc = 0.0;
            for (int dy = -k.radius; dy <= k.radius; ++dy) {
                const int sy = y - dy;
                if (sy < 0 || sy >= u.height) continue;
                for (int dx = -k.radius; dx <= k.radius; ++dx) {
                    const int sx = x - dx;
                    if (sx < 0 || sx >= u.width) continue;
                    acc += k.at(dx, dy) * u.at(sx, sy);
                }
            }
            out.at(x, y) = acc;
        }
    }
    return out;
}

/// i.i.d. Gaussian noise via Box-Muller on mt19937_64. The uniform draws
/// are (rng() >> 11 + 1) * 2^-53 in (0,1], so the output is a pure
/// function of (image, sigma, seed). No clamping.
inline Image add_gaussian_noise(const Image& u, double sigma, std::uint64_t seed) {
    if (sigma < 0.0) throw std::invalid_argument("add_gaussian_noise: sigma < 0");
    Image out = u;
    if (sigma == 0.0) return out;
    std::mt19937_64 rng(seed);
    const double two_pi = 2.0 * 3.14159265358979323846;
    auto uniform = [&rng]() {
        return (static_cast<double>(rng() >> 11) + 1.0) * 0x1p-53;
    };
    double spare = 0.0;
    bool have_spare = false;
    for (double& v : out.data) {
        double z;
        if (have_spare) {
            z = spare;
            have_spare = false;
        } else {
            const double u1 = uniform();
            const double u2 = uniform();
            const double r = std::sqrt(-2.0 * std::log(u1));
            z = r * std::cos(two_pi * u2);
            spare = r * std::sin(two_pi * u2);
            have_spare = true;
        }
        v += sigma * z;
    }
    return out;
}

// ---------------------------------------------------------------------------
// PGM input/output. Reads P5 (binary, 8-bit) and P2 (ASCII); writes P5 with
// maxval 255. Values are clamped and rounded only at write time.

namespace detail {
inline int pgm_next_int(std::istream& in) {
    // skips whitespace and '#' comments
    while (true) {
        int c = in.peek();
        if (c == '#') {
            std::string line;
            std::getline(in, line);
        } else if (std::isspace(c)) {
            in.get();
        } else {
            break;
        }
    }
    int v;
    if (!(in >> v)) throw std::runtime_error("PGM: malformed header or data");
    return v;
}
}  // namespace detail

inline Image read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("PGM: cannot open " + path);
    std::string magic;
    in >> magic;
    if (magic != "P5" && magic != "P2")
        throw std::runtime_error("PGM: unsupported magic '" + magic + "' in " + path);
    const int w = detail::pgm_next_int(in);
    const int h = detail::pgm_next_int(in);
    const int maxval = detail::pgm_next_int(in);
    if (w <= 0 || h <= 0) throw std::runtime_error("PGM: bad dimensions in " + path);
    if (maxval <= 0 || maxval > 255)
        throw std::runtime_error("PGM: only 8-bit images supported: " + path);
    Image img(w, h);
    if (magic == "P5") {
        in.get();  // single whitespace after maxval
        std::vector<unsigned char> raw(img.size());
        in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
        if (static_cast<std::size_t>(in.gcount()) != raw.size())
            throw std::runtime_error("PGM: truncated pixel data in " + path);
        for (std::size_t i = 0; i < raw.size(); ++i) img.data[i] = raw[i];
    } else {
        for (std::size_t i = 0; i < img.size(); ++i)
            img.data[i] = detail::pgm_next_int(in);
    }
    return img;
}

inline void write_pgm(const Image& img, const std::string& path) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("PGM: cannot write " + tmp);
        out << "P5\n" << img.width << " " << img.height << "\n255\n";
        std::vector<unsigned char> raw(img.size());
        for (std::size_t i = 0; i < img.size(); ++i) {
            const double v = std::clamp(img.data[i], 0.0, 255.0);
            raw[i] = static_cast<unsigned char>(std::lround(v));
        }
        out.write(reinterpret_cast<const char*>(raw.data()),
                  static_cast<std::streamsize>(raw.size()));
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("PGM: rename failed for " + path);
}

}  // namespace tvphi
