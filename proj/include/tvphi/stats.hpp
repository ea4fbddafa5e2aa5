#pragma once

// Gradient-magnitude statistics: histograms, the edge/smooth pixel split,
// and least-squares fits of log-density models
//
//   log p(t) ~ log C - alpha * phi(t)
//
// with phi either the pure power t^q or the linearized power (tangent
// line above the cut-off M). Fits follow the histogram convention: C is a
// free parameter in the log-domain least squares and is recomputed
// afterwards so the fitted density integrates to one over the histogram
// support. The exponent is grid-searched on q in (0,2) step 0.01 with a
// closed-form 2x2 solve for (log C, alpha) at each q, then refined by
// golden section.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "tvphi/image.hpp"
#include "tvphi/phi.hpp"

namespace tvphi {

struct Histogram {
    std::vector<double> edges;        // bins+1, strictly increasing
    std::vector<std::uint64_t> counts;
    std::vector<double> log_density;  // log of normalized frequency; NaN for empty bins
    std::uint64_t total = 0;

    int bins() const { return static_cast<int>(counts.size()); }
    double bin_width() const { return edges[1] - edges[0]; }
    double center(int i) const { return 0.5 * (edges[i] + edges[i + 1]); }
};

/// Uniform-bin histogram on [0, max(values)]; log densities are produced
/// for nonempty bins only.
inline Histogram histogram_from_values(const std::vector<double>& values, int bins) {
    if (bins < 8) throw std::invalid_argument("histogram: need at least 8 bins");
    if (values.empty()) throw std::invalid_argument("histogram: empty sample");
    double vmax = 0.0;
    for (double v : values) vmax = std::max(vmax, v);
    if (vmax <= 0.0) vmax = 1.0;  // degenerate all-zero sample: one catch-all range
    Histogram hst;
    hst.edges.resize(static_cast<std::size_t>(bins) + 1);
    for (int i = 0; i <= bins; ++i)
        hst.edges[static_cast<std::size_t>(i)] = vmax * static_cast<double>(i) / bins;
    hst.counts.assign(static_cast<std::size_t>(bins), 0);
    for (double v : values) {
        int b = static_cast<int>(std::floor(v / vmax * bins));
        b = std::clamp(b, 0, bins - 1);
        ++hst.counts[static_cast<std::size_t>(b)];
    }
    hst.total = values.size();
    const double w = hst.bin_width();
    hst.log_density.assign(static_cast<std::size_t>(bins),
                           std::numeric_limits<double>::quiet_NaN());
    for (int i = 0; i < bins; ++i) {
        const auto c = hst.counts[static_cast<std::size_t>(i)];
        if (c > 0)
            hst.log_density[static_cast<std::size_t>(i)] =
                std::log(static_cast<double>(c) / (static_cast<double>(hst.total) * w));
    }
    return hst;
}

/// Histogram of |grad u| over the whole grid or over a pixel subset.
inline Histogram gradient_histogram(const Image& u, int bins,
                                    const std::vector<std::size_t>* mask = nullptr) {
    const GradientField g = gradient(u);
    std::vector<double> mags;
    if (mask) {
        if (mask->empty()) throw std::invalid_argument("gradient_histogram: empty mask");
        mags.reserve(mask->size());
        for (std::size_t i : *mask) mags.push_back(g.magnitude(i));
    } else {
        mags.reserve(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) mags.push_back(g.magnitude(i));
    }
    return histogram_from_values(mags, bins);
}

struct EdgeSplit {
    std::vector<std::size_t> edge;    // |grad u| >= threshold
    std::vector<std::size_t> smooth;  // the rest
};

inline EdgeSplit split_edges(const Image& u, double threshold = 30.0) {
    if (!(threshold >= 0.0)) throw std::invalid_argument("split_edges: threshold must be >= 0");
    const GradientField g = gradient(u);
    EdgeSplit s;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (g.magnitude(i) >= threshold)
            s.edge.push_back(i);
        else
            s.smooth.push_back(i);
    }
    return s;
}

struct FitResult {
    double C = 0.0;      // normalization, recomputed after the fit
    double alpha = 0.0;
    double q = 0.0;
    double M = std::numeric_limits<double>::infinity();  // inf = pure power
    double alpha_infty = 0.0;                            // alpha q M^(q-1), 0 for M = inf
    double residual = 0.0;                               // sum of squared log errors
};

namespace detail {

struct LogLsData {
    std::vector<double> t;  // centers of nonempty bins
    std::vector<double> y;  // their log densities
};

inline LogLsData log_ls_data(const Histogram& hst) {
    LogLsData d;
    for (int i = 0; i < hst.bins(); ++i) {
        if (hst.counts[static_cast<std::size_t>(i)] > 0) {
            d.t.push_back(hst.center(i));
            d.y.push_back(hst.log_density[static_cast<std::size_t>(i)]);
        }
    }
    return d;
}

// Closed-form least squares for (logC, alpha) at fixed phi; returns the
// residual and writes the minimizers.
inline double ls_at_phi(const LogLsData& d, const PhiSpec& phi, double& logC, double& alpha) {
    const std::size_t n = d.t.size();
    double sx = 0.0, sxx = 0.0, sy = 0.0, sxy = 0.0;
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = phi_eval(phi, d.t[i]);
        sx += x[i];
        sxx += x[i] * x[i];
        sy += d.y[i];
        sxy += x[i] * d.y[i];
    }
    const double nn = static_cast<double>(n);
    const double det = nn * sxx - sx * sx;
    if (std::abs(det) < 1e-30) {  // all phi values equal: no slope information
        logC = sy / nn;
        alpha = 0.0;
    } else {
        // minimize sum (y - (logC - alpha x))^2
        alpha = (sx * sy - nn * sxy) / det;
        logC = (sy + alpha * sx) / nn;
    }
    double r = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = d.y[i] - (logC - alpha * x[i]);
        r += e * e;
    }
    return r;
}

inline PhiSpec fit_phi(double q, double M) {
    if (std::isinf(M)) return PhiSpec::power(q);
    return PhiSpec::linearized(q, M);
}

// Residual as a function of q at fixed M, minimized over the inner linear
// parameters.
inline double residual_of_q(const LogLsData& d, double q, double M) {
    double logC, alpha;
    return ls_at_phi(d, fit_phi(q, M), logC, alpha);
}

inline double golden_refine_q(const LogLsData& d, double M, double lo, double hi) {
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double c = b - gr * (b - a), e = a + gr * (b - a);
    double fc = residual_of_q(d, c, M), fe = residual_of_q(d, e, M);
    for (int it = 0; it < 60 && (b - a) > 1e-6; ++it) {
        if (fc <= fe) {
            b = e;
            e = c;
            fe = fc;
            c = b - gr * (b - a);
            fc = residual_of_q(d, c, M);
        } else {
            a = c;
            c = e;
            fc = fe;
            e = a + gr * (b - a);
            fe = residual_of_q(d, e, M);
        }
    }
    return 0.5 * (a + b);
}

// Normalize so that sum_i C exp(-alpha phi(t_i)) w = 1 over all bin
// centers of the histogram support.
inline double renormalize_C(const Histogram& hst, const PhiSpec& phi, double alpha) {
    double z = 0.0;
    const double w = hst.bin_width();
    for (int i = 0; i < hst.bins(); ++i)
        z += std::exp(-alpha * phi_eval(phi, hst.center(i))) * w;
    return 1.0 / z;
}

inline FitResult fit_at_M(const Histogram& hst, const LogLsData& d, double M) {
    double best_q = 0.01, best_r = std::numeric_limits<double>::infinity();
    for (int i = 1; i < 200; ++i) {
        const double q = 0.01 * i;
        const double r = residual_of_q(d, q, M);
        if (r < best_r) {  // strict improvement keeps the smallest q on ties
            best_r = r;
            best_q = q;
        }
    }
    const double q = golden_refine_q(d, M, std::max(0.001, best_q - 0.01),
                                     std::min(1.999, best_q + 0.01));
    FitResult f;
    f.q = (residual_of_q(d, q, M) < best_r) ? q : best_q;
    f.M = M;
    const PhiSpec phi = fit_phi(f.q, M);
    double logC;
    f.residual = ls_at_phi(d, phi, logC, f.alpha);
    f.C = renormalize_C(hst, phi, f.alpha);
    f.alpha_infty = std::isinf(M) ? 0.0 : f.alpha * f.q * std::pow(M, f.q - 1.0);
    return f;
}

inline void check_fittable(const LogLsData& d) {
    if (d.t.size() < 3)
        throw std::invalid_argument("fit: degenerate histogram, need >= 3 nonempty bins");
}

}  // namespace detail

/// Pure power model log p = log C - alpha t^q.
inline FitResult fit_power(const Histogram& hst) {
    const detail::LogLsData d = detail::log_ls_data(hst);
    detail::check_fittable(d);
    return detail::fit_at_M(hst, d, std::numeric_limits<double>::infinity());
}

/// Linearized model. With a fixed cut-off ("manual" mode) only (q, alpha)
/// are optimized; otherwise M is grid-searched over the bin centers
/// jointly with q. Ties break toward smaller q, then smaller M.
inline FitResult fit_linearized(const Histogram& hst,
                                double M = std::numeric_limits<double>::quiet_NaN()) {
    const detail::LogLsData d = detail::log_ls_data(hst);
    detail::check_fittable(d);
    if (!std::isnan(M)) return detail::fit_at_M(hst, d, M);
    FitResult best;
    best.residual = std::numeric_limits<double>::infinity();
    for (int i = 0; i < hst.bins(); ++i) {
        const double cand = hst.center(i);
        if (!(cand > 0.0)) continue;
        const FitResult f = detail::fit_at_M(hst, d, cand);
        if (f.residual < best.residual) best = f;  // ties keep the smaller M
    }
    const FitResult f_inf = detail::fit_at_M(hst, d, std::numeric_limits<double>::infinity());
    if (f_inf.residual < best.residual) best = f_inf;
    return best;
}

}  // namespace tvphi
