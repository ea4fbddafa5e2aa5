#pragma once

// The discrete total-variation-type energies built from an integrand phi.
//
//   tv_phi_d     sum_k sum_i h^(m-1) phi(|u(k+e_i)-u(k)|)   (m = 2)
//                jump-height penalty, coordinate-wise
//   tv_phi_c     sum_k h^m phi(|grad_h u(k)|)
//                gradient-magnitude penalty, isotropic (Euclidean norm)
//   tv_phi_sc    tv_phi_c with cells above a threshold priced linearly at
//                phi_infty, a grid surrogate for the singular-part term
//   tv_phi_c_eps sum_k h^m phi(|(rho_eps * grad_h u)(k)|), the mollified
//                (compact-operator) variant
//   area         sum_k h^m sqrt(1 + |grad_h u(k)|^2)

#include <cmath>
#include <stdexcept>

#include "tvphi/image.hpp"
#include "tvphi/multiscale.hpp"
#include "tvphi/phi.hpp"

namespace tvphi {

inline double tv_phi_d(const Image& u, const PhiSpec& spec) {
    const GradientField g = gradient(u);
    double acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        acc += phi_eval(spec, std::abs(g.gx[i]) * u.h) + phi_eval(spec, std::abs(g.gy[i]) * u.h);
    return u.h * acc;  // h^(m-1), m = 2; differences are jump heights u(k+e)-u(k)
}

inline double tv_phi_c(const Image& u, const PhiSpec& spec) {
    const GradientField g = gradient(u);
    const double h2 = u.h * u.h;
    double acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        acc += phi_eval(spec, g.magnitude(i));
    return h2 * acc;
}

/// Split form: cells with |grad| <= jump_threshold are priced by phi, the
/// rest linearly by phi_infty. With the default infinite threshold this is
/// exactly tv_phi_c.
inline double tv_phi_sc(const Image& u, const PhiSpec& spec,
                        double jump_threshold = std::numeric_limits<double>::infinity()) {
    const double pinf = phi_infty(spec);
    if (!std::isfinite(pinf) && !(jump_threshold == std::numeric_limits<double>::infinity()))
        throw std::invalid_argument("tv_phi_sc: phi_infty must be finite for a finite threshold");
    const GradientField g = gradient(u);
    const double h2 = u.h * u.h;
    double acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double t = g.magnitude(i);
        acc += (t <= jump_threshold) ? phi_eval(spec, t) : pinf * t;
    }
    return h2 * acc;
}

/// Mollified-gradient energy at scale eps.
inline double tv_phi_c_eps(const Image& u, const PhiSpec& spec, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("tv_phi_c_eps: eps must be > 0");
    const Kernel1D k = discrete_gaussian(eps);
    const GradientField gs = smooth_field(gradient(u), k);
    const double h2 = u.h * u.h;
    double acc = 0.0;
    for (std::size_t i = 0; i < gs.size(); ++i)
        acc += phi_eval(spec, gs.magnitude(i));
    return h2 * acc;
}

/// Same, with the kernel drawn from a family: a level kernel when eps
/// matches one of its scales, a fresh one of the same kind otherwise.
inline double tv_phi_c_eps(const Image& u, const PhiSpec& spec, const MollifierFamily& family,
                           double eps) {
    for (int l = 1; l <= family.levels(); ++l) {
        if (std::abs(family.scales[static_cast<std::size_t>(l - 1)] - eps) < 1e-12 * eps) {
            const GradientField gs = smooth_field(gradient(u), family.kernel(l));
            const double h2 = u.h * u.h;
            double acc = 0.0;
            for (std::size_t i = 0; i < gs.size(); ++i)
                acc += phi_eval(spec, gs.magnitude(i));
            return h2 * acc;
        }
    }
    return tv_phi_c_eps(u, spec, eps);
}

inline double area_functional(const Image& u) {
    const GradientField g = gradient(u);
    const double h2 = u.h * u.h;
    double acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double m = g.magnitude(i);
        acc += std::sqrt(1.0 + m * m);
    }
    return h2 * acc;
}

}  // namespace tvphi
