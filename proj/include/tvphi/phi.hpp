#pragma once

// The gradient-penalty integrand phi in its four variants:
//
//   power          phi(t) = t^q
//   linearized     phi(t) = t^q below the cut-off M, its tangent above:
//                  (1-q) M^q + q M^(q-1) t, so value and slope are
//                  continuous at t = M and phi'inf = q M^(q-1) > 0
//   huber          quadratic knee: 0.5 gamma^(q-2) t^2 on [0,gamma],
//                  (1/q) t^q - (2-q)/(2q) gamma^q above
//   linear         phi(t) = slope * t
//
// The recession constant phi_infty = lim phi(t)/t prices jumps; it is zero
// for the sublinear variants, which is exactly why the cut-off exists.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace tvphi {

enum class PhiKind { power, linearized_power, huber, linear };

struct PhiSpec {
    PhiKind kind = PhiKind::power;
    double q = 0.5;      // exponent, in (0,2)
    double M = 10.0;     // cut-off gradient magnitude, > 0
    double gamma = 0.1;  // huber knee, > 0
    double slope = 1.0;  // linear variant only

    static PhiSpec power(double q) {
        check_q(q);
        PhiSpec s;
        s.kind = PhiKind::power;
        s.q = q;
        return s;
    }
    static PhiSpec linearized(double q, double M) {
        check_q(q);
        if (!(M > 0.0)) throw std::invalid_argument("PhiSpec: cut-off M must be > 0");
        PhiSpec s;
        s.kind = PhiKind::linearized_power;
        s.q = q;
        s.M = M;
        return s;
    }
    static PhiSpec huber(double q, double gamma) {
        check_q(q);
        if (!(gamma > 0.0)) throw std::invalid_argument("PhiSpec: huber knee must be > 0");
        PhiSpec s;
        s.kind = PhiKind::huber;
        s.q = q;
        s.gamma = gamma;
        return s;
    }
    static PhiSpec linear(double slope) {
        if (!(slope >= 0.0)) throw std::invalid_argument("PhiSpec: slope must be >= 0");
        PhiSpec s;
        s.kind = PhiKind::linear;
        s.slope = slope;
        return s;
    }

  private:
    static void check_q(double q) {
        if (!(q > 0.0 && q < 2.0))
            throw std::invalid_argument("PhiSpec: exponent q must lie in (0,2)");
    }
};

inline double phi_eval(const PhiSpec& s, double t) {
    if (t < 0.0) throw std::domain_error("phi_eval: t < 0");
    switch (s.kind) {
        case PhiKind::power:
            return std::pow(t, s.q);
        case PhiKind::linearized_power:
            if (t <= s.M) return std::pow(t, s.q);
            return (1.0 - s.q) * std::pow(s.M, s.q) + s.q * std::pow(s.M, s.q - 1.0) * t;
        case PhiKind::huber:
            if (t <= s.gamma) return 0.5 * std::pow(s.gamma, s.q - 2.0) * t * t;
            return std::pow(t, s.q) / s.q - (2.0 - s.q) / (2.0 * s.q) * std::pow(s.gamma, s.q);
        case PhiKind::linear:
            return s.slope * t;
    }
    return 0.0;
}

/// Derivative of phi_eval. The pure power variant is singular at t = 0 and
/// raises; the optimizer is expected to go through a smoothed variant.
inline double phi_prime(const PhiSpec& s, double t) {
    if (t < 0.0) throw std::domain_error("phi_prime: t < 0");
    switch (s.kind) {
        case PhiKind::power:
            if (t == 0.0) throw std::domain_error("phi_prime: power integrand singular at t=0");
            return s.q * std::pow(t, s.q - 1.0);
        case PhiKind::linearized_power:
            if (t > s.M) return s.q * std::pow(s.M, s.q - 1.0);
            return s.q * std::pow(t, s.q - 1.0);  // +inf at t=0 for q<1
        case PhiKind::huber:
            if (t <= s.gamma) return std::pow(s.gamma, s.q - 2.0) * t;
            return std::pow(t, s.q - 1.0);
        case PhiKind::linear:
            return s.slope;
    }
    return 0.0;
}

/// lim phi(t)/t as t grows: the per-unit cost of jumps.
inline double phi_infty(const PhiSpec& s) {
    const double inf = std::numeric_limits<double>::infinity();
    switch (s.kind) {
        case PhiKind::power:
            return s.q < 1.0 ? 0.0 : (s.q == 1.0 ? 1.0 : inf);
        case PhiKind::linearized_power:
            return s.q * std::pow(s.M, s.q - 1.0);
        case PhiKind::huber:
            return s.q < 1.0 ? 0.0 : (s.q == 1.0 ? 1.0 : inf);
        case PhiKind::linear:
            return s.slope;
    }
    return 0.0;
}

/// lim phi(t)/t as t -> 0. Infinite for the sublinear power branches,
/// zero for huber; finiteness is what keeps phi comparable to TV.
inline double phi_zero(const PhiSpec& s) {
    const double inf = std::numeric_limits<double>::infinity();
    switch (s.kind) {
        case PhiKind::power:
        case PhiKind::linearized_power:
            return s.q < 1.0 ? inf : (s.q == 1.0 ? 1.0 : 0.0);
        case PhiKind::huber:
            return 0.0;
        case PhiKind::linear:
            return s.slope;
    }
    return 0.0;
}

/// Derivative of the gamma-smoothed integrand: below the knee the slope
/// continues linearly to zero, phi'(gamma) * t / gamma. Used for the
/// lagged-diffusivity weights during continuation.
inline double phi_prime_smoothed(const PhiSpec& s, double gamma, double t) {
    if (t >= gamma) return phi_prime(s, t);
    return phi_prime(s, gamma) * (t / gamma);
}

/// The regularization weight paired with its asymptotic (per-unit-jump)
/// counterpart alpha_infty = alpha * phi_infty. Experiments hold
/// alpha_infty fixed while the cut-off varies, so one is always derived
/// from the other.
struct EnergyParams {
    double alpha = 0.0;
    double alpha_infty = 0.0;

    static EnergyParams from_alpha(double alpha, const PhiSpec& s) {
        if (!(alpha >= 0.0)) throw std::invalid_argument("EnergyParams: alpha must be >= 0");
        const double pinf = phi_infty(s);
        return {alpha, std::isfinite(pinf) ? alpha * pinf : alpha};
    }

    /// For sublinear phi (phi_infty = 0) the asymptotic weight is used as
    /// the plain weight verbatim; there is nothing to divide by.
    static EnergyParams from_alpha_infty(double alpha_infty, const PhiSpec& s) {
        if (!(alpha_infty >= 0.0))
            throw std::invalid_argument("EnergyParams: alpha_infty must be >= 0");
        const double pinf = phi_infty(s);
        if (pinf > 0.0 && std::isfinite(pinf)) return {alpha_infty / pinf, alpha_infty};
        return {alpha_infty, alpha_infty};
    }
};

/// Sampling-based check that phi fits the linear sandwich
/// c t - b <= phi(t) <= C (1 + t) over the sample range. The witness c is
/// inf phi(t)/t (with b = 0), so a sublinear phi drives c to zero as the
/// range grows and fails the coercivity threshold.
struct WasWitness {
    bool passes = false;
    double c = 0.0;
    double b = 0.0;
    double C = 0.0;
};

inline WasWitness validate_class_Was(const PhiSpec& s, const std::vector<double>& samples,
                                     double c_floor = 1e-3) {
    if (samples.empty()) throw std::invalid_argument("validate_class_Was: no samples");
    WasWitness w;
    w.c = std::numeric_limits<double>::infinity();
    for (double t : samples) {
        if (!(t > 0.0)) throw std::invalid_argument("validate_class_Was: samples must be positive");
        const double v = phi_eval(s, t);
        w.c = std::min(w.c, v / t);
        w.C = std::max(w.C, v / (1.0 + t));
    }
    w.b = 0.0;
    w.passes = w.c > c_floor;
    return w;
}

}  // namespace tvphi
