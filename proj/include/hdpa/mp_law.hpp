#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hdpa/roots.hpp"

namespace hdpa::mp {

inline constexpr double kPi = 3.14159265358979323846;

/// Marchenko-Pastur law with concentration gamma > 0, scaled by a variance
/// factor (the law of `scale * X` for X following the unit-variance law).
/// For gamma > 1 the distribution carries an atom of mass 1 - 1/gamma at 0
/// in addition to the continuous bulk.
struct MpLaw {
    double gamma;
    double scale = 1.0;

    MpLaw(double gamma_, double scale_ = 1.0) : gamma(gamma_), scale(scale_) {
        if (!(gamma > 0.0) || !std::isfinite(gamma))
            throw std::invalid_argument("MpLaw: gamma must be positive");
        if (!(scale > 0.0) || !std::isfinite(scale))
            throw std::invalid_argument("MpLaw: scale must be positive");
    }

    double sqrt_gamma() const { return std::sqrt(gamma); }
    double lower_edge() const {
        const double e = 1.0 - sqrt_gamma();
        return scale * e * e;
    }
    double upper_edge() const {
        const double e = 1.0 + sqrt_gamma();
        return scale * e * e;
    }
    double atom_mass() const { return gamma > 1.0 ? 1.0 - 1.0 / gamma : 0.0; }
};

/// Density of the continuous part. Zero outside the open bulk (the atom at 0
/// for gamma > 1 is not part of the density).
inline double pdf(const MpLaw& law, double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("mp::pdf: non-finite x");
    const double y = x / law.scale;
    const double sg = law.sqrt_gamma();
    const double a = (1.0 - sg) * (1.0 - sg);
    const double b = (1.0 + sg) * (1.0 + sg);
    if (y <= a || y >= b) return 0.0;
    return std::sqrt((b - y) * (y - a)) / (2.0 * kPi * law.gamma * y) / law.scale;
}

namespace detail {

// Antiderivative-based mass of the continuous part on [lower_edge, x], in
// unit-scale coordinates. Uses the closed form
//   d/dy [ sqrt((b-y)(y-a)) + (a+b)/2 asin((2y-a-b)/(b-a))
//          - sqrt(ab) asin(((a+b)y - 2ab)/(y(b-a))) ] = sqrt((b-y)(y-a)) / y,
// normalized so the value at a is 0.
inline double bulk_mass_below(double gamma, double y) {
    const double sg = std::sqrt(gamma);
    const double a = (1.0 - sg) * (1.0 - sg);
    const double b = (1.0 + sg) * (1.0 + sg);
    if (y <= a) return 0.0;
    if (y >= b) return gamma > 1.0 ? 1.0 / gamma : 1.0;
    const double root = std::sqrt((b - y) * (y - a));
    const double arg1 = std::clamp((2.0 * y - a - b) / (b - a), -1.0, 1.0);
    double result = root + 0.5 * (a + b) * (std::asin(arg1) + 0.5 * kPi);
    if (a > 0.0) {
        const double arg2 =
            std::clamp(((a + b) * y - 2.0 * a * b) / (y * (b - a)), -1.0, 1.0);
        result -= std::sqrt(a * b) * (std::asin(arg2) + 0.5 * kPi);
    }
    return result / (2.0 * kPi * gamma);
}

}  // namespace detail

/// Distribution function P(X <= x), atom at 0 included when gamma > 1.
inline double cdf(const MpLaw& law, double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("mp::cdf: non-finite x");
    if (x < 0.0) return 0.0;
    const double mass = law.atom_mass() + detail::bulk_mass_below(law.gamma, x / law.scale);
    return std::min(mass, 1.0);
}

/// Quantile function: the smallest x with cdf(x) >= q. For gamma > 1 any
/// level inside the atom maps to 0; the exact bulk edges are returned at the
/// endpoints without root-finding.
inline double quantile(const MpLaw& law, double q) {
    if (!(q >= 0.0 && q <= 1.0))
        throw std::domain_error("mp::quantile: q outside [0, 1]");
    const double atom = law.atom_mass();
    if (atom > 0.0 && q <= atom) return 0.0;
    const double a = law.lower_edge();
    const double b = law.upper_edge();
    if (q == 0.0) return a;
    if (q == 1.0) return b;
    const double x = roots::bisect([&](double t) { return cdf(law, t) - q; }, a, b,
                                   1e-12 * std::max(1.0, b));
    return x;
}

/// Identifiability threshold sigma^2 * sqrt(gamma_total): spikes at or below
/// it are asymptotically indistinguishable from the noise bulk.
inline double bbp_threshold(double sigma2, double gamma_total) {
    if (!(sigma2 > 0.0) || !(gamma_total > 0.0))
        throw std::invalid_argument("bbp_threshold: inputs must be positive");
    return sigma2 * std::sqrt(gamma_total);
}

/// Limiting sample eigenvalue of a population spike lambda under
/// concentration gamma_total: (lambda + sigma^2)(1 + gamma_total sigma^2 / lambda).
inline double spike_forward(double lambda, double sigma2, double gamma_total) {
    if (!(lambda > 0.0)) throw std::domain_error("spike_forward: lambda must be positive");
    if (!(sigma2 > 0.0) || gamma_total < 0.0)
        throw std::invalid_argument("spike_forward: invalid parameters");
    return (lambda + sigma2) * (1.0 + gamma_total * sigma2 / lambda);
}

}  // namespace hdpa::mp
