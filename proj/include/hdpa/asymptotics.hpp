#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "hdpa/mp_law.hpp"
#include "hdpa/roots.hpp"

namespace hdpa::asy {

/// High-dimensional regime coordinates: limits of p/n and r/n.
/// gamma_p = 0 is allowed (the classical-dimension limit of the tuning
/// discussion); gamma_r must be positive.
struct AspectRatios {
    double gamma_p = 0.0;
    double gamma_r = 0.0;

    AspectRatios(double gp, double gr) : gamma_p(gp), gamma_r(gr) {
        if (!(gamma_p >= 0.0)) throw std::invalid_argument("AspectRatios: gamma_p must be >= 0");
        if (!(gamma_r > 0.0)) throw std::invalid_argument("AspectRatios: gamma_r must be > 0");
    }

    double total() const { return gamma_p + gamma_r; }
};

/// Population description: distinct spikes lambda_1 > ... > lambda_d above a
/// flat noise level sigma^2.
struct SpikedModel {
    std::vector<double> lambdas;
    double sigma2 = 1.0;

    SpikedModel(std::vector<double> lambdas_, double sigma2_)
        : lambdas(std::move(lambdas_)), sigma2(sigma2_) {
        if (lambdas.empty()) throw std::invalid_argument("SpikedModel: need d >= 1 spikes");
        if (!(sigma2 > 0.0)) throw std::invalid_argument("SpikedModel: sigma2 must be positive");
        for (std::size_t i = 0; i < lambdas.size(); ++i) {
            if (!(lambdas[i] > 0.0))
                throw std::invalid_argument("SpikedModel: spikes must be positive");
            if (i > 0 && !(lambdas[i] < lambdas[i - 1]))
                throw std::invalid_argument("SpikedModel: spikes must be strictly decreasing");
        }
    }

    int d() const { return static_cast<int>(lambdas.size()); }

    /// Identifiability: lambda_d > sigma^2 sqrt(gamma_p + gamma_r).
    bool identifiable(const AspectRatios& ratios) const {
        return lambdas.back() > mp::bbp_threshold(sigma2, ratios.total());
    }
};

namespace detail {

inline void require_identifiable(const SpikedModel& model, const AspectRatios& ratios) {
    if (!model.identifiable(ratios))
        throw std::domain_error(
            "assumption violation: lambda_d <= sigma^2 sqrt(gamma_p + gamma_r)");
}

}  // namespace detail

/// Probability limit of ||u_{j,C}||^2 (1-based j).
inline double cnorm_limit(const SpikedModel& model, const AspectRatios& ratios, int j) {
    if (j < 1) throw std::domain_error("cnorm_limit: j must be >= 1");
    detail::require_identifiable(model, ratios);
    if (j > model.d()) return ratios.gamma_r / ratios.total();
    const double lambda = model.lambdas[static_cast<std::size_t>(j - 1)];
    const double s2 = model.sigma2;
    return ratios.gamma_r * s2 / lambda * (lambda + s2) / (lambda + ratios.total() * s2);
}

/// Limiting sample eigenvalue for a signal index j <= d.
inline double tau_limit_signal(const SpikedModel& model, double gamma_total, int j) {
    if (j < 1 || j > model.d())
        throw std::domain_error("tau_limit_signal: j outside 1..d");
    return mp::spike_forward(model.lambdas[static_cast<std::size_t>(j - 1)], model.sigma2,
                             gamma_total);
}

/// Limiting noise eigenvalue at bulk quantile level q (index normalization
/// j / (p + r) -> 1 - q). For gamma_total > 1 levels inside the zero atom
/// return 0, matching the rank constraint; the positive part equals
/// sigma^2 gamma F^{-1}_{1/gamma} evaluated at the companion normalization.
inline double tau_limit_noise(double gamma_total, double sigma2, double q) {
    if (!(gamma_total > 0.0) || !(sigma2 > 0.0))
        throw std::invalid_argument("tau_limit_noise: invalid parameters");
    if (!(q >= 0.0 && q <= 1.0)) throw std::domain_error("tau_limit_noise: q outside [0, 1]");
    if (gamma_total <= 1.0) return sigma2 * mp::quantile(mp::MpLaw(gamma_total), q);
    const double atom = 1.0 - 1.0 / gamma_total;
    if (q <= atom) return 0.0;
    const double companion_q = 1.0 - gamma_total * (1.0 - q);
    return sigma2 * gamma_total *
           mp::quantile(mp::MpLaw(1.0 / gamma_total), std::clamp(companion_q, 0.0, 1.0));
}

/// Bulk upper edge sigma^2 (1 + sqrt(gamma))^2: the limit of every fixed
/// noise index (j fixed means j / (p + r) -> 0, i.e. q = 1).
inline double tau_limit_noise_top(double gamma_total, double sigma2) {
    const double e = 1.0 + std::sqrt(gamma_total);
    return sigma2 * e * e;
}

/// Limiting PA objective phi(0..K), built from the augmented-spectrum limits.
inline std::vector<double> phi_limit(const SpikedModel& model, const AspectRatios& ratios,
                                     int K) {
    if (K < 0) throw std::domain_error("phi_limit: K must be nonnegative");
    detail::require_identifiable(model, ratios);
    const double gamma = ratios.total();
    const double edge = tau_limit_noise_top(gamma, model.sigma2);
    std::vector<double> phi(static_cast<std::size_t>(K) + 1);
    double c_sum = 0.0;
    double tau_sum = 0.0;
    for (int k = 0; k <= K; ++k) {
        if (k > 0) c_sum += cnorm_limit(model, ratios, k);
        const double tau_next = k < model.d() ? tau_limit_signal(model, gamma, k + 1) : edge;
        tau_sum += tau_next;
        phi[static_cast<std::size_t>(k)] = c_sum + tau_next / (1.0 + tau_sum);
    }
    return phi;
}

/// Limiting jump h_{d+1} - h_d: -sigma^2 gamma_r^2 / ((sqrt(gamma_p)+1)(gamma_p+gamma_r)).
inline double h_jump_limit(const AspectRatios& ratios, double sigma2) {
    if (!(sigma2 > 0.0)) throw std::invalid_argument("h_jump_limit: sigma2 must be positive");
    return -sigma2 * ratios.gamma_r * ratios.gamma_r /
           ((std::sqrt(ratios.gamma_p) + 1.0) * ratios.total());
}

/// Tuning limit T(gamma_p, c, sigma): the jump under gamma_r = c gamma_p.
inline double tuning_limit(double gamma_p, double c, double sigma2) {
    if (!(gamma_p > 0.0) || !(c > 0.0) || !(sigma2 > 0.0))
        throw std::invalid_argument("tuning_limit: inputs must be positive");
    return -sigma2 * c * c * gamma_p / ((std::sqrt(gamma_p) + 1.0) * (1.0 + c));
}

/// Limiting h statistic at a signal index (constant gamma_r sigma^2).
inline double signal_h_limit(const AspectRatios& ratios, double sigma2) {
    return ratios.gamma_r * sigma2;
}

/// Limiting h statistic at a noise index with bulk quantile level q,
/// via A(q) = F^{-1}_{gamma_p}(q) - 1 - gamma_p.
inline double noise_h_limit(const AspectRatios& ratios, double sigma2, double q) {
    if (!(ratios.gamma_p > 0.0))
        throw std::domain_error("noise_h_limit: gamma_p must be positive");
    const double A = mp::quantile(mp::MpLaw(ratios.gamma_p), q) - 1.0 - ratios.gamma_p;
    return ratios.gamma_r * sigma2 * A * (A + 2.0 * ratios.gamma_p + 2.0 * ratios.gamma_r) /
           (2.0 * ratios.total() * (A + 2.0));
}

/// Sign-certificate for phi(d) > phi(d+1):
/// g(gamma_r) = -gamma_r (1 + S)(1 + S + tau_e) + (gamma_r + gamma_p) tau_e^2
/// with S = sum of the d signal tau limits plus the bulk edge tau_e; g shares
/// its sign with phi(d) - phi(d+1).
inline double phi_gap_certificate(const SpikedModel& model, const AspectRatios& ratios) {
    detail::require_identifiable(model, ratios);
    const double gamma = ratios.total();
    const double edge = tau_limit_noise_top(gamma, model.sigma2);
    double spike_sum = 0.0;
    for (int j = 1; j <= model.d(); ++j) spike_sum += tau_limit_signal(model, gamma, j);
    const double s = spike_sum + edge;
    return -ratios.gamma_r * (1.0 + s) * (1.0 + s + edge) +
           (ratios.gamma_r + ratios.gamma_p) * edge * edge;
}

/// Smallest gamma_r in the feasible band (0, lambda_d^2 / sigma^4 - gamma_p)
/// where the limiting objective switches from phi(d) > phi(d+1) to
/// phi(d) < phi(d+1). Returns nothing when the inconsistency certificate
/// stays positive over the whole band (inconsistent for every feasible
/// gamma_r).
inline std::optional<double> inconsistency_boundary(const SpikedModel& model, double gamma_p,
                                                    double sigma2) {
    if (!(gamma_p >= 0.0) || !(sigma2 > 0.0))
        throw std::invalid_argument("inconsistency_boundary: invalid parameters");
    const double lambda_d = model.lambdas.back();
    const double feasible_max = lambda_d * lambda_d / (sigma2 * sigma2) - gamma_p;
    if (!(feasible_max > 2e-9))
        throw std::domain_error("inconsistency_boundary: empty feasible gamma_r band");
    SpikedModel scaled = model;
    scaled.sigma2 = sigma2;
    const auto g = [&](double gamma_r) {
        return phi_gap_certificate(scaled, AspectRatios(gamma_p, gamma_r));
    };
    const double lo = 1e-9;
    const double hi = feasible_max - 1e-9;
    const auto [found, bracket] = roots::first_sign_change(g, lo, hi, 4000);
    if (!found) return std::nullopt;
    return roots::bisect(g, bracket.first, bracket.second, 1e-10);
}

/// All closed-form limits for one (model, ratios) configuration.
struct LimitProfile {
    SpikedModel model;
    AspectRatios ratios;
    std::vector<double> c_norm_limits;         // j = 1..K
    std::vector<double> tau_limits_augmented;  // j = 1..K+1 (gamma = gamma_p + gamma_r)
    std::vector<double> tau_limits_original;   // j = 1..K+1 (gamma = gamma_p)
    std::vector<double> h_limits;              // j = 1..K+1
    std::vector<double> phi_limits;            // k = 0..K
};

inline LimitProfile limit_profile(const SpikedModel& model, const AspectRatios& ratios,
                                  int K) {
    detail::require_identifiable(model, ratios);
    if (K <= model.d()) throw std::domain_error("limit_profile: K must exceed d");
    LimitProfile out{model, ratios, {}, {}, {}, {}, {}};
    const double s2 = model.sigma2;
    for (int j = 1; j <= K; ++j) out.c_norm_limits.push_back(cnorm_limit(model, ratios, j));
    for (int j = 1; j <= K + 1; ++j) {
        out.tau_limits_augmented.push_back(j <= model.d()
                                               ? tau_limit_signal(model, ratios.total(), j)
                                               : tau_limit_noise_top(ratios.total(), s2));
        if (ratios.gamma_p > 0.0)
            out.tau_limits_original.push_back(j <= model.d()
                                                  ? tau_limit_signal(model, ratios.gamma_p, j)
                                                  : tau_limit_noise_top(ratios.gamma_p, s2));
        else
            out.tau_limits_original.push_back(
                j <= model.d() ? model.lambdas[static_cast<std::size_t>(j - 1)] + s2 : s2);
        out.h_limits.push_back(j <= model.d() ? signal_h_limit(ratios, s2)
                               : ratios.gamma_p > 0.0 ? noise_h_limit(ratios, s2, 1.0)
                                                      : 0.0);
    }
    out.phi_limits = phi_limit(model, ratios, K);
    return out;
}

}  // namespace hdpa::asy
