#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hdpa/mp_law.hpp"
#include "hdpa/rng.hpp"
#include "hdpa/spectral.hpp"

namespace hdpa {

enum class Method { kPa, kHdpa };

enum class Sigma2Source { kOracle, kEstimated };

inline const char* to_string(Method m) { return m == Method::kPa ? "pa" : "hdpa"; }
inline const char* to_string(Sigma2Source s) {
    return s == Sigma2Source::kOracle ? "oracle" : "estimated";
}

/// Noise-variance mode for the estimators: a known (oracle) value or
/// data-driven estimation from the original-data spectrum.
struct Sigma2Spec {
    Sigma2Source source = Sigma2Source::kEstimated;
    double value = 0.0;

    static Sigma2Spec oracle(double sigma2) {
        if (!(sigma2 > 0.0)) throw std::invalid_argument("Sigma2Spec: sigma2 must be positive");
        return {Sigma2Source::kOracle, sigma2};
    }
    static Sigma2Spec estimate() { return {Sigma2Source::kEstimated, 0.0}; }
};

/// Result of one dimension estimate, with the full diagnostic sequence.
struct EstimateReport {
    int d_hat = 0;
    Method method = Method::kPa;
    std::vector<double> diagnostics;    // PA: phi(0..K); HDPA: h(1..K+1)
    std::vector<double> h_differences;  // HDPA only: h(j+1) - h(j) for j = 1..K
    double sigma2_used = 0.0;
    Sigma2Source sigma2_source = Sigma2Source::kOracle;
    int K = 0;
    bool identifiability_warning = false;
    std::vector<std::string> warnings;
};

inline constexpr int kDefaultK = 30;

/// Default search-range cap: K = min(30, min(p, n-2) - 1), never below 2.
inline int default_K(Eigen::Index p, Eigen::Index n) {
    const Eigen::Index cap = std::min(p, n - 2) - 1;
    return static_cast<int>(std::max<Eigen::Index>(2, std::min<Eigen::Index>(kDefaultK, cap)));
}

/// Objective phi(k) = sum_{j<=k} ||u_{j,C}||^2 + tau_{k+1} / (1 + sum_{j<=k+1} tau_j)
/// for k = 0..K, with ||u_{0,C}||^2 = 0. Eigenvalues and norms both come from
/// the augmented sample covariance.
inline std::vector<double> pa_objective(const AugmentedSpectrum& spec, int K) {
    if (K < 0) throw std::domain_error("pa_objective: K must be nonnegative");
    if (spec.c_norms.size() < K || spec.eigenvalues.size() < K + 1)
        throw std::domain_error("pa_objective: spectrum too short for requested K");
    std::vector<double> phi(static_cast<std::size_t>(K) + 1);
    double c_sum = 0.0;
    double tau_sum = 0.0;
    for (int k = 0; k <= K; ++k) {
        if (k > 0) c_sum += spec.c_norms(k - 1);
        tau_sum += spec.eigenvalues(k);
        phi[static_cast<std::size_t>(k)] = c_sum + spec.eigenvalues(k) / (1.0 + tau_sum);
    }
    return phi;
}

/// Spike debiasing f_n: inverse of the forward spike map on the supercritical
/// range. Can be negative for tau below sigma^2 (1 + p/n); clamping to zero
/// is the caller's decision (hdpa_statistics clamps).
inline double debias(double tau, double gamma, double sigma2) {
    if (!(tau >= 0.0)) throw std::domain_error("debias: tau must be nonnegative");
    if (!(sigma2 > 0.0) || gamma < 0.0) throw std::invalid_argument("debias: invalid parameters");
    const double shifted = tau - sigma2 * (1.0 + gamma);
    const double bracket = shifted * shifted - 4.0 * sigma2 * sigma2 * gamma;
    return 0.5 * shifted + 0.5 * std::sqrt(std::max(0.0, bracket));
}

inline double debias(double tau, Eigen::Index p, Eigen::Index n, double sigma2) {
    return debias(tau, static_cast<double>(p) / static_cast<double>(n), sigma2);
}

/// HDPA statistics h_j, j = 1..K+1, pairing the j-th original-data eigenvalue
/// with the j-th augmented-eigenvector C-norm. The debiased eigenvalue is
/// clamped at zero before entering the ratio.
inline std::vector<double> hdpa_statistics(const Vector& orig_eigenvalues,
                                           const AugmentedSpectrum& spec, double sigma2,
                                           int K) {
    if (K < 1) throw std::domain_error("hdpa_statistics: K must be >= 1");
    if (orig_eigenvalues.size() < K + 1 || spec.c_norms.size() < K + 1)
        throw std::domain_error("hdpa_statistics: sequences too short for requested K");
    const double gamma_p = static_cast<double>(spec.p) / static_cast<double>(spec.n);
    const double gamma_r = static_cast<double>(spec.r) / static_cast<double>(spec.n);
    std::vector<double> h(static_cast<std::size_t>(K) + 1);
    for (int j = 0; j <= K; ++j) {
        const double f = std::max(0.0, debias(orig_eigenvalues(j), gamma_p, sigma2));
        h[static_cast<std::size_t>(j)] =
            f * (f + (gamma_p + gamma_r) * sigma2) / (f + sigma2) * spec.c_norms(j);
    }
    return h;
}

/// Result of the Marchenko-Pastur corrected eigenvalue estimator of sigma^2.
struct Sigma2Estimate {
    double value = 0.0;
    Eigen::Index index_used = 0;  // 1-based eigenvalue index
    bool fell_back = false;
};

/// Lemma-style noise-variance estimator: the j-th original-data eigenvalue
/// divided by the matching Marchenko-Pastur quantile, with gamma_p = p/n.
/// Default index is floor(p/2). Degenerate (zero) eigenvalues trigger a
/// fallback to the largest index with a positive eigenvalue.
inline Sigma2Estimate estimate_sigma2(const Vector& orig_eigenvalues, Eigen::Index p,
                                      Eigen::Index n,
                                      std::optional<Eigen::Index> quantile_index = {}) {
    if (orig_eigenvalues.size() < p)
        throw std::domain_error("estimate_sigma2: need the full p-length spectrum");
    if (p < 2 || n < 2) throw std::domain_error("estimate_sigma2: degenerate dimensions");
    Sigma2Estimate out;
    Eigen::Index j = quantile_index.value_or(p / 2);
    if (j < 1 || j > p) throw std::domain_error("estimate_sigma2: index outside (0, p]");
    if (!(orig_eigenvalues(j - 1) > 0.0)) {
        Eigen::Index last_positive = 0;
        for (Eigen::Index i = p; i >= 1; --i) {
            if (orig_eigenvalues(i - 1) > 0.0) {
                last_positive = i;
                break;
            }
        }
        if (last_positive == 0)
            throw std::domain_error("estimate_sigma2: spectrum has no positive eigenvalue");
        j = last_positive;
        out.fell_back = true;
    }
    const double gamma_p = static_cast<double>(p) / static_cast<double>(n);
    double denom = 0.0;
    if (gamma_p <= 1.0) {
        const double q = 1.0 - static_cast<double>(j) / static_cast<double>(p);
        denom = mp::quantile(mp::MpLaw(gamma_p), q);
    } else {
        const double q =
            1.0 - static_cast<double>(j) / static_cast<double>(n - 1);
        denom = gamma_p * mp::quantile(mp::MpLaw(1.0 / gamma_p), std::clamp(q, 0.0, 1.0));
    }
    if (!(denom > 1e-12))
        throw std::domain_error("estimate_sigma2: quantile denominator degenerate at index " +
                                std::to_string(j));
    out.value = orig_eigenvalues(j - 1) / denom;
    out.index_used = j;
    return out;
}

namespace detail {

inline int argmin_index(const std::vector<double>& values) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(values.size()); ++i)
        if (values[static_cast<std::size_t>(i)] < values[static_cast<std::size_t>(best)])
            best = i;  // strict: ties keep the smallest index
    return best;
}

struct Sigma2Resolution {
    double value = 0.0;
    Sigma2Source source = Sigma2Source::kOracle;
    std::vector<std::string> warnings;
};

inline Sigma2Resolution resolve_sigma2(const Sigma2Spec& spec, const Vector& orig_eigenvalues,
                                       Eigen::Index p, Eigen::Index n) {
    Sigma2Resolution out;
    out.source = spec.source;
    if (spec.source == Sigma2Source::kOracle) {
        out.value = spec.value;
        return out;
    }
    const Sigma2Estimate est = estimate_sigma2(orig_eigenvalues, p, n);
    out.value = est.value;
    if (est.fell_back)
        out.warnings.push_back("sigma2 estimation fell back to eigenvalue index " +
                               std::to_string(est.index_used));
    return out;
}

}  // namespace detail

/// Original predictor augmentation: d_hat = argmin_{k=0..K} phi_n(k).
inline EstimateReport pa_estimate(const Matrix& data, Eigen::Index r, const Sigma2Spec& sigma2,
                                  int K, RngSeed seed, int n_augmentations = 1) {
    detail::check_data(data);
    const Eigen::Index n = data.rows();
    const Eigen::Index p = data.cols();
    if (K < 1 || K > std::min(p, n - 2))
        throw std::domain_error("pa_estimate: K must satisfy 1 <= K <= min(p, n-2)");
    EstimateReport report;
    report.method = Method::kPa;
    report.K = K;

    Vector orig_eigenvalues;
    if (sigma2.source == Sigma2Source::kEstimated)
        orig_eigenvalues = covariance_eigenvalues(data);
    const auto resolved = detail::resolve_sigma2(sigma2, orig_eigenvalues, p, n);
    report.sigma2_used = resolved.value;
    report.sigma2_source = resolved.source;
    report.warnings = resolved.warnings;

    const AugmentedSpectrum spec =
        augmented_spectrum(data, r, std::sqrt(resolved.value), K, seed, n_augmentations);
    report.diagnostics = pa_objective(spec, K);
    report.d_hat = detail::argmin_index(report.diagnostics);
    return report;
}

/// High-dimensional predictor augmentation:
/// d_hat = argmin_{j=1..K} (h_{j+1} - h_j), searched from j = 1 upward
/// (d = 0 is outside the search range by construction).
inline EstimateReport hdpa_estimate(const Matrix& data, Eigen::Index r,
                                    const Sigma2Spec& sigma2, int K, RngSeed seed,
                                    int n_augmentations = 1) {
    detail::check_data(data);
    const Eigen::Index n = data.rows();
    const Eigen::Index p = data.cols();
    if (K < 2 || K + 1 > std::min(p, n - 2))
        throw std::domain_error("hdpa_estimate: K must satisfy 2 <= K <= min(p, n-2) - 1");
    EstimateReport report;
    report.method = Method::kHdpa;
    report.K = K;

    const Vector orig_eigenvalues = covariance_eigenvalues(data);
    const auto resolved = detail::resolve_sigma2(sigma2, orig_eigenvalues, p, n);
    report.sigma2_used = resolved.value;
    report.sigma2_source = resolved.source;
    report.warnings = resolved.warnings;

    const AugmentedSpectrum spec =
        augmented_spectrum(data, r, std::sqrt(resolved.value), K + 1, seed, n_augmentations);
    report.diagnostics = hdpa_statistics(orig_eigenvalues, spec, resolved.value, K);

    report.h_differences.resize(static_cast<std::size_t>(K));
    for (int j = 1; j <= K; ++j)
        report.h_differences[static_cast<std::size_t>(j - 1)] =
            report.diagnostics[static_cast<std::size_t>(j)] -
            report.diagnostics[static_cast<std::size_t>(j - 1)];
    report.d_hat = 1 + detail::argmin_index(report.h_differences);

    const double gamma_total = static_cast<double>(p + r) / static_cast<double>(n);
    const double lambda_top = debias(orig_eigenvalues(0), p, n, resolved.value);
    if (lambda_top <= mp::bbp_threshold(resolved.value, gamma_total)) {
        report.identifiability_warning = true;
        report.warnings.push_back(
            "largest debiased eigenvalue does not exceed the identifiability threshold");
    }
    return report;
}

}  // namespace hdpa
