#pragma once

#include <Eigen/Core>
#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "hdpa/rng.hpp"

namespace hdpa {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Divisor convention used throughout for sample covariance matrices.
inline constexpr const char* kCovarianceDivisor = "1/n";

/// Leading part of the spectrum of the augmented sample covariance: the
/// first J+1 eigenvalues (descending) and the squared norms of the last-r
/// coordinate blocks of the first J unit eigenvectors.
struct AugmentedSpectrum {
    Vector eigenvalues;  // length J + 1
    Vector c_norms;      // length J, each in [0, 1]
    Eigen::Index p = 0;
    Eigen::Index r = 0;
    Eigen::Index n = 0;
};

struct EigSym {
    Vector values;   // descending
    Matrix vectors;  // columns match values
};

namespace detail {

inline void check_data(const Matrix& data) {
    if (data.rows() < 2) throw std::invalid_argument("data: need at least 2 observations");
    if (data.cols() < 1) throw std::invalid_argument("data: need at least 1 variable");
    if (!data.allFinite()) throw std::invalid_argument("data: non-finite entries");
}

inline Matrix centered(const Matrix& data) {
    return data.rowwise() - data.colwise().mean();
}

inline void lapack_check(int info, const char* routine) {
    if (info != 0)
        throw std::runtime_error(std::string(routine) + " failed, info=" + std::to_string(info));
}

/// All eigenvalues of a symmetric matrix, descending. Values only.
inline Vector sym_eigenvalues(Matrix S) {
    const lapack_int n = static_cast<lapack_int>(S.rows());
    Vector w(n);
    lapack_check(LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'L', n, S.data(), n, w.data()),
                 "dsyevd");
    return w.reverse();
}

/// Top-k eigenpairs of a symmetric matrix, descending.
inline EigSym sym_leading_eig(Matrix S, Eigen::Index k) {
    const lapack_int n = static_cast<lapack_int>(S.rows());
    const lapack_int kk = static_cast<lapack_int>(std::min<Eigen::Index>(k, n));
    Vector w(n);
    Matrix z(n, kk);
    std::vector<lapack_int> isuppz(static_cast<std::size_t>(2 * std::max<lapack_int>(1, kk)));
    lapack_int found = 0;
    lapack_check(LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'I', 'L', n, S.data(), n, 0.0, 0.0,
                                n - kk + 1, n, 0.0, &found, w.data(), z.data(), n,
                                isuppz.data()),
                 "dsyevr");
    EigSym out;
    out.values = w.head(found).reverse();
    out.vectors = z.leftCols(found).rowwise().reverse();
    return out;
}

}  // namespace detail

/// Centered sample covariance with divisor n (see kCovarianceDivisor).
inline Matrix sample_covariance(const Matrix& data) {
    detail::check_data(data);
    const Matrix xc = detail::centered(data);
    Matrix cov = Matrix::Zero(data.cols(), data.cols());
    cov.selfadjointView<Eigen::Lower>().rankUpdate(xc.transpose(),
                                                   1.0 / static_cast<double>(data.rows()));
    return cov.selfadjointView<Eigen::Lower>();
}

/// Full symmetric eigendecomposition, eigenvalues descending. The input must
/// be symmetric to 1e-10 relative tolerance.
inline EigSym eig_sym(const Matrix& S) {
    if (S.rows() != S.cols()) throw std::invalid_argument("eig_sym: matrix not square");
    const double scale = S.cwiseAbs().maxCoeff();
    if ((S - S.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(scale, 1.0))
        throw std::invalid_argument("eig_sym: matrix not symmetric");
    const lapack_int n = static_cast<lapack_int>(S.rows());
    Matrix v = S;
    Vector w(n);
    detail::lapack_check(
        LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, v.data(), n, w.data()), "dsyevd");
    EigSym out;
    out.values = w.reverse();
    out.vectors = v.rowwise().reverse();
    return out;
}

/// Appends r i.i.d. N(0, sigma^2) columns to the data; the first p columns
/// are copied unchanged. Deterministic given the seed.
inline Matrix augment(const Matrix& data, Eigen::Index r, double sigma, RngSeed seed) {
    detail::check_data(data);
    if (r < 1) throw std::domain_error("augment: r must be >= 1");
    if (!(sigma > 0.0)) throw std::invalid_argument("augment: sigma must be positive");
    const Eigen::Index n = data.rows();
    const Eigen::Index p = data.cols();
    Matrix out(n, p + r);
    out.leftCols(p) = data;
    Rng rng(seed);
    for (Eigen::Index j = 0; j < r; ++j)
        for (Eigen::Index i = 0; i < n; ++i) out(i, p + j) = sigma * rng.gaussian();
    return out;
}

/// All p eigenvalues of the sample covariance of the data, descending and
/// zero-padded past the rank. Uses the n x n Gram matrix when p > n, which
/// shares the nonzero spectrum with the p x p covariance.
inline Vector covariance_eigenvalues(const Matrix& data) {
    detail::check_data(data);
    const Eigen::Index n = data.rows();
    const Eigen::Index p = data.cols();
    const Matrix xc = detail::centered(data);
    const Eigen::Index m = std::min(n, p);
    Matrix small = Matrix::Zero(m, m);
    if (p <= n)
        small.selfadjointView<Eigen::Lower>().rankUpdate(xc.transpose(),
                                                         1.0 / static_cast<double>(n));
    else
        small.selfadjointView<Eigen::Lower>().rankUpdate(xc, 1.0 / static_cast<double>(n));
    Matrix full = small.selfadjointView<Eigen::Lower>();
    Vector values = detail::sym_eigenvalues(std::move(full));
    Vector out = Vector::Zero(p);
    out.head(m) = values.cwiseMax(0.0);
    return out;
}

/// Augments the data, forms the sample covariance of the augmented sample and
/// extracts the leading J+1 eigenvalues together with the C-block squared
/// norms of the leading J eigenvectors. When n_augmentations > 1 the c_norms
/// are averaged over independent augmentation draws (eigenvalues come from
/// the first draw); streams for the extra draws are derived from the seed.
inline AugmentedSpectrum augmented_spectrum(const Matrix& data, Eigen::Index r, double sigma,
                                            Eigen::Index J, RngSeed seed,
                                            int n_augmentations = 1) {
    detail::check_data(data);
    const Eigen::Index n = data.rows();
    const Eigen::Index p = data.cols();
    if (r < 1) throw std::domain_error("augmented_spectrum: r must be >= 1");
    if (J < 1 || J > std::min(p, n - 1))
        throw std::domain_error("augmented_spectrum: J must satisfy 1 <= J <= min(p, n-1)");
    if (n_augmentations < 1)
        throw std::domain_error("augmented_spectrum: need at least one augmentation");

    AugmentedSpectrum spec;
    spec.p = p;
    spec.r = r;
    spec.n = n;
    spec.eigenvalues = Vector::Zero(J + 1);
    spec.c_norms = Vector::Zero(J);

    const Eigen::Index m = p + r;
    for (int draw = 0; draw < n_augmentations; ++draw) {
        const RngSeed draw_seed =
            draw == 0 ? seed
                      : RngSeed{seed.seed, hash_combine(seed.stream, static_cast<std::uint64_t>(draw))};
        const Matrix zc = detail::centered(augment(data, r, sigma, draw_seed));
        Vector c_norms(J);
        Vector values;
        if (m <= n) {
            Matrix cov = Matrix::Zero(m, m);
            cov.selfadjointView<Eigen::Lower>().rankUpdate(zc.transpose(),
                                                           1.0 / static_cast<double>(n));
            Matrix full = cov.selfadjointView<Eigen::Lower>();
            const EigSym top = detail::sym_leading_eig(std::move(full), J + 1);
            values = top.values;
            for (Eigen::Index j = 0; j < J; ++j)
                c_norms(j) = top.vectors.col(j).tail(r).squaredNorm();
        } else {
            Matrix gram = Matrix::Zero(n, n);
            gram.selfadjointView<Eigen::Lower>().rankUpdate(zc, 1.0 / static_cast<double>(n));
            Matrix full = gram.selfadjointView<Eigen::Lower>();
            const EigSym top = detail::sym_leading_eig(std::move(full), J + 1);
            values = top.values;
            // Covariance eigenvector for Gram eigenpair (tau, u) is
            // zc' u / ||zc' u|| with ||zc' u||^2 = n tau.
            const Matrix c_block = zc.rightCols(r).transpose() *
                                   top.vectors.leftCols(std::min<Eigen::Index>(J, values.size()));
            for (Eigen::Index j = 0; j < J; ++j) {
                const double total = static_cast<double>(n) *
                                     (j < values.size() ? values(j) : 0.0);
                c_norms(j) = total > 1e-300 ? c_block.col(j).squaredNorm() / total : 0.0;
            }
        }
        if (draw == 0) {
            spec.eigenvalues.head(std::min<Eigen::Index>(J + 1, values.size())) =
                values.head(std::min<Eigen::Index>(J + 1, values.size())).cwiseMax(0.0);
        }
        spec.c_norms += c_norms;
    }
    spec.c_norms /= static_cast<double>(n_augmentations);
    spec.c_norms = spec.c_norms.cwiseMax(0.0).cwiseMin(1.0);
    return spec;
}

}  // namespace hdpa
