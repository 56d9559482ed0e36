#pragma once

#include <cmath>
#include <cstddef>

namespace hdpa::quad {

namespace detail {

// 15-point Kronrod rule with the embedded 7-point Gauss rule (QUADPACK
// constants). Nodes are the nonnegative abscissae on [-1, 1].
inline constexpr double kKronrodNodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

inline constexpr double kKronrodWeights[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

inline constexpr double kGaussWeights[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

template <class F>
void gk15(F&& f, double a, double b, double& kronrod, double& error) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double result_gauss = kGaussWeights[3] * f(center);
    double result_kronrod = kKronrodWeights[7] * f(center);
    for (int i = 0; i < 7; ++i) {
        const double dx = half * kKronrodNodes[i];
        const double fsum = f(center - dx) + f(center + dx);
        result_kronrod += kKronrodWeights[i] * fsum;
        if (i % 2 == 1) result_gauss += kGaussWeights[i / 2] * fsum;
    }
    kronrod = result_kronrod * half;
    error = std::abs((result_kronrod - result_gauss) * half);
}

template <class F>
double adaptive(F&& f, double a, double b, double abs_tol, int depth) {
    double value = 0.0;
    double error = 0.0;
    gk15(f, a, b, value, error);
    if (error <= abs_tol || depth >= 48) return value;
    const double mid = 0.5 * (a + b);
    return adaptive(f, a, mid, 0.5 * abs_tol, depth + 1) +
           adaptive(f, mid, b, 0.5 * abs_tol, depth + 1);
}

}  // namespace detail

/// Adaptive Gauss-Kronrod (G7, K15) integration of f over [a, b] to the
/// requested absolute tolerance.
template <class F>
double integrate(F&& f, double a, double b, double abs_tol = 1e-12) {
    if (a == b) return 0.0;
    return detail::adaptive(f, a, b, abs_tol, 0);
}

}  // namespace hdpa::quad
