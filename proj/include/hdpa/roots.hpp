#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

namespace hdpa::roots {

/// Bracketed bisection for a continuous function with f(lo) and f(hi) of
/// opposite sign. Returns the midpoint of the final bracket once its width
/// falls below xtol. Deterministic and monotonicity-friendly; used wherever
/// the contract pins a bracket and an x-tolerance.
template <class F>
double bisect(F&& f, double lo, double hi, double xtol, int max_iter = 200) {
    if (!(lo < hi)) throw std::invalid_argument("bisect: invalid bracket");
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0))
        throw std::invalid_argument("bisect: no sign change over bracket");
    for (int i = 0; i < max_iter && (hi - lo) > xtol; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fmid = f(mid);
        if (fmid == 0.0) return mid;
        if ((fmid > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// Scans [lo, hi] on a uniform grid and returns the first sub-interval where
/// f changes sign, or nothing if the sign is constant on the grid.
template <class F>
std::pair<bool, std::pair<double, double>> first_sign_change(F&& f, double lo, double hi,
                                                             int points) {
    double prev_x = lo;
    double prev_f = f(lo);
    for (int i = 1; i <= points; ++i) {
        const double x = lo + (hi - lo) * static_cast<double>(i) / points;
        const double fx = f(x);
        if (prev_f == 0.0 || (fx > 0.0) != (prev_f > 0.0))
            return {true, {prev_x, x}};
        prev_x = x;
        prev_f = fx;
    }
    return {false, {0.0, 0.0}};
}

}  // namespace hdpa::roots
