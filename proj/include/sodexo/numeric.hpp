#pragma once

// Small scalar numerics shared by the solvers.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <utility>

namespace sodexo::numeric {

/// Golden-section search for the maximizer of a unimodal function on [lo, hi].
template <class F>
double golden_section_maximize(F&& f, double lo, double hi, double tol = 1e-12,
                               int max_iter = 500) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < max_iter && (b - a) > tol * std::max(1.0, std::abs(a) + std::abs(b));
         ++it) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    double x = 0.5 * (a + b);
    // Endpoints are candidates too: a monotone function peaks on the boundary.
    double best = x, fbest = f(x);
    for (double e : {lo, hi}) {
        double fe = f(e);
        if (fe > fbest) {
            best = e;
            fbest = fe;
        }
    }
    return best;
}

/// Coarse uniform scan of [lo, hi] followed by golden-section refinement
/// around the best sample. Robust to a few spurious local maxima.
template <class F>
double scan_then_golden(F&& f, double lo, double hi, int samples = 2000, double tol = 1e-13) {
    if (hi <= lo) return lo;
    int best_i = 0;
    double best_f = -std::numeric_limits<double>::infinity();
    const double h = (hi - lo) / samples;
    for (int i = 0; i <= samples; ++i) {
        double v = f(lo + i * h);
        if (v > best_f) {
            best_f = v;
            best_i = i;
        }
    }
    double a = lo + std::max(0, best_i - 1) * h;
    double b = lo + std::min(samples, best_i + 1) * h;
    return golden_section_maximize(f, a, b, tol);
}

/// Bisection for a root of a function with f(lo) and f(hi) of opposite sign.
template <class F>
double bisect(F&& f, double lo, double hi, double tol = 1e-14, int max_iter = 400) {
    double flo = f(lo);
    for (int it = 0; it < max_iter && (hi - lo) > tol * std::max(1.0, std::abs(lo)); ++it) {
        double mid = 0.5 * (lo + hi);
        double fm = f(mid);
        if ((fm > 0) == (flo > 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

using Matrix2 = std::array<std::array<double, 2>, 2>;

/// Eigenvalues of a real 2x2 matrix.
inline std::pair<std::complex<double>, std::complex<double>> eigenvalues(const Matrix2& m) {
    const double tr = m[0][0] + m[1][1];
    const double det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    const double disc = 0.25 * tr * tr - det;
    if (disc >= 0.0) {
        const double s = std::sqrt(disc);
        // Avoid cancellation for the smaller-magnitude root.
        const double big = 0.5 * tr + (tr >= 0 ? s : -s);
        const double small = big != 0.0 ? det / big : 0.5 * tr - (tr >= 0 ? s : -s);
        return {{big, 0.0}, {small, 0.0}};
    }
    const double s = std::sqrt(-disc);
    return {{0.5 * tr, s}, {0.5 * tr, -s}};
}

/// Roots of a*x^2 + b*x + c computed without catastrophic cancellation.
/// Returns the number of real roots (0, 1 or 2).
inline int solve_quadratic(double a, double b, double c, double& r1, double& r2) {
    if (a == 0.0) {
        if (b == 0.0) return 0;
        r1 = r2 = -c / b;
        return 1;
    }
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) return 0;
    const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
    r1 = q / a;
    r2 = q != 0.0 ? c / q : r1;
    if (r1 > r2) std::swap(r1, r2);
    return disc == 0.0 ? 1 : 2;
}

} // namespace sodexo::numeric
