#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "satphase/error.hpp"

namespace satphase::quad {

struct Options {
    double rel_tol = 1e-9;
    /// Absolute floor. Keeps tails of rapidly decaying integrands (C_n^2 at
    /// high altitude) from demanding impossible relative accuracy.
    double abs_floor = 1e-30;
    int max_depth = 48;
};

namespace detail {

template <class F>
double simpson_recurse(const F& f, double a, double b, double fa, double fm, double fb,
                       double whole, double tol, int depth, int max_depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (!std::isfinite(delta)) {
        throw NumericalError("quadrature: non-finite integrand near x=" + std::to_string(m));
    }
    if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    if (depth >= max_depth) {
        throw NumericalError("quadrature: no convergence on [" + std::to_string(a) + ", " +
                             std::to_string(b) + "]");
    }
    return simpson_recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1, max_depth) +
           simpson_recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1, max_depth);
}

// Fixed 64-panel composite Simpson, used only to size the absolute tolerance.
template <class F>
double coarse(const F& f, double a, double b) {
    constexpr int n = 64;
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
}

}  // namespace detail

/// Adaptive composite Simpson over consecutive panels [x0,x1], [x1,x2], ...
/// Breakpoints let the caller put resolution where the integrand lives;
/// a single adaptive panel over a 500 km path would sample only zeros and
/// declare convergence.
template <class F>
double integrate(const F& f, std::span<const double> breakpoints, Options opt = {}) {
    if (breakpoints.size() < 2) throw ConfigError("quadrature: need at least two breakpoints");
    double scale = 0.0;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        if (!(breakpoints[i + 1] > breakpoints[i])) {
            throw ConfigError("quadrature: breakpoints must be strictly increasing");
        }
        scale += std::abs(detail::coarse(f, breakpoints[i], breakpoints[i + 1]));
    }
    const double total_tol = std::max(opt.rel_tol * scale, opt.abs_floor);
    const double span = breakpoints.back() - breakpoints.front();
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        const double a = breakpoints[i];
        const double b = breakpoints[i + 1];
        const double fa = f(a);
        const double fb = f(b);
        const double fm = f(0.5 * (a + b));
        const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        const double tol = total_tol * (b - a) / span;
        sum += detail::simpson_recurse(f, a, b, fa, fm, fb, whole, tol, 0, opt.max_depth);
    }
    return sum;
}

template <class F>
double integrate(const F& f, double a, double b, Options opt = {}) {
    const double pts[] = {a, b};
    return integrate(f, std::span<const double>(pts), opt);
}

/// Breakpoints 0, first, 2*first, 4*first, ... up to `upper` (inclusive).
inline std::vector<double> geometric_breakpoints(double upper, double first = 25.0) {
    std::vector<double> pts{0.0};
    for (double x = first; x < upper; x *= 2.0) pts.push_back(x);
    pts.push_back(upper);
    return pts;
}

}  // namespace satphase::quad
