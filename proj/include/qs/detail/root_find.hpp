#pragma once

#include <cmath>
#include <optional>
#include <utility>

namespace qs::detail {

struct Bracket {
    double lo;
    double hi;
    double f_lo;
    double f_hi;
};

/// Widens [lo, hi] geometrically (both ends, by `factor`) until fn changes sign.
/// Works in whatever coordinate the caller passes; for positive unknowns pass logs.
template <class Fn>
std::optional<Bracket> expand_bracket(Fn&& fn, double lo, double hi, double step, int max_expansions) {
    double f_lo = fn(lo);
    double f_hi = fn(hi);
    for (int k = 0; k <= max_expansions; ++k) {
        if (f_lo == 0.0 || f_hi == 0.0 || std::signbit(f_lo) != std::signbit(f_hi)) {
            return Bracket{lo, hi, f_lo, f_hi};
        }
        if (k == max_expansions) break;
        lo -= step;
        hi += step;
        step *= 2.0;
        f_lo = fn(lo);
        f_hi = fn(hi);
    }
    return std::nullopt;
}

/// Secant steps safeguarded by bisection on a sign-changing bracket. A secant
/// iterate is kept only if it lands inside the bracket and the bracket shrinks
/// by at least half every two iterations; otherwise the midpoint is used.
template <class Fn>
double solve_bracketed(Fn&& fn, Bracket br, double x_tol = 1e-15, double f_tol = 0.0, int max_iter = 200) {
    double a = br.lo, b = br.hi, fa = br.f_lo, fb = br.f_hi;
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    double width_before = std::abs(b - a);
    for (int it = 0; it < max_iter; ++it) {
        double x = b - fb * (b - a) / (fb - fa);
        const bool secant_ok = std::isfinite(x) && x > std::min(a, b) && x < std::max(a, b);
        if (!secant_ok || (it % 2 == 1 && std::abs(b - a) > 0.5 * width_before)) {
            x = 0.5 * (a + b);
        }
        if (it % 2 == 1) width_before = std::abs(b - a);
        const double fx = fn(x);
        if (fx == 0.0 || std::abs(fx) <= f_tol) return x;
        if (std::signbit(fx) == std::signbit(fa)) {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
        if (std::abs(b - a) <= x_tol * (1.0 + std::abs(x))) break;
    }
    return std::abs(fa) < std::abs(fb) ? a : b;
}

}  // namespace qs::detail
