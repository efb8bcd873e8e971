#pragma once

#include <algorithm>
#include <cmath>
#include <optional>

namespace qs::detail {

struct OdeTolerance {
    double abs = 1e-13;
    double rel = 1e-13;
    int max_steps = 1'000'000;
};

/// Scalar y' = rhs(t, y) from t0 to t1 with classical RK4 and step-doubling
/// error control (the local-extrapolated value is returned). `h` carries the
/// last accepted step size between calls. Returns nullopt if the solution
/// leaves the finite range or the step size collapses.
template <class Rhs>
std::optional<double> integrate_rk4(Rhs&& rhs, double t0, double y0, double t1, double& h, const OdeTolerance& tol = {}) {
    const double span = t1 - t0;
    if (span == 0.0) return y0;
    const double dir = span > 0.0 ? 1.0 : -1.0;
    auto rk4 = [&](double t, double y, double dt) {
        const double k1 = rhs(t, y);
        const double k2 = rhs(t + 0.5 * dt, y + 0.5 * dt * k1);
        const double k3 = rhs(t + 0.5 * dt, y + 0.5 * dt * k2);
        const double k4 = rhs(t + dt, y + dt * k3);
        return y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    };
    double t = t0;
    double y = y0;
    h = h > 0.0 ? std::min(h, std::abs(span)) : std::abs(span);
    const double h_min = 1e-14 * std::max(1.0, std::abs(span));
    for (int steps = 0; steps < tol.max_steps; ++steps) {
        const double remaining = std::abs(t1 - t);
        const bool last = h >= remaining;
        const double dt = dir * (last ? remaining : h);
        const double full = rk4(t, y, dt);
        const double half = rk4(t + 0.5 * dt, rk4(t, y, 0.5 * dt), 0.5 * dt);
        const double err = std::abs(half - full) / 15.0;
        const double scale = tol.abs + tol.rel * std::max(std::abs(y), std::abs(half));
        if (!std::isfinite(full) || !std::isfinite(half)) {
            h = 0.25 * std::abs(dt);
            if (h < h_min) return std::nullopt;
            continue;
        }
        if (err <= scale) {
            t = last ? t1 : t + dt;
            y = half + (half - full) / 15.0;
            const double grow = err > 0.0 ? 0.9 * std::pow(scale / err, 0.2) : 4.0;
            if (last) {
                return y;
            }
            h = std::abs(dt) * std::clamp(grow, 0.2, 4.0);
        } else {
            h = std::abs(dt) * std::clamp(0.9 * std::pow(scale / err, 0.2), 0.1, 0.9);
            if (h < h_min) return std::nullopt;
        }
    }
    return std::nullopt;
}

}  // namespace qs::detail
