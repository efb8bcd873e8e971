#pragma once

// Direct solvers of the discretized expected-utility problem
//
//     max  sum_i w_i b_i U(F_i)   subject to   sum_i w_i m_i F_i = 1,  F >= 0,
//
// with trapezoid weights w. Nothing here goes through the structuring
// equations; the two routes are meant to be compared against each other.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "qs/density.hpp"
#include "qs/error.hpp"
#include "qs/grid.hpp"
#include "qs/payoff.hpp"
#include "qs/utility.hpp"

namespace qs {

struct OracleReport {
    Payoff payoff;
    double lambda = 0.0;
    double objective = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

namespace oracle_detail {

inline void check_inputs(const Density& b, const Density& m) {
    require_same_grid(b.grid(), m.grid());
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (!(m[i] > 0.0)) throw Error(Errc::zero_market_density, "market density vanishes at a grid point");
        if (!(b[i] > 0.0)) throw Error(Errc::domain_violation, "believed density vanishes at a grid point");
    }
}

// ln F search range for numerical inversions.
inline constexpr double kLogLo = -690.0;
inline constexpr double kLogHi = 690.0;

/// Solves U'(F) = y for F >= 0. Returns 0 when U'(0+) <= y (the positivity
/// constraint binds).
inline double inverse_marginal(const Utility& u, double y) {
    if (u.kind() == Utility::Kind::crra) return std::pow(y, -1.0 / u.crra_R());
    if (!(u.marginal(std::exp(kLogLo)) > y)) return 0.0;
    if (!(u.marginal(std::exp(kLogHi)) < y)) {
        throw Error(Errc::inverse_marginal_failure, "U' stays above the required value " + std::to_string(y));
    }
    double lo = kLogLo, hi = kLogHi;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        (u.marginal(std::exp(mid)) > y ? lo : hi) = mid;
    }
    return std::exp(0.5 * (lo + hi));
}

inline double objective(std::span<const double> wb, std::span<const double> F, const Utility& u) {
    double s = 0.0;
    for (std::size_t i = 0; i < F.size(); ++i) s += wb[i] * u.value(F[i]);
    return s;
}

}  // namespace oracle_detail

/// F_lambda(x) = (U')^{-1}(lambda m(x) / b(x)), before the budget is imposed.
inline std::vector<double> payoff_for_multiplier(const Density& b, const Density& m, const Utility& u, double lambda) {
    oracle_detail::check_inputs(b, m);
    std::vector<double> F(m.size());
    for (std::size_t i = 0; i < F.size(); ++i) F[i] = oracle_detail::inverse_marginal(u, lambda * m[i] / b[i]);
    return F;
}

/// Pointwise first-order conditions U'(F(x)) b(x) = lambda m(x), with lambda
/// found by bisection on the budget (which decreases in lambda).
inline OracleReport kkt_solve(const Density& b, const Density& m, const Utility& u) {
    using namespace oracle_detail;
    check_inputs(b, m);
    const std::size_t n = m.size();
    const std::vector<double> w = trapezoid_weights(m.grid());
    std::vector<double> F(n);
    auto payoff_at = [&](double log_lambda) {
        const double lambda = std::exp(log_lambda);
        for (std::size_t i = 0; i < n; ++i) F[i] = inverse_marginal(u, lambda * m[i] / b[i]);
    };
    auto excess_budget = [&](double log_lambda) {
        payoff_at(log_lambda);
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += w[i] * m[i] * F[i];
        return s - 1.0;
    };

    double lo = std::log(1e-6), hi = std::log(1e6), widen = std::log(10.0);
    double f_lo = excess_budget(lo), f_hi = excess_budget(hi);
    for (int k = 0; k < 10 && !(f_lo > 0.0 && f_hi < 0.0); ++k) {
        lo -= widen;
        hi += widen;
        widen *= 2.0;
        f_lo = excess_budget(lo);
        f_hi = excess_budget(hi);
    }
    if (!(f_lo >= 0.0 && f_hi <= 0.0)) throw Error(Errc::bracket_failure, "cannot bracket the budget multiplier");

    std::size_t iterations = 0;
    while (hi - lo > 1e-15 * std::max(1.0, std::abs(lo)) && iterations < 400) {
        ++iterations;
        const double mid = 0.5 * (lo + hi);
        const double g = excess_budget(mid);
        if (g == 0.0) {
            lo = hi = mid;
            break;
        }
        (g > 0.0 ? lo : hi) = mid;
    }
    const double log_lambda = 0.5 * (lo + hi);
    payoff_at(log_lambda);

    std::vector<double> wb(n);
    for (std::size_t i = 0; i < n; ++i) wb[i] = w[i] * b[i];
    OracleReport report{Payoff(m, F), std::exp(log_lambda), objective(wb, F, u), iterations, false};
    report.converged = std::abs(report.payoff.budget_residual()) <= kBudgetTolerance;
    return report;
}

inline constexpr std::size_t kBruteForceMaxPoints = 512;
inline constexpr std::size_t kBruteForceMaxSteps = 200000;

/// Projected ascent on the discretized objective from `start`. Each step moves
/// along the budget-projected gradient preconditioned by the diagonal of the
/// objective's Hessian, in log coordinates so iterates stay positive, with
/// backtracking on the objective. Iterates are clipped at 1e-12 and rescaled
/// onto the budget hyperplane. Stops when the objective gains less than 1e-12
/// and no coordinate moves by more than 1e-9 in log terms, or when no step
/// along the ascent direction improves the objective at all.
inline OracleReport brute_force_maximize(const Density& b, const Density& m, const Utility& u, const Payoff& start) {
    using namespace oracle_detail;
    check_inputs(b, m);
    require_same_grid(start.grid(), m.grid());
    const std::size_t n = m.size();
    if (n > kBruteForceMaxPoints) throw Error(Errc::invalid_count, "brute force is limited to 512 grid points");

    const std::vector<double> w = trapezoid_weights(m.grid());
    std::vector<double> a(n), wb(n), r(n);
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = w[i] * m[i];
        wb[i] = w[i] * b[i];
        r[i] = b[i] / m[i];
    }
    constexpr double kFloor = 1e-12;
    auto to_budget = [&](std::vector<double>& F) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            F[i] = std::max(F[i], kFloor);
            s += a[i] * F[i];
        }
        for (double& v : F) v /= s;
    };

    std::vector<double> F(start.values().begin(), start.values().end());
    to_budget(F);
    double J = objective(wb, F, u);
    std::vector<double> step(n), trial(n), hess(n);
    std::size_t it = 0;
    bool converged = false;
    while (it < kBruteForceMaxSteps) {
        ++it;
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            hess[i] = std::max(r[i] * -u.curvature(F[i]), 1e-300);
            num += a[i] * r[i] * u.marginal(F[i]) / hess[i];
            den += a[i] / hess[i];
        }
        const double mu = num / den;
        for (std::size_t i = 0; i < n; ++i) {
            const double delta = (r[i] * u.marginal(F[i]) - mu) / hess[i];
            step[i] = std::clamp(delta / F[i], -30.0, 30.0);
        }
        double t = 1.0, J_trial = -INFINITY;
        bool accepted = false;
        for (; t > 1e-20; t *= 0.5) {
            for (std::size_t i = 0; i < n; ++i) trial[i] = F[i] * std::exp(t * step[i]);
            to_budget(trial);
            J_trial = objective(wb, trial, u);
            if (J_trial >= J) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            // No step along the ascent direction improves the objective: stationary to roundoff.
            converged = true;
            break;
        }
        double moved = 0.0;
        for (std::size_t i = 0; i < n; ++i) moved = std::max(moved, std::abs(std::log(trial[i] / F[i])));
        const double gain = J_trial - J;
        F.swap(trial);
        J = J_trial;
        if (gain < 1e-12 && moved < 1e-9) {
            converged = true;
            break;
        }
    }
    // The multiplier implied by the final iterate, averaged over the budget measure.
    double lambda = 0.0, mass = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        lambda += a[i] * r[i] * u.marginal(F[i]);
        mass += a[i];
    }
    lambda /= mass;
    OracleReport report{Payoff(m, F), lambda, J, it, converged};
    report.converged = converged && std::abs(report.payoff.budget_residual()) <= kBudgetTolerance;
    return report;
}

}  // namespace qs
