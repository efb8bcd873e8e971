#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "qs/density.hpp"
#include "qs/detail/ode.hpp"
#include "qs/detail/root_find.hpp"
#include "qs/error.hpp"
#include "qs/grid.hpp"
#include "qs/payoff.hpp"
#include "qs/utility.hpp"
#include "qs/views.hpp"

namespace qs {

/// f = b / m, the payoff of the growth-optimizing (R = 1) investor.
inline Payoff growth_optimal_payoff(const Density& believed, const Density& market) {
    require_same_grid(believed.grid(), market.grid());
    std::vector<double> f(market.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (!(market[i] > 0.0)) throw Error(Errc::zero_market_density, "market density vanishes at a grid point");
        f[i] = believed[i] / market[i];
    }
    return Payoff(market, std::move(f));
}

namespace detail {

/// Sorted distinct values and, for each input position, the index of its value.
struct Ranking {
    std::vector<double> levels;
    std::vector<std::size_t> rank;
};

inline Ranking rank_values(std::span<const double> v) {
    Ranking r;
    r.levels.assign(v.begin(), v.end());
    std::sort(r.levels.begin(), r.levels.end());
    r.levels.erase(std::unique(r.levels.begin(), r.levels.end()), r.levels.end());
    r.rank.resize(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        r.rank[i] = static_cast<std::size_t>(std::lower_bound(r.levels.begin(), r.levels.end(), v[i]) - r.levels.begin());
    }
    return r;
}

enum class SweepFailure { none, below, above };

/// Integrates y' = ode(t, y) from (origin, y0) to every level, sweeping up
/// through levels >= origin and down through levels < origin. With a positive
/// right side, a failed upward sweep means overflow (above) and a failed
/// downward sweep means collapse (below).
template <class Ode>
SweepFailure sweep_levels(Ode&& ode, std::span<const double> levels, double origin, double y0, std::vector<double>& out) {
    out.assign(levels.size(), 0.0);
    const auto split = static_cast<std::size_t>(std::lower_bound(levels.begin(), levels.end(), origin) - levels.begin());
    double t = origin, y = y0, h = 0.0;
    for (std::size_t k = split; k < levels.size(); ++k) {
        auto next = integrate_rk4(ode, t, y, levels[k], h);
        if (!next) return SweepFailure::above;
        t = levels[k];
        y = *next;
        out[k] = y;
    }
    t = origin;
    y = y0;
    h = 0.0;
    for (std::size_t k = split; k-- > 0;) {
        auto next = integrate_rk4(ode, t, y, levels[k], h);
        if (!next) return SweepFailure::below;
        t = levels[k];
        y = *next;
        out[k] = y;
    }
    return SweepFailure::none;
}

inline Payoff constant_R_payoff(const Payoff& f, double R, const Density& market) {
    if (R == 1.0) return f;
    const double inv = 1.0 / R;
    double peak = -INFINITY;
    std::vector<double> logs(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        logs[i] = f[i] > 0.0 ? inv * std::log(f[i]) : -INFINITY;
        peak = std::max(peak, logs[i]);
    }
    if (!std::isfinite(peak)) throw Error(Errc::invalid_payoff, "intermediate payoff is identically zero");
    std::vector<double> F(f.size());
    std::vector<double> priced(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        F[i] = std::exp(logs[i] - peak);
        priced[i] = F[i] * market[i];
    }
    const double c = 1.0 / quadrature(priced, market.grid());
    for (double& v : F) v *= c;
    return Payoff(market, std::move(F));
}

inline Payoff wealth_dependent_payoff(const Payoff& f, const RiskProfile& risk, const Density& market) {
    std::vector<double> logs(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (!(f[i] > 0.0)) {
            throw Error(Errc::nonpositive_payoff, "wealth-dependent risk aversion needs f > 0 everywhere");
        }
        logs[i] = std::log(f[i]);
    }
    const Ranking ranked = rank_values(logs);
    // d ln F / d ln f = 1 / R(F)
    auto rhs = [&risk](double, double lnF) {
        const double F = std::exp(lnF);
        // F underflowing to 0 or overflowing means the trajectory left the domain.
        if (!(F > 0.0) || !std::isfinite(F)) return std::numeric_limits<double>::quiet_NaN();
        return 1.0 / risk(F);
    };
    std::vector<double> lnF_levels;
    std::vector<double> priced(f.size());
    auto budget = [&](double lnF0) -> double {
        switch (sweep_levels(rhs, ranked.levels, 0.0, lnF0, lnF_levels)) {
        case SweepFailure::below: return -1.0;
        case SweepFailure::above: return 1.0;
        case SweepFailure::none: break;
        }
        for (std::size_t i = 0; i < f.size(); ++i) priced[i] = std::exp(lnF_levels[ranked.rank[i]]) * market[i];
        const double q = quadrature(priced, market.grid());
        return std::isfinite(q) ? q - 1.0 : 1.0;
    };
    auto br = expand_bracket(budget, std::log(1e-6), std::log(1e6), std::log(10.0), 10);
    if (!br) throw Error(Errc::budget_bracket_failure, "cannot bracket the payoff level at f = 1");
    const double lnF0 = solve_bracketed(budget, *br, 1e-16, 1e-15);
    if (sweep_levels(rhs, ranked.levels, 0.0, lnF0, lnF_levels) != SweepFailure::none) {
        throw Error(Errc::ode_step_failure, "payoff elasticity ODE left the representable range");
    }
    std::vector<double> F(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) F[i] = std::exp(lnF_levels[ranked.rank[i]]);
    Payoff out(market, std::move(F));
    if (std::abs(out.budget_residual()) > kBudgetTolerance) {
        throw Error(Errc::budget_bracket_failure, "budget root not resolved within tolerance");
    }
    return out;
}

}  // namespace detail

/// Final payoff F from the growth-optimal payoff f, with d ln F / d ln f = 1 / R(F)
/// and the unit budget quadrature(F * m) == 1.
inline Payoff risk_adjusted_payoff(const Payoff& f, const RiskProfile& risk, const Density& market) {
    require_same_grid(f.grid(), market.grid());
    for (std::size_t i = 0; i < market.size(); ++i) {
        if (!(market[i] > 0.0)) throw Error(Errc::zero_market_density, "market density vanishes at a grid point");
    }
    if (risk.is_constant()) return detail::constant_R_payoff(f, risk.constant_value(), market);
    return detail::wealth_dependent_payoff(f, risk, market);
}

struct Design {
    Density believed;
    Payoff growth_optimal;
    Payoff payoff;
};

inline Design design(const Density& market, std::span<const Likelihood> views, const RiskProfile& risk) {
    Density believed = views.empty() ? market : bayes_update(market, compose(views));
    Payoff f = growth_optimal_payoff(believed, market);
    Payoff F = risk_adjusted_payoff(f, risk, market);
    return Design{std::move(believed), std::move(f), std::move(F)};
}

/// Believed density under which F is the optimal payoff for the given risk profile.
inline Density implied_views(const Payoff& F, const RiskProfile& risk, const Density& market) {
    require_same_grid(F.grid(), market.grid());
    std::vector<double> lnF(F.size());
    for (std::size_t i = 0; i < F.size(); ++i) {
        if (!(F[i] > 0.0)) throw Error(Errc::nonpositive_payoff, "implied views need F > 0 everywhere");
        lnF[i] = std::log(F[i]);
    }
    std::vector<double> lnf(F.size());
    if (risk.is_constant()) {
        const double R = risk.constant_value();
        for (std::size_t i = 0; i < F.size(); ++i) lnf[i] = R * lnF[i];
    } else {
        // ln f = integral of R(F) d ln F, anchored at the grid midpoint.
        const detail::Ranking ranked = detail::rank_values(lnF);
        auto rhs = [&risk](double u, double) { return risk(std::exp(u)); };
        std::vector<double> z;
        if (detail::sweep_levels(rhs, ranked.levels, lnF[F.size() / 2], 0.0, z) != detail::SweepFailure::none) {
            throw Error(Errc::ode_step_failure, "implied-view integral diverged");
        }
        for (std::size_t i = 0; i < F.size(); ++i) lnf[i] = z[ranked.rank[i]];
    }
    const double peak = *std::max_element(lnf.begin(), lnf.end());
    std::vector<double> bm(F.size());
    for (std::size_t i = 0; i < F.size(); ++i) bm[i] = std::exp(lnf[i] - peak) * market[i];
    return normalize(bm, market.grid());
}

}  // namespace qs
