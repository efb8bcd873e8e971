#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qs/density.hpp"
#include "qs/error.hpp"
#include "qs/payoff.hpp"
#include "qs/structuring.hpp"
#include "qs/utility.hpp"

namespace qs {

/// quadrature(b * U(F)); points with b == 0 do not contribute.
inline double expected_utility(const Payoff& F, const Density& b, const Utility& u) {
    require_same_grid(F.grid(), b.grid());
    std::vector<double> integrand(F.size(), 0.0);
    for (std::size_t i = 0; i < F.size(); ++i) {
        if (b[i] == 0.0) continue;
        const double v = u.value(F[i]);
        if (!std::isfinite(v)) throw Error(Errc::domain_violation, "utility is not finite at F = " + std::to_string(F[i]));
        integrand[i] = b[i] * v;
    }
    return quadrature(integrand, b.grid());
}

/// Expected log return per unit invested.
inline double growth_rate(const Payoff& F, const Density& b) {
    require_same_grid(F.grid(), b.grid());
    std::vector<double> integrand(F.size(), 0.0);
    for (std::size_t i = 0; i < F.size(); ++i) {
        if (b[i] == 0.0) continue;
        if (!(F[i] > 0.0)) throw Error(Errc::domain_violation, "payoff vanishes where the believed density does not");
        integrand[i] = b[i] * std::log(F[i]);
    }
    return quadrature(integrand, b.grid());
}

/// quadrature(b * ln(b / m)) with 0 ln 0 = 0.
inline double kl_divergence(const Density& b, const Density& m) {
    require_same_grid(b.grid(), m.grid());
    std::vector<double> integrand(b.size(), 0.0);
    for (std::size_t i = 0; i < b.size(); ++i) {
        if (b[i] == 0.0) continue;
        if (!(m[i] > 0.0)) {
            throw Error(Errc::absolute_continuity_violation, "believed mass where the market density vanishes");
        }
        integrand[i] = b[i] * std::log(b[i] / m[i]);
    }
    return quadrature(integrand, b.grid());
}

inline double certainty_equivalent(const Payoff& F, const Density& b, const Utility& u) {
    const double eu = expected_utility(F, b, u);
    if (u.kind() == Utility::Kind::crra) {
        const double R = u.crra_R();
        if (R == 1.0) return std::exp(eu);
        const double base = (1.0 - R) * eu;
        if (!(base > 0.0)) throw Error(Errc::domain_violation, "expected utility outside the range of U");
        return std::pow(base, 1.0 / (1.0 - R));
    }
    // U is increasing: bisect in ln F.
    double lo = -690.0, hi = 690.0;
    if (!(u.value(std::exp(lo)) <= eu && u.value(std::exp(hi)) >= eu)) {
        throw Error(Errc::domain_violation, "expected utility outside the range of U");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        (u.value(std::exp(mid)) < eu ? lo : hi) = mid;
    }
    return std::exp(0.5 * (lo + hi));
}

struct NamedPayoff {
    std::string name;
    Payoff payoff;
};

struct ComparisonRow {
    std::string name;
    double budget_residual = 0.0;
    double expected_utility = 0.0;
    double growth_rate = 0.0;
    double certainty_equivalent = 0.0;
    /// KL(implied views || m); empty when the payoff is not strictly positive.
    std::optional<double> implied_kl;
};

/// One row per product, best expected utility first. Ties keep input order.
inline std::vector<ComparisonRow> compare(std::span<const NamedPayoff> products, const Density& b, const Density& m,
                                          const Utility& u) {
    require_same_grid(b.grid(), m.grid());
    const RiskProfile risk = arrow_pratt_R(u);
    std::vector<ComparisonRow> rows;
    rows.reserve(products.size());
    for (const auto& p : products) {
        require_same_grid(p.payoff.grid(), m.grid());
        const Payoff priced(m, std::vector<double>(p.payoff.values().begin(), p.payoff.values().end()));
        ComparisonRow row;
        row.name = p.name;
        row.budget_residual = priced.budget_residual();
        row.expected_utility = expected_utility(priced, b, u);
        row.growth_rate = growth_rate(priced, b);
        row.certainty_equivalent = certainty_equivalent(priced, b, u);
        const bool positive = std::all_of(priced.values().begin(), priced.values().end(), [](double v) { return v > 0.0; });
        if (positive) row.implied_kl = kl_divergence(implied_views(priced, risk, m), m);
        rows.push_back(std::move(row));
    }
    std::stable_sort(rows.begin(), rows.end(),
                     [](const ComparisonRow& x, const ComparisonRow& y) { return x.expected_utility > y.expected_utility; });
    return rows;
}

}  // namespace qs
