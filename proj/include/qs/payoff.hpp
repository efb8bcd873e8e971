#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "qs/density.hpp"
#include "qs/error.hpp"
#include "qs/grid.hpp"

namespace qs {

inline constexpr double kBudgetTolerance = 1e-8;

/// Payout per unit invested on the grid of the market density it was priced
/// against. The budget residual quadrature(F * m) - 1 is recorded at construction.
class Payoff {
public:
    Payoff(const Density& market, std::vector<double> values) : grid_(market.grid()), values_(std::move(values)) {
        if (values_.size() != grid_.size()) {
            throw Error(Errc::length_mismatch, "payoff values and grid differ in length");
        }
        std::vector<double> priced(values_.size());
        for (std::size_t i = 0; i < values_.size(); ++i) {
            if (!std::isfinite(values_[i]) || values_[i] < 0.0) {
                throw Error(Errc::invalid_payoff, "payoff values must be finite and nonnegative");
            }
            priced[i] = values_[i] * market[i];
        }
        budget_residual_ = quadrature(priced, grid_) - 1.0;
    }

    /// F == 1: the bond.
    static Payoff bond(const Density& market) { return Payoff(market, std::vector<double>(market.size(), 1.0)); }

    const Grid& grid() const noexcept { return grid_; }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }
    std::size_t size() const noexcept { return values_.size(); }
    double budget_residual() const noexcept { return budget_residual_; }

private:
    Grid grid_;
    std::vector<double> values_;
    double budget_residual_ = 0.0;
};

}  // namespace qs
