#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "qs/density.hpp"
#include "qs/error.hpp"
#include "qs/grid.hpp"

namespace qs {

struct Window {
    double a = 0.0;
    double b = 0.0;
    bool contains(double x) const noexcept { return a <= x && x <= b; }
};

/// Multiplicative update factor on a grid. Only its shape matters: two
/// likelihoods that differ by a positive constant express the same view.
class Likelihood {
public:
    Likelihood(Grid grid, std::vector<double> values, std::optional<Window> window = std::nullopt)
        : grid_(std::move(grid)), values_(std::move(values)), window_(window) {
        if (values_.size() != grid_.size()) {
            throw Error(Errc::length_mismatch, "likelihood values and grid differ in length");
        }
        for (double v : values_) {
            if (!std::isfinite(v) || !(v > 0.0)) {
                throw Error(Errc::invalid_likelihood, "likelihood values must be finite and positive");
            }
        }
        if (window_) {
            for (std::size_t i = 0; i < values_.size(); ++i) {
                if (!window_->contains(grid_[i]) && values_[i] != 1.0) {
                    throw Error(Errc::invalid_likelihood, "windowed likelihood must be 1 outside its window");
                }
            }
        }
    }

    /// The view that carries no information.
    static Likelihood unit(const Grid& grid) { return Likelihood(grid, std::vector<double>(grid.size(), 1.0)); }

    const Grid& grid() const noexcept { return grid_; }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }
    const std::optional<Window>& window() const noexcept { return window_; }

private:
    Grid grid_;
    std::vector<double> values_;
    std::optional<Window> window_;
};

/// Posterior masses below this fraction of the likelihood's peak count as annihilated.
inline constexpr double kPosteriorMassFloor = 1e-200;

inline Density bayes_update(const Density& prior, const Likelihood& lik) {
    require_same_grid(prior.grid(), lik.grid());
    std::vector<double> post(prior.size());
    for (std::size_t i = 0; i < post.size(); ++i) post[i] = prior[i] * lik[i];
    const double mass = quadrature(post, prior.grid());
    const double peak = *std::max_element(lik.values().begin(), lik.values().end());
    if (!(mass > kPosteriorMassFloor * peak) || !std::isfinite(mass)) {
        throw Error(Errc::zero_posterior_mass, "likelihood removes all prior mass");
    }
    for (double& v : post) v /= mass;
    return Density(prior.grid(), std::move(post));
}

/// Pointwise product. The result is windowed by the hull of the member windows
/// only when every member is windowed.
inline Likelihood compose(std::span<const Likelihood> liks) {
    if (liks.empty()) throw Error(Errc::empty_list, "compose needs at least one likelihood");
    const Grid& grid = liks.front().grid();
    std::vector<double> vals(grid.size(), 1.0);
    std::optional<Window> hull = liks.front().window();
    for (const auto& l : liks) {
        require_same_grid(grid, l.grid());
        for (std::size_t i = 0; i < vals.size(); ++i) vals[i] *= l[i];
        if (hull && l.window()) {
            hull = Window{std::min(hull->a, l.window()->a), std::max(hull->b, l.window()->b)};
        } else {
            hull.reset();
        }
    }
    // Products of many extreme factors can overflow or underflow; keep the shape.
    const double peak = *std::max_element(vals.begin(), vals.end());
    if (!std::isfinite(peak) || !(peak > 0.0)) {
        throw Error(Errc::invalid_likelihood, "composed likelihood is not representable");
    }
    return Likelihood(grid, std::move(vals), hull);
}

/// The likelihood that turns p into b.
inline Likelihood likelihood_between(const Density& b, const Density& p) {
    require_same_grid(b.grid(), p.grid());
    std::vector<double> vals(p.size());
    for (std::size_t i = 0; i < vals.size(); ++i) {
        if (!(p[i] > 0.0)) throw Error(Errc::zero_prior_point, "prior density vanishes at a grid point");
        vals[i] = b[i] / p[i];
    }
    return Likelihood(p.grid(), std::move(vals));
}

/// Rescales a likelihood so it equals 1 at the grid midpoint.
inline std::vector<double> midpoint_scaled(const Likelihood& lik) {
    const double ref = lik[lik.grid().size() / 2];
    std::vector<double> out(lik.values().begin(), lik.values().end());
    for (double& v : out) v /= ref;
    return out;
}

/// "Volatility will realize at target_sigma" against a lognormal market. The
/// believed lognormal keeps the market forward E[x] fixed.
inline Likelihood view_vol(const Density& market, double target_sigma) {
    if (!std::isfinite(target_sigma) || !(target_sigma > 0.0)) {
        throw Error(Errc::invalid_sigma, "target volatility must be positive");
    }
    const auto* src = market.source() ? std::get_if<LognormalParams>(&*market.source()) : nullptr;
    if (src == nullptr) {
        throw Error(Errc::invalid_params, "vol view needs a lognormal market density");
    }
    LognormalParams believed{src->mu + 0.5 * (src->sigma * src->sigma - target_sigma * target_sigma), target_sigma};
    return likelihood_between(density_from_params(believed, market.grid()), market);
}

/// Restricts a view to [a, b]; outside the window the likelihood is exactly 1.
inline Likelihood view_windowed(const Likelihood& lik, double a, double b) {
    const Grid& grid = lik.grid();
    if (!(a < b) || a < grid.lo() || b > grid.hi()) {
        throw Error(Errc::window_outside_grid, "window must satisfy lo <= a < b <= hi");
    }
    const Window w{a, b};
    std::vector<double> vals(lik.values().begin(), lik.values().end());
    for (std::size_t i = 0; i < vals.size(); ++i) {
        if (!w.contains(grid[i])) vals[i] = 1.0;
    }
    return Likelihood(grid, std::move(vals), w);
}

/// Likelihood from raw samples, linearly interpolated onto the grid. Grid points
/// outside the sampled range carry no view (value 1, window = sampled range).
inline Likelihood view_table(const Grid& grid, std::span<const double> xs, std::span<const double> values) {
    if (xs.size() != values.size()) throw Error(Errc::length_mismatch, "table x and values differ in length");
    if (xs.size() < 2) throw Error(Errc::invalid_count, "table needs at least two samples");
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!std::isfinite(xs[i]) || (i > 0 && !(xs[i] > xs[i - 1]))) {
            throw Error(Errc::invalid_range, "table x must be finite and strictly increasing");
        }
        if (!std::isfinite(values[i]) || !(values[i] > 0.0)) {
            throw Error(Errc::invalid_likelihood, "table values must be finite and positive");
        }
    }
    std::vector<double> vals(grid.size(), 1.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = grid[i];
        if (x < xs.front() || x > xs.back()) continue;
        auto it = std::upper_bound(xs.begin(), xs.end(), x);
        if (it == xs.end()) {
            vals[i] = values.back();
            continue;
        }
        const std::size_t k = static_cast<std::size_t>(it - xs.begin());
        const double t = (x - xs[k - 1]) / (xs[k] - xs[k - 1]);
        vals[i] = values[k - 1] + t * (values[k] - values[k - 1]);
    }
    const double a = std::max(xs.front(), grid.lo());
    const double b = std::min(xs.back(), grid.hi());
    if (!(a < b)) throw Error(Errc::window_outside_grid, "table does not overlap the grid");
    return Likelihood(grid, std::move(vals), Window{a, b});
}

}  // namespace qs
