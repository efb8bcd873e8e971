#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "qs/error.hpp"
#include "qs/grid.hpp"

namespace qs {

struct NormalParams {
    double mu = 0.0;
    double sigma = 1.0;
};

/// Lognormal in x: ln x ~ N(mu, sigma^2).
struct LognormalParams {
    double mu = 0.0;
    double sigma = 1.0;
};

struct MixtureComponent {
    std::variant<NormalParams, LognormalParams> dist;
    double weight = 1.0;
};

struct MixtureParams {
    std::vector<MixtureComponent> components;
};

using DensitySpec = std::variant<NormalParams, LognormalParams, MixtureParams>;

/// Truncated mass tolerated when sampling a parametric family onto a grid.
inline constexpr double kCoverageTolerance = 1e-6;
inline constexpr double kNormalizationTolerance = 1e-10;

/// Probability density sampled on a grid, unit mass under the trapezoid rule.
class Density {
public:
    Density(Grid grid, std::vector<double> values, std::optional<DensitySpec> source = std::nullopt)
        : grid_(std::move(grid)), values_(std::move(values)), source_(std::move(source)) {
        if (values_.size() != grid_.size()) {
            throw Error(Errc::length_mismatch, "density values and grid differ in length");
        }
        for (double v : values_) {
            if (!std::isfinite(v) || v < 0.0) {
                throw Error(Errc::negative_input, "density values must be finite and nonnegative");
            }
        }
        const double mass = quadrature(values_, grid_);
        if (std::abs(mass - 1.0) > kNormalizationTolerance) {
            throw Error(Errc::not_normalized, "density mass differs from 1");
        }
    }

    const Grid& grid() const noexcept { return grid_; }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }
    std::size_t size() const noexcept { return values_.size(); }

    /// Parametric family the density was sampled from, if any.
    const std::optional<DensitySpec>& source() const noexcept { return source_; }

private:
    Grid grid_;
    std::vector<double> values_;
    std::optional<DensitySpec> source_;
};

namespace detail {

inline double std_normal_lower_tail(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }
inline double std_normal_upper_tail(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

inline double pdf(const NormalParams& p, double x) {
    const double z = (x - p.mu) / p.sigma;
    return std::exp(-0.5 * z * z) / (p.sigma * std::sqrt(2.0 * std::numbers::pi));
}

inline double pdf(const LognormalParams& p, double x) {
    if (x <= 0.0) return 0.0;
    const double z = (std::log(x) - p.mu) / p.sigma;
    return std::exp(-0.5 * z * z) / (x * p.sigma * std::sqrt(2.0 * std::numbers::pi));
}

inline double mass_outside(const NormalParams& p, double lo, double hi) {
    return std_normal_lower_tail((lo - p.mu) / p.sigma) + std_normal_upper_tail((hi - p.mu) / p.sigma);
}

inline double mass_outside(const LognormalParams& p, double lo, double hi) {
    if (hi <= 0.0) return 1.0;
    const double lower = lo > 0.0 ? std_normal_lower_tail((std::log(lo) - p.mu) / p.sigma) : 0.0;
    return lower + std_normal_upper_tail((std::log(hi) - p.mu) / p.sigma);
}

template <class P>
void validate_scale(const P& p) {
    if (!std::isfinite(p.mu) || !std::isfinite(p.sigma) || !(p.sigma > 0.0)) {
        throw Error(Errc::invalid_params, "location must be finite and scale positive");
    }
}

inline void validate(const DensitySpec& spec) {
    std::visit(
        [](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, MixtureParams>) {
                if (p.components.empty()) throw Error(Errc::invalid_params, "mixture has no components");
                double total = 0.0;
                for (const auto& c : p.components) {
                    if (!std::isfinite(c.weight) || c.weight < 0.0) {
                        throw Error(Errc::invalid_params, "mixture weights must be nonnegative");
                    }
                    std::visit([](const auto& q) { validate_scale(q); }, c.dist);
                    total += c.weight;
                }
                if (std::abs(total - 1.0) > 1e-12) {
                    throw Error(Errc::invalid_params, "mixture weights must sum to 1");
                }
            } else {
                validate_scale(p);
            }
        },
        spec);
}

inline double spec_pdf(const DensitySpec& spec, double x) {
    return std::visit(
        [x](const auto& p) -> double {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, MixtureParams>) {
                double v = 0.0;
                for (const auto& c : p.components) {
                    v += c.weight * std::visit([x](const auto& q) { return pdf(q, x); }, c.dist);
                }
                return v;
            } else {
                return pdf(p, x);
            }
        },
        spec);
}

inline double spec_mass_outside(const DensitySpec& spec, double lo, double hi) {
    return std::visit(
        [lo, hi](const auto& p) -> double {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, MixtureParams>) {
                double v = 0.0;
                for (const auto& c : p.components) {
                    v += c.weight * std::visit([&](const auto& q) { return mass_outside(q, lo, hi); }, c.dist);
                }
                return v;
            } else {
                return mass_outside(p, lo, hi);
            }
        },
        spec);
}

}  // namespace detail

inline Density normalize(std::span<const double> values, const Grid& grid) {
    if (values.size() != grid.size()) {
        throw Error(Errc::length_mismatch, "values and grid differ in length");
    }
    for (double v : values) {
        if (!std::isfinite(v)) throw Error(Errc::negative_input, "values must be finite");
        if (v < 0.0) throw Error(Errc::negative_input, "values must be nonnegative");
    }
    const double mass = quadrature(values, grid);
    if (!(mass > 0.0)) throw Error(Errc::all_zero_input, "values carry no mass");
    std::vector<double> out(values.begin(), values.end());
    for (double& v : out) v /= mass;
    return Density(grid, std::move(out));
}

/// Samples a parametric family on the grid and renormalizes it to unit mass.
inline Density density_from_params(const DensitySpec& spec, const Grid& grid) {
    detail::validate(spec);
    const double lost = detail::spec_mass_outside(spec, grid.lo(), grid.hi());
    if (lost > kCoverageTolerance) {
        throw Error(Errc::insufficient_grid_coverage,
                    "grid span truncates " + std::to_string(lost) + " of the probability mass");
    }
    std::vector<double> vals(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) vals[i] = detail::spec_pdf(spec, grid[i]);
    Density d = normalize(vals, grid);
    return Density(grid, std::vector<double>(d.values().begin(), d.values().end()), spec);
}

struct Moments {
    double mean = 0.0;
    double variance = 0.0;
    double skewness = 0.0;
};

inline Moments moments(const Density& d) {
    const auto x = d.grid().points();
    const auto p = d.values();
    std::vector<double> tmp(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) tmp[i] = x[i] * p[i];
    Moments m;
    m.mean = quadrature(tmp, d.grid());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - m.mean;
        tmp[i] = dx * dx * p[i];
    }
    m.variance = quadrature(tmp, d.grid());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - m.mean;
        tmp[i] = dx * dx * dx * p[i];
    }
    m.skewness = m.variance > 0.0 ? quadrature(tmp, d.grid()) / std::pow(m.variance, 1.5) : 0.0;
    return m;
}

}  // namespace qs
