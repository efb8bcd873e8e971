#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "qs/error.hpp"

namespace qs {

enum class Spacing { linear, logarithmic };

/// Strictly increasing abscissae of the underlying variable. Copies share the
/// point storage, so passing a Grid by value is cheap.
class Grid {
public:
    Grid(std::vector<double> points, Spacing spacing = Spacing::linear) : spacing_(spacing) {
        if (points.size() < 3) {
            throw Error(Errc::invalid_count, "grid needs at least 3 points");
        }
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (!std::isfinite(points[i])) {
                throw Error(Errc::invalid_range, "grid point is not finite");
            }
            if (i > 0 && !(points[i] > points[i - 1])) {
                throw Error(Errc::invalid_range, "grid points must be strictly increasing");
            }
        }
        if (spacing == Spacing::logarithmic && !(points.front() > 0.0)) {
            throw Error(Errc::invalid_range, "logarithmic grid requires positive points");
        }
        points_ = std::make_shared<const std::vector<double>>(std::move(points));
    }

    std::span<const double> points() const noexcept { return *points_; }
    std::size_t size() const noexcept { return points_->size(); }
    double operator[](std::size_t i) const noexcept { return (*points_)[i]; }
    double lo() const noexcept { return points_->front(); }
    double hi() const noexcept { return points_->back(); }
    Spacing spacing() const noexcept { return spacing_; }

    friend bool operator==(const Grid& a, const Grid& b) noexcept {
        return a.points_ == b.points_ || *a.points_ == *b.points_;
    }

private:
    std::shared_ptr<const std::vector<double>> points_;
    Spacing spacing_;
};

inline Grid make_grid(double lo, double hi, std::size_t n, Spacing spacing) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
        throw Error(Errc::invalid_range, "grid requires finite lo < hi");
    }
    if (n < 3) {
        throw Error(Errc::invalid_count, "grid needs at least 3 points");
    }
    if (spacing == Spacing::logarithmic && !(lo > 0.0)) {
        throw Error(Errc::invalid_range, "logarithmic grid requires lo > 0");
    }
    std::vector<double> pts(n);
    const double last = static_cast<double>(n - 1);
    if (spacing == Spacing::linear) {
        const double h = (hi - lo) / last;
        for (std::size_t i = 0; i < n; ++i) pts[i] = lo + h * static_cast<double>(i);
    } else {
        const double llo = std::log(lo);
        const double lh = (std::log(hi) - llo) / last;
        for (std::size_t i = 0; i < n; ++i) pts[i] = std::exp(llo + lh * static_cast<double>(i));
    }
    pts.front() = lo;
    pts.back() = hi;
    return Grid(std::move(pts), spacing);
}

inline void require_same_grid(const Grid& a, const Grid& b) {
    if (!(a == b)) throw Error(Errc::grid_mismatch, "functions live on different grids");
}

/// Trapezoid rule over the grid span.
inline double quadrature(std::span<const double> values, const Grid& grid) {
    if (values.size() != grid.size()) {
        throw Error(Errc::length_mismatch, "values and grid differ in length");
    }
    const auto x = grid.points();
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        sum += 0.5 * (x[i + 1] - x[i]) * (values[i] + values[i + 1]);
    }
    return sum;
}

/// Per-point weights w with sum(w[i] * v[i]) == quadrature(v, grid).
inline std::vector<double> trapezoid_weights(const Grid& grid) {
    const auto x = grid.points();
    std::vector<double> w(x.size(), 0.0);
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        const double half = 0.5 * (x[i + 1] - x[i]);
        w[i] += half;
        w[i + 1] += half;
    }
    return w;
}

}  // namespace qs
