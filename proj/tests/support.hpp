#pragma once

// Closed forms and helpers used as independent references by the tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <vector>

namespace qs::testing {

inline double normal_pdf(double x, double mu, double sigma) {
    const double z = (x - mu) / sigma;
    return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

inline double lognormal_pdf(double x, double mu, double sigma) {
    return x > 0.0 ? normal_pdf(std::log(x), mu, sigma) / x : 0.0;
}

inline double sup_norm_diff(std::span<const double> a, std::span<const double> b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

inline double max_relative_spread(std::span<const double> v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return (*hi - *lo) / std::abs(*hi);
}

/// Plain left-to-right trapezoid sum, written out independently of the library.
inline double trapezoid(std::span<const double> x, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) s += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
    return s;
}

using Rng = std::mt19937_64;
inline constexpr std::uint64_t kSeed = 20141014;

}  // namespace qs::testing

#define EXPECT_QS_ERROR(stmt, errc)                                                 \
    do {                                                                            \
        try {                                                                       \
            (void)(stmt);                                                           \
            ADD_FAILURE() << "expected " << ::qs::errc_name(errc) << ", no throw";  \
        } catch (const ::qs::Error& e) {                                            \
            EXPECT_EQ(e.code(), errc) << e.what();                                  \
        }                                                                           \
    } while (0)
