#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>

#include "qs/error.hpp"

namespace qs {

/// Relative risk aversion: either a constant or a function of the wealth level F.
class RiskProfile {
public:
    enum class Kind { constant, wealth_dependent };

    static RiskProfile constant(double R) {
        if (!std::isfinite(R) || !(R > 0.0)) {
            throw Error(Errc::nonpositive_R, "risk aversion must be positive and finite");
        }
        RiskProfile p;
        p.kind_ = Kind::constant;
        p.constant_ = R;
        p.label_ = "constant";
        return p;
    }

    static RiskProfile wealth_dependent(std::function<double(double)> fn, std::string label) {
        RiskProfile p;
        p.kind_ = Kind::wealth_dependent;
        p.fn_ = std::move(fn);
        p.label_ = std::move(label);
        return p;
    }

    /// R(F) = r0 + r1 * F.
    static RiskProfile affine(double r0, double r1) {
        if (!std::isfinite(r0) || !std::isfinite(r1) || !(r0 > 0.0) || r1 < 0.0) {
            throw Error(Errc::nonpositive_R, "affine profile needs r0 > 0 and r1 >= 0");
        }
        return wealth_dependent([r0, r1](double F) { return r0 + r1 * F; }, "affine");
    }

    Kind kind() const noexcept { return kind_; }
    bool is_constant() const noexcept { return kind_ == Kind::constant; }
    double constant_value() const noexcept { return constant_; }
    const std::string& label() const noexcept { return label_; }

    /// R at wealth F. Throws nonpositive-R for a nonpositive or non-finite value.
    double operator()(double F) const {
        if (kind_ == Kind::constant) return constant_;
        const double r = fn_(F);
        if (!std::isfinite(r) || !(r > 0.0)) {
            throw Error(Errc::nonpositive_R, "risk profile is not positive at F = " + std::to_string(F));
        }
        return r;
    }

private:
    RiskProfile() = default;
    Kind kind_ = Kind::constant;
    double constant_ = 1.0;
    std::function<double(double)> fn_;
    std::string label_;
};

/// Increasing, strictly concave utility of wealth on (0, inf).
class Utility {
public:
    enum class Kind { crra, custom };
    using Fn = std::function<double(double)>;

    /// `rra`, when given, is a closed form of -F U''(F) / U'(F) used instead of
    /// the ratio of derivatives (which underflows for exponential-type utilities).
    static Utility custom(Fn u, Fn du, Fn d2u, std::string label, Fn rra = {}) {
        Utility out;
        out.rra_ = std::move(rra);
        out.kind_ = Kind::custom;
        out.u_ = std::move(u);
        out.du_ = std::move(du);
        out.d2u_ = std::move(d2u);
        out.label_ = std::move(label);
        // Probe a log-spaced set of wealth levels from 1e-3 to 1e3.
        for (int k = -30; k <= 30; ++k) {
            const double F = std::pow(10.0, 0.1 * k);
            const double d1 = out.du_(F);
            const double d2 = out.d2u_(F);
            // Exponential-type utilities underflow to U' = U'' = 0 at large F; that is not a violation.
            const bool underflow = d1 == 0.0 && d2 == 0.0;
            if (!std::isfinite(d1) || !std::isfinite(d2) || (!underflow && (!(d1 > 0.0) || !(d2 < 0.0)))) {
                throw Error(Errc::nonconcave_utility,
                            "utility must be strictly increasing and concave (failed at F = " + std::to_string(F) + ")");
            }
        }
        return out;
    }

    Kind kind() const noexcept { return kind_; }
    /// Relative risk aversion for crra utilities.
    double crra_R() const noexcept { return R_; }
    const std::string& label() const noexcept { return label_; }

    double value(double F) const {
        if (kind_ == Kind::custom) return u_(F);
        return R_ == 1.0 ? std::log(F) : std::pow(F, 1.0 - R_) / (1.0 - R_);
    }
    double marginal(double F) const {
        if (kind_ == Kind::custom) return du_(F);
        return R_ == 1.0 ? 1.0 / F : std::pow(F, -R_);
    }
    double curvature(double F) const {
        if (kind_ == Kind::custom) return d2u_(F);
        return -R_ * std::pow(F, -R_ - 1.0);
    }
    const Fn& closed_form_rra() const noexcept { return rra_; }

private:
    friend Utility crra_utility(double R);
    Utility() = default;
    Kind kind_ = Kind::crra;
    double R_ = 1.0;
    Fn u_, du_, d2u_, rra_;
    std::string label_;
};

/// U(F) = F^(1-R)/(1-R), or ln F at R = 1.
inline Utility crra_utility(double R) {
    if (!std::isfinite(R) || !(R > 0.0)) {
        throw Error(Errc::nonpositive_R, "crra utility needs R > 0");
    }
    Utility u;
    u.kind_ = Utility::Kind::crra;
    u.R_ = R;
    u.label_ = "crra";
    return u;
}

inline Utility log_utility_custom() {
    return Utility::custom([](double F) { return std::log(F); }, [](double F) { return 1.0 / F; },
                           [](double F) { return -1.0 / (F * F); }, "log");
}

/// U(F) = -exp(-a F); relative risk aversion a * F.
inline Utility exponential_utility(double a) {
    if (!std::isfinite(a) || !(a > 0.0)) {
        throw Error(Errc::invalid_params, "exponential utility needs a > 0");
    }
    return Utility::custom([a](double F) { return -std::exp(-a * F); },
                           [a](double F) { return a * std::exp(-a * F); },
                           [a](double F) { return -a * a * std::exp(-a * F); }, "exponential",
                           [a](double F) { return a * F; });
}

/// R(F) = -F U''(F) / U'(F). Constant for crra utilities.
inline RiskProfile arrow_pratt_R(const Utility& u) {
    if (u.kind() == Utility::Kind::crra) return RiskProfile::constant(u.crra_R());
    if (u.closed_form_rra()) return RiskProfile::wealth_dependent(u.closed_form_rra(), "arrow-pratt(" + u.label() + ")");
    return RiskProfile::wealth_dependent(
        [u](double F) {
            const double d1 = u.marginal(F);
            const double d2 = u.curvature(F);
            if (!(d2 < 0.0) || !(d1 > 0.0)) {
                throw Error(Errc::nonconcave_utility, "U'' >= 0 or U' <= 0 at F = " + std::to_string(F));
            }
            return -F * d2 / d1;
        },
        "arrow-pratt(" + u.label() + ")");
}

}  // namespace qs
