#pragma once

#include <stdexcept>
#include <string>

namespace qs {

/// Failure categories raised by the numerical library. Each maps to a stable
/// kebab-case name that the CLI and the HTTP service report verbatim.
enum class Errc {
    invalid_range,
    invalid_count,
    length_mismatch,
    invalid_params,
    insufficient_grid_coverage,
    not_normalized,
    all_zero_input,
    negative_input,
    grid_mismatch,
    zero_posterior_mass,
    empty_list,
    zero_prior_point,
    invalid_sigma,
    invalid_likelihood,
    window_outside_grid,
    zero_market_density,
    invalid_payoff,
    nonpositive_R,
    budget_bracket_failure,
    ode_step_failure,
    nonpositive_payoff,
    nonconcave_utility,
    bracket_failure,
    inverse_marginal_failure,
    domain_violation,
    absolute_continuity_violation,
};

constexpr const char* errc_name(Errc code) noexcept {
    switch (code) {
    case Errc::invalid_range: return "invalid-range";
    case Errc::invalid_count: return "invalid-count";
    case Errc::length_mismatch: return "length-mismatch";
    case Errc::invalid_params: return "invalid-params";
    case Errc::insufficient_grid_coverage: return "insufficient-grid-coverage";
    case Errc::not_normalized: return "not-normalized";
    case Errc::all_zero_input: return "all-zero-input";
    case Errc::negative_input: return "negative-input";
    case Errc::grid_mismatch: return "grid-mismatch";
    case Errc::zero_posterior_mass: return "zero-posterior-mass";
    case Errc::empty_list: return "empty-list";
    case Errc::zero_prior_point: return "zero-prior-point";
    case Errc::invalid_sigma: return "invalid-sigma";
    case Errc::invalid_likelihood: return "invalid-likelihood";
    case Errc::window_outside_grid: return "window-outside-grid";
    case Errc::zero_market_density: return "zero-market-density";
    case Errc::invalid_payoff: return "invalid-payoff";
    case Errc::nonpositive_R: return "nonpositive-R";
    case Errc::budget_bracket_failure: return "budget-bracket-failure";
    case Errc::ode_step_failure: return "ode-step-failure";
    case Errc::nonpositive_payoff: return "nonpositive-payoff";
    case Errc::nonconcave_utility: return "nonconcave-utility";
    case Errc::bracket_failure: return "bracket-failure";
    case Errc::inverse_marginal_failure: return "inverse-marginal-failure";
    case Errc::domain_violation: return "domain-violation";
    case Errc::absolute_continuity_violation: return "absolute-continuity-violation";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& detail)
        : std::runtime_error(std::string(errc_name(code)) + ": " + detail), code_(code), detail_(detail) {}

    Errc code() const noexcept { return code_; }
    const char* name() const noexcept { return errc_name(code_); }
    const std::string& detail() const noexcept { return detail_; }

private:
    Errc code_;
    std::string detail_;
};

}  // namespace qs
