#pragma once

// End-to-end pipelines behind the `qs` subcommands and the HTTP endpoints.
// Both front ends call these, so identical inputs give identical numbers.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "qs/analytics.hpp"
#include "qs/density.hpp"
#include "qs/io.hpp"
#include "qs/structuring.hpp"
#include "qs/utility.hpp"
#include "qs/views.hpp"

namespace qs::app {

using nlohmann::json;

inline json default_design_config() {
    return {{"grid", {{"lo", 0.2}, {"hi", 5.0}, {"n", 1001}, {"spacing", "log"}}},
            {"market", {{"family", "lognormal"}, {"params", {{"mu", 0.0}, {"sigma", 0.2}}}}},
            {"views", json::array()},
            {"risk", 1.0},
            {"out", "out"}};
}

inline json risk_to_json(const json& risk_spec, const RiskProfile& risk) {
    json j{{"kind", risk.is_constant() ? "constant" : "wealth-dependent"}, {"spec", risk_spec}};
    if (risk.is_constant()) j["R"] = risk.constant_value();
    else j["label"] = risk.label();
    return j;
}

struct DesignOutcome {
    Density market;
    Design design;
    json diagnostics;
};

/// `problem` carries "grid", "market", "views" (array) and "risk".
inline DesignOutcome run_design(const json& problem) {
    const Grid grid = io::parse_grid(io::detail::require(problem, "grid"));
    Density market = density_from_params(io::parse_density_spec(io::detail::require(problem, "market")), grid);
    const json views_spec = problem.contains("views") ? problem.at("views") : json::array();
    const std::vector<Likelihood> views = io::parse_views(views_spec, market);
    const json risk_spec = io::detail::require(problem, "risk");
    const RiskProfile risk = io::parse_risk(risk_spec);
    Design d = design(market, views, risk);
    json diag{{"budget_residual", d.payoff.budget_residual()},
              {"growth_rate", growth_rate(d.payoff, d.believed)},
              {"growth_rate_f", growth_rate(d.growth_optimal, d.believed)},
              {"kl_b_m", kl_divergence(d.believed, market)},
              {"r_profile", risk_to_json(risk_spec, risk)},
              {"views", views.size()}};
    return DesignOutcome{std::move(market), std::move(d), std::move(diag)};
}

inline std::vector<double> to_vector(std::span<const double> s) { return {s.begin(), s.end()}; }

inline json design_response(const DesignOutcome& out) {
    return {{"x", to_vector(out.market.grid().points())},
            {"f", to_vector(out.design.growth_optimal.values())},
            {"F", to_vector(out.design.payoff.values())},
            {"b", to_vector(out.design.believed.values())},
            {"m", to_vector(out.market.values())},
            {"diagnostics", out.diagnostics}};
}

inline void write_json_file(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io::ConfigError("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

/// payoff.csv (x,f,F), believed.csv (x,b,m) and diagnostics.json under `dir`.
inline void write_design_files(const DesignOutcome& out, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw io::ConfigError("cannot create " + dir.string());
    const auto x = to_vector(out.market.grid().points());
    io::write_csv_file((dir / "payoff.csv").string(),
                       {{"x", "f", "F"}, {x, to_vector(out.design.growth_optimal.values()), to_vector(out.design.payoff.values())}});
    io::write_csv_file((dir / "believed.csv").string(),
                       {{"x", "b", "m"}, {x, to_vector(out.design.believed.values()), to_vector(out.market.values())}});
    write_json_file(dir / "diagnostics.json", out.diagnostics);
}

struct ImpliedOutcome {
    Density market;
    Density believed;
    json summary;
};

inline json moments_json(const Density& d) {
    const Moments mo = moments(d);
    return {{"mean", mo.mean}, {"variance", mo.variance}, {"skewness", mo.skewness}};
}

/// Views implied by payoff F(x) for a market spec and risk spec.
inline ImpliedOutcome run_implied(std::vector<double> x, std::vector<double> F, const json& market_spec,
                                  const json& risk_spec) {
    if (x.size() != F.size()) throw io::ConfigError("payoff x and F differ in length");
    const Grid grid = io::grid_from_points(std::move(x));
    Density market = density_from_params(io::parse_density_spec(market_spec), grid);
    const RiskProfile risk = io::parse_risk(risk_spec);
    for (double v : F) {
        if (!(v > 0.0)) throw Error(Errc::nonpositive_payoff, "implied views need F > 0 everywhere");
    }
    const Payoff payoff(market, std::move(F));
    Density believed = implied_views(payoff, risk, market);
    json summary{{"believed", moments_json(believed)},
                 {"market", moments_json(market)},
                 {"kl_b_m", kl_divergence(believed, market)},
                 {"payoff_budget_residual", payoff.budget_residual()},
                 {"r_profile", risk_to_json(risk_spec, risk)}};
    return ImpliedOutcome{std::move(market), std::move(believed), std::move(summary)};
}

inline json implied_response(const ImpliedOutcome& out) {
    return {{"x", to_vector(out.market.grid().points())},
            {"b", to_vector(out.believed.values())},
            {"m", to_vector(out.market.values())},
            {"summary", out.summary}};
}

/// implied.csv (x,b,m) and summary.json under `dir`.
inline void write_implied_files(const ImpliedOutcome& out, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw io::ConfigError("cannot create " + dir.string());
    io::write_csv_file((dir / "implied.csv").string(),
                       {{"x", "b", "m"},
                        {to_vector(out.market.grid().points()), to_vector(out.believed.values()), to_vector(out.market.values())}});
    write_json_file(dir / "summary.json", out.summary);
}

/// Payoff column of a CSV: "F" if present, otherwise the last column.
inline std::pair<std::vector<double>, std::vector<double>> payoff_columns(const io::Table& t) {
    const auto* x = t.find("x");
    if (!x) throw io::ConfigError("payoff CSV needs an \"x\" column");
    const auto* F = t.find("F");
    if (!F) {
        if (t.names.size() < 2) throw io::ConfigError("payoff CSV needs a payoff column");
        F = &t.columns.back();
    }
    return {*x, *F};
}

struct ProductInput {
    std::string name;
    std::vector<double> x;
    std::vector<double> F;
};

struct CompareOutcome {
    std::vector<ComparisonRow> rows;
};

/// Products share one grid (taken from the first); views and utility are applied on it.
inline CompareOutcome run_compare(const std::vector<ProductInput>& products, const json& market_spec,
                                  const json& views_spec, const json& utility_spec) {
    if (products.empty()) throw io::ConfigError("compare needs at least one product");
    const Grid grid = io::grid_from_points(products.front().x);
    const Density market = density_from_params(io::parse_density_spec(market_spec), grid);
    const auto views = io::parse_views(views_spec, market);
    const Density believed = views.empty() ? market : bayes_update(market, compose(views));
    const Utility u = io::parse_utility(utility_spec);
    std::vector<NamedPayoff> named;
    for (const auto& p : products) {
        if (p.x != products.front().x) throw Error(Errc::grid_mismatch, "product " + p.name + " uses a different grid");
        named.push_back({p.name, Payoff(market, p.F)});
    }
    return CompareOutcome{compare(named, believed, market, u)};
}

inline json compare_json(const CompareOutcome& out) {
    json rows = json::array();
    for (const auto& r : out.rows) {
        rows.push_back({{"name", r.name},
                        {"budget_residual", r.budget_residual},
                        {"expected_utility", r.expected_utility},
                        {"growth_rate", r.growth_rate},
                        {"certainty_equivalent", r.certainty_equivalent},
                        {"implied_kl", r.implied_kl ? json(*r.implied_kl) : json(nullptr)}});
    }
    return rows;
}

inline std::string compare_table(const CompareOutcome& out) {
    std::ostringstream os;
    std::size_t width = 7;
    for (const auto& r : out.rows) width = std::max(width, r.name.size());
    auto cell = [&](double v) { os << ' ' << std::setw(14) << std::setprecision(6) << std::scientific << v; };
    os << std::left << std::setw(static_cast<int>(width)) << "product" << std::right;
    for (const char* h : {"budget_resid", "exp_utility", "growth_rate", "cert_equiv", "implied_kl"}) {
        os << ' ' << std::setw(14) << h;
    }
    os << '\n';
    for (const auto& r : out.rows) {
        os << std::left << std::setw(static_cast<int>(width)) << r.name << std::right;
        cell(r.budget_residual);
        cell(r.expected_utility);
        cell(r.growth_rate);
        cell(r.certainty_equivalent);
        if (r.implied_kl) cell(*r.implied_kl);
        else os << ' ' << std::setw(14) << "n/a";
        os << '\n';
    }
    return os.str();
}

}  // namespace qs::app
