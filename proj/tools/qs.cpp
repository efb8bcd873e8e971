// qs: design, implied, compare and serve subcommands.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "httplib.h"
#include "json.hpp"
#include "qs/app.hpp"
#include "qs/io.hpp"
#include "qs/service.hpp"

namespace {

using nlohmann::json;

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitPortInUse = 4;

void configure_logging() {
    const char* level = std::getenv("QS_LOG");
    spdlog::set_level(level ? spdlog::level::from_str(level) : spdlog::level::warn);
    spdlog::set_pattern("[%l] %v");
}

struct DesignArgs {
    std::string config, market, views, risk, grid, out;
};

int run_design(const DesignArgs& a) {
    json problem = qs::app::default_design_config();
    if (!a.config.empty()) {
        const json cfg = qs::io::load_json_arg(a.config);
        if (!cfg.is_object()) throw qs::io::ConfigError("config must be a JSON object");
        for (auto it = cfg.begin(); it != cfg.end(); ++it) problem[it.key()] = it.value();
    }
    if (!a.grid.empty()) problem["grid"] = qs::io::load_json_arg(a.grid);
    if (!a.market.empty()) problem["market"] = qs::io::load_json_arg(a.market);
    if (!a.views.empty()) problem["views"] = qs::io::load_json_arg(a.views);
    if (!a.risk.empty()) problem["risk"] = qs::io::load_json_arg(a.risk);
    if (!a.out.empty()) problem["out"] = a.out;
    spdlog::debug("design problem: {}", problem.dump());

    const auto outcome = qs::app::run_design(problem);
    const std::string dir = problem.at("out").get<std::string>();
    qs::app::write_design_files(outcome, dir);
    spdlog::info("wrote payoff.csv, believed.csv, diagnostics.json to {}", dir);
    std::cout << outcome.diagnostics.dump(2) << '\n';
    return 0;
}

struct ImpliedArgs {
    std::string payoff, market, risk = "1", out = "out";
};

int run_implied(const ImpliedArgs& a) {
    const json defaults = qs::app::default_design_config();
    auto [x, F] = qs::app::payoff_columns(qs::io::read_csv_file(a.payoff));
    const json market = a.market.empty() ? defaults.at("market") : qs::io::load_json_arg(a.market);
    const auto outcome = qs::app::run_implied(std::move(x), std::move(F), market, qs::io::load_json_arg(a.risk));
    qs::app::write_implied_files(outcome, a.out);
    std::cout << outcome.summary.dump(2) << '\n';
    return 0;
}

struct CompareArgs {
    std::vector<std::string> payoffs;
    bool bond = false;
    bool as_json = false;
    std::string market, views, utility = "1";
};

int run_compare(const CompareArgs& a) {
    const json defaults = qs::app::default_design_config();
    std::vector<qs::app::ProductInput> products;
    for (const auto& spec : a.payoffs) {
        const auto eq = spec.find('=');
        const std::string name = eq == std::string::npos ? spec : spec.substr(0, eq);
        const std::string path = eq == std::string::npos ? spec : spec.substr(eq + 1);
        auto [x, F] = qs::app::payoff_columns(qs::io::read_csv_file(path));
        products.push_back({name, std::move(x), std::move(F)});
    }
    if (a.bond) {
        if (products.empty()) throw qs::io::ConfigError("--bond needs at least one --payoff to fix the grid");
        const auto& x = products.front().x;
        products.push_back({"bond", x, std::vector<double>(x.size(), 1.0)});
    }
    const json market = a.market.empty() ? defaults.at("market") : qs::io::load_json_arg(a.market);
    const json views = a.views.empty() ? json::array() : qs::io::load_json_arg(a.views);
    const auto outcome = qs::app::run_compare(products, market, views, qs::io::load_json_arg(a.utility));
    if (a.as_json) std::cout << qs::app::compare_json(outcome).dump(2) << '\n';
    else std::cout << qs::app::compare_table(outcome);
    return 0;
}

struct ServeArgs {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::string cors_origin = "*";
};

int run_serve(const ServeArgs& a) {
    httplib::Server server;
    qs::service::install_routes(server, {a.cors_origin});
    if (!server.bind_to_port(a.host, a.port)) {
        std::cerr << "port-in-use: cannot bind " << a.host << ':' << a.port << '\n';
        return kExitPortInUse;
    }
    spdlog::warn("listening on http://{}:{}", a.host, a.port);
    server.listen_after_bind();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    configure_logging();
    CLI::App cli{"Payoff design from market-implied and believed distributions"};
    cli.require_subcommand(1);

    DesignArgs design;
    auto* d = cli.add_subcommand("design", "Design the payoff for a set of views and a risk profile");
    d->add_option("--config", design.config, "JSON config file (or inline JSON)");
    d->add_option("--market", design.market, "Market density spec");
    d->add_option("--views", design.views, "Array of view specs");
    d->add_option("--risk", design.risk, "Relative risk aversion: number or profile spec");
    d->add_option("--grid", design.grid, "Grid spec {lo, hi, n, spacing}");
    d->add_option("--out", design.out, "Output directory");

    ImpliedArgs implied;
    auto* im = cli.add_subcommand("implied", "Recover the views implied by a payoff");
    im->add_option("--payoff", implied.payoff, "CSV with columns x and F")->required();
    im->add_option("--market", implied.market, "Market density spec");
    im->add_option("--risk", implied.risk, "Relative risk aversion: number or profile spec");
    im->add_option("--out", implied.out, "Output directory");

    CompareArgs comp;
    auto* c = cli.add_subcommand("compare", "Rank payoffs under believed views and a utility");
    c->add_option("--payoff", comp.payoffs, "[name=]path of a payoff CSV; repeatable");
    c->add_flag("--bond", comp.bond, "Include the unit bond");
    c->add_option("--market", comp.market, "Market density spec");
    c->add_option("--views", comp.views, "Array of view specs");
    c->add_option("--utility", comp.utility, "Utility: number (CRRA R) or spec");
    c->add_flag("--json", comp.as_json, "Emit JSON instead of a table");

    ServeArgs serve;
    auto* s = cli.add_subcommand("serve", "Serve the HTTP API");
    s->add_option("--host", serve.host, "Bind address");
    s->add_option("--port", serve.port, "Port");
    s->add_option("--cors-origin", serve.cors_origin, "Access-Control-Allow-Origin value");

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = cli.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*d) return run_design(design);
        if (*im) return run_implied(implied);
        if (*c) return run_compare(comp);
        if (*s) return run_serve(serve);
    } catch (const qs::Error& e) {
        std::cerr << e.name() << ": " << e.detail() << '\n';
        return kExitNumerical;
    } catch (const qs::io::ConfigError& e) {
        std::cerr << "config-parse: " << e.what() << '\n';
        return kExitConfig;
    } catch (const json::exception& e) {
        std::cerr << "config-parse: " << e.what() << '\n';
        return kExitConfig;
    }
    return 0;
}
