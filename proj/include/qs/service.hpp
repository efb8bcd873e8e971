#pragma once

// Stateless JSON-over-HTTP front end: /api/design, /api/implied, /api/health.

#include <string>

#include "httplib.h"
#include "json.hpp"
#include "qs/app.hpp"
#include "qs/error.hpp"
#include "qs/io.hpp"

namespace qs::service {

using nlohmann::json;

struct Options {
    std::string cors_origin = "*";
};

namespace detail {

inline void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

template <class Handler>
void guarded(httplib::Response& res, Handler&& handler) {
    try {
        send_json(res, 200, handler());
    } catch (const Error& e) {
        send_json(res, 400, {{"error", e.name()}, {"detail", e.detail()}});
    } catch (const io::ConfigError& e) {
        send_json(res, 400, {{"error", "config-parse"}, {"detail", e.what()}});
    } catch (const json::exception& e) {
        send_json(res, 400, {{"error", "config-parse"}, {"detail", e.what()}});
    } catch (const std::exception& e) {
        send_json(res, 500, {{"error", "internal"}, {"detail", e.what()}});
    }
}

/// Missing keys fall back to the CLI defaults so a bare `{}` designs the no-view bond.
inline json with_defaults(const json& body) {
    json problem = app::default_design_config();
    problem.erase("out");
    for (const char* key : {"grid", "market", "views", "risk"}) {
        if (body.contains(key)) problem[key] = body.at(key);
    }
    return problem;
}

}  // namespace detail

inline void install_routes(httplib::Server& server, const Options& options = {}) {
    server.set_default_headers({{"Access-Control-Allow-Origin", options.cors_origin},
                                {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                                {"Access-Control-Allow-Headers", "Content-Type"}});

    server.Get("/api/health", [](const httplib::Request&, httplib::Response& res) {
        detail::send_json(res, 200, {{"status", "ok"}});
    });

    server.Post("/api/design", [](const httplib::Request& req, httplib::Response& res) {
        detail::guarded(res, [&] {
            const json body = json::parse(req.body);
            if (!body.is_object()) throw io::ConfigError("request body must be a JSON object");
            return app::design_response(app::run_design(detail::with_defaults(body)));
        });
    });

    server.Post("/api/implied", [](const httplib::Request& req, httplib::Response& res) {
        detail::guarded(res, [&] {
            const json body = json::parse(req.body);
            if (!body.is_object()) throw io::ConfigError("request body must be a JSON object");
            const json defaults = app::default_design_config();
            auto x = io::detail::numbers(body, "x");
            auto F = io::detail::numbers(body, "F");
            const json& market = body.contains("market") ? body.at("market") : defaults.at("market");
            const json& risk = body.contains("risk") ? body.at("risk") : defaults.at("risk");
            return app::implied_response(app::run_implied(std::move(x), std::move(F), market, risk));
        });
    });

    server.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
}

}  // namespace qs::service
