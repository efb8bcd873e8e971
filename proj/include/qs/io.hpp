#pragma once

// JSON problem specs and CSV tables shared by the CLI and the HTTP service.

#include <cmath>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "qs/density.hpp"
#include "qs/error.hpp"
#include "qs/grid.hpp"
#include "qs/utility.hpp"
#include "qs/views.hpp"

namespace qs::io {

using nlohmann::json;

/// Malformed input: bad JSON, missing fields, unreadable files.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline const json& require(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw ConfigError(std::string("missing field \"") + key + "\"");
    return j.at(key);
}

inline double number(const json& j, const char* key) {
    const json& v = require(j, key);
    if (!v.is_number()) throw ConfigError(std::string("field \"") + key + "\" must be a number");
    return v.get<double>();
}

inline double number_or(const json& j, const char* key, double fallback) {
    return j.is_object() && j.contains(key) ? number(j, key) : fallback;
}

inline std::string string(const json& j, const char* key) {
    const json& v = require(j, key);
    if (!v.is_string()) throw ConfigError(std::string("field \"") + key + "\" must be a string");
    return v.get<std::string>();
}

inline std::vector<double> numbers(const json& j, const char* key) {
    const json& v = require(j, key);
    if (!v.is_array()) throw ConfigError(std::string("field \"") + key + "\" must be an array");
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& e : v) {
        if (!e.is_number()) throw ConfigError(std::string("field \"") + key + "\" must hold numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

}  // namespace detail

/// Reads JSON from `arg` if it looks inline ('{', '[', a number), otherwise from the file it names.
inline json load_json_arg(const std::string& arg) {
    const auto first = arg.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) throw ConfigError("empty JSON argument");
    const char c = arg[first];
    const bool inline_json = c == '{' || c == '[' || c == '-' || (c >= '0' && c <= '9');
    try {
        if (inline_json) return json::parse(arg);
        std::ifstream in(arg);
        if (!in) throw ConfigError("cannot open " + arg);
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("invalid JSON in " + (inline_json ? std::string("argument") : arg) + ": " + e.what());
    }
}

inline Grid parse_grid(const json& j) {
    const double lo = detail::number(j, "lo");
    const double hi = detail::number(j, "hi");
    const json& n = detail::require(j, "n");
    if (!n.is_number_integer() || n.get<long long>() < 0) throw ConfigError("field \"n\" must be a count");
    std::string spacing = j.contains("spacing") ? detail::string(j, "spacing") : "linear";
    Spacing s;
    if (spacing == "log" || spacing == "logarithmic") {
        s = Spacing::logarithmic;
    } else if (spacing == "linear") {
        s = Spacing::linear;
    } else {
        throw ConfigError("unknown grid spacing \"" + spacing + "\"");
    }
    return make_grid(lo, hi, static_cast<std::size_t>(n.get<long long>()), s);
}

inline json grid_to_json(const Grid& g) {
    return {{"lo", g.lo()}, {"hi", g.hi()}, {"n", g.size()},
            {"spacing", g.spacing() == Spacing::logarithmic ? "log" : "linear"}};
}

/// Tags a grid read back from a table: logarithmic when the points are positive
/// and geometrically spaced.
inline Grid grid_from_points(std::vector<double> x) {
    bool geometric = x.size() >= 3 && x.front() > 0.0;
    if (geometric) {
        const double step = std::log(x[1] / x[0]);
        for (std::size_t i = 2; i < x.size() && geometric; ++i) {
            geometric = std::abs(std::log(x[i] / x[i - 1]) - step) <= 1e-9 * std::max(1.0, std::abs(step));
        }
    }
    return Grid(std::move(x), geometric ? Spacing::logarithmic : Spacing::linear);
}

namespace detail {

inline std::variant<NormalParams, LognormalParams> parse_simple(const json& j, const std::string& family) {
    const json& p = require(j, "params");
    const double mu = number_or(p, "mu", 0.0);
    const double sigma = number(p, "sigma");
    if (family == "normal") return NormalParams{mu, sigma};
    if (family == "lognormal") return LognormalParams{mu, sigma};
    throw ConfigError("unknown density family \"" + family + "\"");
}

}  // namespace detail

inline DensitySpec parse_density_spec(const json& j) {
    const std::string family = detail::string(j, "family");
    if (family == "mixture") {
        const json& comps = detail::require(j, "components");
        if (!comps.is_array()) throw ConfigError("mixture components must be an array");
        MixtureParams mix;
        for (const auto& c : comps) {
            const std::string f = detail::string(c, "family");
            mix.components.push_back({detail::parse_simple(c, f), detail::number(c, "weight")});
        }
        return mix;
    }
    return std::visit([](auto p) -> DensitySpec { return p; }, detail::parse_simple(j, family));
}

inline Likelihood parse_view(const json& v, const Density& market) {
    const std::string type = detail::string(v, "type");
    if (type == "vol") return view_vol(market, detail::number(v, "target_sigma"));
    if (type == "ratio") {
        return likelihood_between(density_from_params(parse_density_spec(detail::require(v, "believed")), market.grid()),
                                  market);
    }
    if (type == "window") {
        return view_windowed(parse_view(detail::require(v, "of"), market), detail::number(v, "a"), detail::number(v, "b"));
    }
    if (type == "table") {
        const auto xs = detail::numbers(v, "x");
        const auto vals = detail::numbers(v, "values");
        return view_table(market.grid(), xs, vals);
    }
    throw ConfigError("unknown view type \"" + type + "\"");
}

/// Views in list order; entries with "enabled": false are skipped.
inline std::vector<Likelihood> parse_views(const json& j, const Density& market) {
    if (!j.is_array()) throw ConfigError("views must be a JSON array");
    std::vector<Likelihood> out;
    for (const auto& v : j) {
        if (v.is_object() && v.contains("enabled") && v.at("enabled").is_boolean() && !v.at("enabled").get<bool>()) {
            continue;
        }
        out.push_back(parse_view(v, market));
    }
    return out;
}

/// A number is a crra coefficient; objects name a family.
inline Utility parse_utility(const json& j) {
    if (j.is_number()) return crra_utility(j.get<double>());
    const std::string family = detail::string(j, "family");
    if (family == "crra") return crra_utility(detail::number(j, "R"));
    if (family == "log") return crra_utility(1.0);
    if (family == "exponential") return exponential_utility(detail::number(j, "a"));
    throw ConfigError("unknown utility family \"" + family + "\"");
}

/// Accepted forms: 2, {"R": 2}, {"profile": "affine", "r0": 1, "r1": 1}, {"utility": <utility spec>}.
inline RiskProfile parse_risk(const json& j) {
    if (j.is_number()) return RiskProfile::constant(j.get<double>());
    if (j.is_object() && j.contains("R")) return RiskProfile::constant(detail::number(j, "R"));
    if (j.is_object() && j.contains("profile")) {
        const std::string profile = detail::string(j, "profile");
        if (profile == "affine") return RiskProfile::affine(detail::number(j, "r0"), detail::number(j, "r1"));
        throw ConfigError("unknown risk profile \"" + profile + "\"");
    }
    if (j.is_object() && j.contains("utility")) return arrow_pratt_R(parse_utility(j.at("utility")));
    throw ConfigError("risk must be a number or an object with \"R\", \"profile\" or \"utility\"");
}

// --- CSV -------------------------------------------------------------------

struct Table {
    std::vector<std::string> names;
    std::vector<std::vector<double>> columns;

    const std::vector<double>* find(const std::string& name) const {
        for (std::size_t k = 0; k < names.size(); ++k) {
            if (names[k] == name) return &columns[k];
        }
        return nullptr;
    }
};

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_csv(std::ostream& out, const Table& t) {
    for (std::size_t k = 0; k < t.names.size(); ++k) out << (k ? "," : "") << t.names[k];
    out << '\n';
    const std::size_t rows = t.columns.empty() ? 0 : t.columns.front().size();
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t k = 0; k < t.columns.size(); ++k) out << (k ? "," : "") << format_double(t.columns[k][r]);
        out << '\n';
    }
}

inline void write_csv_file(const std::string& path, const Table& t) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    write_csv(out, t);
}

inline Table read_csv(std::istream& in) {
    Table t;
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("empty CSV");
    auto split = [](const std::string& s) {
        std::vector<std::string> cells;
        std::stringstream ss(s);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
            cell.erase(0, cell.find_first_not_of(' '));
            cells.push_back(cell);
        }
        return cells;
    };
    t.names = split(line);
    t.columns.assign(t.names.size(), {});
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.find_first_not_of(" \r\n") == std::string::npos) continue;
        const auto cells = split(line);
        if (cells.size() != t.names.size()) throw ConfigError("CSV row " + std::to_string(row) + " has the wrong width");
        for (std::size_t k = 0; k < cells.size(); ++k) {
            double v = 0.0;
            const char* b = cells[k].data();
            const char* e = b + cells[k].size();
            auto [ptr, ec] = std::from_chars(b, e, v);
            if (ec != std::errc() || ptr != e) {
                throw ConfigError("CSV row " + std::to_string(row) + ": \"" + cells[k] + "\" is not a number");
            }
            t.columns[k].push_back(v);
        }
    }
    return t;
}

inline Table read_csv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path);
    return read_csv(in);
}

}  // namespace qs::io
