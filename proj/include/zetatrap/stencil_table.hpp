#pragma once

// External correction tables (hand-editable text).
//
//   # comment
//   name: kapur-rokhlin-6
//   order: 6
//   grid: on
//   -2 0.0123
//   -1 -0.456
//    1 -0.456
//    2 0.0123
//
// Each row applies its weight at the given node offset from the target, in
// the same slot as the zeta taps (the -h log(|rho'| h) diagonal term is kept).

#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "zetatrap/errors.hpp"
#include "zetatrap/quadrature.hpp"

namespace zetatrap {

struct ExternalStencilTable {
    std::string name;
    double order = 0.0;
    bool on_grid = true;
    std::vector<std::pair<double, double>> rows; // (offset, weight)
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline double parse_real(const std::string& token, int line, const char* what) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(token, &used);
    } catch (const std::exception&) {
        throw ParseError(std::string("cannot parse ") + what + " '" + token + "'", line);
    }
    if (used != token.size())
        throw ParseError(std::string("trailing characters in ") + what + " '" + token + "'", line);
    if (!std::isfinite(v))
        throw ParseError(std::string(what) + " must be finite", line);
    return v;
}

} // namespace detail

inline ExternalStencilTable parse_stencil_table(std::istream& in) {
    ExternalStencilTable t;
    bool have_name = false, have_order = false, have_grid = false;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string s = raw;
        if (const auto hash = s.find('#'); hash != std::string::npos)
            s.erase(hash);
        s = detail::trim(s);
        if (s.empty())
            continue;
        if (const auto colon = s.find(':'); colon != std::string::npos) {
            const std::string key = detail::trim(s.substr(0, colon));
            const std::string value = detail::trim(s.substr(colon + 1));
            if (!t.rows.empty())
                throw ParseError("header '" + key + ":' after weight rows", line);
            if (key == "name") {
                if (value.empty())
                    throw ParseError("empty name", line);
                t.name = value;
                have_name = true;
            } else if (key == "order") {
                t.order = detail::parse_real(value, line, "order");
                if (t.order < 2.0)
                    throw ParseError("order must be >= 2", line);
                have_order = true;
            } else if (key == "grid") {
                if (value != "on" && value != "off")
                    throw ParseError("grid must be 'on' or 'off', got '" + value + "'", line);
                t.on_grid = value == "on";
                have_grid = true;
            } else {
                throw ParseError("unknown header '" + key + "'", line);
            }
            continue;
        }
        std::istringstream fields(s);
        std::string a, b, extra;
        fields >> a >> b;
        if (b.empty() || (fields >> extra))
            throw ParseError("expected 'offset weight', got '" + s + "'", line);
        t.rows.emplace_back(detail::parse_real(a, line, "offset"), detail::parse_real(b, line, "weight"));
    }
    if (line == 0 || (!have_name && !have_order && !have_grid && t.rows.empty()))
        throw ParseError("empty stencil table", std::max(line, 1));
    if (!have_name)
        throw ParseError("missing 'name:' header", line);
    if (!have_order)
        throw ParseError("missing 'order:' header", line);
    if (!have_grid)
        throw ParseError("missing 'grid:' header", line);
    if (t.rows.empty())
        throw ParseError("no weight rows", line);
    return t;
}

inline ExternalStencilTable ingest_stencil_table(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open stencil table '" + path + "'");
    return parse_stencil_table(in);
}

/// On-grid tables become log taps; off-grid tables are rejected.
inline LogCorrection to_log_correction(const ExternalStencilTable& t) {
    if (!t.on_grid)
        throw NotSupported("stencil table '" + t.name +
                           "' has 'grid: off'; off-grid (interpolating) corrections are not supported");
    LogCorrection c;
    c.name = t.name;
    c.order = t.order;
    for (const auto& [offset, w] : t.rows) {
        if (offset != std::round(offset))
            throw ParseError("stencil table '" + t.name + "' is marked 'grid: on' but has non-integer offset " +
                             std::to_string(offset));
        c.taps.emplace_back(static_cast<int>(offset), w);
    }
    return c;
}

} // namespace zetatrap
