#pragma once

// JSON problem configuration for the experiment drivers.

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "zetatrap/errors.hpp"
#include "zetatrap/geometry.hpp"
#include "zetatrap/nystrom.hpp"
#include "zetatrap/stencil_table.hpp"

namespace zetatrap {

enum class ProblemType { Helmholtz, Stokes, Laplace };

struct PointSource {
    Vec2 pos;
    Complex strength{1.0, 0.0};
};

struct MethodSpec {
    std::string label;
    Quadrature quadrature;
};

struct FieldGrid {
    double xmin = -2.0, xmax = 2.0, ymin = -2.0, ymax = 2.0;
    int nx = 41, ny = 41;
    int N = 512;
    MethodSpec method;
};

struct Table1Spec {
    int N = 512;
    std::vector<Complex> kappas;
};

struct ProblemConfig {
    ProblemType problem = ProblemType::Helmholtz;
    nlohmann::json curve_descriptor;
    ParametricCurve curve;
    Complex kappa{12.5, 0.0};
    std::optional<double> wavelengths;
    HelmholtzCoupling coupling = HelmholtzCoupling::RealKappa;
    std::vector<MethodSpec> methods;
    std::vector<int> N;
    bool exact_reference = true;
    std::optional<MethodSpec> reference_method;
    int reference_N = 2000;
    std::vector<PointSource> sources;
    std::vector<Vec2> targets;
    double gmres_tol = 1e-14;
    int gmres_max_iter = 2000;
    std::optional<FieldGrid> field;
    Table1Spec table1;
};

inline const char* to_string(ProblemType p) {
    switch (p) {
    case ProblemType::Helmholtz: return "helmholtz";
    case ProblemType::Stokes: return "stokes";
    case ProblemType::Laplace: return "laplace";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Geometry helpers used by validation and defaults
// ---------------------------------------------------------------------------

inline ParametricCurve curve_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
        throw InvalidInput("curve descriptor needs a string 'type'");
    const std::string type = j["type"];
    if (type == "star")
        return star_curve(j.value("base", 1.0), j.value("amplitude", 0.3), j.value("lobes", 5));
    if (type == "circle")
        return circle_curve(j.value("radius", 1.0));
    throw InvalidInput("unknown curve type '" + type + "' (expected star or circle)");
}

/// Winding number of the closed curve around x, from a fine polygon.
inline int winding_number(const ParametricCurve& c, const Vec2& x, int samples = 2048) {
    double total = 0.0;
    Vec2 prev = c.position(0.0) - x;
    for (int i = 1; i <= samples; ++i) {
        const Vec2 cur = c.position(kTwoPi * i / samples) - x;
        total += std::atan2(cross(prev, cur), dot(prev, cur));
        prev = cur;
    }
    return static_cast<int>(std::lround(total / kTwoPi));
}

inline double curve_diameter(const ParametricCurve& c, int samples = 1024) {
    std::vector<Vec2> p;
    for (int i = 0; i < samples; ++i)
        p.push_back(c.position(kTwoPi * i / samples));
    double d = 0.0;
    for (std::size_t a = 0; a < p.size(); ++a)
        for (std::size_t b = a + 1; b < p.size(); ++b)
            d = std::max(d, norm(p[a] - p[b]));
    return d;
}

inline std::vector<PointSource> default_sources() {
    std::vector<PointSource> s;
    for (int l = 0; l < 3; ++l) {
        const double a = kTwoPi * l / 3.0;
        s.push_back({{0.4 * std::cos(a), 0.4 * std::sin(a)}, {1.0, 0.0}});
    }
    return s;
}

inline std::vector<Vec2> default_targets() {
    std::vector<Vec2> t;
    for (int l = 0; l < 8; ++l) {
        const double a = kTwoPi * l / 8.0;
        t.push_back({2.0 * std::cos(a), 2.0 * std::sin(a)});
    }
    return t;
}

/// "zeta:<order>", "kress" or "external:<path>" (relative to base_dir).
inline MethodSpec parse_method(const std::string& text, const std::filesystem::path& base_dir = {}) {
    if (text == "kress")
        return {"kress", Quadrature::kress()};
    if (text.rfind("zeta:", 0) == 0) {
        const std::string rest = text.substr(5);
        int order = 0;
        std::size_t used = 0;
        try {
            order = std::stoi(rest, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != rest.size() || used == 0)
            throw InvalidInput("method '" + text + "': order must be an integer");
        if (order < 2 || order % 2 != 0 || order > 42)
            throw InvalidInput("method '" + text + "': order must be even, 2 <= order <= 42");
        return {"zeta" + std::to_string(order), Quadrature::zeta((order - 2) / 2)};
    }
    if (text.rfind("external:", 0) == 0) {
        std::filesystem::path p = text.substr(9);
        if (p.is_relative() && !base_dir.empty())
            p = base_dir / p;
        LogCorrection c = to_log_correction(ingest_stencil_table(p.string()));
        const std::string label = "external:" + c.name;
        return {label, Quadrature::external(std::move(c))};
    }
    throw InvalidInput("unknown method '" + text + "' (expected zeta:<order>, kress or external:<path>)");
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace detail {

inline int line_of_offset(const std::string& text, std::size_t offset) {
    offset = std::min(offset, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

/// Line of the first occurrence of "key": in the source text (0 if absent).
inline int line_of_key(const std::string& text, const std::string& key) {
    const std::regex re("\"" + key + "\"\\s*:");
    std::smatch m;
    if (std::regex_search(text, m, re))
        return line_of_offset(text, static_cast<std::size_t>(m.position(0)));
    return 0;
}

class ConfigReader {
  public:
    ConfigReader(const std::string& text, nlohmann::json root) : text_(text), root_(std::move(root)) {}

    [[noreturn]] void fail(const std::string& key, const std::string& what) const {
        throw ParseError("'" + key + "': " + what, line_of_key(text_, key));
    }

    bool has(const std::string& key) const { return root_.contains(key); }
    const nlohmann::json& at(const std::string& key) const { return root_.at(key); }

    double real(const nlohmann::json& j, const std::string& key) const {
        if (!j.is_number())
            fail(key, "expected a number");
        const double v = j.get<double>();
        if (!std::isfinite(v))
            fail(key, "must be finite");
        return v;
    }

    int integer(const nlohmann::json& j, const std::string& key) const {
        if (!j.is_number_integer())
            fail(key, "expected an integer");
        return j.get<int>();
    }

    /// 12.5, [12.5, 10] or {"re": 12.5, "im": 10}
    Complex complex(const nlohmann::json& j, const std::string& key) const {
        if (j.is_number())
            return {real(j, key), 0.0};
        if (j.is_array() && j.size() == 2)
            return {real(j[0], key), real(j[1], key)};
        if (j.is_object() && j.contains("re"))
            return {real(j["re"], key), j.contains("im") ? real(j["im"], key) : 0.0};
        fail(key, "expected a number, [re, im] or {\"re\":..,\"im\":..}");
    }

    Vec2 point(const nlohmann::json& j, const std::string& key) const {
        if (j.is_array() && j.size() == 2)
            return {real(j[0], key), real(j[1], key)};
        if (j.is_object() && j.contains("x") && j.contains("y"))
            return {real(j["x"], key), real(j["y"], key)};
        fail(key, "expected a point [x, y] or {\"x\":..,\"y\":..}");
    }

  private:
    const std::string& text_;
    nlohmann::json root_;
};

} // namespace detail

inline ProblemConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {}) {
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what(), detail::line_of_offset(text, e.byte > 0 ? e.byte - 1 : 0));
    }
    if (!root.is_object())
        throw ParseError("config must be a JSON object", 1);
    const detail::ConfigReader rd(text, root);

    static const std::vector<std::string> known = {"problem", "curve",   "kappa",     "wavelengths", "coupling",
                                                   "methods", "N",       "reference", "sources",     "targets",
                                                   "gmres",   "field",   "table1",    "description"};
    for (const auto& [key, value] : root.items())
        if (std::find(known.begin(), known.end(), key) == known.end())
            rd.fail(key, "unknown key");

    ProblemConfig cfg;

    if (!rd.has("problem") || !rd.at("problem").is_string())
        throw ParseError("'problem' is required (helmholtz, stokes or laplace)", detail::line_of_key(text, "problem"));
    const std::string problem = rd.at("problem");
    if (problem == "helmholtz")
        cfg.problem = ProblemType::Helmholtz;
    else if (problem == "stokes")
        cfg.problem = ProblemType::Stokes;
    else if (problem == "laplace")
        cfg.problem = ProblemType::Laplace;
    else
        rd.fail("problem", "expected helmholtz, stokes or laplace, got '" + problem + "'");

    cfg.curve_descriptor = rd.has("curve") ? rd.at("curve") : nlohmann::json{{"type", "star"}};
    try {
        cfg.curve = curve_from_json(cfg.curve_descriptor);
        validate_curve(cfg.curve);
    } catch (const Error& e) {
        rd.fail("curve", e.what());
    }

    if (rd.has("kappa"))
        cfg.kappa = rd.complex(rd.at("kappa"), "kappa");
    if (rd.has("wavelengths")) {
        const double n = rd.real(rd.at("wavelengths"), "wavelengths");
        if (!(n > 0.0))
            rd.fail("wavelengths", "must be positive");
        cfg.wavelengths = n;
        const double k_lambda = kTwoPi * n / curve_diameter(cfg.curve);
        if (rd.has("kappa")) {
            if (std::abs(cfg.kappa.real() - k_lambda) > 1e-2 * k_lambda)
                rd.fail("wavelengths", "inconsistent with kappa: " + std::to_string(n) + " wavelengths give Re kappa = " +
                                           std::to_string(k_lambda));
        } else {
            cfg.kappa = {k_lambda, 0.0};
        }
    }
    if (cfg.problem == ProblemType::Helmholtz) {
        try {
            helmholtz_constants(cfg.kappa);
        } catch (const Error& e) {
            rd.fail("kappa", e.what());
        }
    }
    if (rd.has("coupling")) {
        const auto& c = rd.at("coupling");
        if (c == "real_kappa")
            cfg.coupling = HelmholtzCoupling::RealKappa;
        else if (c == "kappa")
            cfg.coupling = HelmholtzCoupling::Kappa;
        else
            rd.fail("coupling", "expected \"real_kappa\" or \"kappa\"");
    }

    const auto method = [&](const nlohmann::json& j, const std::string& key) {
        if (!j.is_string())
            rd.fail(key, "methods are strings such as \"zeta:16\", \"kress\" or \"external:table.txt\"");
        try {
            return parse_method(j.get<std::string>(), base_dir);
        } catch (const ParseError& e) {
            rd.fail(key, e.what());
        } catch (const NotSupported&) {
            throw;
        } catch (const Error& e) {
            rd.fail(key, e.what());
        }
    };

    if (rd.has("methods")) {
        if (!rd.at("methods").is_array() || rd.at("methods").empty())
            rd.fail("methods", "expected a nonempty array");
        for (const auto& m : rd.at("methods"))
            cfg.methods.push_back(method(m, "methods"));
    } else {
        cfg.methods = {parse_method("zeta:6"), parse_method("zeta:10"), parse_method("zeta:16")};
    }

    if (rd.has("N")) {
        if (!rd.at("N").is_array() || rd.at("N").empty())
            rd.fail("N", "expected a nonempty array of integers");
        for (const auto& n : rd.at("N")) {
            const int v = rd.integer(n, "N");
            if (v < 16 || v > 4096)
                rd.fail("N", "each N must satisfy 16 <= N <= 4096");
            cfg.N.push_back(v);
        }
    } else {
        cfg.N = {64, 128, 256, 512, 1024};
    }
    for (const auto& m : cfg.methods) {
        for (int n : cfg.N) {
            if (m.quadrature.kind == QuadratureKind::Kress && n % 2 != 0)
                rd.fail("N", "the Kress rule needs even N");
            if (m.quadrature.kind != QuadratureKind::Kress && 2 * m.quadrature.correction.reach() + 1 >= n)
                rd.fail("N", "N = " + std::to_string(n) + " is too small for method " + m.label);
        }
    }

    cfg.exact_reference = cfg.problem == ProblemType::Helmholtz;
    if (cfg.problem != ProblemType::Helmholtz)
        cfg.reference_method = parse_method("kress");
    if (rd.has("reference")) {
        const auto& r = rd.at("reference");
        if (r.is_string() && r == "exact") {
            if (cfg.problem != ProblemType::Helmholtz)
                rd.fail("reference", "an exact reference exists only in Helmholtz known-solution mode");
            cfg.exact_reference = true;
            cfg.reference_method.reset();
        } else if (r.is_object()) {
            cfg.exact_reference = false;
            cfg.reference_method = method(r.value("method", nlohmann::json("kress")), "reference");
            if (r.contains("N"))
                cfg.reference_N = rd.integer(r["N"], "reference");
            if (cfg.reference_N < 16 || cfg.reference_N > 4096)
                rd.fail("reference", "reference N must satisfy 16 <= N <= 4096");
        } else {
            rd.fail("reference", "expected \"exact\" or {\"method\": ..., \"N\": ...}");
        }
    }

    if (rd.has("sources")) {
        if (!rd.at("sources").is_array() || rd.at("sources").empty())
            rd.fail("sources", "expected a nonempty array");
        for (const auto& s : rd.at("sources")) {
            PointSource ps;
            if (s.is_object() && s.contains("position")) {
                ps.pos = rd.point(s["position"], "sources");
                if (s.contains("strength"))
                    ps.strength = rd.complex(s["strength"], "sources");
            } else {
                ps.pos = rd.point(s, "sources");
            }
            cfg.sources.push_back(ps);
        }
    } else {
        cfg.sources = default_sources();
    }
    for (const auto& s : cfg.sources)
        if (winding_number(cfg.curve, s.pos) != 1)
            rd.fail("sources", "source (" + std::to_string(s.pos.x) + ", " + std::to_string(s.pos.y) +
                                   ") must lie strictly inside the curve");

    if (rd.has("targets")) {
        if (!rd.at("targets").is_array() || rd.at("targets").empty())
            rd.fail("targets", "expected a nonempty array of points");
        for (const auto& t : rd.at("targets"))
            cfg.targets.push_back(rd.point(t, "targets"));
    } else if (cfg.problem != ProblemType::Laplace) {
        cfg.targets = default_targets();
    }
    if (cfg.problem != ProblemType::Laplace)
        for (const auto& t : cfg.targets)
            if (winding_number(cfg.curve, t) != 0)
                rd.fail("targets", "target (" + std::to_string(t.x) + ", " + std::to_string(t.y) +
                                       ") must lie outside the curve");

    if (rd.has("gmres")) {
        const auto& g = rd.at("gmres");
        if (!g.is_object())
            rd.fail("gmres", "expected {\"tol\": ..., \"max_iter\": ...}");
        if (g.contains("tol"))
            cfg.gmres_tol = rd.real(g["tol"], "gmres");
        if (g.contains("max_iter"))
            cfg.gmres_max_iter = rd.integer(g["max_iter"], "gmres");
        if (!(cfg.gmres_tol > 0.0) || cfg.gmres_max_iter < 1)
            rd.fail("gmres", "tol > 0 and max_iter >= 1 required");
    }

    if (rd.has("field")) {
        const auto& f = rd.at("field");
        if (!f.is_object())
            rd.fail("field", "expected an object");
        FieldGrid g;
        g.method = cfg.methods.back();
        for (const char* k : {"xmin", "xmax", "ymin", "ymax"})
            if (f.contains(k)) {
                const double v = rd.real(f[k], "field");
                if (std::string(k) == "xmin") g.xmin = v;
                else if (std::string(k) == "xmax") g.xmax = v;
                else if (std::string(k) == "ymin") g.ymin = v;
                else g.ymax = v;
            }
        if (f.contains("nx"))
            g.nx = rd.integer(f["nx"], "field");
        if (f.contains("ny"))
            g.ny = rd.integer(f["ny"], "field");
        if (f.contains("N"))
            g.N = rd.integer(f["N"], "field");
        if (f.contains("method"))
            g.method = method(f["method"], "field");
        if (!(g.xmax > g.xmin) || !(g.ymax > g.ymin) || g.nx < 1 || g.ny < 1 || g.nx * g.ny > 1000000)
            rd.fail("field", "need xmin < xmax, ymin < ymax and 1 <= nx*ny <= 1e6");
        if (g.N < 16 || g.N > 4096)
            rd.fail("field", "N must satisfy 16 <= N <= 4096");
        cfg.field = g;
    }

    cfg.table1.kappas = {{12.5, 0.0}, {12.5, 10.0}};
    if (rd.has("table1")) {
        const auto& t = rd.at("table1");
        if (!t.is_object())
            rd.fail("table1", "expected an object");
        if (t.contains("N"))
            cfg.table1.N = rd.integer(t["N"], "table1");
        if (t.contains("kappas")) {
            if (!t["kappas"].is_array() || t["kappas"].empty())
                rd.fail("table1", "'kappas' must be a nonempty array");
            cfg.table1.kappas.clear();
            for (const auto& k : t["kappas"])
                cfg.table1.kappas.push_back(rd.complex(k, "table1"));
        }
        if (cfg.table1.N < 16 || cfg.table1.N > 4096 || cfg.table1.N % 2 != 0)
            rd.fail("table1", "N must be even, 16 <= N <= 4096");
    }
    return cfg;
}

inline ProblemConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), std::filesystem::path(path).parent_path());
}

} // namespace zetatrap
