#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <regex>
#include <sstream>

#include "zetatrap/experiments.hpp"
#include "zetatrap/stencil_table.hpp"

using namespace zetatrap;

namespace {

const std::filesystem::path kSource = ZT_SOURCE_DIR;

ExternalStencilTable parse_table(const std::string& text) {
    std::istringstream in(text);
    return parse_stencil_table(in);
}

int parse_error_line(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ParseError& e) {
        return e.line();
    }
    return -1;
}

} // namespace

// ---------------------------------------------------------------------------
// weights output
// ---------------------------------------------------------------------------

TEST(Weights, SingleLineForKZero) {
    std::ostringstream out;
    write_weights(out, build_log_stencil(0));
    EXPECT_EQ(out.str(), "0 9.189385332046727e-01\n");
}

TEST(Weights, TwoLinesForKOne) {
    std::ostringstream out;
    write_weights(out, build_log_stencil(1));
    EXPECT_TRUE(std::regex_match(out.str(), std::regex("0 [0-9]\\.[0-9]{15}e-01\n1 [0-9]\\.[0-9]{15}e-02\n")));
    // mpmath, 30 digits
    std::istringstream in(out.str());
    int j0 = -1, j1 = -1;
    double w0 = 0.0, w1 = 0.0;
    in >> j0 >> w0 >> j1 >> w1;
    EXPECT_EQ(j0, 0);
    EXPECT_EQ(j1, 1);
    EXPECT_NEAR(w0, 0.888490076146279471, 2.5e-16);
    EXPECT_NEAR(w1, 0.0304484570583932708, 1e-17);
}

TEST(Weights, PowerKind) {
    std::ostringstream out;
    write_weights(out, build_pow_stencil(0, 0.5));
    EXPECT_EQ(out.str(), "0 1.460354508809587e+00\n");
}

// ---------------------------------------------------------------------------
// stencil tables
// ---------------------------------------------------------------------------

TEST(StencilTable, ValidOnGridTable) {
    const auto t = parse_table("# comment\nname: demo\norder: 4\ngrid: on\n-1 0.5  # trailing\n0 1.0\n1 0.5\n");
    EXPECT_EQ(t.name, "demo");
    EXPECT_EQ(t.order, 4.0);
    EXPECT_TRUE(t.on_grid);
    ASSERT_EQ(t.rows.size(), 3u);
    const auto c = to_log_correction(t);
    EXPECT_EQ(c.reach(), 1);
    EXPECT_EQ(c.taps[1], (std::pair<int, double>{0, 1.0}));
}

TEST(StencilTable, OffGridRejectedNamingTheFlag) {
    const auto t = parse_table("name: alpert\norder: 6\ngrid: off\n-0.5 1\n0.5 1\n");
    try {
        to_log_correction(t);
        FAIL() << "expected NotSupported";
    } catch (const NotSupported& e) {
        EXPECT_NE(std::string(e.what()).find("grid: off"), std::string::npos);
    }
}

TEST(StencilTable, EmptyFileIsParseError) {
    EXPECT_THROW(parse_table(""), ParseError);
    EXPECT_THROW(parse_table("# only a comment\n\n"), ParseError);
}

TEST(StencilTable, ErrorsCarryLineNumbers) {
    const auto line_of = [](const std::string& text) {
        try {
            parse_table(text);
        } catch (const ParseError& e) {
            return e.line();
        }
        return -1;
    };
    EXPECT_EQ(line_of("name: a\norder: 4\ngrid: on\n0 1\n1 nan\n"), 5);
    EXPECT_EQ(line_of("name: a\norder: 1\n"), 2);
    EXPECT_EQ(line_of("name: a\nfoo: 1\n"), 2);
    EXPECT_EQ(line_of("name: a\norder: 4\ngrid: maybe\n"), 3);
    EXPECT_EQ(line_of("name: a\norder: 4\ngrid: on\n0 1 2\n"), 4);
    EXPECT_EQ(line_of("name: a\norder: 4\ngrid: on\n0 1\nname: b\n"), 5);
}

TEST(StencilTable, NonIntegerOffsetOnGridRejected) {
    EXPECT_THROW(to_log_correction(parse_table("name: a\norder: 4\ngrid: on\n0.5 1\n")), ParseError);
}

TEST(StencilTable, ZetaCopyMatchesBuiltIn) {
    const auto ext = to_log_correction(ingest_stencil_table((kSource / "configs/tables/zeta6_copy.txt").string()));
    const auto builtin = log_correction(build_log_stencil(2));
    ASSERT_EQ(ext.taps.size(), builtin.taps.size());
    for (const auto& [o, w] : builtin.taps) {
        bool found = false;
        for (const auto& [eo, ew] : ext.taps)
            if (eo == o) {
                EXPECT_NEAR(ew, w, 1e-16);
                found = true;
            }
        EXPECT_TRUE(found) << o;
    }
}

// ---------------------------------------------------------------------------
// config
// ---------------------------------------------------------------------------

TEST(Config, Defaults) {
    const auto cfg = parse_config(R"({"problem": "helmholtz", "kappa": 12.5})");
    EXPECT_EQ(cfg.methods.size(), 3u);
    EXPECT_EQ(cfg.N, (std::vector<int>{64, 128, 256, 512, 1024}));
    EXPECT_TRUE(cfg.exact_reference);
    EXPECT_EQ(cfg.sources.size(), 3u);
    EXPECT_EQ(cfg.targets.size(), 8u);
    EXPECT_EQ(cfg.coupling, HelmholtzCoupling::RealKappa);
}

TEST(Config, StokesDefaultsToKressReference) {
    const auto cfg = parse_config(R"({"problem": "stokes"})");
    EXPECT_FALSE(cfg.exact_reference);
    ASSERT_TRUE(cfg.reference_method.has_value());
    EXPECT_EQ(cfg.reference_method->quadrature.kind, QuadratureKind::Kress);
    EXPECT_EQ(cfg.reference_N, 2000);
}

TEST(Config, WavelengthsSetKappa) {
    const auto cfg = parse_config(R"({"problem": "helmholtz", "wavelengths": 5})");
    EXPECT_NEAR(cfg.kappa.real(), kTwoPi * 5.0 / curve_diameter(cfg.curve), 1e-12);
}

TEST(Config, InconsistentWavelengthsRejected) {
    EXPECT_EQ(parse_error_line("{\n  \"problem\": \"helmholtz\",\n  \"kappa\": 12.5,\n  \"wavelengths\": 9\n}"), 4);
}

TEST(Config, LineDiagnostics) {
    EXPECT_EQ(parse_error_line("{\n\"problem\": \"helmholtz\",\n\"methods\": [\"zeta:7\"]\n}"), 3);
    EXPECT_EQ(parse_error_line("{\n\"problem\": \"helmholtz\",\n\n\"bogus\": 1\n}"), 4);
    EXPECT_EQ(parse_error_line("{\n\"problem\": \"helmholtz\",\n\"targets\": [[0.1, 0.1]]\n}"), 3);
    EXPECT_EQ(parse_error_line("{\n\"problem\": \"helmholtz\",\n\"sources\": [[3, 0]]\n}"), 3);
    EXPECT_EQ(parse_error_line("{\n\"problem\": \"helmholtz\",\n\"N\": [64, 8]\n}"), 3);
    EXPECT_EQ(parse_error_line("{\n\"problem\": \"helmholtz\",\n\"kappa\": 12.5,,\n}"), 3);
    EXPECT_EQ(parse_error_line("{\n\"problem\": \"heat\"\n}"), 2);
}

TEST(Config, ExternalMethodResolvedRelativeToConfig) {
    const auto cfg = load_config((kSource / "configs/helmholtz_real.json").string());
    bool found = false;
    for (const auto& m : cfg.methods)
        if (m.quadrature.kind == QuadratureKind::External) {
            found = true;
            EXPECT_EQ(m.label, "external:zeta6-copy");
        }
    EXPECT_TRUE(found);
}

TEST(Config, OffGridExternalMethodRejected) {
    const std::string text = R"({"problem": "helmholtz", "methods": ["external:)" +
                             (kSource / "configs/tables/alpert_style_offgrid.txt").string() + R"("]})";
    EXPECT_THROW(parse_config(text), NotSupported);
}

TEST(Config, SampleConfigsLoad) {
    for (const char* name : {"helmholtz_real.json", "helmholtz_decay.json", "stokes.json", "stokes_selfref.json",
                             "laplace.json", "table1.json", "field.json"})
        EXPECT_NO_THROW(load_config((kSource / "configs" / name).string())) << name;
}

// ---------------------------------------------------------------------------
// experiments
// ---------------------------------------------------------------------------

TEST(Eoc, ExactPowerLaw) {
    std::vector<int> N{64, 128, 256, 512};
    std::vector<double> e;
    for (int n : N)
        e.push_back(3.0 * std::pow(n, -2.0));
    const auto f = fit_eoc(N, e);
    EXPECT_NEAR(f.eoc, 2.0, 1e-12);
    EXPECT_EQ(f.points, 4);
}

TEST(Eoc, StopsAtSaturation) {
    const auto f = fit_eoc({64, 128, 256, 512}, {1e-6, 1e-8, 1e-12, 1e-13});
    EXPECT_EQ(f.n_max, 128);
    EXPECT_EQ(f.points, 2);
    EXPECT_NEAR(f.eoc, std::log2(100.0), 1e-12);
}

TEST(Convergence, ExternalTableReproducesZeta) {
    auto cfg = parse_config(R"({"problem": "helmholtz", "kappa": 12.5, "N": [64, 128], "methods": ["zeta:6"]})");
    cfg.methods.push_back(parse_method("external:" + (kSource / "configs/tables/zeta6_copy.txt").string()));
    const auto res = run_convergence(cfg);
    ASSERT_EQ(res.rows.size(), 4u);
    EXPECT_NEAR(res.rows[0].error, res.rows[1].error, 1e-12);
    EXPECT_NEAR(res.rows[2].error, res.rows[3].error, 1e-12);
    std::ostringstream csv;
    write_convergence_csv(csv, res, false);
    EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')),
              "N,method,order,max_relative_error,assemble_seconds,solve_seconds,eoc,fit_N_min,fit_N_max");
    EXPECT_NE(csv.str().find(",NA,NA,"), std::string::npos);
}

TEST(Convergence, CsvIsDeterministic) {
    const auto cfg = parse_config(R"({"problem": "stokes", "N": [64, 128], "methods": ["zeta:6", "kress"],
                                      "reference": {"method": "zeta:16", "N": 256}})");
    std::ostringstream a, b;
    write_convergence_csv(a, run_convergence(cfg), false);
    write_convergence_csv(b, run_convergence(cfg), false);
    EXPECT_EQ(a.str(), b.str());
    EXPECT_NE(a.str().find(",spectral,"), std::string::npos);
}

TEST(Field, DiamondsMatchKnownSolution) {
    auto cfg = parse_config(R"({"problem": "helmholtz", "kappa": 12.5, "methods": ["zeta:16"],
                                "field": {"N": 512, "nx": 1, "ny": 1, "xmin": 2.0, "xmax": 3.0, "ymin": 0.0, "ymax": 1.0}})");
    for (const auto& x : default_targets()) {
        cfg.field->xmin = x.x;
        cfg.field->ymin = x.y;
        const auto s = run_field(cfg);
        ASSERT_EQ(s.size(), 1u);
        ASSERT_EQ(s[0].mask, 0);
        const Complex exact = point_source_field(cfg, x);
        EXPECT_LE(std::abs(s[0].u - exact), 1e-9 * std::abs(exact));
    }
}

TEST(Field, MasksNearAndInsidePoints) {
    const auto cfg = parse_config(R"({"problem": "helmholtz", "kappa": 12.5, "methods": ["zeta:6"],
                                      "field": {"N": 128, "nx": 3, "ny": 1, "xmin": 0.0, "xmax": 2.6, "ymin": 0.0, "ymax": 1.0}})");
    const auto s = run_field(cfg);
    ASSERT_EQ(s.size(), 3u);
    EXPECT_EQ(s[0].mask, 2); // origin
    EXPECT_EQ(s[1].mask, 1); // (1.3, 0) is on the curve
    EXPECT_EQ(s[2].mask, 0);
    std::ostringstream csv;
    write_field_csv(csv, cfg, s);
    EXPECT_NE(csv.str().find("nan,nan,1"), std::string::npos);
    EXPECT_NE(csv.str().find("nan,nan,2"), std::string::npos);
}

TEST(Field, StokesNoSlipProbe) {
    // Near the wall the velocity is O(distance) and the N sweep converges.
    const auto curve = star_curve();
    const CurveJet j = jet(curve, 0.3);
    const auto probe = [&](double dist, int N) {
        auto cfg = parse_config(R"({"problem": "stokes", "methods": ["zeta:16"],
                                    "field": {"nx": 1, "ny": 1, "xmin": 0.0, "xmax": 1.0, "ymin": 0.0, "ymax": 1.0}})");
        const Vec2 x = j.pos + dist * j.normal;
        cfg.field->N = N;
        cfg.field->xmin = x.x;
        cfg.field->ymin = x.y;
        const auto s = run_field(cfg);
        EXPECT_EQ(s[0].mask, 0) << N;
        return s[0].v;
    };
    // N >= 640 keeps the probe outside the 5h near-field band.
    const Vec2 u640 = probe(0.05, 640), u800 = probe(0.05, 800), u1024 = probe(0.05, 1024), u1280 = probe(0.05, 1280);
    EXPECT_LT(norm(u800 - u640), 1e-5);
    EXPECT_LT(norm(u1024 - u800), 0.1 * norm(u800 - u640));
    EXPECT_LT(norm(u1280 - u1024), 0.1 * norm(u1024 - u800));
    EXPECT_LT(norm(u1280 - u1024), 1e-9);
    // 5 is the shear rate; the wall is at rest
    EXPECT_LT(norm(u1280), 5.0 * 0.05 * 3.0);
    EXPECT_LT(norm(u1280), norm(probe(0.2, 1280)));
}

TEST(Table1, RowsPerMethodAndKappa) {
    const auto cfg = parse_config(R"({"problem": "helmholtz", "methods": ["zeta:6", "kress"],
                                      "table1": {"N": 128, "kappas": [12.5]}})");
    const auto rows = run_table1(cfg);
    ASSERT_EQ(rows.size(), 2u);
    for (const auto& r : rows) {
        EXPECT_TRUE(r.converged);
        EXPECT_GT(r.cond, 1.0);
        EXPECT_LE(r.residual, 1e-13);
    }
}
