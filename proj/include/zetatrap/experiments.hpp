#pragma once

// Experiment drivers behind the CLI: weight tables, convergence sweeps,
// conditioning table and field sampling.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "zetatrap/config.hpp"
#include "zetatrap/nystrom.hpp"
#include "zetatrap/zetaweights.hpp"

namespace zetatrap {

inline constexpr double kSaturationFloor = 1e-13;

// ---------------------------------------------------------------------------
// weights
// ---------------------------------------------------------------------------

/// "j w_j" lines at 16 significant digits.
inline void write_weights(std::ostream& out, const CorrectionStencil& s) {
    char buf[64];
    for (int j = 0; j <= s.K; ++j) {
        std::snprintf(buf, sizeof buf, "%d %.15e\n", j, s.weights[static_cast<std::size_t>(j)]);
        out << buf;
    }
}

// ---------------------------------------------------------------------------
// EOC
// ---------------------------------------------------------------------------

struct EocFit {
    double eoc = std::numeric_limits<double>::quiet_NaN();
    int n_min = 0;
    int n_max = 0;
    int points = 0;
};

/// Least-squares slope of -log(err) against log(N) over the leading run of
/// points whose error exceeds 100x the saturation floor.
inline EocFit fit_eoc(const std::vector<int>& N, const std::vector<double>& err,
                      double threshold = 100.0 * kSaturationFloor) {
    std::vector<double> x, y;
    EocFit fit;
    for (std::size_t i = 0; i < N.size(); ++i) {
        if (!(err[i] > threshold) || !std::isfinite(err[i]))
            break;
        x.push_back(std::log(static_cast<double>(N[i])));
        y.push_back(-std::log(err[i]));
        if (fit.points == 0)
            fit.n_min = N[i];
        fit.n_max = N[i];
        ++fit.points;
    }
    if (fit.points < 2)
        return fit;
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    fit.eoc = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return fit;
}

// ---------------------------------------------------------------------------
// Problem pieces
// ---------------------------------------------------------------------------

inline Complex point_source_field(const ProblemConfig& cfg, const Vec2& x) {
    Complex u = 0.0;
    for (const auto& s : cfg.sources)
        u += s.strength * Complex(0.0, 0.25) * hankel1(0, cfg.kappa * norm(x - s.pos));
    return u;
}

inline Vec2 shear_flow(const Vec2& x) { return {5.0 * x.y, 0.0}; }

/// Laplace sweeps evaluate on the curve at these parameters.
inline std::vector<double> laplace_target_parameters() {
    std::vector<double> t;
    for (int i = 0; i < 8; ++i)
        t.push_back(kTwoPi * i / 8.0);
    return t;
}

inline double laplace_density(double t) { return std::exp(std::sin(t)); }

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

struct FieldValues {
    std::vector<Complex> helmholtz;
    std::vector<Vec2> stokes;
    std::vector<double> laplace;
    double assemble_seconds = 0.0;
    double solve_seconds = 0.0;
};

/// Solves the configured problem at one N with one method and evaluates at the targets.
/// A Helmholtz kernel table may be passed to share kernel evaluations across methods.
inline FieldValues solve_and_evaluate(const ProblemConfig& cfg, const CurveSamples& cs, const Quadrature& q,
                                      const std::vector<Vec2>& targets, const HelmholtzKernelTable* table = nullptr) {
    FieldValues out;
    const int N = cs.N();
    switch (cfg.problem) {
    case ProblemType::Helmholtz: {
        const HelmholtzConstants k = helmholtz_constants(cfg.kappa);
        Timer ta;
        const ComplexOperator A = table != nullptr ? assemble_helmholtz(*table, q, cfg.coupling)
                                  : q.kind == QuadratureKind::Kress
                                      ? assemble_helmholtz_kress(cs, k, cfg.coupling)
                                      : assemble_helmholtz(HelmholtzKernelTable(cs, k), q, cfg.coupling);
        out.assemble_seconds = ta.seconds();
        Eigen::VectorXcd f(N);
        for (int n = 0; n < N; ++n)
            f(n) = point_source_field(cfg, cs[n].pos);
        Timer ts;
        const auto rep = solve_direct(A, f);
        out.solve_seconds = ts.seconds();
        out.helmholtz = eval_helmholtz_combined(cs, k, rep.solution, targets, cfg.coupling);
        break;
    }
    case ProblemType::Stokes: {
        Timer ta;
        const RealOperator A = assemble_stokes(cs, q);
        out.assemble_seconds = ta.seconds();
        Eigen::VectorXd b(2 * N);
        for (int n = 0; n < N; ++n) {
            const Vec2 u = shear_flow(cs[n].pos);
            b(2 * n) = -u.x;
            b(2 * n + 1) = -u.y;
        }
        Timer ts;
        const auto rep = solve_direct(A, b);
        out.solve_seconds = ts.seconds();
        out.stokes = eval_stokes_combined(cs, rep.solution, targets);
        for (std::size_t i = 0; i < targets.size(); ++i)
            out.stokes[i] += shear_flow(targets[i]);
        break;
    }
    case ProblemType::Laplace: {
        if (N % 8 != 0)
            throw InvalidInput("laplace sweep: N must be a multiple of 8, got " + std::to_string(N));
        std::vector<double> tau(static_cast<std::size_t>(N));
        for (int n = 0; n < N; ++n)
            tau[n] = laplace_density(cs.grid.node(n));
        Timer ta;
        const RealOperator K = q.kind == QuadratureKind::Kress ? kress_laplace_operator(cs) : RealOperator();
        for (std::size_t i = 0; i < laplace_target_parameters().size(); ++i) {
            const int m = static_cast<int>(i) * N / 8;
            double v = 0.0;
            if (q.kind == QuadratureKind::Kress) {
                for (int n = 0; n < N; ++n)
                    v += K(m, n) * tau[n];
            } else {
                v = laplace_slp_row(cs, m, q.correction).apply(tau);
            }
            out.laplace.push_back(v);
        }
        out.assemble_seconds = ta.seconds();
        break;
    }
    }
    return out;
}

/// max_t |u - u_ref| / max_t |u_ref|
inline double max_relative_error(const FieldValues& u, const FieldValues& ref) {
    double e = 0.0, s = 0.0;
    for (std::size_t i = 0; i < u.helmholtz.size(); ++i) {
        e = std::max(e, std::abs(u.helmholtz[i] - ref.helmholtz[i]));
        s = std::max(s, std::abs(ref.helmholtz[i]));
    }
    for (std::size_t i = 0; i < u.stokes.size(); ++i) {
        e = std::max(e, norm(u.stokes[i] - ref.stokes[i]));
        s = std::max(s, norm(ref.stokes[i]));
    }
    for (std::size_t i = 0; i < u.laplace.size(); ++i) {
        e = std::max(e, std::abs(u.laplace[i] - ref.laplace[i]));
        s = std::max(s, std::abs(ref.laplace[i]));
    }
    return s > 0.0 ? e / s : e;
}

inline FieldValues reference_values(const ProblemConfig& cfg) {
    if (cfg.exact_reference) {
        FieldValues ref;
        for (const auto& x : cfg.targets)
            ref.helmholtz.push_back(point_source_field(cfg, x));
        return ref;
    }
    const CurveSamples cs(cfg.curve, TrapezoidGrid(cfg.reference_N));
    return solve_and_evaluate(cfg, cs, cfg.reference_method->quadrature, cfg.targets);
}

// ---------------------------------------------------------------------------
// convergence
// ---------------------------------------------------------------------------

struct ConvergenceRow {
    int N = 0;
    std::string method;
    double order = 0.0; // nominal; 0 for Kress
    double error = 0.0;
    double assemble_seconds = 0.0;
    double solve_seconds = 0.0;
};

struct ConvergenceResult {
    std::vector<ConvergenceRow> rows;
    std::map<std::string, EocFit> eoc;
    std::vector<std::string> method_order;
};

inline ConvergenceResult run_convergence(const ProblemConfig& cfg) {
    ConvergenceResult res;
    const FieldValues ref = reference_values(cfg);
    for (const auto& m : cfg.methods)
        res.method_order.push_back(m.label);
    for (int N : cfg.N) {
        const CurveSamples cs(cfg.curve, TrapezoidGrid(N));
        std::optional<HelmholtzKernelTable> table;
        bool local = false;
        for (const auto& m : cfg.methods)
            local = local || m.quadrature.kind != QuadratureKind::Kress;
        if (cfg.problem == ProblemType::Helmholtz && local)
            table.emplace(cs, helmholtz_constants(cfg.kappa));
        for (const auto& m : cfg.methods) {
            const FieldValues u = solve_and_evaluate(cfg, cs, m.quadrature, cfg.targets,
                                                     m.quadrature.kind == QuadratureKind::Kress ? nullptr
                                                                                                : (table ? &*table : nullptr));
            res.rows.push_back({N, m.label, m.quadrature.order(), max_relative_error(u, ref), u.assemble_seconds,
                                u.solve_seconds});
        }
    }
    for (const auto& label : res.method_order) {
        std::vector<int> n;
        std::vector<double> e;
        for (const auto& r : res.rows)
            if (r.method == label) {
                n.push_back(r.N);
                e.push_back(r.error);
            }
        res.eoc[label] = fit_eoc(n, e);
    }
    return res;
}

inline std::string format_order(double order) {
    if (order <= 0.0)
        return "spectral";
    std::ostringstream s;
    s << order;
    return s.str();
}

inline std::string format_real(double v, int digits = 6) {
    if (std::isnan(v))
        return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*e", digits, v);
    return buf;
}

/// Data rows carry timings only when requested, so the default CSV is deterministic.
inline void write_convergence_csv(std::ostream& out, const ConvergenceResult& res, bool timings) {
    out << "N,method,order,max_relative_error,assemble_seconds,solve_seconds,eoc,fit_N_min,fit_N_max\n";
    for (const auto& r : res.rows) {
        const EocFit& f = res.eoc.at(r.method);
        out << r.N << ',' << r.method << ',' << format_order(r.order) << ',' << format_real(r.error, 9) << ','
            << (timings ? format_real(r.assemble_seconds, 3) : "NA") << ','
            << (timings ? format_real(r.solve_seconds, 3) : "NA") << ',' << format_real(f.eoc, 4) << ',' << f.n_min
            << ',' << f.n_max << '\n';
    }
}

inline void write_eoc_summary(std::ostream& out, const ConvergenceResult& res) {
    for (const auto& label : res.method_order) {
        const EocFit& f = res.eoc.at(label);
        double order = 0.0;
        for (const auto& r : res.rows)
            if (r.method == label)
                order = r.order;
        out << label << ": nominal " << format_order(order) << ", EOC " << format_real(f.eoc, 3) << " over N = "
            << f.n_min << ".." << f.n_max << " (" << f.points << " points)\n";
    }
}

// ---------------------------------------------------------------------------
// table1
// ---------------------------------------------------------------------------

struct Table1Row {
    Complex kappa;
    std::string method;
    double order = 0.0;
    int N = 0;
    double cond = 0.0;
    int iterations = 0;
    double residual = 0.0;
    bool converged = false;
};

inline std::vector<Table1Row> run_table1(const ProblemConfig& cfg) {
    if (cfg.problem != ProblemType::Helmholtz)
        throw InvalidInput("table1 is defined for the Helmholtz problem");
    std::vector<Table1Row> rows;
    const int N = cfg.table1.N;
    const CurveSamples cs(cfg.curve, TrapezoidGrid(N));
    for (const Complex& kappa : cfg.table1.kappas) {
        ProblemConfig c = cfg;
        c.kappa = kappa;
        const HelmholtzConstants k = helmholtz_constants(kappa);
        const HelmholtzKernelTable table(cs, k);
        Eigen::VectorXcd f(N);
        for (int n = 0; n < N; ++n)
            f(n) = point_source_field(c, cs[n].pos);
        for (const auto& m : cfg.methods) {
            const ComplexOperator A = assemble_helmholtz(table, m.quadrature, cfg.coupling);
            const auto rep = solve_gmres(A, f, cfg.gmres_tol, cfg.gmres_max_iter);
            rows.push_back({kappa, m.label, m.quadrature.order(), N, cond_2norm(A), rep.iterations,
                            rep.relative_residual, rep.converged});
        }
    }
    return rows;
}

inline void write_table1_csv(std::ostream& out, const std::vector<Table1Row>& rows) {
    out << "kappa_re,kappa_im,method,order,N,cond2,gmres_iterations,gmres_relative_residual,converged\n";
    for (const auto& r : rows)
        out << r.kappa.real() << ',' << r.kappa.imag() << ',' << r.method << ',' << format_order(r.order) << ','
            << r.N << ',' << format_real(r.cond, 6) << ',' << r.iterations << ',' << format_real(r.residual, 3)
            << ',' << (r.converged ? 1 : 0) << '\n';
}

// ---------------------------------------------------------------------------
// field
// ---------------------------------------------------------------------------

/// mask: 0 evaluated, 1 within 5h of the curve, 2 inside the curve.
struct FieldSample {
    Vec2 x;
    int mask = 0;
    Complex u = 0.0; // Helmholtz
    Vec2 v;          // Stokes
};

inline std::vector<FieldSample> run_field(const ProblemConfig& cfg) {
    if (!cfg.field)
        throw InvalidInput("config has no 'field' section");
    if (cfg.problem == ProblemType::Laplace)
        throw InvalidInput("field sampling is defined for the Helmholtz and Stokes problems");
    const FieldGrid& g = *cfg.field;
    const CurveSamples cs(cfg.curve, TrapezoidGrid(g.N));
    std::vector<FieldSample> samples;
    std::vector<Vec2> far;
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix) {
            FieldSample s;
            s.x = {g.nx == 1 ? g.xmin : g.xmin + (g.xmax - g.xmin) * ix / (g.nx - 1),
                   g.ny == 1 ? g.ymin : g.ymin + (g.ymax - g.ymin) * iy / (g.ny - 1)};
            if (!is_far_target(cs, s.x))
                s.mask = 1;
            else if (winding_number(cfg.curve, s.x) != 0)
                s.mask = 2;
            else
                far.push_back(s.x);
            samples.push_back(s);
        }
    const FieldValues u = solve_and_evaluate(cfg, cs, g.method.quadrature, far);
    std::size_t next = 0;
    for (auto& s : samples) {
        if (s.mask != 0)
            continue;
        if (cfg.problem == ProblemType::Helmholtz)
            s.u = u.helmholtz[next];
        else
            s.v = u.stokes[next];
        ++next;
    }
    return samples;
}

inline void write_field_csv(std::ostream& out, const ProblemConfig& cfg, const std::vector<FieldSample>& samples) {
    const bool helm = cfg.problem == ProblemType::Helmholtz;
    out << (helm ? "x,y,re_u,im_u,mask\n" : "x,y,u1,u2,mask\n");
    for (const auto& s : samples) {
        const double a = s.mask ? std::nan("") : (helm ? s.u.real() : s.v.x);
        const double b = s.mask ? std::nan("") : (helm ? s.u.imag() : s.v.y);
        out << format_real(s.x.x, 9) << ',' << format_real(s.x.y, 9) << ',' << format_real(a, 12) << ','
            << format_real(b, 12) << ',' << s.mask << '\n';
    }
}

} // namespace zetatrap
