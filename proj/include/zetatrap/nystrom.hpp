#pragma once

// Dense Nystrom systems for the exterior Helmholtz Dirichlet and Stokes
// problems, direct and GMRES solvers, conditioning and off-curve evaluation.

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "zetatrap/errors.hpp"
#include "zetatrap/quadrature.hpp"

namespace zetatrap {

enum class QuadratureKind { Zeta, Kress, External };

/// Selected singular quadrature. Zeta and External both carry on-grid log taps.
struct Quadrature {
    QuadratureKind kind = QuadratureKind::Zeta;
    LogCorrection correction;

    std::string name() const { return kind == QuadratureKind::Kress ? "kress" : correction.name; }
    double order() const { return kind == QuadratureKind::Kress ? 0.0 : correction.order; }

    static Quadrature zeta(int K) { return {QuadratureKind::Zeta, log_correction(build_log_stencil(K))}; }
    static Quadrature kress() { return {QuadratureKind::Kress, {}}; }
    static Quadrature external(LogCorrection c) { return {QuadratureKind::External, std::move(c)}; }
};

// ---------------------------------------------------------------------------
// Helmholtz
// ---------------------------------------------------------------------------

/// Punctured PTR matrices of S and D (kernel * speed * h, zero diagonal),
/// shared by every locally corrected quadrature on the same grid.
class HelmholtzKernelTable {
  public:
    HelmholtzKernelTable(const CurveSamples& cs, const HelmholtzConstants& k)
        : cs_(cs), k_(k), s_(cs.N(), cs.N()), d_(cs.N(), cs.N()) {
        const int N = cs.N();
        const double h = cs.h();
        s_.setZero();
        d_.setZero();
        for (int m = 0; m < N; ++m)
            for (int n = m + 1; n < N; ++n) {
                const KernelPair p = kernel_pair(cs[n], cs[m]);
                const auto [h0, h1] = hankel1_01(k.kappa * p.r);
                const Complex s = Complex(0.0, 0.25) * h0;
                const Complex g = Complex(0.0, 0.25) * k.kappa * h1 / p.r;
                s_(m, n) = s * cs[n].speed * h;
                s_(n, m) = s * cs[m].speed * h;
                // r(n <- m) = -r(m <- n)
                d_(m, n) = g * dot(p.r_vec, cs[n].normal) * cs[n].speed * h;
                d_(n, m) = -g * dot(p.r_vec, cs[m].normal) * cs[m].speed * h;
            }
    }

    const CurveSamples& samples() const { return cs_; }
    const HelmholtzConstants& constants() const { return k_; }
    const ComplexOperator& s() const { return s_; }
    const ComplexOperator& d() const { return d_; }

  private:
    CurveSamples cs_;
    HelmholtzConstants k_;
    ComplexOperator s_;
    ComplexOperator d_;
};

/// Corrected S and D operators from a kernel table.
inline std::pair<ComplexOperator, ComplexOperator> corrected_helmholtz_layers(const HelmholtzKernelTable& t,
                                                                              const LogCorrection& c) {
    const CurveSamples& cs = t.samples();
    detail::require_fits(c, cs.N());
    ComplexOperator S = t.s();
    ComplexOperator D = t.d();
    for (int m = 0; m < cs.N(); ++m) {
        detail::add_helmholtz_s_corrections(cs, m, t.constants(), c, S.row(m).data());
        detail::add_helmholtz_d_corrections(cs, m, t.constants(), c, false, D.row(m).data());
    }
    return {std::move(S), std::move(D)};
}

/// Coupling eta in the representation u = (D - i eta S)[tau].
enum class HelmholtzCoupling {
    RealKappa, // eta = Re kappa
    Kappa      // eta = kappa
};

inline Complex coupling_value(const HelmholtzConstants& k, HelmholtzCoupling c) {
    return c == HelmholtzCoupling::Kappa ? k.kappa : Complex(k.kappa.real(), 0.0);
}

/// A = 1/2 I + D - i eta S with both layers from the Kress split.
inline ComplexOperator assemble_helmholtz_kress(const CurveSamples& cs, const HelmholtzConstants& k,
                                                HelmholtzCoupling coupling = HelmholtzCoupling::RealKappa) {
    auto layers = detail::kress_helmholtz_layers(cs, k, {HelmholtzLayer::S, HelmholtzLayer::D});
    ComplexOperator A = layers[1] - Complex(0.0, 1.0) * coupling_value(k, coupling) * layers[0];
    A.diagonal().array() += 0.5;
    return A;
}

/// A = 1/2 I + D - i eta S.
inline ComplexOperator assemble_helmholtz(const HelmholtzKernelTable& t, const Quadrature& q,
                                          HelmholtzCoupling coupling = HelmholtzCoupling::RealKappa) {
    if (q.kind == QuadratureKind::Kress)
        return assemble_helmholtz_kress(t.samples(), t.constants(), coupling);
    auto [S, D] = corrected_helmholtz_layers(t, q.correction);
    ComplexOperator A = D - Complex(0.0, 1.0) * coupling_value(t.constants(), coupling) * S;
    A.diagonal().array() += 0.5;
    return A;
}

inline ComplexOperator assemble_helmholtz(const ParametricCurve& curve, const TrapezoidGrid& grid,
                                          const Complex& kappa, const Quadrature& q,
                                          HelmholtzCoupling coupling = HelmholtzCoupling::RealKappa) {
    const CurveSamples cs(curve, grid);
    const HelmholtzConstants k = helmholtz_constants(kappa);
    if (q.kind == QuadratureKind::Kress)
        return assemble_helmholtz_kress(cs, k, coupling);
    return assemble_helmholtz(HelmholtzKernelTable(cs, k), q, coupling);
}

// ---------------------------------------------------------------------------
// Stokes
// ---------------------------------------------------------------------------

/// A = 1/2 I + S + D, 2N x 2N, unknowns ordered [u1, u2] per node.
inline RealOperator assemble_stokes(const CurveSamples& cs, const Quadrature& q) {
    const int N = cs.N();
    const double h = cs.h();
    const double q4 = 1.0 / (4.0 * kPi);
    RealOperator log_part(N, N);
    if (q.kind == QuadratureKind::Kress) {
        log_part = kress_laplace_operator(cs);
    } else {
        detail::require_fits(q.correction, N);
        for (int m = 0; m < N; ++m) {
            for (int n = 0; n < N; ++n)
                log_part(m, n) = n == m ? 0.0 : -std::log(norm(cs[m].pos - cs[n].pos)) * cs[n].speed * h;
            detail::add_laplace_corrections(cs, m, q.correction, 1.0, log_part.row(m).data());
        }
    }
    RealOperator A(2 * N, 2 * N);
    for (int m = 0; m < N; ++m)
        for (int n = 0; n < N; ++n) {
            Tensor2 rr;
            Tensor2 d;
            if (n == m) {
                rr = stokes_rr_diagonal(cs[m]);
                d = stokes_d_diagonal(cs[m]);
            } else {
                const KernelPair p = kernel_pair(cs[n], cs[m]);
                rr = (1.0 / (p.r * p.r)) * Tensor2::outer(p.r_vec, p.r_vec);
                d = (dot(p.r_vec, p.source.normal) / (kPi * p.r * p.r)) * rr;
            }
            const double w = cs[n].speed * h;
            const Tensor2 block = (q4 * log_part(m, n)) * Tensor2::identity() + (q4 * w) * rr + w * d;
            A(2 * m, 2 * n) = block.xx;
            A(2 * m, 2 * n + 1) = block.xy;
            A(2 * m + 1, 2 * n) = block.yx;
            A(2 * m + 1, 2 * n + 1) = block.yy;
        }
    A.diagonal().array() += 0.5;
    return A;
}

inline RealOperator assemble_stokes(const ParametricCurve& curve, const TrapezoidGrid& grid, const Quadrature& q) {
    return assemble_stokes(CurveSamples(curve, grid), q);
}

// ---------------------------------------------------------------------------
// Solvers
// ---------------------------------------------------------------------------

enum class SolveMethod { Direct, Gmres };

template <class Scalar>
struct SolveReport {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> solution;
    SolveMethod method = SolveMethod::Direct;
    int iterations = 0;
    double relative_residual = 0.0;
    bool converged = true;
    std::optional<double> condition;
};

namespace detail {

template <class Scalar>
double relative_residual(const DenseOperator<Scalar>& A, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& x,
                         const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& b) {
    const double nb = b.norm();
    return (b - A * x).norm() / (nb > 0.0 ? nb : 1.0);
}

template <class Scalar>
void require_square(const DenseOperator<Scalar>& A, Eigen::Index n) {
    if (A.rows() != A.cols() || A.rows() != n || n == 0)
        throw InvalidInput("solver: matrix must be square and conform to the right-hand side");
}

} // namespace detail

/// LU with partial pivoting.
template <class Scalar>
SolveReport<Scalar> solve_direct(const DenseOperator<Scalar>& A, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& b) {
    detail::require_square(A, b.size());
    const Eigen::PartialPivLU<DenseOperator<Scalar>> lu(A);
    const auto pivots = lu.matrixLU().diagonal().cwiseAbs();
    const double rcond = std::min(lu.rcond(), pivots.minCoeff() / pivots.maxCoeff());
    if (!(rcond > 1e2 * std::numeric_limits<double>::epsilon()))
        throw SolverError("solve_direct: matrix is singular to working precision (rcond " + std::to_string(rcond) + ")");
    SolveReport<Scalar> rep;
    rep.solution = lu.solve(b);
    rep.method = SolveMethod::Direct;
    rep.relative_residual = detail::relative_residual(A, rep.solution, b);
    return rep;
}

/// Unrestarted, unpreconditioned GMRES from x0 = 0. Modified Gram-Schmidt with
/// one reorthogonalization pass, Givens rotations. Nonconvergence is reported,
/// not thrown.
template <class Scalar>
SolveReport<Scalar> solve_gmres(const DenseOperator<Scalar>& A, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& b,
                                double tol = 1e-14, int max_iter = 2000) {
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    detail::require_square(A, b.size());
    if (!(tol > 0.0) || max_iter < 1)
        throw InvalidInput("solve_gmres: tol > 0 and max_iter >= 1 required");

    const Eigen::Index n = b.size();
    SolveReport<Scalar> rep;
    rep.method = SolveMethod::Gmres;
    const double beta = b.norm();
    if (beta == 0.0) {
        rep.solution = Vec::Zero(n);
        rep.iterations = 1;
        return rep;
    }

    const int limit = static_cast<int>(std::min<Eigen::Index>(max_iter, n));
    std::vector<Vec> V;
    V.reserve(static_cast<std::size_t>(limit) + 1);
    V.push_back(b / beta);
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> H =
        Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(limit + 1, limit);
    std::vector<Scalar> cs(static_cast<std::size_t>(limit)), sn(static_cast<std::size_t>(limit));
    Vec g = Vec::Zero(limit + 1);
    g(0) = beta;

    int k = 0;
    double est = 1.0;
    while (k < limit) {
        Vec w = A * V[static_cast<std::size_t>(k)];
        for (int pass = 0; pass < 2; ++pass)
            for (int i = 0; i <= k; ++i) {
                const Scalar hij = V[static_cast<std::size_t>(i)].dot(w);
                H(i, k) += hij;
                w -= hij * V[static_cast<std::size_t>(i)];
            }
        const double hnext = w.norm();
        H(k + 1, k) = hnext;

        // Rotations act as [c s; -conj(s) c] with real c.
        using Eigen::numext::conj;
        for (int i = 0; i < k; ++i) {
            const Scalar t = cs[i] * H(i, k) + sn[i] * H(i + 1, k);
            H(i + 1, k) = -conj(sn[i]) * H(i, k) + cs[i] * H(i + 1, k);
            H(i, k) = t;
        }
        const Scalar hkk = H(k, k);
        const double a = std::abs(hkk);
        const double rho = std::hypot(a, hnext);
        if (a == 0.0) {
            cs[k] = 0.0;
            sn[k] = 1.0;
            H(k, k) = hnext;
        } else {
            cs[k] = a / rho;
            sn[k] = hkk / a * (hnext / rho);
            H(k, k) = hkk / a * rho;
        }
        H(k + 1, k) = 0.0;
        g(k + 1) = -conj(sn[k]) * g(k);
        g(k) = cs[k] * g(k);
        ++k;
        est = std::abs(g(k)) / beta;
        if (est <= tol || hnext == 0.0)
            break;
        V.push_back(w / hnext);
    }

    Vec y = H.topLeftCorner(k, k).template triangularView<Eigen::Upper>().solve(g.head(k));
    Vec x = Vec::Zero(n);
    for (int i = 0; i < k; ++i)
        x += y(i) * V[static_cast<std::size_t>(i)];
    rep.solution = std::move(x);
    rep.iterations = k;
    rep.relative_residual = detail::relative_residual(A, rep.solution, b);
    rep.converged = est <= tol;
    return rep;
}

/// sigma_max / sigma_min from a dense SVD; dimension <= 4096.
template <class Scalar>
double cond_2norm(const DenseOperator<Scalar>& A) {
    if (A.rows() != A.cols() || A.rows() == 0)
        throw InvalidInput("cond_2norm: square nonempty matrix required");
    if (A.rows() > 4096)
        throw SolverError("cond_2norm: dimension " + std::to_string(A.rows()) + " exceeds the dense SVD budget of 4096");
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> M = A;
    const Eigen::BDCSVD<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> svd(M);
    const auto& s = svd.singularValues();
    const double smin = s(s.size() - 1);
    return smin > 0.0 ? s(0) / smin : std::numeric_limits<double>::infinity();
}

// ---------------------------------------------------------------------------
// Off-curve evaluation
// ---------------------------------------------------------------------------

enum class PotentialKind { LaplaceSlp, HelmholtzCombined, StokesCombined };

namespace detail {

inline void require_far(const CurveSamples& cs, const Vec2& x) {
    const double limit = 5.0 * cs.h();
    for (const auto& j : cs.jets)
        if (norm(x - j.pos) < limit)
            throw NotSupported("eval_potential: target (" + std::to_string(x.x) + ", " + std::to_string(x.y) +
                               ") is within 5h of the curve; near-field evaluation is not supported");
}

} // namespace detail

/// True when x is at least 5h away from every node.
inline bool is_far_target(const CurveSamples& cs, const Vec2& x) {
    const double limit = 5.0 * cs.h();
    for (const auto& j : cs.jets)
        if (norm(x - j.pos) < limit)
            return false;
    return true;
}

/// Laplace: int -log r tau ds. Density of size N.
inline std::vector<double> eval_laplace_slp(const CurveSamples& cs, const std::vector<double>& tau,
                                            const std::vector<Vec2>& targets) {
    if (static_cast<int>(tau.size()) != cs.N())
        throw InvalidInput("eval_potential: density size mismatch");
    std::vector<double> out;
    for (const auto& x : targets) {
        detail::require_far(cs, x);
        double acc = 0.0;
        for (int n = 0; n < cs.N(); ++n)
            acc += -std::log(norm(x - cs[n].pos)) * tau[n] * cs[n].speed;
        out.push_back(acc * cs.h());
    }
    return out;
}

/// Helmholtz: (D - i eta S)[tau](x).
inline std::vector<Complex> eval_helmholtz_combined(const CurveSamples& cs, const HelmholtzConstants& k,
                                                    const Eigen::VectorXcd& tau, const std::vector<Vec2>& targets,
                                                    HelmholtzCoupling coupling = HelmholtzCoupling::RealKappa) {
    if (tau.size() != cs.N())
        throw InvalidInput("eval_potential: density size mismatch");
    std::vector<Complex> out;
    const Complex ik = Complex(0.0, 1.0) * coupling_value(k, coupling);
    for (const auto& x : targets) {
        detail::require_far(cs, x);
        Complex acc = 0.0;
        for (int n = 0; n < cs.N(); ++n) {
            const Vec2 rv = x - cs[n].pos;
            const double r = norm(rv);
            const auto [h0, h1] = hankel1_01(k.kappa * r);
            const Complex s = Complex(0.0, 0.25) * h0;
            const Complex d = Complex(0.0, 0.25) * k.kappa * h1 * dot(rv, cs[n].normal) / r;
            acc += (d - ik * s) * tau(n) * cs[n].speed;
        }
        out.push_back(acc * cs.h());
    }
    return out;
}

/// Stokes: (S + D)[tau](x); density ordered [u1, u2] per node.
inline std::vector<Vec2> eval_stokes_combined(const CurveSamples& cs, const Eigen::VectorXd& tau,
                                              const std::vector<Vec2>& targets) {
    if (tau.size() != 2 * cs.N())
        throw InvalidInput("eval_potential: density size mismatch");
    std::vector<Vec2> out;
    for (const auto& x : targets) {
        detail::require_far(cs, x);
        Vec2 acc;
        for (int n = 0; n < cs.N(); ++n) {
            CurveJet tgt;
            tgt.pos = x;
            const StokesKernels kk = stokes_kernels(kernel_pair(cs[n], tgt));
            const Vec2 t{tau(2 * n), tau(2 * n + 1)};
            acc += ((kk.S + kk.D) * t) * cs[n].speed;
        }
        out.push_back(acc * cs.h());
    }
    return out;
}

} // namespace zetatrap
