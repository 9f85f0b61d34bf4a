#pragma once

// Trapezoidal machinery on closed curves: PTR, zeta-corrected operator rows
// and the Kress spectral baseline.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "zetatrap/errors.hpp"
#include "zetatrap/geometry.hpp"
#include "zetatrap/kernels.hpp"
#include "zetatrap/zetaweights.hpp"

namespace zetatrap {

template <class Scalar>
using DenseOperator = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RealOperator = DenseOperator<double>;
using ComplexOperator = DenseOperator<Complex>;

struct TrapezoidGrid {
    int N = 0;
    double h = 0.0;

    explicit TrapezoidGrid(int n, double period = kTwoPi) : N(n), h(period / n) {
        if (n < 16)
            throw InvalidInput("trapezoid grid: N >= 16 required, got " + std::to_string(n));
        if (!(period > 0.0))
            throw InvalidInput("trapezoid grid: period must be positive");
    }
    double node(int n) const { return n * h; }
    int wrap(int n) const { return ((n % N) + N) % N; }
};

/// Curve jets at the grid nodes.
struct CurveSamples {
    TrapezoidGrid grid;
    std::vector<CurveJet> jets;

    CurveSamples(const ParametricCurve& curve, const TrapezoidGrid& g) : grid(g) {
        jets.reserve(static_cast<std::size_t>(g.N));
        for (int n = 0; n < g.N; ++n)
            jets.push_back(jet(curve, g.node(n)));
    }
    int N() const { return grid.N; }
    double h() const { return grid.h; }
    const CurveJet& operator[](int n) const { return jets[static_cast<std::size_t>(grid.wrap(n))]; }
    double max_speed() const {
        double s = 0.0;
        for (const auto& j : jets)
            s = std::max(s, j.speed);
        return s;
    }
};

template <class Scalar>
struct OperatorRow {
    int target = 0;
    std::vector<Scalar> weights;

    template <class T>
    auto apply(const std::vector<T>& density) const {
        using R = decltype(Scalar{} * T{});
        if (density.size() != weights.size())
            throw InvalidInput("operator row: density size mismatch");
        R acc{};
        for (std::size_t n = 0; n < weights.size(); ++n)
            acc += weights[n] * density[n];
        return acc;
    }
};

template <class Scalar>
Scalar ptr(const std::vector<Scalar>& samples, double h) {
    if (samples.size() < 16)
        throw InvalidInput("ptr: N >= 16 samples required");
    Scalar acc{};
    for (const auto& s : samples)
        acc += s;
    return acc * h;
}

// ---------------------------------------------------------------------------
// Correction taps
// ---------------------------------------------------------------------------

/// Weights applied at integer offsets from the target node to the smooth
/// factor multiplying -log|x|. A zeta stencil becomes (0, 2 w_0), (+-j, w_j).
struct LogCorrection {
    std::string name;
    double order = 0.0;
    std::vector<std::pair<int, double>> taps;

    int reach() const {
        int r = 0;
        for (const auto& [o, w] : taps)
            r = std::max(r, std::abs(o));
        return r;
    }
};

inline LogCorrection log_correction(const CorrectionStencil& s) {
    if (s.kind != StencilKind::Log)
        throw InvalidInput("log correction requires a Log stencil");
    LogCorrection c;
    c.name = "zeta" + std::to_string(static_cast<int>(s.order));
    c.order = s.order;
    c.taps.emplace_back(0, 2.0 * s.weights[0]);
    for (int j = 1; j <= s.K; ++j) {
        c.taps.emplace_back(j, s.weights[static_cast<std::size_t>(j)]);
        c.taps.emplace_back(-j, s.weights[static_cast<std::size_t>(j)]);
    }
    return c;
}

namespace detail {

inline void require_fits(const LogCorrection& c, int N) {
    if (2 * c.reach() + 1 >= N)
        throw InvalidInput("correction stencil of half-width " + std::to_string(c.reach()) +
                           " is too wide for N = " + std::to_string(N));
}

/// Diagonal and band terms of the corrected Laplace rule, added to a punctured row.
template <class Scalar>
void add_laplace_corrections(const CurveSamples& cs, int m, const LogCorrection& c, Scalar scale, Scalar* row) {
    const double h = cs.h();
    const double sm = cs[m].speed;
    row[m] += scale * (-sm * h * std::log(sm * h));
    for (const auto& [o, w] : c.taps)
        row[cs.grid.wrap(m + o)] += scale * (h * w * cs[m + o].speed);
}

/// S: diagonal (h/2pi)(c_gamma - log(speed h)) speed plus taps on J0(kr) speed / 2pi.
inline void add_helmholtz_s_corrections(const CurveSamples& cs, int m, const HelmholtzConstants& k,
                                        const LogCorrection& c, Complex* row) {
    const double h = cs.h();
    const CurveJet& tm = cs[m];
    row[m] += h / (2.0 * kPi) * (k.c_gamma - std::log(tm.speed * h)) * tm.speed;
    for (const auto& [o, w] : c.taps) {
        const KernelPair p = kernel_pair(cs[m + o], tm);
        row[cs.grid.wrap(m + o)] += h * w * smooth_factor_s(p, k, p.source.speed);
    }
}

/// D or D*: diagonal h c0 speed plus taps (nonzero offsets) on the J1 factor.
inline void add_helmholtz_d_corrections(const CurveSamples& cs, int m, const HelmholtzConstants& k,
                                        const LogCorrection& c, bool adjoint, Complex* row) {
    const double h = cs.h();
    const CurveJet& tm = cs[m];
    row[m] += h * tm.c0 * tm.speed;
    for (const auto& [o, w] : c.taps) {
        if (cs.grid.wrap(m + o) == m)
            continue;
        const KernelPair p = kernel_pair(cs[m + o], tm);
        const Complex f =
            adjoint ? smooth_factor_dstar(p, k, p.source.speed) : smooth_factor_d(p, k, p.source.speed);
        row[cs.grid.wrap(m + o)] += h * w * f;
    }
}

} // namespace detail

// ---------------------------------------------------------------------------
// Corrected rows
// ---------------------------------------------------------------------------

/// Row of the Laplace single layer  int -log|rho(t_m) - rho(s)| tau(s) |rho'(s)| ds.
inline OperatorRow<double> laplace_slp_row(const CurveSamples& cs, int m, const LogCorrection& c) {
    detail::require_fits(c, cs.N());
    OperatorRow<double> row{m, std::vector<double>(static_cast<std::size_t>(cs.N()), 0.0)};
    for (int n = 0; n < cs.N(); ++n)
        if (n != m)
            row.weights[n] = laplace_slp(kernel_pair(cs[n], cs[m])) * cs[n].speed * cs.h();
    detail::add_laplace_corrections(cs, m, c, 1.0, row.weights.data());
    return row;
}

inline OperatorRow<double> laplace_slp_row(const CurveSamples& cs, int m, const CorrectionStencil& s) {
    return laplace_slp_row(cs, m, log_correction(s));
}

enum class HelmholtzLayer { S, D, Dstar };

inline OperatorRow<Complex> helmholtz_row(const CurveSamples& cs, int m, const HelmholtzConstants& k,
                                          const LogCorrection& c, HelmholtzLayer which) {
    detail::require_fits(c, cs.N());
    OperatorRow<Complex> row{m, std::vector<Complex>(static_cast<std::size_t>(cs.N()), 0.0)};
    for (int n = 0; n < cs.N(); ++n) {
        if (n == m)
            continue;
        const KernelPair p = kernel_pair(cs[n], cs[m]);
        Complex v;
        switch (which) {
        case HelmholtzLayer::S: v = helmholtz_s(p, k); break;
        case HelmholtzLayer::D: v = helmholtz_d(p, k); break;
        case HelmholtzLayer::Dstar: v = helmholtz_dstar(p, k); break;
        }
        row.weights[n] = v * cs[n].speed * cs.h();
    }
    if (which == HelmholtzLayer::S)
        detail::add_helmholtz_s_corrections(cs, m, k, c, row.weights.data());
    else
        detail::add_helmholtz_d_corrections(cs, m, k, c, which == HelmholtzLayer::Dstar, row.weights.data());
    return row;
}

inline OperatorRow<Complex> helmholtz_s_row(const CurveSamples& cs, int m, const HelmholtzConstants& k,
                                            const LogCorrection& c) {
    return helmholtz_row(cs, m, k, c, HelmholtzLayer::S);
}
inline OperatorRow<Complex> helmholtz_d_row(const CurveSamples& cs, int m, const HelmholtzConstants& k,
                                            const LogCorrection& c) {
    return helmholtz_row(cs, m, k, c, HelmholtzLayer::D);
}
inline OperatorRow<Complex> helmholtz_dstar_row(const CurveSamples& cs, int m, const HelmholtzConstants& k,
                                                const LogCorrection& c) {
    return helmholtz_row(cs, m, k, c, HelmholtzLayer::Dstar);
}

/// 2x2-block rows of the Stokes single and double layers at target m.
struct StokesRows {
    int target = 0;
    std::vector<Tensor2> S;
    std::vector<Tensor2> D;
};

inline StokesRows stokes_rows(const CurveSamples& cs, int m, const LogCorrection& c) {
    const int N = cs.N();
    const double h = cs.h();
    const OperatorRow<double> log_row = laplace_slp_row(cs, m, c);
    StokesRows rows{m, std::vector<Tensor2>(static_cast<std::size_t>(N)), std::vector<Tensor2>(static_cast<std::size_t>(N))};
    const double q = 1.0 / (4.0 * kPi);
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
        rows.S[n] = (q * log_row.weights[n]) * Tensor2::identity() + (q * w) * rr;
        rows.D[n] = w * d;
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Kress baseline
// ---------------------------------------------------------------------------

/// R(t_d), d = 0..N-1: quadrature weights for int_0^{2pi} log(4 sin^2((t-s)/2)) g(s) ds.
inline std::vector<double> kress_log_weights(int N) {
    if (N < 16 || N % 2 != 0)
        throw InvalidInput("kress: N must be even and >= 16, got " + std::to_string(N));
    const int n = N / 2;
    std::vector<double> R(static_cast<std::size_t>(N));
    for (int d = 0; d < N; ++d) {
        const double t = kTwoPi * d / N;
        double acc = 0.0;
        for (int m = 1; m < n; ++m)
            acc += std::cos(m * t) / m;
        R[d] = -(4.0 * kPi / N) * acc - (4.0 * kPi / (static_cast<double>(N) * N)) * std::cos(n * t);
    }
    return R;
}

inline RealOperator kress_log_matrix(int N) {
    const auto R = kress_log_weights(N);
    RealOperator M(N, N);
    for (int j = 0; j < N; ++j)
        for (int k = 0; k < N; ++k)
            M(j, k) = R[static_cast<std::size_t>(((j - k) % N + N) % N)];
    return M;
}

namespace detail {

/// log(4 sin^2((t_j - t_k)/2)) on the grid.
inline double periodic_log(const TrapezoidGrid& g, int j, int k) {
    const double s = std::sin(0.5 * (g.node(j) - g.node(k)));
    return std::log(4.0 * s * s);
}

} // namespace detail

/// Kress discretization of the Laplace single layer (kernel -log r times speed).
inline RealOperator kress_laplace_operator(const CurveSamples& cs) {
    const int N = cs.N();
    const double h = cs.h();
    const auto R = kress_log_weights(N);
    RealOperator A(N, N);
    for (int j = 0; j < N; ++j)
        for (int k = 0; k < N; ++k) {
            const double sk = cs[k].speed;
            const double k1 = -0.5 * sk;
            double k2;
            if (j == k) {
                k2 = -std::log(sk) * sk;
            } else {
                const double r = norm(cs[j].pos - cs[k].pos);
                k2 = -std::log(r) * sk - k1 * detail::periodic_log(cs.grid, j, k);
            }
            A(j, k) = R[static_cast<std::size_t>(((j - k) % N + N) % N)] * k1 + h * k2;
        }
    return A;
}

namespace detail {

/// Kress discretizations of the requested Helmholtz layers in one pass over
/// the pairs: A_jk = R(t_j - t_k) K1_jk + h K2_jk.
inline std::vector<ComplexOperator> kress_helmholtz_layers(const CurveSamples& cs, const HelmholtzConstants& k,
                                                           const std::vector<HelmholtzLayer>& which) {
    const int N = cs.N();
    const double h = cs.h();
    const auto R = kress_log_weights(N);
    std::vector<ComplexOperator> out(which.size(), ComplexOperator(N, N));
    for (int j = 0; j < N; ++j) {
        const CurveJet& tj = cs[j];
        for (int l = 0; l < N; ++l) {
            const CurveJet& sl = cs[l];
            const double rw = R[static_cast<std::size_t>(((j - l) % N + N) % N)];
            if (j == l) {
                for (std::size_t q = 0; q < which.size(); ++q) {
                    if (which[q] == HelmholtzLayer::S) {
                        const double k1 = -sl.speed / (4.0 * kPi);
                        const Complex k2 = (k.c_gamma - std::log(sl.speed)) * sl.speed / (2.0 * kPi);
                        out[q](j, l) = rw * k1 + h * k2;
                    } else {
                        out[q](j, l) = h * tj.c0 * tj.speed;
                    }
                }
                continue;
            }
            const KernelPair p = kernel_pair(sl, tj);
            const auto bh = bessel_hankel01(k.kappa * p.r);
            const double plog = periodic_log(cs.grid, j, l);
            for (std::size_t q = 0; q < which.size(); ++q) {
                Complex k1;
                Complex kernel;
                if (which[q] == HelmholtzLayer::S) {
                    k1 = -bh.j0 * sl.speed / (4.0 * kPi);
                    kernel = Complex(0.0, 0.25) * bh.h0;
                } else {
                    const double rn =
                        which[q] == HelmholtzLayer::D ? dot(p.r_vec, sl.normal) : -dot(p.r_vec, tj.normal);
                    k1 = -k.kappa * bh.j1 * rn / (4.0 * kPi * p.r) * sl.speed;
                    kernel = Complex(0.0, 0.25) * k.kappa * bh.h1 * rn / p.r;
                }
                const Complex k2 = kernel * sl.speed - k1 * plog;
                out[q](j, l) = rw * k1 + h * k2;
            }
        }
    }
    return out;
}

} // namespace detail

/// Kress discretization of one Helmholtz layer.
inline ComplexOperator kress_helmholtz_operator(const CurveSamples& cs, const HelmholtzConstants& k,
                                                HelmholtzLayer which) {
    return std::move(detail::kress_helmholtz_layers(cs, k, {which}).front());
}

} // namespace zetatrap
