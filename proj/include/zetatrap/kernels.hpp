#pragma once

// Pointwise kernels and their smooth split factors.
//
// Laplace:   -log r
// Helmholtz: s = (i/4) H0(kr),  d = (ik/4) H1(kr) (r.n_src)/r,  d* = -(ik/4) H1(kr) (r.n_tgt)/r
// Stokes:    S = (1/4pi)(-log r I + r r^T/r^2),  D = (1/pi)(r.n_src/r^2)(r r^T/r^2)
// with r = target - source throughout.

#include <cmath>
#include <complex>
#include <string>

#include "zetatrap/errors.hpp"
#include "zetatrap/geometry.hpp"
#include "zetatrap/specfun.hpp"

namespace zetatrap {

struct KernelPair {
    CurveJet source;
    CurveJet target;
    Vec2 r_vec; // target.pos - source.pos
    double r = 0.0;
};

inline KernelPair kernel_pair(const CurveJet& source, const CurveJet& target) {
    KernelPair p{source, target, target.pos - source.pos, 0.0};
    p.r = norm(p.r_vec);
    return p;
}

struct HelmholtzConstants {
    Complex kappa;
    Complex c_gamma; // pi i/2 - (log(kappa/2) + gamma)

    static Complex c_gamma_of(const Complex& kappa) {
        return Complex(0.0, kPi / 2.0) - (std::log(kappa / 2.0) + kEulerGamma);
    }
};

inline HelmholtzConstants helmholtz_constants(const Complex& kappa) {
    if (!(std::abs(kappa) > 0.0) || !std::isfinite(kappa.real()) || !std::isfinite(kappa.imag()))
        throw InvalidInput("helmholtz: wavenumber must be finite and nonzero");
    if (kappa.imag() < 0.0 || kappa.real() < 0.0)
        throw DomainError("helmholtz: wavenumber must lie in the closed first quadrant");
    return {kappa, HelmholtzConstants::c_gamma_of(kappa)};
}

namespace detail {

inline void require_offdiagonal(const KernelPair& p, const char* what) {
    if (!(p.r > 0.0))
        throw DomainError(std::string(what) + ": r = 0; the diagonal belongs to the corrected rule");
}

} // namespace detail

inline double laplace_slp(const KernelPair& p) {
    detail::require_offdiagonal(p, "laplace_slp");
    return -std::log(p.r);
}

inline Complex helmholtz_s(const KernelPair& p, const HelmholtzConstants& c) {
    detail::require_offdiagonal(p, "helmholtz_s");
    return Complex(0.0, 0.25) * hankel1(0, c.kappa * p.r);
}

inline Complex helmholtz_d(const KernelPair& p, const HelmholtzConstants& c) {
    detail::require_offdiagonal(p, "helmholtz_d");
    return Complex(0.0, 0.25) * c.kappa * hankel1(1, c.kappa * p.r) * dot(p.r_vec, p.source.normal) / p.r;
}

inline Complex helmholtz_dstar(const KernelPair& p, const HelmholtzConstants& c) {
    detail::require_offdiagonal(p, "helmholtz_dstar");
    return -Complex(0.0, 0.25) * c.kappa * hankel1(1, c.kappa * p.r) * dot(p.r_vec, p.target.normal) / p.r;
}

/// Coefficient of -log r in the S kernel times taut: J0(kr) taut / 2pi.
inline Complex smooth_factor_s(const KernelPair& p, const HelmholtzConstants& c, double taut) {
    if (p.r == 0.0)
        return taut / (2.0 * kPi);
    return bessel_j(0, c.kappa * p.r) * taut / (2.0 * kPi);
}

/// k J1(kr) (r.n_src) / (2 pi r) taut; vanishes at r = 0.
inline Complex smooth_factor_d(const KernelPair& p, const HelmholtzConstants& c, double taut) {
    if (p.r == 0.0)
        return 0.0;
    return c.kappa * bessel_j(1, c.kappa * p.r) * dot(p.r_vec, p.source.normal) / (2.0 * kPi * p.r) * taut;
}

/// -k J1(kr) (r.n_tgt) / (2 pi r) taut; vanishes at r = 0.
inline Complex smooth_factor_dstar(const KernelPair& p, const HelmholtzConstants& c, double taut) {
    if (p.r == 0.0)
        return 0.0;
    return -c.kappa * bessel_j(1, c.kappa * p.r) * dot(p.r_vec, p.target.normal) / (2.0 * kPi * p.r) * taut;
}

// ---------------------------------------------------------------------------
// Stokes
// ---------------------------------------------------------------------------

struct Tensor2 {
    double xx = 0.0, xy = 0.0, yx = 0.0, yy = 0.0;

    static Tensor2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static Tensor2 outer(const Vec2& a, const Vec2& b) { return {a.x * b.x, a.x * b.y, a.y * b.x, a.y * b.y}; }

    Tensor2& operator+=(const Tensor2& o) {
        xx += o.xx;
        xy += o.xy;
        yx += o.yx;
        yy += o.yy;
        return *this;
    }
    friend Tensor2 operator+(Tensor2 a, const Tensor2& b) { return a += b; }
    friend Tensor2 operator*(double s, const Tensor2& a) { return {s * a.xx, s * a.xy, s * a.yx, s * a.yy}; }
    friend Vec2 operator*(const Tensor2& a, const Vec2& v) { return {a.xx * v.x + a.xy * v.y, a.yx * v.x + a.yy * v.y}; }
};

struct StokesKernels {
    Tensor2 S;
    Tensor2 D;
};

inline StokesKernels stokes_kernels(const KernelPair& p) {
    detail::require_offdiagonal(p, "stokes_kernels");
    const double r2 = p.r * p.r;
    const Tensor2 rr = (1.0 / r2) * Tensor2::outer(p.r_vec, p.r_vec);
    StokesKernels k;
    k.S = (1.0 / (4.0 * kPi)) * ((-std::log(p.r)) * Tensor2::identity() + rr);
    k.D = (dot(p.r_vec, p.source.normal) / (kPi * r2)) * rr;
    return k;
}

/// r r^T / r^2 on the diagonal: t t^T.
inline Tensor2 stokes_rr_diagonal(const CurveJet& j) {
    const Vec2 t = j.tangent();
    return Tensor2::outer(t, t);
}

/// Diagonal of D: (1/pi)(-kappa_curv/2) t t^T.
inline Tensor2 stokes_d_diagonal(const CurveJet& j) {
    return (-j.curvature() / (2.0 * kPi)) * stokes_rr_diagonal(j);
}

} // namespace zetatrap
