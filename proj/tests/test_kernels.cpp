#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "zetatrap/kernels.hpp"

#include "data/specfun_oracle.inc"

using namespace zetatrap;

namespace {

CurveJet point_jet(const Vec2& pos, const Vec2& normal = {1.0, 0.0}) {
    CurveJet j;
    j.pos = pos;
    j.normal = normal;
    j.d1 = {-normal.y, normal.x};
    j.speed = 1.0;
    return j;
}

} // namespace

TEST(Laplace, Examples) {
    EXPECT_EQ(laplace_slp(kernel_pair(point_jet({0, 0}), point_jet({1, 0}))), 0.0);
    EXPECT_NEAR(laplace_slp(kernel_pair(point_jet({0, 0}), point_jet({std::exp(1.0), 0}))), -1.0, 1e-15);
    EXPECT_THROW(laplace_slp(kernel_pair(point_jet({1, 0}), point_jet({1, 0}))), DomainError);
}

TEST(Laplace, CircleIntegralVanishesOnUnitCircle) {
    // Half-shifted nodes: prod_n 2 sin(pi (n + 1/2) / N) = 2, so the rule gives -(2 pi / N) log 2 -> 0.
    const auto c = circle_curve(1.0);
    for (int N : {64, 256, 1024})
        for (double t0 : {0.0, 1.1, 3.0}) {
            double sum = 0.0;
            for (int n = 0; n < N; ++n) {
                const double t = t0 + kTwoPi * (n + 0.5) / N;
                sum += laplace_slp(kernel_pair(jet(c, t), jet(c, t0))) * kTwoPi / N;
            }
            EXPECT_NEAR(sum, -kTwoPi / N * std::log(2.0), 1e-13);
        }
}

TEST(Helmholtz, ConstantsRejectBadWavenumbers) {
    EXPECT_THROW(helmholtz_constants(0.0), InvalidInput);
    EXPECT_THROW(helmholtz_constants({1.0, -1.0}), DomainError);
    const auto k = helmholtz_constants(12.5);
    EXPECT_NEAR(k.c_gamma.imag(), kPi / 2.0, 1e-15);
    EXPECT_NEAR(k.c_gamma.real(), -(std::log(6.25) + kEulerGamma), 1e-14);
}

TEST(Helmholtz, SingleLayerSplitLimit) {
    // s(r) + log(r) J0(kr)/2pi -> c_gamma/2pi, with an O(r^2 log r) residual.
    for (Complex kappa : {Complex(12.5, 0.0), Complex(12.5, 10.0), Complex(0.5, 0.0)}) {
        const auto k = helmholtz_constants(kappa);
        double prev = 0.0;
        for (double r : {1e-3, 1e-4, 1e-5}) {
            const auto p = kernel_pair(point_jet({0, 0}), point_jet({r, 0}));
            const Complex split = helmholtz_s(p, k) + std::log(r) * bessel_j(0, kappa * r) / (2.0 * kPi);
            const double err = std::abs(split - k.c_gamma / (2.0 * kPi));
            EXPECT_LT(err, 1e-4 * std::abs(kappa) * std::abs(kappa) + 1e-12);
            if (prev > 0.0) {
                EXPECT_GT(prev / std::max(err, 1e-16), 50.0) << kappa << " r " << r;
            }
            prev = err;
        }
        EXPECT_LT(prev, 1e-8);
    }
}

TEST(Helmholtz, MatchesHankelOracle) {
    const auto k = helmholtz_constants(12.5);
    const auto p = kernel_pair(point_jet({0, 0}), point_jet({0.5, 0}));
    Complex h0 = 0.0;
    for (const auto& o : kBesselOracle)
        if (o.re == 6.25 && o.im == 0.0)
            h0 = {o.h0[0], o.h0[1]};
    ASSERT_NE(h0, Complex(0.0));
    EXPECT_LE(std::abs(helmholtz_s(p, k) - Complex(0.0, 0.25) * h0), 1e-12 * std::abs(h0));
}

TEST(Helmholtz, Reciprocity) {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0), ang(0.0, kTwoPi);
    for (Complex kappa : {Complex(12.5, 0.0), Complex(3.0, 2.0)}) {
        const auto k = helmholtz_constants(kappa);
        for (int i = 0; i < 20; ++i) {
            const double a = ang(rng), b = ang(rng);
            const CurveJet x = point_jet({u(rng), u(rng)}, {std::cos(a), std::sin(a)});
            const CurveJet y = point_jet({u(rng), u(rng)}, {std::cos(b), std::sin(b)});
            const Complex d = helmholtz_d(kernel_pair(y, x), k);
            const Complex ds = helmholtz_dstar(kernel_pair(x, y), k);
            EXPECT_LE(std::abs(d - ds), 1e-14 * std::max(1.0, std::abs(d)));
        }
    }
}

TEST(Helmholtz, DoubleLayerMatchesNormalDerivative) {
    // d = dG/dn_source by central differences.
    const auto k = helmholtz_constants({4.0, 1.0});
    const CurveJet y = point_jet({0.1, -0.2}, {0.6, 0.8});
    const CurveJet x = point_jet({0.7, 0.4});
    const double e = 1e-6;
    const auto G = [&](const Vec2& src) { return helmholtz_s(kernel_pair(point_jet(src), x), k); };
    const Complex fd = (G(y.pos + e * y.normal) - G(y.pos - e * y.normal)) / (2.0 * e);
    EXPECT_LE(std::abs(fd - helmholtz_d(kernel_pair(y, x), k)), 1e-8);
}

TEST(SmoothFactors, Limits) {
    const auto c = star_curve();
    const auto k = helmholtz_constants({12.5, 10.0});
    const CurveJet a = jet(c, 0.4);
    const double taut = 1.7;
    const auto same = kernel_pair(a, a);
    EXPECT_EQ(smooth_factor_s(same, k, taut), Complex(taut / (2.0 * kPi)));
    EXPECT_EQ(smooth_factor_d(same, k, taut), Complex(0.0));
    EXPECT_EQ(smooth_factor_dstar(same, k, taut), Complex(0.0));

    double prev_s = 0.0, prev_d = 0.0;
    for (double eps : {1e-2, 1e-3, 1e-4}) {
        const auto p = kernel_pair(jet(c, 0.4 + eps), a);
        const double es = std::abs(smooth_factor_s(p, k, taut) - smooth_factor_s(same, k, taut));
        const double ed = std::abs(smooth_factor_d(p, k, taut));
        EXPECT_LT(std::abs(smooth_factor_dstar(p, k, taut)), 10.0 * eps);
        if (prev_s > 0.0) {
            EXPECT_GT(prev_s / es, 5.0);
            EXPECT_GT(prev_d / ed, 5.0);
        }
        prev_s = es;
        prev_d = ed;
    }
    EXPECT_LT(prev_d, 1e-2);
}

TEST(SmoothFactors, GenericPointMatchesDirectFormula) {
    const auto k = helmholtz_constants({7.0, 0.5});
    const CurveJet y = point_jet({0.0, 0.0}, {0.0, 1.0});
    const CurveJet x = point_jet({0.3, 0.4}, {1.0, 0.0});
    const auto p = kernel_pair(y, x);
    const Complex z = k.kappa * 0.5;
    EXPECT_LE(std::abs(smooth_factor_s(p, k, 2.0) - bessel_j(0, z) * 2.0 / (2.0 * kPi)), 1e-15);
    EXPECT_LE(std::abs(smooth_factor_d(p, k, 2.0) - k.kappa * bessel_j(1, z) * 0.4 / (2.0 * kPi * 0.5) * 2.0), 1e-14);
    EXPECT_LE(std::abs(smooth_factor_dstar(p, k, 2.0) + k.kappa * bessel_j(1, z) * 0.3 / (2.0 * kPi * 0.5) * 2.0),
              1e-14);
}

TEST(Stokes, CircleIdentity) {
    for (double R : {1.0, 2.5}) {
        const auto c = circle_curve(R);
        for (double s : {0.0, 1.0, 2.0})
            for (double t : {0.5, 3.0, 5.0}) {
                const auto p = kernel_pair(jet(c, s), jet(c, t));
                EXPECT_NEAR(dot(p.r_vec, p.source.normal) / (p.r * p.r), -1.0 / (2.0 * R), 1e-14);
            }
    }
}

TEST(Stokes, TensorsAreSymmetric) {
    const auto c = star_curve();
    const auto k = stokes_kernels(kernel_pair(jet(c, 0.3), jet(c, 2.0)));
    EXPECT_DOUBLE_EQ(k.S.xy, k.S.yx);
    EXPECT_DOUBLE_EQ(k.D.xy, k.D.yx);
}

TEST(Stokes, DiagonalLimits) {
    const auto c = star_curve();
    const double t = 0.9;
    const CurveJet a = jet(c, t);
    const Tensor2 rr0 = stokes_rr_diagonal(a);
    const Tensor2 d0 = stokes_d_diagonal(a);
    // Richardson on separations e and e/2 (both limits are approached at O(e)).
    for (double e : {1e-2, 1e-3}) {
        const auto at = [&](double sep) {
            const auto p = kernel_pair(jet(c, t + sep), a);
            const Tensor2 rr = (1.0 / (p.r * p.r)) * Tensor2::outer(p.r_vec, p.r_vec);
            return std::make_pair(rr, stokes_kernels(p).D);
        };
        const auto [rr1, D1] = at(e);
        const auto [rr2, D2] = at(e / 2.0);
        const Tensor2 rr = 2.0 * rr2 + (-1.0) * rr1;
        const Tensor2 D = 2.0 * D2 + (-1.0) * D1;
        const double tol = 50.0 * e * e;
        EXPECT_NEAR(rr.xx, rr0.xx, tol);
        EXPECT_NEAR(rr.xy, rr0.xy, tol);
        EXPECT_NEAR(rr.yy, rr0.yy, tol);
        EXPECT_NEAR(D.xx, d0.xx, tol);
        EXPECT_NEAR(D.xy, d0.xy, tol);
        EXPECT_NEAR(D.yy, d0.yy, tol);
    }
}
