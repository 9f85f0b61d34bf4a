#include <gtest/gtest.h>

#include <cmath>

#include "zetatrap/zetaweights.hpp"

using namespace zetatrap;

TEST(LogStencil, SingleWeightIsHalfLogTwoPi) {
    const auto s = build_log_stencil(0);
    ASSERT_EQ(s.weights.size(), 1u);
    EXPECT_NEAR(s.weights[0], 0.5 * std::log(2.0 * kPi), 1e-15);
    EXPECT_EQ(s.order, 2.0);
}

TEST(LogStencil, TwoWeightsSolveTheTwoByTwoSystem) {
    const auto s = build_log_stencil(1);
    // w_1 = -zeta'(-2), w_0 + w_1 = -zeta'(0)
    EXPECT_NEAR(s.weights[1], 3.044845705839327e-02, 1e-16);
    EXPECT_NEAR(s.weights[0], 8.88490076146279471e-01, 2e-16);
    EXPECT_EQ(s.order, 4.0);
}

TEST(LogStencil, MomentResidualsVanish) {
    for (int K : {2, 5, 10, 15, 20}) {
        const auto s = build_log_stencil(K);
        for (int k = 0; k <= K; ++k) {
            // normwise: |sum w_j j^2k - b_k| / sum |w_j j^2k|
            long double acc = 0.0L, scale = 0.0L;
            for (int j = 0; j <= K; ++j) {
                const long double t = static_cast<long double>(s.weights[j]) * std::pow(static_cast<long double>(j), 2 * k);
                acc += t;
                scale += std::abs(t);
            }
            const long double b = -zeta_deriv_neg_even(k);
            EXPECT_LE(static_cast<double>(std::abs(acc - b) / scale), 1e-12) << "K " << K << " k " << k;
        }
    }
}

TEST(LogStencil, HighOrderWeightsStayBounded) {
    const auto s = build_log_stencil(20);
    double worst = 0.0;
    for (double w : s.weights)
        worst = std::max(worst, std::abs(w));
    EXPECT_LE(worst, 10.0);
    EXPECT_EQ(s.order, 42.0);
}

TEST(LogStencil, RangeChecked) {
    EXPECT_THROW(build_log_stencil(-1), InvalidInput);
    EXPECT_THROW(build_log_stencil(21), InvalidInput);
}

TEST(LogStencil, MatchesFiniteStepOracle) {
    for (int K : {0, 1, 3, 6}) {
        const auto s = build_log_stencil(K);
        const auto oracle = oracle_stencil_extrapolated(K, CutoffSpec{1.0, K + 1});
        for (int j = 0; j <= K; ++j)
            EXPECT_NEAR(s.weights[j], oracle[j], 1e-9) << "K " << K << " j " << j;
    }
}

TEST(PowStencil, SingleWeightIsMinusZeta) {
    const auto s = build_pow_stencil(0, 0.5);
    EXPECT_NEAR(s.weights[0], 1.460354508809587, 1e-14);
    EXPECT_DOUBLE_EQ(s.order, 2.5);
}

TEST(PowStencil, TwoWeights) {
    const double z = -0.3;
    const auto s = build_pow_stencil(1, z);
    const double b0 = -zeta_real(z), b1 = -zeta_real(z - 2.0);
    EXPECT_NEAR(s.weights[1], b1, 1e-15);
    EXPECT_NEAR(s.weights[0], b0 - b1, 1e-14);
}

TEST(PowStencil, ExponentRangeChecked) {
    EXPECT_THROW(build_pow_stencil(1, 1.0), DomainError);
    EXPECT_THROW(build_pow_stencil(1, -1.0), DomainError);
}

TEST(PowStencil, CorrectsTheTrapezoidalRuleForPowerSingularity) {
    // int_{-1}^{1} |x|^{-z} (1 - x^2)^6 dx on the punctured grid h = 1/n.
    const double z = 0.5;
    const double exact = [&] {
        // B((1-z)/2, 7)
        const double a = (1.0 - z) / 2.0;
        return std::tgamma(a) * std::tgamma(7.0) / std::tgamma(a + 7.0);
    }();
    const auto s = build_pow_stencil(2, z);
    double prev = 0.0;
    for (int n : {16, 32, 64}) {
        const double h = 1.0 / n;
        double sum = 0.0;
        for (int j = 1; j < n; ++j) {
            const double x = j * h;
            sum += 2.0 * std::pow(x, -z) * std::pow(1.0 - x * x, 6);
        }
        double corr = 2.0 * s.weights[0];
        for (int j = 1; j <= s.K; ++j)
            corr += 2.0 * s.weights[j] * std::pow(1.0 - (j * h) * (j * h), 6);
        const double approx = h * sum + std::pow(h, 1.0 - z) * corr;
        const double err = std::abs(approx - exact);
        if (prev > 0.0) {
            EXPECT_GT(prev / err, std::pow(2.0, 3.5)) << n;
        }
        prev = err;
    }
}

TEST(Oracle, RejectsBadArguments) {
    EXPECT_THROW(oracle_stencil(21, 0.1, {}), InvalidInput);
    EXPECT_THROW(oracle_stencil(1, -0.1, {}), InvalidInput);
    EXPECT_THROW(oracle_stencil_extrapolated(1, {}, 0), InvalidInput);
}

TEST(Stencil, CacheReturnsIdenticalWeights) {
    const auto a = build_log_stencil(7);
    const auto b = build_log_stencil(7);
    EXPECT_EQ(a.weights, b.weights);
    EXPECT_DOUBLE_EQ(display_order(build_pow_stencil(1, 1.0 / 3.0)), 4.67);
}
