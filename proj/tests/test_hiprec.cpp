#include <gtest/gtest.h>

#include <random>

#include <boost/multiprecision/cpp_int.hpp>

#include "zetatrap/hiprec.hpp"

using namespace zetatrap;
using Rational = boost::multiprecision::cpp_rational;

namespace {

/// Exact solve of sum_j w_j x_j^k = b_k by Gaussian elimination over the rationals.
std::vector<Rational> exact_dual_vandermonde(const std::vector<long>& x, const std::vector<Rational>& b) {
    const std::size_t n = x.size();
    std::vector<std::vector<Rational>> a(n, std::vector<Rational>(n + 1));
    for (std::size_t k = 0; k < n; ++k) {
        Rational p = 1;
        for (std::size_t j = 0; j < n; ++j) {
            p = 1;
            for (std::size_t e = 0; e < k; ++e)
                p *= x[j];
            a[k][j] = p;
        }
        a[k][n] = b[k];
    }
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        while (a[piv][c] == 0)
            ++piv;
        std::swap(a[c], a[piv]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c || a[r][c] == 0)
                continue;
            const Rational f = a[r][c] / a[c][c];
            for (std::size_t k = c; k <= n; ++k)
                a[r][k] -= f * a[c][k];
        }
    }
    std::vector<Rational> w(n);
    for (std::size_t c = 0; c < n; ++c)
        w[c] = a[c][n] / a[c][c];
    return w;
}

BigReal to_big(const Rational& q, int digits) {
    BigReal num(numerator(q).str(), digits);
    BigReal den(denominator(q).str(), digits);
    return num / den;
}

} // namespace

TEST(BigReal, Arithmetic) {
    const int d = 60;
    BigReal a(1L, d), b(3L, d);
    const BigReal third = a / b;
    EXPECT_EQ(third.to_string(20), "3.3333333333333333333e-01");
    EXPECT_NEAR((third * b - a).to_double(), 0.0, 1e-58);
    EXPECT_DOUBLE_EQ(pow_int(BigReal(2L, d), 10).to_double(), 1024.0);
    EXPECT_DOUBLE_EQ(pow_int(BigReal(0L, d), 0).to_double(), 1.0);
    EXPECT_GE(third.digits(), 60);
    EXPECT_THROW(BigReal("abc", d), InvalidInput);
}

TEST(BigReal, CopiesAreIndependent) {
    BigReal a(2.5, 40);
    BigReal b = a;
    b += BigReal(1L, 40);
    EXPECT_DOUBLE_EQ(a.to_double(), 2.5);
    EXPECT_DOUBLE_EQ(b.to_double(), 3.5);
}

TEST(DualVandermonde, MatchesExactRationalSolve) {
    std::mt19937 rng(20240611);
    std::uniform_int_distribution<long> node(-30, 30), num(-1000, 1000), den(1, 97);
    const int digits = 80;
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<long> x;
        while (x.size() < 5) {
            const long v = node(rng);
            if (std::find(x.begin(), x.end(), v) == x.end())
                x.push_back(v);
        }
        std::vector<Rational> b;
        for (int k = 0; k < 5; ++k)
            b.emplace_back(num(rng), den(rng));
        const auto exact = exact_dual_vandermonde(x, b);

        std::vector<BigReal> xb, bb;
        for (long v : x)
            xb.emplace_back(v, digits);
        for (const auto& q : b)
            bb.push_back(to_big(q, digits));
        const auto w = solve_dual_vandermonde(xb, bb, digits);
        for (std::size_t j = 0; j < 5; ++j) {
            const BigReal err = abs(w[j] - to_big(exact[j], digits));
            const BigReal scale = abs(to_big(exact[j], digits)) + BigReal(1L, digits);
            EXPECT_LT((err / scale).to_double(), 1e-60) << "trial " << trial << " j " << j;
        }
    }
}

TEST(DualVandermonde, SquaredNodesAtFortyOne) {
    // The K = 20 system on nodes j^2 is the hardest one the library builds.
    const int digits = working_precision_digits();
    std::vector<BigReal> x, b;
    for (long j = 0; j <= 20; ++j) {
        x.emplace_back(j * j, digits);
        b.emplace_back(j % 3 == 0 ? 1L : -1L, digits);
    }
    EXPECT_NO_THROW(solve_dual_vandermonde_adaptive(x, b, digits));
}

TEST(DualVandermonde, RejectsBadInput) {
    const int d = 40;
    std::vector<BigReal> x{BigReal(1L, d), BigReal(1L, d)};
    std::vector<BigReal> b{BigReal(1L, d), BigReal(2L, d)};
    EXPECT_THROW(solve_dual_vandermonde(x, b, d), Error);
    std::vector<BigReal> shorter{BigReal(1L, d)};
    EXPECT_THROW(solve_dual_vandermonde(x, shorter, d), InvalidInput);
}

TEST(DualVandermonde, LowPrecisionIsDetected) {
    // 10 digits cannot meet the 1e-40 residual bound on a 21-node system.
    std::vector<BigReal> x, b;
    for (long j = 0; j <= 20; ++j) {
        x.emplace_back(j * j, 10);
        b.emplace_back(BigReal(1L, 10) / BigReal(j + 1, 10));
    }
    EXPECT_THROW(solve_dual_vandermonde(x, b, 10), PrecisionInsufficient);
}
