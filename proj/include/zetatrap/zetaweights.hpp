#pragma once

// Converged correction stencils for the punctured trapezoidal rule.
//
// For s(x) = -log|x| the weights solve  sum_j w_j j^{2k} = -zeta'(-2k),
// for s(x) = |x|^{-z} they solve        sum_j w_j j^{2k} = -zeta(z-2k),
// k = 0..K. A finite-h moment-fitting oracle (smooth cutoff, explicit lattice
// sums) is provided for validation only.

#include <cmath>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <tuple>
#include <vector>

#include "zetatrap/errors.hpp"
#include "zetatrap/hiprec.hpp"
#include "zetatrap/specfun.hpp"

namespace zetatrap {

enum class StencilKind { Log, Pow };

struct CorrectionStencil {
    int K = 0;
    StencilKind kind = StencilKind::Log;
    double z = 0.0;              // exponent of |x|^{-z}; unused for Log
    std::vector<double> weights; // w_0..w_K, applied at +-j h
    double order = 2.0;          // 2K+2 (Log) or 2K+3-z (Pow)

    int half_width() const { return K; }
};

namespace detail {

inline std::vector<BigReal> square_nodes(int K, int digits) {
    std::vector<BigReal> nodes;
    for (long j = 0; j <= K; ++j)
        nodes.emplace_back(j * j, digits);
    return nodes;
}

/// Normwise relative residual of double weights against double moments,
/// evaluated in extended precision: |sum_j w_j j^{2k} - b_k| / sum_j |w_j j^{2k}|.
inline double stencil_residual(const std::vector<double>& w, const std::vector<double>& b) {
    constexpr int digits = 80;
    double worst = 0.0;
    for (std::size_t k = 0; k < b.size(); ++k) {
        BigReal acc(digits);
        BigReal scale(digits);
        for (std::size_t j = 0; j < w.size(); ++j) {
            const BigReal term = BigReal(w[j], digits) * pow_int(BigReal(static_cast<long>(j * j), digits),
                                                                  static_cast<unsigned>(k));
            acc += term;
            scale += abs(term);
        }
        acc -= BigReal(b[k], digits);
        if (scale.is_zero())
            scale = BigReal(1L, digits);
        worst = std::max(worst, (abs(acc) / scale).to_double());
    }
    return worst;
}

inline CorrectionStencil solve_stencil(int K, StencilKind kind, double z, const std::vector<double>& moments) {
    const int digits = working_precision_digits();
    std::vector<BigReal> rhs;
    for (double b : moments)
        rhs.emplace_back(b, digits);
    const auto solution = solve_dual_vandermonde_adaptive(square_nodes(K, digits), rhs, digits);

    CorrectionStencil s;
    s.K = K;
    s.kind = kind;
    s.z = z;
    for (const auto& w : solution)
        s.weights.push_back(w.to_double());
    s.order = kind == StencilKind::Log ? 2.0 * K + 2.0 : 2.0 * K + 3.0 - z;
    for (double w : s.weights)
        if (!std::isfinite(w))
            throw PrecisionInsufficient("correction weights are not finite");
    if (stencil_residual(s.weights, moments) > 1e-12)
        throw PrecisionInsufficient("correction weights fail the double-precision residual check");
    return s;
}

class StencilCache {
  public:
    using Key = std::tuple<int, int, double>;

    template <class Build>
    CorrectionStencil get(const Key& key, Build&& build) {
        {
            std::shared_lock lock(mutex_);
            if (auto it = cache_.find(key); it != cache_.end())
                return it->second;
        }
        CorrectionStencil s = build();
        std::unique_lock lock(mutex_);
        return cache_.emplace(key, std::move(s)).first->second;
    }

  private:
    std::shared_mutex mutex_;
    std::map<Key, CorrectionStencil> cache_;
};

inline StencilCache& stencil_cache() {
    static StencilCache cache;
    return cache;
}

} // namespace detail

/// Correction stencil for -log|x|, order 2K+2.
inline CorrectionStencil build_log_stencil(int K) {
    if (K < 0 || K > 20)
        throw InvalidInput("build_log_stencil: 0 <= K <= 20 required, got " + std::to_string(K));
    return detail::stencil_cache().get({0, K, 0.0}, [K] {
        std::vector<double> moments;
        for (int k = 0; k <= K; ++k)
            moments.push_back(-zeta_deriv_neg_even(k));
        return detail::solve_stencil(K, StencilKind::Log, 0.0, moments);
    });
}

/// Correction stencil for |x|^{-z}, -1 < z < 1, error O(h^{2K+3-z}).
inline CorrectionStencil build_pow_stencil(int K, double z) {
    if (K < 0 || K > 20)
        throw InvalidInput("build_pow_stencil: 0 <= K <= 20 required, got " + std::to_string(K));
    if (!(z > -1.0 && z < 1.0))
        throw DomainError("build_pow_stencil: exponent z must lie in (-1, 1)");
    return detail::stencil_cache().get({1, K, z}, [K, z] {
        std::vector<double> moments;
        for (int k = 0; k <= K; ++k)
            moments.push_back(-zeta_real(z - 2.0 * k));
        return detail::solve_stencil(K, StencilKind::Pow, z, moments);
    });
}

/// Stencil order, rounded to two decimals for display.
inline double display_order(const CorrectionStencil& s) { return std::round(s.order * 100.0) / 100.0; }

// ---------------------------------------------------------------------------
// Finite-h oracle.
// ---------------------------------------------------------------------------

/// Cutoff eta(x) = exp(-(x/b)^{2m}); eta(0) = 1 and derivatives 1..2m-1 vanish at 0.
struct CutoffSpec {
    double half_width = 1.0; // b
    int flatness = 1;        // m
};

inline double cutoff_value(const CutoffSpec& c, double x) {
    return std::exp(-std::pow(x / c.half_width, 2.0 * c.flatness));
}

/// Finite-h weights w_j^h for -log|x| from
///   sum_j w_j^h j^{2k} eta(jh) = int_0^inf -x^{2k} log x eta(xh) dx + sum_{n>=1} n^{2k} log n eta(nh).
/// The integral is evaluated in closed form,
///   int_0^inf x^s log x e^{-(x/c)^p} dx = c^{s+1} Gamma(a)/p (log c + psi(a)/p),  a = (s+1)/p,
/// and the lattice sum is truncated where eta drops below the working precision.
/// Everything is carried out in extended precision to survive the cancellation
/// between the two O((b/h)^{2k+1}) terms.
inline std::vector<double> oracle_stencil(int K, double h, const CutoffSpec& cutoff) {
    if (K < 0 || K > 20)
        throw InvalidInput("oracle_stencil: 0 <= K <= 20 required");
    if (!(h > 0.0) || !(cutoff.half_width > 0.0))
        throw InvalidInput("oracle_stencil: h and cutoff half-width must be positive");
    if (2 * cutoff.flatness < 2 * K + 2)
        throw InvalidInput("oracle_stencil: cutoff flatness needs 2m >= 2K+2");
    const double ratio = cutoff.half_width / h;
    if (ratio < 4.0 * std::max(K, 1))
        throw InvalidInput("oracle_stencil: h too large, fewer than 4K samples inside the cutoff support");

    const int digits = working_precision_digits() + static_cast<int>(std::ceil((2 * K + 1) * std::log10(ratio))) + 20;
    const int p = 2 * cutoff.flatness;

    BigReal c(cutoff.half_width, digits);
    c /= BigReal(h, digits);
    BigReal log_c(c);
    mpfr_log(log_c.raw(), c.raw(), MPFR_RNDN);

    // eta(nh) = exp(-(n/c)^p)
    const auto eta = [&](long n) {
        BigReal t(n, digits);
        t /= c;
        mpfr_pow_si(t.raw(), t.raw(), p, MPFR_RNDN);
        mpfr_neg(t.raw(), t.raw(), MPFR_RNDN);
        mpfr_exp(t.raw(), t.raw(), MPFR_RNDN);
        return t;
    };

    // eta(nh) < 10^{-(digits+20)}  <=>  n > c * ((digits+20) ln 10)^{1/p}
    const double n_max_d = ratio * std::pow((digits + 20) * std::log(10.0), 1.0 / p) + 2.0;
    const long n_max = static_cast<long>(std::ceil(n_max_d));

    std::vector<BigReal> eta_n;
    std::vector<BigReal> log_n;
    eta_n.reserve(static_cast<std::size_t>(n_max) + 1);
    log_n.reserve(static_cast<std::size_t>(n_max) + 1);
    for (long n = 0; n <= n_max; ++n) {
        eta_n.push_back(eta(n));
        BigReal l(n > 0 ? n : 1L, digits);
        mpfr_log(l.raw(), l.raw(), MPFR_RNDN);
        log_n.push_back(std::move(l));
    }

    std::vector<BigReal> rhs;
    for (int k = 0; k <= K; ++k) {
        const unsigned s = static_cast<unsigned>(2 * k);
        BigReal a(static_cast<long>(s + 1), digits);
        a /= BigReal(static_cast<long>(p), digits);
        BigReal gamma_a(a), psi_a(a);
        mpfr_gamma(gamma_a.raw(), a.raw(), MPFR_RNDN);
        mpfr_digamma(psi_a.raw(), a.raw(), MPFR_RNDN);
        BigReal integral = pow_int(c, s + 1) * gamma_a / BigReal(static_cast<long>(p), digits);
        integral *= log_c + psi_a / BigReal(static_cast<long>(p), digits);

        BigReal lattice(digits);
        for (long n = 2; n <= n_max; ++n)
            lattice += pow_int(BigReal(n, digits), s) * log_n[static_cast<std::size_t>(n)] *
                       eta_n[static_cast<std::size_t>(n)];
        rhs.push_back(lattice - integral);
    }

    // Solve for v_j = w_j^h eta(jh) with the plain dual Vandermonde matrix.
    const auto v = solve_dual_vandermonde_adaptive(detail::square_nodes(K, digits), rhs, digits);
    std::vector<double> w;
    for (int j = 0; j <= K; ++j)
        w.push_back((v[static_cast<std::size_t>(j)] / eta_n[static_cast<std::size_t>(j)]).to_double());
    return w;
}

/// Richardson extrapolation of the oracle weights to h -> 0 over the dyadic
/// sequence h = b 2^{-q}, q = q0..q0+levels-1. The error expands in powers of
/// h^{2m}, so each level removes one power.
inline std::vector<double> oracle_stencil_extrapolated(int K, const CutoffSpec& cutoff, int levels = 3) {
    if (levels < 1)
        throw InvalidInput("oracle_stencil_extrapolated: levels >= 1");
    int q0 = 3;
    while (std::ldexp(1.0, q0) < 8.0 * std::max(K, 1))
        ++q0;
    std::vector<std::vector<double>> table;
    for (int l = 0; l < levels; ++l)
        table.push_back(oracle_stencil(K, cutoff.half_width * std::ldexp(1.0, -(q0 + l)), cutoff));
    const double base = std::ldexp(1.0, 2 * cutoff.flatness);
    for (int level = 1; level < levels; ++level) {
        const double factor = std::pow(base, level);
        for (int l = levels - 1; l >= level; --l)
            for (int j = 0; j <= K; ++j)
                table[l][j] = (factor * table[l][j] - table[l - 1][j]) / (factor - 1.0);
    }
    return table.back();
}

} // namespace zetatrap
