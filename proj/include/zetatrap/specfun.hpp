#pragma once

// Special functions: gamma, Riemann zeta (real and complex argument), zeta'
// at the negative even integers, Bessel J0/J1 and Hankel H0/H1 of complex
// argument. Everything here is a pure function of its arguments.

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <utility>

#include "zetatrap/errors.hpp"

namespace zetatrap {

using Complex = std::complex<double>;

inline constexpr double kEulerGamma = 0.5772156649015329;
inline constexpr double kPi = std::numbers::pi;

namespace detail {

// B_{2k} as exact rationals, k = 1..16.
inline constexpr std::array<std::pair<double, double>, 16> kBernoulli2k{{
    {1.0, 6.0},
    {-1.0, 30.0},
    {1.0, 42.0},
    {-1.0, 30.0},
    {5.0, 66.0},
    {-691.0, 2730.0},
    {7.0, 6.0},
    {-3617.0, 510.0},
    {43867.0, 798.0},
    {-174611.0, 330.0},
    {854513.0, 138.0},
    {-236364091.0, 2730.0},
    {8553103.0, 6.0},
    {-23749461029.0, 870.0},
    {8615841276005.0, 14322.0},
    {-7709321041217.0, 510.0},
}};

// B_{2k} / (2k)!
inline constexpr std::array<double, 16> bernoulli_over_factorial() {
    std::array<double, 16> out{};
    double fact = 1.0;
    int n = 0;
    for (std::size_t k = 0; k < out.size(); ++k) {
        while (n < 2 * static_cast<int>(k + 1)) {
            ++n;
            fact *= n;
        }
        out[k] = kBernoulli2k[k].first / kBernoulli2k[k].second / fact;
    }
    return out;
}

inline constexpr std::array<double, 16> kBernoulliOverFactorial = bernoulli_over_factorial();

// Euler-Maclaurin continuation of sum n^{-s}; good for Re s >= 0 and moderate |Im s|.
template <class T>
T zeta_euler_maclaurin(const T& s) {
    constexpr int kHead = 16;
    T sum = 0.0;
    for (int n = 1; n < kHead; ++n)
        sum += std::exp(-s * std::log(static_cast<double>(n)));
    const double big_n = kHead;
    const double log_n = std::log(big_n);
    const T n_pow = std::exp(-s * log_n); // N^{-s}
    sum += n_pow * big_n / (s - 1.0) + 0.5 * n_pow;
    // Tail terms B_{2k}/(2k)! * s(s+1)...(s+2k-2) * N^{-s-2k+1}
    T rising = s;
    T power = n_pow / big_n;
    for (std::size_t k = 0; k < kBernoulliOverFactorial.size(); ++k) {
        sum += kBernoulliOverFactorial[k] * rising * power;
        rising *= (s + static_cast<double>(2 * k + 1)) * (s + static_cast<double>(2 * k + 2));
        power /= big_n * big_n;
    }
    return sum;
}

// sin(pi*x/2) and cos(pi*x/2) with exact argument reduction, so the zeros
// at even/odd integers keep full relative accuracy nearby.
inline std::pair<double, double> sincos_half_pi(double x) {
    double d = std::fmod(x, 4.0); // exact
    if (d < 0.0)
        d += 4.0;
    // d in [0, 4): quarter-turn index q and remainder e in [-0.5, 0.5]
    const double q = std::nearbyint(d);
    const double e = d - q;
    const double sn = std::sin(kPi * e / 2.0);
    const double cs = std::cos(kPi * e / 2.0);
    switch (static_cast<int>(q) & 3) {
    case 0:
        return {sn, cs};
    case 1:
        return {cs, -sn};
    case 2:
        return {-sn, -cs};
    default:
        return {-cs, sn};
    }
}

inline Complex sin_half_pi(const Complex& s) {
    const auto [sa, ca] = sincos_half_pi(s.real());
    const double b = kPi * s.imag() / 2.0;
    return {sa * std::cosh(b), ca * std::sinh(b)};
}

// Stirling series for log Gamma, used for Re z >= 20.
inline Complex lgamma_stirling(const Complex& z) {
    Complex sum = (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * kPi);
    const Complex inv = 1.0 / z;
    const Complex inv2 = inv * inv;
    Complex p = inv;
    for (std::size_t k = 0; k < 12; ++k) {
        const double b = kBernoulli2k[k].first / kBernoulli2k[k].second;
        const double m = 2.0 * static_cast<double>(k + 1);
        sum += b / (m * (m - 1.0)) * p;
        p *= inv2;
    }
    return sum;
}

} // namespace detail

/// Gamma function on the real line.
inline double gamma_real(double x) {
    if (x <= 0.0 && x == std::nearbyint(x))
        throw DomainError("gamma_real: pole at nonpositive integer " + std::to_string(x));
    return std::tgamma(x);
}

/// Gamma function for Re z >= 1/2 (used by the complex reflection formula).
inline Complex gamma_complex(const Complex& z) {
    if (z.real() < 0.5)
        throw DomainError("gamma_complex: requires Re z >= 1/2");
    Complex shifted = z;
    Complex product = 1.0;
    while (shifted.real() < 20.0) {
        product *= shifted;
        shifted += 1.0;
    }
    return std::exp(detail::lgamma_stirling(shifted)) / product;
}

/// Riemann zeta on the real line. Euler-Maclaurin for s >= 0, reflection for s < 0.
inline double zeta_real(double s) {
    if (s == 1.0)
        throw DomainError("zeta_real: pole at s = 1");
    if (s >= 0.0)
        return detail::zeta_euler_maclaurin(s);
    if (s == std::nearbyint(s) && std::fmod(s, 2.0) == 0.0)
        return 0.0; // trivial zeros
    const double t = 1.0 - s;
    const auto [sn, cs] = detail::sincos_half_pi(s);
    (void)cs;
    // 2^s pi^{s-1} sin(pi s/2) Gamma(1-s) zeta(1-s)
    return std::exp2(s) * std::pow(kPi, s - 1.0) * sn * std::tgamma(t) * detail::zeta_euler_maclaurin(t);
}

/// Riemann zeta for complex argument. Accurate to ~1e-13 relative in the strip
/// |Im s| <= 1e-6, Re s in [-50, 2]; exactly matches zeta_real on the real axis.
inline Complex zeta_complex(const Complex& s) {
    if (s == Complex(1.0, 0.0))
        throw DomainError("zeta_complex: pole at s = 1");
    if (s.imag() == 0.0)
        return zeta_real(s.real());
    if (s.real() >= 0.0)
        return detail::zeta_euler_maclaurin(s);
    const Complex t = 1.0 - s;
    return std::exp(s * std::log(2.0)) * std::exp((s - 1.0) * std::log(kPi)) * detail::sin_half_pi(s) *
           gamma_complex(t) * detail::zeta_euler_maclaurin(t);
}

/// zeta'(-2k) from the closed form: k = 0 gives -log(2 pi)/2, otherwise
/// (-1)^k (2k)! zeta(2k+1) / (2 (2 pi)^{2k}).
inline double zeta_deriv_neg_even_closed_form(int k) {
    if (k < 0)
        throw DomainError("zeta_deriv_neg_even: k must be nonnegative");
    if (k == 0)
        return -0.5 * std::log(2.0 * kPi);
    double value = zeta_real(2.0 * k + 1.0) / 2.0;
    for (int i = 1; i <= 2 * k; ++i)
        value *= static_cast<double>(i) / (2.0 * kPi);
    return (k % 2 == 0) ? value : -value;
}

/// zeta'(-2k) by complex-step differentiation, Im zeta(-2k + i*delta) / delta.
inline double zeta_deriv_neg_even_complex_step(int k, double delta = std::numeric_limits<double>::epsilon()) {
    if (k < 0)
        throw DomainError("zeta_deriv_neg_even: k must be nonnegative");
    return zeta_complex(Complex(-2.0 * k, delta)).imag() / delta;
}

/// zeta'(-2k), 0 <= k <= 25. Both routes are evaluated and must agree to 1e-10.
inline double zeta_deriv_neg_even(int k) {
    if (k < 0 || k > 25)
        throw DomainError("zeta_deriv_neg_even: supported range is 0 <= k <= 25, got " + std::to_string(k));
    const double closed = zeta_deriv_neg_even_closed_form(k);
    const double stepped = zeta_deriv_neg_even_complex_step(k);
    if (std::abs(closed - stepped) > 1e-10 * std::abs(closed))
        throw ConsistencyError("zeta_deriv_neg_even: closed form and complex step disagree at k = " +
                               std::to_string(k));
    return closed;
}

// ---------------------------------------------------------------------------
// Bessel and Hankel functions of order 0 and 1.
//
// |z| < 2 (or J near the imaginary axis): ascending series.
// Otherwise: H^(1), H^(2) from
//   H_nu(z) = sqrt(2/(pi z)) e^{+-i(z - nu pi/2 - pi/4)} / Gamma(nu+1/2)
//             * int_0^inf e^{-u} u^{nu-1/2} (1 +- iu/(2z))^{nu-1/2} du,
// with u = v^2 and the (even, analytic) v-integrand summed by the trapezoidal
// rule on the real line. The nearest singularity sits at distance >= sqrt(|z|)
// from the real v-axis, so step 0.18 converges to roundoff for |z| >= 2.
// ---------------------------------------------------------------------------

namespace detail {

inline constexpr double kHankelStep = 0.18;
inline constexpr int kHankelNodes = 37; // e^{-v^2} < 1e-18 beyond

inline const std::array<double, kHankelNodes>& hankel_gauss_weights() {
    static const std::array<double, kHankelNodes> w = [] {
        std::array<double, kHankelNodes> out{};
        for (int j = 0; j < kHankelNodes; ++j) {
            const double v = j * kHankelStep;
            out[j] = (j == 0 ? 1.0 : 2.0) * kHankelStep * std::exp(-v * v);
        }
        return out;
    }();
    return w;
}

/// {H_0, H_1} of the first (kind = +1) or second (kind = -1) kind by the
/// integral representation. Caller guarantees the representation is valid.
inline std::pair<Complex, Complex> hankel_integral(const Complex& z, int kind) {
    const Complex i_sign(0.0, static_cast<double>(kind));
    const Complex a = i_sign / (2.0 * z);
    const auto& w = hankel_gauss_weights();
    Complex i0 = w[0];
    Complex i1 = 0.0;
    for (int j = 1; j < kHankelNodes; ++j) {
        const double v2 = (j * kHankelStep) * (j * kHankelStep);
        const Complex root = std::sqrt(1.0 + a * v2);
        i0 += w[j] / root;
        i1 += w[j] * v2 * root;
    }
    const Complex pre = std::sqrt(2.0 / (kPi * z)) / std::sqrt(kPi);
    const Complex phase0 = std::exp(i_sign * (z - kPi / 4.0));
    const Complex phase1 = std::exp(i_sign * (z - 3.0 * kPi / 4.0));
    return {pre * phase0 * i0, 2.0 * pre * phase1 * i1};
}

/// {J_0, J_1} by the ascending series.
inline std::pair<Complex, Complex> bessel_j_series(const Complex& z) {
    const Complex q = -0.25 * z * z;
    Complex t0 = 1.0;
    Complex t1 = 0.5 * z;
    Complex j0 = t0;
    Complex j1 = t1;
    for (int k = 1; k < 2000; ++k) {
        t0 *= q / (static_cast<double>(k) * k);
        t1 *= q / (static_cast<double>(k) * (k + 1));
        j0 += t0;
        j1 += t1;
        if (std::abs(t0) <= 1e-17 * std::abs(j0) && std::abs(t1) <= 1e-17 * std::abs(j1) && k > 2)
            break;
        if (std::abs(t0) == 0.0 && std::abs(t1) == 0.0)
            break;
    }
    return {j0, j1};
}

/// {Y_0, Y_1} by the ascending series (principal branch of log).
inline std::pair<Complex, Complex> bessel_y_series(const Complex& z, const std::pair<Complex, Complex>& j) {
    const Complex q = -0.25 * z * z;
    const Complex log_half = std::log(0.5 * z);
    // Y0 tail: (2/pi) sum_{k>=1} (-1)^{k+1} H_k (z^2/4)^k / (k!)^2
    Complex t0 = 1.0;
    Complex s0 = 0.0;
    // Y1 tail: -(1/pi) (z/2) sum_{k>=0} (psi(k+1)+psi(k+2)) (-z^2/4)^k / (k!(k+1)!)
    Complex t1 = 1.0;
    double harmonic = 0.0;
    Complex s1 = (2.0 * -kEulerGamma + 1.0) * t1; // psi(1)+psi(2) = -2 gamma + 1
    for (int k = 1; k < 2000; ++k) {
        harmonic += 1.0 / k;
        t0 *= q / (static_cast<double>(k) * k);
        t1 *= q / (static_cast<double>(k) * (k + 1));
        const Complex d0 = -harmonic * t0;
        const Complex d1 = (2.0 * (harmonic - kEulerGamma) + 1.0 / (k + 1)) * t1;
        s0 += d0;
        s1 += d1;
        if (std::abs(d0) <= 1e-17 * std::abs(s0) && std::abs(d1) <= 1e-17 * std::abs(s1) && k > 2)
            break;
    }
    const Complex y0 = (2.0 / kPi) * ((log_half + kEulerGamma) * j.first + s0);
    const Complex y1 = (2.0 / kPi) * log_half * j.second - 2.0 / (kPi * z) - (0.5 / kPi) * z * s1;
    return {y0, y1};
}

inline std::pair<Complex, Complex> bessel_j_upper(const Complex& z) {
    // z in the closed first quadrant
    const double mod = std::abs(z);
    if (mod <= 2.0 || mod - z.imag() <= 4.0)
        return bessel_j_series(z);
    const auto h1 = hankel_integral(z, +1);
    const auto h2 = hankel_integral(z, -1);
    return {0.5 * (h1.first + h2.first), 0.5 * (h1.second + h2.second)};
}

} // namespace detail

/// {J_0(z), J_1(z)} for |z| <= 400, Re z >= 0.
inline std::pair<Complex, Complex> bessel_j01(const Complex& z) {
    if (!(z.real() >= 0.0) || !(std::abs(z) <= 400.0))
        throw DomainError("bessel_j: requires |z| <= 400 and Re z >= 0");
    if (z.imag() < 0.0) {
        const auto [j0, j1] = detail::bessel_j_upper(std::conj(z));
        return {std::conj(j0), std::conj(j1)};
    }
    return detail::bessel_j_upper(z);
}

/// J_order(z), order 0 or 1.
inline Complex bessel_j(int order, const Complex& z) {
    if (order != 0 && order != 1)
        throw DomainError("bessel_j: only orders 0 and 1 are supported");
    const auto j = bessel_j01(z);
    return order == 0 ? j.first : j.second;
}

/// {H0^(1)(z), H1^(1)(z)} for 1e-8 <= |z| <= 400 with Im z >= 0 or Re z > 0.
inline std::pair<Complex, Complex> hankel1_01(const Complex& z) {
    const double mod = std::abs(z);
    if (mod == 0.0)
        throw DomainError("hankel1: singular at z = 0");
    if (mod < 1e-8 || mod > 400.0 || !(z.imag() >= 0.0 || z.real() > 0.0))
        throw DomainError("hankel1: requires 1e-8 <= |z| <= 400 and (Im z >= 0 or Re z > 0)");
    if (mod < 2.0) {
        const auto j = detail::bessel_j_series(z);
        const auto y = detail::bessel_y_series(z, j);
        const Complex i(0.0, 1.0);
        return {j.first + i * y.first, j.second + i * y.second};
    }
    if (z.imag() >= 0.0)
        return detail::hankel_integral(z, +1);
    // Lower half plane: H^(1)(z) = conj(H^(2)(conj z)) and H^(2) = 2J - H^(1).
    const Complex w = std::conj(z);
    const auto h1 = detail::hankel_integral(w, +1);
    const auto j = detail::bessel_j_upper(w);
    return {std::conj(2.0 * j.first - h1.first), std::conj(2.0 * j.second - h1.second)};
}

struct BesselHankel01 {
    Complex j0, j1, h0, h1;
};

/// J_0, J_1, H_0^(1), H_1^(1) at one point of the closed first quadrant,
/// sharing the Hankel evaluation between J and H.
inline BesselHankel01 bessel_hankel01(const Complex& z) {
    if (!(z.real() >= 0.0) || !(z.imag() >= 0.0))
        throw DomainError("bessel_hankel01: z must lie in the closed first quadrant");
    const double mod = std::abs(z);
    if (mod < 1e-8 || mod > 400.0)
        throw DomainError("bessel_hankel01: requires 1e-8 <= |z| <= 400");
    const Complex i(0.0, 1.0);
    if (mod < 2.0) {
        const auto j = detail::bessel_j_series(z);
        const auto y = detail::bessel_y_series(z, j);
        return {j.first, j.second, j.first + i * y.first, j.second + i * y.second};
    }
    const auto h1 = detail::hankel_integral(z, +1);
    if (mod - z.imag() <= 4.0) {
        const auto j = detail::bessel_j_series(z);
        return {j.first, j.second, h1.first, h1.second};
    }
    const auto h2 = detail::hankel_integral(z, -1);
    return {0.5 * (h1.first + h2.first), 0.5 * (h1.second + h2.second), h1.first, h1.second};
}

/// H_order^(1)(z), order 0 or 1.
inline Complex hankel1(int order, const Complex& z) {
    if (order != 0 && order != 1)
        throw DomainError("hankel1: only orders 0 and 1 are supported");
    const auto h = hankel1_01(z);
    return order == 0 ? h.first : h.second;
}

} // namespace zetatrap
