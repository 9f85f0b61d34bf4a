#pragma once

// Extended-precision reals (RAII over MPFR) and the dual Vandermonde solve
// behind the correction-weight moment systems.

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <utility>
#include <vector>

#include "zetatrap/errors.hpp"

namespace zetatrap {

inline constexpr int kDefaultPrecisionDigits = 60;

/// Working precision in decimal digits: ZETATRAP_PRECISION_DIGITS if set (>= 30),
/// otherwise kDefaultPrecisionDigits.
inline int working_precision_digits() {
    const char* env = std::getenv("ZETATRAP_PRECISION_DIGITS");
    if (env == nullptr || *env == '\0')
        return kDefaultPrecisionDigits;
    char* end = nullptr;
    const long value = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || value < 30 || value > 100000)
        throw InvalidInput("ZETATRAP_PRECISION_DIGITS must be an integer >= 30, got '" + std::string(env) + "'");
    return static_cast<int>(value);
}

inline mpfr_prec_t digits_to_bits(int digits) {
    return static_cast<mpfr_prec_t>(std::ceil(digits * 3.3219280948873623)) + 8;
}

/// Arbitrary-precision floating value. Precision is fixed per value at
/// construction; binary operations round to the larger operand precision.
class BigReal {
  public:
    explicit BigReal(int digits = kDefaultPrecisionDigits) {
        mpfr_init2(value_, digits_to_bits(digits));
        mpfr_set_zero(value_, 1);
    }
    BigReal(double x, int digits) : BigReal(digits) { mpfr_set_d(value_, x, MPFR_RNDN); }
    BigReal(long x, int digits) : BigReal(digits) { mpfr_set_si(value_, x, MPFR_RNDN); }
    BigReal(const std::string& text, int digits) : BigReal(digits) {
        if (mpfr_set_str(value_, text.c_str(), 10, MPFR_RNDN) != 0)
            throw InvalidInput("BigReal: cannot parse '" + text + "'");
    }

    BigReal(const BigReal& other) {
        mpfr_init2(value_, mpfr_get_prec(other.value_));
        mpfr_set(value_, other.value_, MPFR_RNDN);
    }
    BigReal(BigReal&& other) noexcept {
        mpfr_init2(value_, mpfr_get_prec(other.value_));
        mpfr_swap(value_, other.value_);
    }
    BigReal& operator=(const BigReal& other) {
        if (this != &other) {
            mpfr_set_prec(value_, mpfr_get_prec(other.value_));
            mpfr_set(value_, other.value_, MPFR_RNDN);
        }
        return *this;
    }
    BigReal& operator=(BigReal&& other) noexcept {
        mpfr_swap(value_, other.value_);
        return *this;
    }
    ~BigReal() { mpfr_clear(value_); }

    mpfr_prec_t bits() const { return mpfr_get_prec(value_); }
    int digits() const { return static_cast<int>((bits() - 8) / 3.3219280948873623); }

    double to_double() const { return mpfr_get_d(value_, MPFR_RNDN); }

    /// Scientific decimal string with `digits` significant digits.
    std::string to_string(int digits) const {
        std::vector<char> buffer(static_cast<std::size_t>(digits) + 64);
        mpfr_snprintf(buffer.data(), buffer.size(), "%.*Re", digits - 1, value_);
        return buffer.data();
    }

    bool is_zero() const { return mpfr_zero_p(value_) != 0; }
    bool is_finite() const { return mpfr_number_p(value_) != 0; }

    mpfr_ptr raw() { return value_; }
    mpfr_srcptr raw() const { return value_; }

    BigReal& operator+=(const BigReal& o) { return apply(o, mpfr_add); }
    BigReal& operator-=(const BigReal& o) { return apply(o, mpfr_sub); }
    BigReal& operator*=(const BigReal& o) { return apply(o, mpfr_mul); }
    BigReal& operator/=(const BigReal& o) { return apply(o, mpfr_div); }

    friend BigReal operator+(BigReal a, const BigReal& b) { return a += b; }
    friend BigReal operator-(BigReal a, const BigReal& b) { return a -= b; }
    friend BigReal operator*(BigReal a, const BigReal& b) { return a *= b; }
    friend BigReal operator/(BigReal a, const BigReal& b) { return a /= b; }
    friend BigReal operator-(BigReal a) {
        mpfr_neg(a.value_, a.value_, MPFR_RNDN);
        return a;
    }

    friend int compare(const BigReal& a, const BigReal& b) { return mpfr_cmp(a.value_, b.value_); }
    friend bool operator<(const BigReal& a, const BigReal& b) { return compare(a, b) < 0; }
    friend bool operator>(const BigReal& a, const BigReal& b) { return compare(a, b) > 0; }
    friend bool operator==(const BigReal& a, const BigReal& b) { return mpfr_equal_p(a.value_, b.value_) != 0; }

    friend BigReal abs(BigReal a) {
        mpfr_abs(a.value_, a.value_, MPFR_RNDN);
        return a;
    }

  private:
    using BinaryOp = int (*)(mpfr_ptr, mpfr_srcptr, mpfr_srcptr, mpfr_rnd_t);
    BigReal& apply(const BigReal& o, BinaryOp op) {
        if (mpfr_get_prec(o.value_) > mpfr_get_prec(value_))
            mpfr_prec_round(value_, mpfr_get_prec(o.value_), MPFR_RNDN);
        op(value_, value_, o.value_, MPFR_RNDN);
        return *this;
    }

    mpfr_t value_;
};

/// x^k with the convention 0^0 = 1.
inline BigReal pow_int(const BigReal& x, unsigned k) {
    BigReal out(x);
    if (k == 0) {
        mpfr_set_ui(out.raw(), 1, MPFR_RNDN);
        return out;
    }
    mpfr_pow_ui(out.raw(), x.raw(), k, MPFR_RNDN);
    return out;
}

/// Solves sum_j w_j x_j^k = b_k, k = 0..K, for w (dual/transposed Vandermonde)
/// at `digits` decimal digits. Gaussian elimination with partial pivoting,
/// then a residual check: max_k |sum_j w_j x_j^k - b_k| / (1 + |b_k|) <= 1e-40.
inline std::vector<BigReal> solve_dual_vandermonde(const std::vector<BigReal>& nodes,
                                                   const std::vector<BigReal>& moments,
                                                   int digits = working_precision_digits()) {
    const std::size_t n = nodes.size();
    if (n == 0 || moments.size() != n)
        throw InvalidInput("solve_dual_vandermonde: need K+1 nodes and K+1 moments");
    if (n > 26)
        throw InvalidInput("solve_dual_vandermonde: K <= 25 supported");
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b)
            if (nodes[a] == nodes[b])
                throw InvalidInput("solve_dual_vandermonde: duplicate nodes");

    const auto promote = [digits](const BigReal& v) {
        BigReal out(digits);
        mpfr_set(out.raw(), v.raw(), MPFR_RNDN);
        return out;
    };

    // Row k: x_0^k ... x_K^k | b_k
    std::vector<std::vector<BigReal>> a(n);
    for (std::size_t k = 0; k < n; ++k) {
        a[k].reserve(n + 1);
        for (std::size_t j = 0; j < n; ++j)
            a[k].push_back(pow_int(promote(nodes[j]), static_cast<unsigned>(k)));
        a[k].push_back(promote(moments[k]));
    }

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (abs(a[r][col]) > abs(a[pivot][col]))
                pivot = r;
        if (a[pivot][col].is_zero())
            throw InvalidInput("solve_dual_vandermonde: singular system");
        std::swap(a[col], a[pivot]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const BigReal factor = a[r][col] / a[col][col];
            for (std::size_t c = col; c <= n; ++c)
                a[r][c] -= factor * a[col][c];
        }
    }
    std::vector<BigReal> w(n, BigReal(digits));
    for (std::size_t i = n; i-- > 0;) {
        BigReal acc = a[i][n];
        for (std::size_t c = i + 1; c < n; ++c)
            acc -= a[i][c] * w[c];
        w[i] = acc / a[i][i];
    }

    // Residual check at 2 * digits + 40.
    const int check_digits = 2 * digits + 40;
    const auto widen = [check_digits](const BigReal& v) {
        BigReal out(check_digits);
        mpfr_set(out.raw(), v.raw(), MPFR_RNDN);
        return out;
    };
    const BigReal one(1L, check_digits);
    const BigReal bound("1e-40", check_digits);
    for (std::size_t k = 0; k < n; ++k) {
        BigReal acc(check_digits);
        for (std::size_t j = 0; j < n; ++j)
            acc += pow_int(widen(nodes[j]), static_cast<unsigned>(k)) * widen(w[j]);
        const BigReal bk = widen(moments[k]);
        const BigReal rel = abs(acc - bk) / (one + abs(bk));
        if (!rel.is_finite() || rel > bound)
            throw PrecisionInsufficient("solve_dual_vandermonde: residual " + rel.to_string(3) + " at " +
                                        std::to_string(digits) + " digits");
    }
    return w;
}

/// Retries solve_dual_vandermonde with doubled precision (up to 4 doublings).
inline std::vector<BigReal> solve_dual_vandermonde_adaptive(const std::vector<BigReal>& nodes,
                                                            const std::vector<BigReal>& moments,
                                                            int digits = working_precision_digits()) {
    for (int attempt = 0;; ++attempt) {
        try {
            return solve_dual_vandermonde(nodes, moments, digits);
        } catch (const PrecisionInsufficient&) {
            if (attempt == 4)
                throw;
            digits *= 2;
        }
    }
}

} // namespace zetatrap
