#pragma once

// Number types and small numeric helpers shared by every module.
//
// Exact work is done in GMP rationals; anything that needs more than double
// precision but cannot stay rational (logs, square roots, polynomial roots)
// goes through a 50-digit MPFR float.

#include "tailbound/spec.hpp"

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

#include <gmp.h>

namespace tailbound {

using Rational = boost::multiprecision::mpq_rational;
using BigInt = boost::multiprecision::mpz_int;
using HighFloat = boost::multiprecision::mpfr_float_50;

// ln(2) to full double precision.
inline constexpr double kLn2 = 0.693147180559945309417232121458176568;

/// Natural log of a nonnegative big integer without overflowing a double.
inline double log_of(const BigInt& value) {
    if (value.sign() < 0) throw std::domain_error("log_of: negative integer");
    if (value.is_zero()) return kNegInf;
    long exponent = 0;
    const double mantissa = mpz_get_d_2exp(&exponent, value.backend().data());
    return std::log(mantissa) + static_cast<double>(exponent) * kLn2;
}

/// Natural log of a nonnegative rational; -inf for zero.
inline double log_of(const Rational& value) {
    if (value.sign() < 0) throw std::domain_error("log_of: negative rational");
    if (value.is_zero()) return kNegInf;
    return log_of(BigInt(numerator(value))) - log_of(BigInt(denominator(value)));
}

inline double log_of(const HighFloat& value) {
    if (value < 0) throw std::domain_error("log_of: negative value");
    if (value == 0) return kNegInf;
    return static_cast<double>(log(value));
}

inline double to_double(const Rational& value) { return value.convert_to<double>(); }
inline double to_double(const HighFloat& value) { return value.convert_to<double>(); }
inline double to_double(double value) { return value; }

inline HighFloat to_high(const Rational& value) { return HighFloat(value); }
inline HighFloat to_high(double value) { return HighFloat(value); }
inline HighFloat to_high(const HighFloat& value) { return value; }

/// value^exponent by repeated squaring; 0^0 == 1.
template <typename T>
T ipow(T base, std::uint64_t exponent) {
    T result(1);
    while (exponent > 0) {
        if (exponent & 1U) result *= base;
        exponent >>= 1U;
        if (exponent > 0) base *= base;
    }
    return result;
}

/// Exact binomial coefficient C(n, k); zero outside 0 <= k <= n.
inline BigInt choose(std::int64_t n, std::int64_t k) {
    if (k < 0 || n < 0 || k > n) return BigInt(0);
    if (k > n - k) k = n - k;
    BigInt result(1);
    for (std::int64_t i = 0; i < k; ++i) {
        result *= (n - i);
        result /= (i + 1);
    }
    return result;
}

inline BigInt floor_of(const Rational& value) {
    BigInt num(numerator(value));
    BigInt den(denominator(value));
    BigInt q;
    mpz_fdiv_q(q.backend().data(), num.backend().data(), den.backend().data());
    return q;
}

inline BigInt ceil_of(const Rational& value) {
    BigInt num(numerator(value));
    BigInt den(denominator(value));
    BigInt q;
    mpz_cdiv_q(q.backend().data(), num.backend().data(), den.backend().data());
    return q;
}

/// Parses "3", "-0.25", "1e-3", "2/5" into an exact rational.
/// Decimal strings are read as the decimal they spell, so "0.4" is 2/5.
inline Rational parse_rational(std::string_view text) {
    auto fail = [&] { throw std::invalid_argument("not a number: '" + std::string(text) + "'"); };
    if (text.empty()) fail();
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        Rational num = parse_rational(text.substr(0, slash));
        Rational den = parse_rational(text.substr(slash + 1));
        if (den == 0) fail();
        return num / den;
    }
    bool negative = false;
    std::size_t pos = 0;
    if (text[pos] == '+' || text[pos] == '-') {
        negative = text[pos] == '-';
        ++pos;
    }
    BigInt digits(0);
    std::int64_t scale = 0;
    bool any_digit = false;
    bool after_point = false;
    for (; pos < text.size(); ++pos) {
        const char c = text[pos];
        if (c >= '0' && c <= '9') {
            digits = digits * 10 + (c - '0');
            any_digit = true;
            if (after_point) --scale;
        } else if (c == '.' && !after_point) {
            after_point = true;
        } else {
            break;
        }
    }
    if (!any_digit) fail();
    if (pos < text.size()) {
        if (text[pos] != 'e' && text[pos] != 'E') fail();
        ++pos;
        bool exp_negative = false;
        if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
            exp_negative = text[pos] == '-';
            ++pos;
        }
        if (pos >= text.size()) fail();
        std::int64_t exponent = 0;
        for (; pos < text.size(); ++pos) {
            const char c = text[pos];
            if (c < '0' || c > '9' || exponent > 100000) fail();
            exponent = exponent * 10 + (c - '0');
        }
        scale += exp_negative ? -exponent : exponent;
    }
    Rational value(digits);
    const Rational ten(10);
    if (scale > 0) value *= ipow(ten, static_cast<std::uint64_t>(scale));
    if (scale < 0) value /= ipow(ten, static_cast<std::uint64_t>(-scale));
    return negative ? Rational(-value) : value;
}

/// "p/q" (or "p" when the denominator is 1).
inline std::string to_fraction_string(const Rational& value) { return value.str(); }

/// Decimal rendering with the requested number of significant digits.
inline std::string to_decimal_string(const HighFloat& value, int digits = 30) {
    return value.str(digits, std::ios_base::scientific);
}

}  // namespace tailbound
