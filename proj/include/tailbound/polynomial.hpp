#pragma once

// Polynomials with exact rational coefficients: arithmetic, gcd, Sturm
// sequences and square-free factorization.

#include "tailbound/numeric.hpp"

#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace tailbound {

class RationalPolynomial {
public:
    RationalPolynomial() = default;
    explicit RationalPolynomial(std::vector<Rational> coefficients) : c_(std::move(coefficients)) { trim(); }
    RationalPolynomial(std::initializer_list<Rational> coefficients) : c_(coefficients) { trim(); }

    /// Index = power.  Empty for the zero polynomial.
    const std::vector<Rational>& coefficients() const noexcept { return c_; }
    bool is_zero() const noexcept { return c_.empty(); }
    /// -1 for the zero polynomial.
    int degree() const noexcept { return static_cast<int>(c_.size()) - 1; }
    const Rational& leading() const { return c_.back(); }
    Rational coefficient(std::size_t power) const { return power < c_.size() ? c_[power] : Rational(0); }

    template <typename T>
    T evaluate(const T& x) const {
        T acc(0);
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + T(*it);
        return acc;
    }

    int sign_at(const Rational& x) const {
        const Rational v = evaluate(x);
        return v.sign();
    }

    RationalPolynomial derivative() const {
        std::vector<Rational> d;
        for (std::size_t i = 1; i < c_.size(); ++i) d.push_back(c_[i] * static_cast<long>(i));
        return RationalPolynomial(std::move(d));
    }

    RationalPolynomial monic() const {
        if (is_zero()) return *this;
        std::vector<Rational> out = c_;
        const Rational lead = leading();
        for (auto& v : out) v /= lead;
        return RationalPolynomial(std::move(out));
    }

    friend RationalPolynomial operator+(const RationalPolynomial& a, const RationalPolynomial& b) {
        std::vector<Rational> out(std::max(a.c_.size(), b.c_.size()));
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.coefficient(i) + b.coefficient(i);
        return RationalPolynomial(std::move(out));
    }

    friend RationalPolynomial operator-(const RationalPolynomial& a, const RationalPolynomial& b) {
        std::vector<Rational> out(std::max(a.c_.size(), b.c_.size()));
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.coefficient(i) - b.coefficient(i);
        return RationalPolynomial(std::move(out));
    }

    friend RationalPolynomial operator*(const RationalPolynomial& a, const RationalPolynomial& b) {
        if (a.is_zero() || b.is_zero()) return {};
        std::vector<Rational> out(a.c_.size() + b.c_.size() - 1);
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            for (std::size_t j = 0; j < b.c_.size(); ++j) out[i + j] += a.c_[i] * b.c_[j];
        return RationalPolynomial(std::move(out));
    }

    friend bool operator==(const RationalPolynomial& a, const RationalPolynomial& b) { return a.c_ == b.c_; }

    /// Quotient and remainder of a / b.
    friend std::pair<RationalPolynomial, RationalPolynomial> divmod(const RationalPolynomial& a,
                                                                    const RationalPolynomial& b) {
        if (b.is_zero()) throw std::domain_error("polynomial division by zero");
        std::vector<Rational> rem = a.c_;
        if (a.degree() < b.degree()) return {RationalPolynomial{}, a};
        std::vector<Rational> quot(static_cast<std::size_t>(a.degree() - b.degree() + 1));
        const Rational& lead = b.leading();
        for (int shift = a.degree() - b.degree(); shift >= 0; --shift) {
            const auto top = static_cast<std::size_t>(shift + b.degree());
            const Rational factor = rem[top] / lead;
            quot[static_cast<std::size_t>(shift)] = factor;
            if (factor == 0) continue;
            for (std::size_t i = 0; i < b.c_.size(); ++i) rem[static_cast<std::size_t>(shift) + i] -= factor * b.c_[i];
        }
        return {RationalPolynomial(std::move(quot)), RationalPolynomial(std::move(rem))};
    }

private:
    void trim() {
        while (!c_.empty() && c_.back() == 0) c_.pop_back();
    }

    std::vector<Rational> c_;
};

/// Monic greatest common divisor.
inline RationalPolynomial gcd(RationalPolynomial a, RationalPolynomial b) {
    while (!b.is_zero()) {
        auto r = divmod(a, b).second;
        a = std::move(b);
        b = r.monic();
    }
    return a.monic();
}

/// Exact quotient; throws if b does not divide a.
inline RationalPolynomial exact_divide(const RationalPolynomial& a, const RationalPolynomial& b) {
    auto [q, r] = divmod(a, b);
    if (!r.is_zero()) throw std::logic_error("exact_divide: nonzero remainder");
    return q;
}

/// Sturm sequence p, p', -rem(p, p'), ... (each term scaled by a positive
/// constant, which does not change sign counts).
inline std::vector<RationalPolynomial> sturm_sequence(const RationalPolynomial& p) {
    std::vector<RationalPolynomial> seq;
    if (p.is_zero()) return seq;
    seq.push_back(p);
    RationalPolynomial d = p.derivative();
    if (d.is_zero()) return seq;
    seq.push_back(d);
    for (;;) {
        const auto& a = seq[seq.size() - 2];
        const auto& b = seq.back();
        RationalPolynomial r = divmod(a, b).second;
        if (r.is_zero()) break;
        // -r scaled to have leading coefficient of magnitude 1.
        Rational scale = r.leading();
        if (scale < 0) scale = -scale;
        std::vector<Rational> c = r.coefficients();
        for (auto& v : c) v = -v / scale;
        seq.emplace_back(std::move(c));
    }
    return seq;
}

namespace detail {

inline int count_sign_changes(const std::vector<int>& signs) {
    int changes = 0;
    int last = 0;
    for (int s : signs) {
        if (s == 0) continue;
        if (last != 0 && s != last) ++changes;
        last = s;
    }
    return changes;
}

}  // namespace detail

inline int sign_changes_at(const std::vector<RationalPolynomial>& seq, const Rational& x) {
    std::vector<int> signs;
    signs.reserve(seq.size());
    for (const auto& p : seq) signs.push_back(p.sign_at(x));
    return detail::count_sign_changes(signs);
}

/// Sign changes at +infinity (positive = true) or -infinity.
inline int sign_changes_at_infinity(const std::vector<RationalPolynomial>& seq, bool positive) {
    std::vector<int> signs;
    signs.reserve(seq.size());
    for (const auto& p : seq) {
        int s = p.leading().sign();
        if (!positive && p.degree() % 2 == 1) s = -s;
        signs.push_back(s);
    }
    return detail::count_sign_changes(signs);
}

/// Number of distinct real roots of p in (a, b].
inline int count_roots(const std::vector<RationalPolynomial>& seq, const Rational& a, const Rational& b) {
    return sign_changes_at(seq, a) - sign_changes_at(seq, b);
}

/// p = prod_i factors[i]^multiplicity[i] up to a constant, with each factor
/// square-free, monic and pairwise coprime (Yun's algorithm).
struct SquareFreeFactor {
    RationalPolynomial factor;
    int multiplicity = 1;
};

inline std::vector<SquareFreeFactor> square_free_factorization(const RationalPolynomial& p) {
    std::vector<SquareFreeFactor> out;
    if (p.degree() < 1) return out;
    const RationalPolynomial dp = p.derivative();
    const RationalPolynomial a0 = gcd(p, dp);
    RationalPolynomial b = exact_divide(p, a0);
    RationalPolynomial c = exact_divide(dp, a0);
    RationalPolynomial d = c - b.derivative();
    for (int i = 1; b.degree() >= 1; ++i) {
        const RationalPolynomial a = gcd(b, d);
        if (a.degree() >= 1) out.push_back({a, i});
        b = exact_divide(b, a);
        c = exact_divide(d, a);
        d = c - b.derivative();
    }
    return out;
}

/// Cauchy bound: every root has |x| < 1 + max |a_i / a_n|.
inline Rational root_bound(const RationalPolynomial& p) {
    Rational best(0);
    for (int i = 0; i < p.degree(); ++i) {
        Rational r = p.coefficient(static_cast<std::size_t>(i)) / p.leading();
        if (r < 0) r = -r;
        if (r > best) best = r;
    }
    return best + 1;
}

}  // namespace tailbound
