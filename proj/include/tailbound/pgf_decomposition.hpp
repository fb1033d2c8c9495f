#pragma once

// Probability generating functions, an exact real-rootedness decision and
// the decomposition of a real-rooted PGF into independent Bernoulli factors.
//
// A PGF f(x) = E x^X with only real roots factors as
//   f(x) = x^z * prod_i (q_i + p_i x),   root r_i = -q_i/p_i,  p_i = 1/(1 - r_i),
// so X is z plus a sum of independent Be(p_i).

#include "tailbound/errors.hpp"
#include "tailbound/exact_oracles.hpp"
#include "tailbound/numeric.hpp"
#include "tailbound/polynomial.hpp"

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

namespace tailbound {

inline RationalPolynomial pgf_of(const RationalDistribution& dist) {
    if (dist.offset < 0) throw DomainError("pgf_of: support must be nonnegative");
    std::vector<Rational> c(static_cast<std::size_t>(dist.offset), Rational(0));
    c.insert(c.end(), dist.probs.begin(), dist.probs.end());
    return RationalPolynomial(std::move(c));
}

/// Integer coefficients with gcd 1 and positive leading coefficient,
/// proportional to p.
inline std::vector<BigInt> primitive_part(const RationalPolynomial& p) {
    std::vector<BigInt> out;
    if (p.is_zero()) return out;
    BigInt lcm_den(1);
    for (const auto& c : p.coefficients()) lcm_den = boost::multiprecision::lcm(lcm_den, denominator(c));
    BigInt g(0);
    for (const auto& c : p.coefficients()) {
        BigInt v = numerator(c) * (lcm_den / denominator(c));
        out.push_back(v);
        g = boost::multiprecision::gcd(g, v);
    }
    if (p.leading() < 0) g = -g;
    for (auto& v : out) v /= g;
    return out;
}

/// A real root of a square-free factor, isolated in (lower, upper].
struct RootInterval {
    Rational lower;
    Rational upper;
    int multiplicity = 1;
};

struct RealRootCertificate {
    bool real_rooted = false;
    int degree = 0;
    int zero_roots = 0;                 // multiplicity of x = 0
    std::vector<RootInterval> roots;    // nonzero real roots, ascending
    int real_root_count = 0;            // nonzero real roots with multiplicity
    int nonreal_root_count = 0;         // with multiplicity; always even
    // Discriminant of the primitive integer form of f / x^z when that
    // reduced factor is quadratic.
    std::optional<BigInt> reduced_quadratic_discriminant;
    std::vector<int> sturm_counts;      // distinct real roots per square-free factor

    std::string summary() const {
        std::string s = real_rooted ? "real-rooted" : "not real-rooted";
        s += ": degree " + std::to_string(degree) + ", " + std::to_string(zero_roots) + " zero root(s), " +
             std::to_string(real_root_count) + " other real root(s), " + std::to_string(nonreal_root_count) +
             " non-real root(s)";
        if (reduced_quadratic_discriminant)
            s += ", reduced quadratic discriminant " + reduced_quadratic_discriminant->str();
        return s;
    }
};

namespace detail {

inline RationalPolynomial strip_zero_roots(const RationalPolynomial& p, int& zero_roots) {
    const auto& c = p.coefficients();
    std::size_t z = 0;
    while (z < c.size() && c[z] == 0) ++z;
    zero_roots = static_cast<int>(z);
    return RationalPolynomial(std::vector<Rational>(c.begin() + static_cast<std::ptrdiff_t>(z), c.end()));
}

// Splits (lo, hi] until every piece holds exactly one root of the square-free
// polynomial behind `seq`.
inline void isolate(const std::vector<RationalPolynomial>& seq, const Rational& lo, const Rational& hi, int count,
                    std::vector<std::pair<Rational, Rational>>& out) {
    if (count == 0) return;
    if (count == 1) {
        out.emplace_back(lo, hi);
        return;
    }
    const Rational mid = (lo + hi) / 2;
    const int left = count_roots(seq, lo, mid);
    isolate(seq, lo, mid, left, out);
    isolate(seq, mid, hi, count - left, out);
}

}  // namespace detail

/// Decides whether every root of p is real by Sturm sign-change counting on
/// the square-free factors; no floating-point root finding is involved.
inline RealRootCertificate is_real_rooted(const RationalPolynomial& p) {
    if (p.is_zero()) throw PreconditionError("is_real_rooted: zero polynomial");
    RealRootCertificate cert;
    cert.degree = p.degree();
    const RationalPolynomial reduced = detail::strip_zero_roots(p, cert.zero_roots);
    if (reduced.degree() == 2) {
        const auto c = primitive_part(reduced);
        cert.reduced_quadratic_discriminant = c[1] * c[1] - 4 * c[2] * c[0];
    }
    for (const auto& [factor, multiplicity] : square_free_factorization(reduced)) {
        const auto seq = sturm_sequence(factor);
        const int distinct = sign_changes_at_infinity(seq, false) - sign_changes_at_infinity(seq, true);
        cert.sturm_counts.push_back(distinct);
        cert.real_root_count += distinct * multiplicity;
        const Rational bound = root_bound(factor);
        std::vector<std::pair<Rational, Rational>> pieces;
        detail::isolate(seq, -bound, bound, count_roots(seq, -bound, bound), pieces);
        for (auto& [lo, hi] : pieces) cert.roots.push_back({lo, hi, multiplicity});
    }
    std::sort(cert.roots.begin(), cert.roots.end(),
              [](const RootInterval& x, const RootInterval& y) { return x.upper < y.upper; });
    cert.nonreal_root_count = reduced.degree() - cert.real_root_count;
    cert.real_rooted = cert.nonreal_root_count == 0;
    return cert;
}

struct BernoulliDecomposition {
    std::vector<HighFloat> probs;  // p_i in (0,1), ascending
    int unit_indicators = 0;       // components equal to 1 (roots at x = 0)
    HighFloat residual{0};         // max coefficient deviation of the rebuilt PGF
    RealRootCertificate certificate;

    HighFloat mean() const {
        HighFloat s(unit_indicators);
        for (const auto& p : probs) s += p;
        return s;
    }
    HighFloat variance() const {
        HighFloat s(0);
        for (const auto& p : probs) s += p * (1 - p);
        return s;
    }
    std::vector<double> probabilities() const {
        std::vector<double> out;
        for (const auto& p : probs) out.push_back(to_double(p));
        return out;
    }
};

namespace detail {

// Shrinks an isolating interval of a simple root by exact bisection until
// its width is below rel * max(|lower|, |upper|).
inline Rational refine_root(const RationalPolynomial& f, Rational lo, Rational hi, const Rational& rel) {
    if (f.sign_at(hi) == 0) return hi;
    const int sign_hi = f.sign_at(hi);
    for (int iter = 0; iter < 4000; ++iter) {
        const Rational width = hi - lo;
        const Rational scale = std::max(abs(lo), abs(hi));
        if (width <= rel * scale) break;
        const Rational mid = (lo + hi) / 2;
        const int s = f.sign_at(mid);
        if (s == 0) return mid;
        if (s == sign_hi)
            hi = mid;
        else
            lo = mid;
    }
    return (lo + hi) / 2;
}

}  // namespace detail

/// Bernoulli parameters of a real-rooted PGF.  Roots are refined exactly to
/// about 40 significant digits before conversion to 50-digit floats.
inline BernoulliDecomposition bernoulli_decomposition(const RationalPolynomial& pgf) {
    if (pgf.is_zero()) throw PreconditionError("bernoulli_decomposition: zero polynomial");
    for (const auto& c : pgf.coefficients())
        if (c < 0) throw PreconditionError("bernoulli_decomposition: coefficients must be nonnegative");
    Rational total(0);
    for (const auto& c : pgf.coefficients()) total += c;
    if (total != 1) throw PreconditionError("bernoulli_decomposition: coefficients must sum to 1");

    BernoulliDecomposition out;
    out.certificate = is_real_rooted(pgf);
    if (!out.certificate.real_rooted)
        throw PreconditionError("bernoulli_decomposition: PGF is not real-rooted (" + out.certificate.summary() + ")");
    out.unit_indicators = out.certificate.zero_roots;

    int zero_roots = 0;
    const RationalPolynomial reduced = detail::strip_zero_roots(pgf, zero_roots);
    const Rational rel = Rational(1) / ipow(Rational(10), 42);
    const auto factors = square_free_factorization(reduced);
    for (const auto& root : out.certificate.roots) {
        // Find the square-free factor this interval belongs to.
        for (const auto& [factor, multiplicity] : factors) {
            if (multiplicity != root.multiplicity) continue;
            const auto seq = sturm_sequence(factor);
            if (count_roots(seq, root.lower, root.upper) != 1) continue;
            const HighFloat r = to_high(detail::refine_root(factor, root.lower, root.upper, rel));
            const HighFloat p = 1 / (1 - r);
            for (int k = 0; k < multiplicity; ++k) out.probs.push_back(p);
            break;
        }
    }
    std::sort(out.probs.begin(), out.probs.end());

    // Rebuild x^z prod (q_i + p_i x) and compare coefficients.
    std::vector<HighFloat> rebuilt{HighFloat(1)};
    for (const auto& p : out.probs) {
        std::vector<HighFloat> next(rebuilt.size() + 1, HighFloat(0));
        for (std::size_t i = 0; i < rebuilt.size(); ++i) {
            next[i] += rebuilt[i] * (1 - p);
            next[i + 1] += rebuilt[i] * p;
        }
        rebuilt = std::move(next);
    }
    rebuilt.insert(rebuilt.begin(), static_cast<std::size_t>(zero_roots), HighFloat(0));
    HighFloat worst(0);
    const auto n = std::max(rebuilt.size(), pgf.coefficients().size());
    for (std::size_t i = 0; i < n; ++i) {
        const HighFloat have = i < rebuilt.size() ? rebuilt[i] : HighFloat(0);
        const HighFloat want = to_high(pgf.coefficient(i));
        worst = std::max(worst, HighFloat(abs(have - want)));
    }
    out.residual = worst;
    return out;
}

}  // namespace tailbound
