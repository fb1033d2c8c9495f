#pragma once

// Exact distributions of sums of independent indicators and the quantities
// every bound is checked against: tails, moments, MGFs and cumulants.
//
// ExactDistribution<Rational> is exact; ExactDistribution<HighFloat> carries
// 50-digit floats and is used where rational pmfs get too large (n > 200).

#include "tailbound/numeric.hpp"
#include "tailbound/spec.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <type_traits>
#include <vector>

namespace tailbound {

inline constexpr int kRationalSizeLimit = 200;

template <typename T>
struct ExactDistribution {
    std::int64_t offset = 0;  // smallest support point
    std::vector<T> probs;     // probs[i] = P(X = offset + i)

    static constexpr bool is_exact = std::is_same_v<T, Rational>;

    std::int64_t min_support() const { return offset; }
    std::int64_t max_support() const { return offset + static_cast<std::int64_t>(probs.size()) - 1; }

    T prob(std::int64_t k) const {
        if (k < offset || k > max_support()) return T(0);
        return probs[static_cast<std::size_t>(k - offset)];
    }

    T total() const {
        T sum(0);
        for (const auto& p : probs) sum += p;
        return sum;
    }
};

using RationalDistribution = ExactDistribution<Rational>;
using HighDistribution = ExactDistribution<HighFloat>;

/// Point mass at `value`.
template <typename T = Rational>
ExactDistribution<T> degenerate_distribution(std::int64_t value = 0) {
    return ExactDistribution<T>{value, {T(1)}};
}

/// Bi(n, p) by the multiplicative recurrence P(k+1) = P(k) (n-k)/(k+1) p/q.
inline RationalDistribution binomial_distribution(int n, const Rational& p) {
    if (n < 0) throw DomainError("binomial: n must be >= 0");
    if (p < 0 || p > 1) throw DomainError("binomial: p must lie in [0,1]");
    if (p == 0) return degenerate_distribution(0);
    if (p == 1) return degenerate_distribution(n);
    const Rational q = 1 - p;
    const Rational ratio = p / q;
    RationalDistribution dist{0, std::vector<Rational>(static_cast<std::size_t>(n) + 1)};
    dist.probs[0] = ipow(q, static_cast<std::uint64_t>(n));
    for (int k = 0; k < n; ++k)
        dist.probs[k + 1] = dist.probs[k] * ratio * Rational(n - k, k + 1);
    return dist;
}

/// Law of a sum of independent Be(p_i): start from {0: 1} and fold in each
/// indicator.
template <typename T>
ExactDistribution<T> poisson_binomial_distribution(std::span<const T> ps) {
    ExactDistribution<T> dist{0, {T(1)}};
    dist.probs.reserve(ps.size() + 1);
    for (const T& p : ps) {
        if (p < 0 || p > 1) throw DomainError("poisson_binomial: every p_i must lie in [0,1]");
        const T q = T(1) - p;
        dist.probs.push_back(T(0));
        for (std::size_t k = dist.probs.size() - 1; k > 0; --k)
            dist.probs[k] = dist.probs[k] * q + dist.probs[k - 1] * p;
        dist.probs[0] *= q;
    }
    return dist;
}

template <typename T>
ExactDistribution<T> poisson_binomial_distribution(const std::vector<T>& ps) {
    return poisson_binomial_distribution<T>(std::span<const T>(ps));
}

/// Rational probabilities exactly equal to the given doubles.
inline std::vector<Rational> exact_rationals(std::span<const double> ps) {
    std::vector<Rational> out;
    out.reserve(ps.size());
    for (double p : ps) out.emplace_back(p);
    return out;
}

template <typename T>
T mean(const ExactDistribution<T>& dist) {
    T sum(0);
    for (std::size_t i = 0; i < dist.probs.size(); ++i)
        sum += dist.probs[i] * T(dist.offset + static_cast<std::int64_t>(i));
    return sum;
}

template <typename T>
T variance(const ExactDistribution<T>& dist) {
    const T mu = mean(dist);
    T sum(0);
    for (std::size_t i = 0; i < dist.probs.size(); ++i) {
        const T d = T(dist.offset + static_cast<std::int64_t>(i)) - mu;
        sum += dist.probs[i] * d * d;
    }
    return sum;
}

/// Sum of the pmf over the support points k >= threshold (upper) or
/// k <= threshold (lower).  A threshold between support points therefore
/// never drops boundary mass.
template <typename T>
T exact_tail(const ExactDistribution<T>& dist, Side side, const Rational& threshold) {
    T sum(0);
    if (side == Side::upper) {
        const BigInt first = ceil_of(threshold);
        const std::int64_t lo = std::max<std::int64_t>(
            dist.offset, first > BigInt(dist.max_support()) ? dist.max_support() + 1 : first.convert_to<std::int64_t>());
        for (std::int64_t k = lo; k <= dist.max_support(); ++k) sum += dist.probs[static_cast<std::size_t>(k - dist.offset)];
    } else {
        const BigInt last = floor_of(threshold);
        const std::int64_t hi = std::min<std::int64_t>(
            dist.max_support(), last < BigInt(dist.offset) ? dist.offset - 1 : last.convert_to<std::int64_t>());
        for (std::int64_t k = dist.offset; k <= hi; ++k) sum += dist.probs[static_cast<std::size_t>(k - dist.offset)];
    }
    return sum;
}

template <typename T>
T exact_tail(const ExactDistribution<T>& dist, Side side, double threshold) {
    if (std::isinf(threshold)) {
        const bool everything = (side == Side::upper) == (threshold < 0);
        return everything ? dist.total() : T(0);
    }
    return exact_tail(dist, side, Rational(threshold));
}

/// Natural logs of the pmf, -inf where the probability is zero.
template <typename T>
std::vector<double> log_probabilities(const ExactDistribution<T>& dist) {
    std::vector<double> out;
    out.reserve(dist.probs.size());
    for (const auto& p : dist.probs) out.push_back(log_of(p));
    return out;
}

/// ln E e^{tX} from precomputed log-probabilities (log-sum-exp).
inline double log_mgf_from_logs(std::int64_t offset, std::span<const double> log_probs, double t) {
    double peak = kNegInf;
    for (std::size_t i = 0; i < log_probs.size(); ++i)
        peak = std::max(peak, log_probs[i] + t * static_cast<double>(offset + static_cast<std::int64_t>(i)));
    if (peak == kNegInf) return kNegInf;
    double sum = 0.0;
    for (std::size_t i = 0; i < log_probs.size(); ++i) {
        const double e = log_probs[i] + t * static_cast<double>(offset + static_cast<std::int64_t>(i));
        if (e != kNegInf) sum += std::exp(e - peak);
    }
    return peak + std::log(sum);
}

template <typename T>
double log_mgf(const ExactDistribution<T>& dist, double t) {
    const auto logs = log_probabilities(dist);
    return log_mgf_from_logs(dist.offset, logs, t);
}

/// ln E e^{tX} in 50-digit precision.
template <typename T>
HighFloat log_mgf_high(const ExactDistribution<T>& dist, const HighFloat& t) {
    HighFloat sum(0);
    for (std::size_t i = 0; i < dist.probs.size(); ++i) {
        if (dist.probs[i] == 0) continue;
        sum += to_high(dist.probs[i]) * exp(t * HighFloat(dist.offset + static_cast<std::int64_t>(i)));
    }
    return log(sum);
}

template <typename T>
HighDistribution to_high(const ExactDistribution<T>& dist) {
    HighDistribution out{dist.offset, {}};
    out.probs.reserve(dist.probs.size());
    for (const auto& p : dist.probs) out.probs.push_back(to_high(p));
    return out;
}

/// First four cumulants (semi-invariants) of X.
template <typename T>
struct CumulantSet {
    T kappa1{0};  // EX
    T kappa2{0};  // Var X
    T kappa3{0};  // E(X - EX)^3
    T kappa4{0};
};

/// Cumulants add over independent summands; a Be(p) summand contributes
/// p, pq, pq(1-2p) and pq(1-6pq).
template <typename T>
CumulantSet<T> cumulants(std::span<const T> ps) {
    CumulantSet<T> k;
    for (const T& p : ps) {
        if (p < 0 || p > 1) throw DomainError("cumulants: every p_i must lie in [0,1]");
        const T pq = p * (T(1) - p);
        k.kappa1 += p;
        k.kappa2 += pq;
        k.kappa3 += pq * (T(1) - T(2) * p);
        k.kappa4 += pq * (T(1) - T(6) * pq);
    }
    return k;
}

template <typename T>
CumulantSet<T> cumulants(const std::vector<T>& ps) {
    return cumulants<T>(std::span<const T>(ps));
}

/// P(Po(lambda) >= k).
///
/// Summed directly from the side that has finitely many terms when k <= lambda
/// (1 minus the lower sum); otherwise the upper terms are added until the
/// geometric bound on the remainder drops below 1e-17 of the running sum.
inline double poisson_tail(double lambda, std::int64_t k) {
    if (!(lambda > 0.0)) throw DomainError("poisson_tail: lambda must be > 0");
    if (k <= 0) return 1.0;
    const long double lam = lambda;
    auto log_term = [&](std::int64_t j) {
        return -lam + static_cast<long double>(j) * std::log(lam) - std::lgamma(static_cast<long double>(j) + 1.0L);
    };
    if (static_cast<double>(k) <= lambda) {
        long double lower = 0.0L;
        for (std::int64_t j = 0; j < k; ++j) lower += std::exp(log_term(j));
        return static_cast<double>(std::max(0.0L, 1.0L - lower));
    }
    long double term = std::exp(log_term(k));
    long double sum = 0.0L;
    for (std::int64_t j = k;; ++j) {
        sum += term;
        const long double ratio = lam / static_cast<long double>(j + 1);
        term *= ratio;
        // Remaining mass <= term / (1 - ratio) since the ratios keep shrinking.
        if (ratio < 1.0L && term / (1.0L - ratio) <= 1e-17L * sum) break;
        if (term == 0.0L) break;
    }
    return static_cast<double>(sum);
}

}  // namespace tailbound
