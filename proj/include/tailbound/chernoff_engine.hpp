#pragma once

// Numeric Chernoff optimization over log moment generating functions, and
// the variance-aware machinery behind the Bennett-type bounds: the two-point
// reduction of a measure on [0,1], the resulting bounds on E(1-t)^X and
// E(1+t)^X, and the closed-form lower-tail bound they produce.

#include "tailbound/bounds_catalog.hpp"
#include "tailbound/errors.hpp"
#include "tailbound/exact_oracles.hpp"
#include "tailbound/spec.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace tailbound {

/// t -> ln E e^{tX} on [t_min, t_max].  Implementations must be convex,
/// vanish at t = 0 and have no side effects.
struct MgfEvaluator {
    std::function<double(double)> log_mgf;
    double t_min = kNegInf;
    double t_max = kPosInf;
    // Support of X when known; lets the optimizer report empty tails exactly.
    std::optional<double> support_min;
    std::optional<double> support_max;
    std::string name;

    double operator()(double t) const { return log_mgf(t); }
};

namespace detail {

// ln(1 + p (e^t - 1)) without overflow for large t.
inline double log_bernoulli_mgf(double p, double t) {
    if (p == 0.0) return 0.0;
    if (p == 1.0) return t;
    if (t < 30.0) return std::log1p(p * std::expm1(t));
    return t + std::log(p + (1.0 - p) * std::exp(-t));
}

}  // namespace detail

inline MgfEvaluator binomial_mgf(int n, double p) {
    if (n < 0 || !(p >= 0.0 && p <= 1.0)) throw DomainError("binomial_mgf: need n >= 0 and p in [0,1]");
    MgfEvaluator m;
    m.log_mgf = [n, p](double t) { return n * detail::log_bernoulli_mgf(p, t); };
    m.support_min = 0.0;
    m.support_max = static_cast<double>(n);
    m.name = "binomial";
    return m;
}

/// Exact product form for independent Be(p_i).
inline MgfEvaluator product_mgf(std::vector<double> ps) {
    for (double p : ps)
        if (!(p >= 0.0 && p <= 1.0)) throw DomainError("product_mgf: every p_i must lie in [0,1]");
    MgfEvaluator m;
    const auto n = static_cast<double>(ps.size());
    m.log_mgf = [ps = std::move(ps)](double t) {
        double sum = 0.0;
        for (double p : ps) sum += detail::log_bernoulli_mgf(p, t);
        return sum;
    };
    m.support_min = 0.0;
    m.support_max = n;
    m.name = "product";
    return m;
}

template <typename T>
MgfEvaluator distribution_mgf(const ExactDistribution<T>& dist) {
    MgfEvaluator m;
    auto logs = log_probabilities(dist);
    // Trim zero-probability ends so the support reported is the true one.
    std::int64_t lo = 0;
    std::int64_t hi = static_cast<std::int64_t>(logs.size()) - 1;
    while (lo < hi && logs[static_cast<std::size_t>(lo)] == kNegInf) ++lo;
    while (hi > lo && logs[static_cast<std::size_t>(hi)] == kNegInf) --hi;
    std::vector<double> kept(logs.begin() + lo, logs.begin() + hi + 1);
    const std::int64_t offset = dist.offset + lo;
    m.support_min = static_cast<double>(offset);
    m.support_max = static_cast<double>(offset + hi - lo);
    m.log_mgf = [offset, kept = std::move(kept)](double t) { return log_mgf_from_logs(offset, kept, t); };
    m.name = "distribution";
    return m;
}

inline MgfEvaluator poisson_mgf(double lambda) {
    if (!(lambda >= 0.0)) throw DomainError("poisson_mgf: lambda must be >= 0");
    MgfEvaluator m;
    m.log_mgf = [lambda](double t) { return lambda * std::expm1(t); };
    m.support_min = 0.0;
    m.name = "poisson";
    return m;
}

/// Golden-section search settings for the Chernoff exponent.
struct ChernoffOptions {
    double tolerance = 1e-12;     // final bracket width (relative to max(1, t))
    double t_cap = 700.0;         // exponents beyond this overflow doubles
    int convexity_samples = 64;   // grid used for the second-difference check
};

namespace detail {

inline void check_convex(const std::function<double(double)>& f, double lo, double hi, int samples) {
    if (!(hi > lo)) return;
    const double step = (hi - lo) / samples;
    double prev2 = f(lo);
    double prev1 = f(lo + step);
    for (int i = 2; i <= samples; ++i) {
        const double cur = f(lo + step * i);
        const double second = cur - 2.0 * prev1 + prev2;
        const double scale = std::max({1.0, std::fabs(cur), std::fabs(prev1), std::fabs(prev2)});
        if (second < -1e-9 * scale)
            throw NonConvexError("MGF evaluator is not convex near t = " + std::to_string(lo + step * (i - 1)) +
                                 " (second difference " + std::to_string(second) + ")");
        prev2 = prev1;
        prev1 = cur;
    }
}

// Minimizes a convex f over [0, cap] starting from the bracket [0, 1] and
// doubling.  Returns {argmin, min}.
inline std::pair<double, double> minimize_convex(const std::function<double(double)>& f, double cap,
                                                 const ChernoffOptions& opt) {
    double lo = 0.0;
    double mid = std::min(1.0, cap);
    double hi = mid;
    const double f0 = f(0.0);
    double fmid = f(mid);
    if (fmid < f0) {
        for (;;) {
            const double next = std::min(2.0 * mid, cap);
            if (next == mid) {
                hi = cap;
                break;
            }
            const double fnext = f(next);
            if (fnext >= fmid) {
                hi = next;
                break;
            }
            lo = mid;
            mid = next;
            fmid = fnext;
        }
    } else {
        hi = mid;
    }
    check_convex(f, 0.0, hi, opt.convexity_samples);

    constexpr double inv_phi = 0.6180339887498948482;
    double a = lo;
    double b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    for (int iter = 0; iter < 400 && (b - a) > opt.tolerance * std::max(1.0, b); ++iter) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    std::pair<double, double> best{0.0, f0};
    auto consider = [&best](double t, double v) {
        if (v < best.second) best = {t, v};
    };
    consider(c, fc);
    consider(d, fd);
    consider(a, f(a));
    consider(b, f(b));
    return best;
}

}  // namespace detail

/// inf over t >= 0 of -t(lambda + a) + ln E e^{tX} (upper tail), or of
/// t(lambda - a) + ln E e^{-tX} (lower tail).  The result is <= 0.
///
/// When the evaluator knows the support and the threshold lies beyond it, the
/// tail is empty and -inf is returned with in_validity_domain = false.  When
/// the infimum is only approached as t -> infinity (threshold exactly at the
/// support edge), the value at t_cap is returned.
inline LogBound generic_chernoff(const MgfEvaluator& mgf, double lambda, const TailQuery& q,
                                 const ChernoffOptions& opt = {}) {
    const BoundId id = BoundId::numeric_chernoff;
    if (q.a == 0.0) return {0.0, id, true};
    const bool upper = q.side == Side::upper;
    const double range = upper ? mgf.t_max : -mgf.t_min;
    if (!(range > 0.0))
        throw DomainError("generic_chernoff: evaluator '" + mgf.name + "' is not defined on the needed half-line");
    const double threshold = upper ? lambda + q.a : lambda - q.a;
    const double slack = 1e-12 * std::max(1.0, std::fabs(threshold));
    if (upper && mgf.support_max && threshold > *mgf.support_max + slack) return {kNegInf, id, false};
    if (!upper && mgf.support_min && threshold < *mgf.support_min - slack) return {kNegInf, id, false};

    std::function<double(double)> objective;
    if (upper)
        objective = [&](double t) { return -t * threshold + mgf(t); };
    else
        objective = [&](double u) { return u * threshold + mgf(-u); };
    const auto [arg, value] = detail::minimize_convex(objective, std::min(range, opt.t_cap), opt);
    (void)arg;
    return {std::min(value, 0.0), id, true};
}

/// Numeric Chernoff bound using the natural MGF of the spec: binomial,
/// exact product, Poisson, or (moments only) the dominating binomial/Poisson
/// MGF with the same mean.  Deterministic X is answered without optimizing.
inline LogBound chernoff_for_spec(const IndicatorSumSpec& spec, const TailQuery& q,
                                  const ChernoffOptions& opt = {}) {
    const BoundId id = BoundId::numeric_chernoff;
    if (q.a == 0.0) return {0.0, id, true};
    if (spec.sigma2() == 0.0 && !spec.is_poisson()) return {kNegInf, id, true};
    return std::visit(
        [&](const auto& kind) -> LogBound {
            using K = std::decay_t<decltype(kind)>;
            if constexpr (std::is_same_v<K, Homogeneous>) {
                return generic_chernoff(binomial_mgf(kind.n, kind.p), spec.lambda(), q, opt);
            } else if constexpr (std::is_same_v<K, Heterogeneous>) {
                return generic_chernoff(product_mgf(kind.ps), spec.lambda(), q, opt);
            } else if constexpr (std::is_same_v<K, Moments>) {
                if (kind.n) return generic_chernoff(binomial_mgf(*kind.n, kind.lambda / *kind.n), spec.lambda(), q, opt);
                return generic_chernoff(poisson_mgf(kind.lambda), spec.lambda(), q, opt);
            } else {
                return generic_chernoff(poisson_mgf(kind.lambda), spec.lambda(), q, opt);
            }
        },
        spec.kind());
}

// ---------------------------------------------------------------------------
// Two-point reduction

struct PointMass {
    double x = 0.0;
    double mass = 0.0;
};

/// The two-atom measures (m - alpha0) delta_0 + alpha0 delta_{x0} and
/// (m - alpha1) delta_1 + alpha1 delta_{x1}, which share the total mass and
/// first two moments of mu (the second after reflecting x -> 1 - x).  For
/// f''' >= 0,
///   (m - alpha0) f(0) + alpha0 f(x0) <= int f dmu <= (m - alpha1) f(1) + alpha1 f(x1),
/// and the inequalities reverse for f''' <= 0.
struct TwoPointReduction {
    double m = 0.0;
    double x0 = 0.0;
    double alpha0 = 0.0;
    double x1 = 0.0;
    double alpha1 = 0.0;

    template <typename F>
    double lower_side(F&& f) const {
        return (m - alpha0) * f(0.0) + alpha0 * f(x0);
    }
    template <typename F>
    double upper_side(F&& f) const {
        return (m - alpha1) * f(1.0) + alpha1 * f(x1);
    }
};

inline TwoPointReduction two_point_reduction(std::span<const PointMass> mu) {
    long double m = 0, first = 0, second = 0, first_r = 0, second_r = 0;
    for (const auto& atom : mu) {
        if (!(atom.x >= 0.0 && atom.x <= 1.0)) throw DomainError("two_point_reduction: atom outside [0,1]");
        if (!(atom.mass >= 0.0)) throw DomainError("two_point_reduction: negative mass");
        const long double x = atom.x;
        const long double w = atom.mass;
        m += w;
        first += w * x;
        second += w * x * x;
        first_r += w * (1 - x);
        second_r += w * (1 - x) * (1 - x);
    }
    // 0/0 = 0 in the degenerate cases (all mass at 0, resp. at 1).
    auto ratio = [](long double num, long double den) { return den == 0 ? 0.0L : num / den; };
    TwoPointReduction r;
    r.m = static_cast<double>(m);
    r.x0 = static_cast<double>(ratio(second, first));
    r.alpha0 = static_cast<double>(ratio(first * first, second));
    r.x1 = static_cast<double>(1 - ratio(second_r, first_r));
    r.alpha1 = static_cast<double>(ratio(first_r * first_r, second_r));
    return r;
}

inline TwoPointReduction two_point_reduction(const std::vector<PointMass>& mu) {
    return two_point_reduction(std::span<const PointMass>(mu));
}

// ---------------------------------------------------------------------------
// Moment bounds from the two-point reduction

/// Upper bound on ln E(1-t)^X for any sum of independent indicators with
/// mean lambda and variance sigma2, 0 <= t <= 1:
///   lambda^2/(lambda - sigma2) * ln(1 - t (1 - sigma2/lambda)).
inline double log_moment_bound_shrink(double lambda, double sigma2, double t) {
    if (!(t >= 0.0 && t <= 1.0)) throw DomainError("shrink moment bound: t must lie in [0,1]");
    if (!(sigma2 >= 0.0 && sigma2 < lambda)) throw DomainError("shrink moment bound: need 0 <= sigma2 < lambda");
    if (t == 0.0) return 0.0;
    return lambda * lambda / (lambda - sigma2) * std::log1p(-t * (1.0 - sigma2 / lambda));
}

/// Upper bound on ln E(1+t)^X, t >= 0, for n independent indicators with
/// mean lambda and variance sigma2.
inline double log_moment_bound_grow(int n, double lambda, double sigma2, double t) {
    if (!(t >= 0.0)) throw DomainError("grow moment bound: t must be >= 0");
    const double rest = n - lambda;
    if (!(rest > 0.0)) throw DomainError("grow moment bound: need n > lambda");
    if (!(sigma2 >= 0.0)) throw DomainError("grow moment bound: need sigma2 >= 0");
    const double denom = rest - sigma2;
    if (!(denom > 0.0)) throw DomainError("grow moment bound: need n - lambda - sigma2 > 0");
    if (t == 0.0) return 0.0;
    const double alpha1 = rest * rest / denom;
    const double free_mass = (n * lambda - lambda * lambda - n * sigma2) / denom;  // n - alpha1
    return free_mass * std::log1p(t) + alpha1 * std::log1p(t * sigma2 / rest);
}

/// The shrink bound as a log-MGF bound in s <= 0, through t = 1 - e^s.
inline MgfEvaluator shrink_bound_as_mgf(double lambda, double sigma2) {
    if (!(sigma2 >= 0.0 && sigma2 < lambda)) throw DomainError("shrink moment bound: need 0 <= sigma2 < lambda");
    MgfEvaluator m;
    m.log_mgf = [lambda, sigma2](double s) {
        return log_moment_bound_shrink(lambda, sigma2, std::min(1.0, -std::expm1(s)));
    };
    m.t_min = kNegInf;
    m.t_max = 0.0;
    m.support_min = 0.0;
    m.name = "shrink-bound";
    return m;
}

/// The grow bound as a log-MGF bound in s >= 0, through t = e^s - 1.
inline MgfEvaluator grow_bound_as_mgf(int n, double lambda, double sigma2) {
    (void)log_moment_bound_grow(n, lambda, sigma2, 0.0);  // validates
    MgfEvaluator m;
    m.log_mgf = [n, lambda, sigma2](double s) { return log_moment_bound_grow(n, lambda, sigma2, std::expm1(s)); };
    m.t_min = 0.0;
    m.t_max = kPosInf;
    m.support_max = static_cast<double>(n);
    m.name = "grow-bound";
    return m;
}

/// Closed-form minimum over t of the shrink bound minus (lambda - a) ln(1-t):
/// a bound on ln P(X <= lambda - a) for 0 <= a <= lambda.  At a = lambda the
/// term (lambda - a) ln(1 - a/lambda) is taken as 0.
inline LogBound two_point_lower_tail(double lambda, double sigma2, double a) {
    const BoundId id = BoundId::two_point_lower;
    if (!(a >= 0.0)) throw DomainError("two_point_lower_tail: a must be >= 0");
    if (a > lambda) throw DomainError("two_point_lower_tail: a must not exceed lambda");
    if (!(sigma2 >= 0.0 && sigma2 < lambda)) throw DomainError("two_point_lower_tail: need 0 <= sigma2 < lambda");
    if (a == 0.0) return {0.0, id, true};
    if (sigma2 == 0.0) return {kNegInf, id, true};  // deterministic X
    const double lead = lambda / (lambda - sigma2) * (a + sigma2 - a * sigma2 / lambda);
    const double first = -lead * std::log1p(a / sigma2 - a / lambda);
    const double second = a == lambda ? 0.0 : -(lambda - a) * std::log1p(-a / lambda);
    return {first + second, id, true};
}

/// The lower-tail rate in the scaled variables x = sigma2/lambda, y = a/sigma2:
///   g(x,y) = (1+y-xy) ln(1+y-xy) / (1-x) + (1-xy) ln(1-xy) / x,
/// defined for 0 < x < 1 and 0 <= y <= 1/x.  It is nondecreasing in x and
/// tends to h(y) as x -> 0.
inline double lower_tail_rate(double x, double y) {
    if (!(x > 0.0 && x < 1.0)) throw DomainError("lower_tail_rate: x must lie in (0,1)");
    if (!(y >= 0.0) || y * x > 1.0 + 1e-15) throw DomainError("lower_tail_rate: y must lie in [0, 1/x]");
    // (1+u) ln(1+u) = h(u) + u and the linear parts cancel: u/(1-x) + v/x = 0.
    const double u = y - x * y;
    const double v = std::max(-1.0, -x * y);
    return detail::h_extended(u) / (1.0 - x) + detail::h_extended(v) / x;
}

}  // namespace tailbound
