#pragma once

// Closed-form tail bounds for sums of indicators, evaluated in log domain.
//
// Two families live here:
//  * binomial-type bounds, which depend on n and p = EX/n (or on EX alone),
//    valid for Bi(n,p), independent heterogeneous indicators and negatively
//    related indicators;
//  * variance bounds (Bennett/Bernstein type), which depend on sigma^2 = Var X
//    and are valid whenever X is a sum of independent indicators.

#include "tailbound/errors.hpp"
#include "tailbound/spec.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace tailbound {

namespace detail {

// (1+y) ln(1+y) - y for y >= -1.  Small |y| goes through the series
// sum_{k>=2} (-y)^k / (k(k-1)) to avoid the cancellation of the direct form.
/// True when a deviation `a` lies past an endpoint at distance `room`, with
/// slack for the rounding in `room` (computed from values of size `scale`).
inline bool past_endpoint(double a, double room, double scale) {
    return a > room + 8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, scale);
}

inline double h_extended(double y) {
    if (y == 0.0) return 0.0;
    if (y == -1.0) return 1.0;
    if (std::fabs(y) < 0.1) {
        double term = y * y;  // y^k with alternating sign folded in below
        double sum = 0.0;
        for (int k = 2; k < 40; ++k) {
            const double contribution = term / (static_cast<double>(k) * (k - 1));
            sum += contribution;
            if (std::fabs(contribution) < 1e-18 * std::fabs(sum)) break;
            term *= -y;
        }
        return sum;
    }
    return (1.0 + y) * std::log1p(y) - y;
}

inline void require_side(BoundId id, Side expected, Side got) {
    if (expected != got)
        throw SideMismatchError("bound " + std::string(label(id)) + " applies to the " +
                                std::string(to_string(expected)) + " tail only");
}

}  // namespace detail

/// h(y) = (1+y) ln(1+y) - y, the Bennett function.
inline double h(double y) {
    if (!(y >= 0.0)) throw DomainError("h: argument must be >= 0");
    if (std::isinf(y)) return kPosInf;
    return detail::h_extended(y);
}

/// Exact Chernoff bound for Bi(n, p) with p = EX/n; applies unchanged to
/// heterogeneous and negatively related indicators with the same n and EX.
///
/// For `a` past the support (a > n - lambda upward, a > lambda downward) the
/// tail is empty: log_value is -inf and in_validity_domain is false.
inline LogBound binomial_chernoff(const IndicatorSumSpec& spec, const TailQuery& q) {
    const auto n_opt = spec.n();
    if (!n_opt) throw UnsupportedSpecError("binomial Chernoff bound needs the number of summands n");
    const double n = *n_opt;
    const double lambda = spec.lambda();
    const double a = q.a;
    const BoundId id = q.side == Side::upper ? BoundId::chernoff_binomial_upper : BoundId::chernoff_binomial_lower;
    if (a == 0.0) return {0.0, id, true};

    // The exponent is -lambda h(d/lambda) - (n-lambda) h(-d/(n-lambda)), with
    // d = +a upward and d = -a downward.  Boundary terms 0 ln 0 are 0.
    const double room = q.side == Side::upper ? n - lambda : lambda;
    if (detail::past_endpoint(a, room, n)) return {kNegInf, id, false};
    const double d = q.side == Side::upper ? std::min(a, room) : -std::min(a, room);
    double exponent = 0.0;
    if (lambda > 0.0) exponent -= lambda * detail::h_extended(d / lambda);
    else if (d != 0.0) return {kNegInf, id, true};
    if (n - lambda > 0.0) exponent -= (n - lambda) * detail::h_extended(-d / (n - lambda));
    else if (d != 0.0) return {kNegInf, id, true};
    return {exponent, id, true};
}

/// Which tail a bound is stated for; nullopt when it holds for both.
inline std::optional<Side> stated_side(BoundId id) {
    switch (id) {
        case BoundId::chernoff_binomial_upper:
        case BoundId::bernstein_pq_upper:
        case BoundId::bernstein_upper:
        case BoundId::bernstein_quadratic_upper:
        case BoundId::bennett_mean_upper:
        case BoundId::bernstein_mean_upper:
        case BoundId::bernstein_mean_quadratic_upper:
            return Side::upper;
        case BoundId::chernoff_binomial_lower:
        case BoundId::bernstein_pq_lower:
        case BoundId::bernstein_lower:
        case BoundId::bernstein_quadratic_lower:
        case BoundId::bennett_mean_lower:
        case BoundId::gaussian_mean_lower:
        case BoundId::gaussian_pq_lower:
        case BoundId::gaussian_variance_lower:
        case BoundId::two_point_lower:
            return Side::lower;
        default:
            return std::nullopt;
    }
}

inline bool is_binomial_type(BoundId id) {
    switch (id) {
        case BoundId::chernoff_binomial_upper:
        case BoundId::chernoff_binomial_lower:
        case BoundId::bernstein_pq_upper:
        case BoundId::bernstein_upper:
        case BoundId::bernstein_quadratic_upper:
        case BoundId::bennett_mean_upper:
        case BoundId::bernstein_mean_upper:
        case BoundId::bernstein_mean_quadratic_upper:
        case BoundId::bernstein_pq_lower:
        case BoundId::bernstein_lower:
        case BoundId::bernstein_quadratic_lower:
        case BoundId::bennett_mean_lower:
        case BoundId::gaussian_mean_lower:
        case BoundId::gaussian_pq_lower:
            return true;
        default:
            return false;
    }
}

inline bool is_variance_type(BoundId id) {
    switch (id) {
        case BoundId::bennett_variance:
        case BoundId::bernstein_variance:
        case BoundId::bernstein_variance_quadratic:
        case BoundId::linear_exponent_variance:
        case BoundId::gaussian_variance_lower:
            return true;
        default:
            return false;
    }
}

/// Closed-form bounds in terms of n and p = EX/n.  Bounds that use only
/// np = EX accept specs without n, including the Poisson limit.
inline LogBound binomial_type_bound(const IndicatorSumSpec& spec, const TailQuery& q, BoundId id) {
    if (!is_binomial_type(id))
        throw std::invalid_argument("bound " + std::string(label(id)) + " is not a binomial-type bound");
    detail::require_side(id, *stated_side(id), q.side);
    if (id == BoundId::chernoff_binomial_upper || id == BoundId::chernoff_binomial_lower)
        return binomial_chernoff(spec, q);

    const double a = q.a;
    const double lambda = spec.lambda();
    const bool uses_mean_only = id == BoundId::bennett_mean_upper || id == BoundId::bernstein_mean_upper ||
                                id == BoundId::bernstein_mean_quadratic_upper ||
                                id == BoundId::bennett_mean_lower || id == BoundId::gaussian_mean_lower;

    double p = 0.0;
    double npq = 0.0;
    if (!uses_mean_only) {
        const auto n = spec.n();
        if (!n) throw UnsupportedSpecError("bound " + std::string(label(id)) + " needs the number of summands n");
        p = lambda / *n;
        npq = lambda * (1.0 - p);
        if (id == BoundId::gaussian_pq_lower && p > 0.5)
            throw PreconditionError("bound 1.10 requires p = EX/n <= 1/2");
    }
    if (a == 0.0) return {0.0, id, true};
    const double qq = 1.0 - p;

    if (uses_mean_only) {
        if (!(lambda > 0.0)) throw PreconditionError("bound " + std::string(label(id)) + " requires EX > 0");
    } else if (!(npq > 0.0)) {
        throw PreconditionError("bound " + std::string(label(id)) + " requires 0 < p < 1");
    }

    switch (id) {
        case BoundId::bernstein_pq_upper: {
            const double denom = npq + a * (qq - p) / 3.0;
            // Only reachable for a > n - EX, where the upper tail is empty.
            if (!(denom > 0.0)) return {kNegInf, id, false};
            return {-a * a / (2.0 * denom), id, true};
        }
        case BoundId::bernstein_upper:
        case BoundId::bernstein_lower:
            return {-a * a / (2.0 * (npq + a / 3.0)), id, true};
        case BoundId::bernstein_quadratic_upper:
        case BoundId::bernstein_quadratic_lower:
            return {-(a * a / (2.0 * npq)) * (1.0 - a / (3.0 * npq)), id, true};
        case BoundId::bennett_mean_upper:
            return {-lambda * detail::h_extended(a / lambda), id, true};
        case BoundId::bernstein_mean_upper:
            return {-a * a / (2.0 * lambda * (1.0 + a / (3.0 * lambda))), id, true};
        case BoundId::bernstein_mean_quadratic_upper:
            return {-(a * a / (2.0 * lambda)) * (1.0 - a / (3.0 * lambda)), id, true};
        case BoundId::bernstein_pq_lower: {
            const double denom = npq - a * (qq - p) / 3.0;
            // Only reachable for a > EX, where the lower tail is empty.
            if (!(denom > 0.0)) return {kNegInf, id, false};
            return {-a * a / (2.0 * denom), id, true};
        }
        case BoundId::bennett_mean_lower:
            if (detail::past_endpoint(a, lambda, lambda)) return {kNegInf, id, false};
            return {-lambda * detail::h_extended(-std::min(a, lambda) / lambda), id, true};
        case BoundId::gaussian_mean_lower:
            return {-a * a / (2.0 * lambda), id, true};
        case BoundId::gaussian_pq_lower:
            return {-a * a / (2.0 * npq), id, true};
        default:
            break;
    }
    throw std::logic_error("binomial_type_bound: unhandled id");
}

/// Variance-aware bounds in terms of sigma^2 = Var X (and EX for the
/// Gaussian lower bound).  Valid when X is a sum of independent indicators.
///
/// `c` is the constant of the linear-exponent bound; it defaults to
/// a / sigma^2 and must satisfy c > 0 and a >= c sigma^2.
inline LogBound variance_bound(const IndicatorSumSpec& spec, const TailQuery& q, BoundId id,
                               std::optional<double> c = std::nullopt) {
    if (!is_variance_type(id))
        throw std::invalid_argument("bound " + std::string(label(id)) + " is not a variance bound");
    if (auto side = stated_side(id)) detail::require_side(id, *side, q.side);
    const double a = q.a;
    const double s2 = spec.sigma2();
    const double lambda = spec.lambda();

    if (id == BoundId::gaussian_variance_lower && !(s2 >= lambda / 2.0))
        throw PreconditionError("bound 1.16 requires sigma^2 >= EX/2");
    if (id == BoundId::linear_exponent_variance) {
        const double cc = c.value_or(s2 > 0.0 ? a / s2 : 0.0);
        if (!(cc > 0.0)) throw PreconditionError("bound 1.15 requires c > 0 (so a > 0)");
        if (a < cc * s2 * (1.0 - 1e-15)) throw PreconditionError("bound 1.15 requires a >= c sigma^2");
        c = cc;
    }
    if (a == 0.0) return {0.0, id, true};
    // Deterministic X: every nontrivial deviation is impossible.
    if (s2 == 0.0) return {kNegInf, id, true};

    switch (id) {
        case BoundId::bennett_variance:
            return {-s2 * detail::h_extended(a / s2), id, true};
        case BoundId::bernstein_variance:
            return {-(a * a / (2.0 * s2)) / (1.0 + a / (3.0 * s2)), id, true};
        case BoundId::bernstein_variance_quadratic:
            return {-(a * a / (2.0 * s2)) * (1.0 - a / (3.0 * s2)), id, true};
        case BoundId::linear_exponent_variance: {
            const double cc = *c;
            return {-((1.0 + 1.0 / cc) * std::log1p(cc) - 1.0) * a, id, true};
        }
        case BoundId::gaussian_variance_lower:
            return {-a * a / (2.0 * s2), id, true};
        default:
            break;
    }
    throw std::logic_error("variance_bound: unhandled id");
}

}  // namespace tailbound
