#pragma once

// One entry point for every bound id.

#include "tailbound/bounds_catalog.hpp"
#include "tailbound/chernoff_engine.hpp"
#include "tailbound/exact_oracles.hpp"
#include "tailbound/feller_expansion.hpp"
#include "tailbound/spec.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

namespace tailbound {

struct BoundOptions {
    std::optional<double> c;       // constant of the linear-exponent bound
    std::optional<double> kappa3;  // overrides the third cumulant of the spec
    ChernoffOptions chernoff;
};

/// Third cumulant of the spec when its summands are known.
inline std::optional<double> kappa3_of(const IndicatorSumSpec& spec) {
    if (const auto* h = std::get_if<Homogeneous>(&spec.kind())) {
        const double pq = h->p * (1.0 - h->p);
        return h->n * pq * (1.0 - 2.0 * h->p);
    }
    if (const auto* h = std::get_if<Heterogeneous>(&spec.kind())) return cumulants(h->ps).kappa3;
    if (spec.is_poisson()) return spec.lambda();
    return std::nullopt;
}

inline LogBound evaluate_bound(const IndicatorSumSpec& spec, const TailQuery& q, BoundId id,
                               const BoundOptions& opt = {}) {
    if (is_binomial_type(id)) return binomial_type_bound(spec, q, id);
    if (is_variance_type(id)) return variance_bound(spec, q, id, opt.c);
    switch (id) {
        case BoundId::two_point_lower: {
            detail::require_side(id, Side::lower, q.side);
            if (detail::past_endpoint(q.a, spec.lambda(), spec.lambda())) return {kNegInf, id, false};
            return two_point_lower_tail(spec.lambda(), spec.sigma2(), std::min(q.a, spec.lambda()));
        }
        case BoundId::feller_uniform:
            return feller_upper_bound(q.a, std::sqrt(spec.sigma2()), std::nullopt, q.side);
        case BoundId::feller_skew: {
            const auto k3 = opt.kappa3 ? opt.kappa3 : kappa3_of(spec);
            if (!k3) throw UnsupportedSpecError("bound 1.23 needs the third cumulant (pass kappa3)");
            return feller_upper_bound(q.a, std::sqrt(spec.sigma2()), k3, q.side);
        }
        case BoundId::numeric_chernoff:
            return chernoff_for_spec(spec, q, opt.chernoff);
        default:
            break;
    }
    throw std::invalid_argument("unhandled bound id " + std::string(label(id)));
}

/// Whether `id` is stated for `side` (bounds stated for both tails always are).
inline bool applies_to(BoundId id, Side side) {
    const auto s = stated_side(id);
    return !s || *s == side;
}

}  // namespace tailbound
