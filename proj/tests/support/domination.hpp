#pragma once

// Bound >= exact tail, checked over integer-aligned deviations.

#include "oracles.hpp"

#include <sstream>
#include <string>
#include <vector>

namespace tailbound::testing {

inline constexpr double kLogSlack = 1e-12;

/// Every bound that applies to independent indicators with known n.
inline std::vector<BoundId> catalog_bounds() {
    return {BoundId::chernoff_binomial_upper, BoundId::chernoff_binomial_lower,
            BoundId::bernstein_pq_upper,      BoundId::bernstein_upper,
            BoundId::bernstein_quadratic_upper, BoundId::bennett_mean_upper,
            BoundId::bernstein_mean_upper,    BoundId::bernstein_mean_quadratic_upper,
            BoundId::bernstein_pq_lower,      BoundId::bernstein_lower,
            BoundId::bernstein_quadratic_lower, BoundId::bennett_mean_lower,
            BoundId::gaussian_mean_lower,     BoundId::gaussian_pq_lower,
            BoundId::bennett_variance,        BoundId::bernstein_variance,
            BoundId::bernstein_variance_quadratic, BoundId::linear_exponent_variance,
            BoundId::gaussian_variance_lower, BoundId::two_point_lower};
}

/// Deviations a >= 0 with EX + a (upper) or EX - a (lower) on the integers,
/// from 0 through one step past the support.
inline std::vector<Rational> aligned_deviations(const Rational& mean, int n, Side side) {
    std::vector<Rational> out{Rational(0)};
    if (side == Side::upper) {
        for (BigInt k = floor_of(mean) + 1; k <= n + 1; ++k) out.push_back(Rational(k) - mean);
    } else {
        for (BigInt k = ceil_of(mean) - 1; k >= -1; --k) out.push_back(mean - Rational(k));
    }
    return out;
}

struct DominationStats {
    long evaluated = 0;
    long skipped = 0;  // preconditions not met
    long violations = 0;
    double worst_margin = kNegInf;  // max over cases of exact_log - bound_log
    std::string first_violation;

    void merge(const DominationStats& o) {
        evaluated += o.evaluated;
        skipped += o.skipped;
        violations += o.violations;
        worst_margin = std::max(worst_margin, o.worst_margin);
        if (first_violation.empty()) first_violation = o.first_violation;
    }
};

/// Compares every applicable bound with the exact tail of `dist` for one spec.
/// `variance_spec`, when given, replaces `spec` for variance-type bounds.
inline DominationStats check_domination(const IndicatorSumSpec& spec, const RationalDistribution& dist,
                                        const std::vector<BoundId>& ids,
                                        const IndicatorSumSpec* variance_spec = nullptr) {
    DominationStats st;
    const Rational mu = mean(dist);
    const int n = static_cast<int>(dist.max_support());
    for (Side side : {Side::upper, Side::lower}) {
        for (const Rational& a : aligned_deviations(mu, n, side)) {
            const Rational threshold = side == Side::upper ? Rational(mu + a) : Rational(mu - a);
            const double exact_log = log_of(Rational(exact_tail(dist, side, threshold)));
            const TailQuery q{side, to_double(a)};
            for (BoundId id : ids) {
                if (!applies_to(id, side)) continue;
                const bool variance_kind = is_variance_type(id) || id == BoundId::two_point_lower;
                const IndicatorSumSpec& use = variance_kind && variance_spec ? *variance_spec : spec;
                LogBound b;
                try {
                    b = evaluate_bound(use, q, id);
                } catch (const PreconditionError&) {
                    ++st.skipped;
                    continue;
                } catch (const DomainError&) {
                    ++st.skipped;
                    continue;
                }
                ++st.evaluated;
                const double margin = exact_log - b.log_value;
                if (!std::isnan(margin)) st.worst_margin = std::max(st.worst_margin, margin);
                if (exact_log > b.log_value + kLogSlack) {
                    ++st.violations;
                    if (st.first_violation.empty()) {
                        std::ostringstream msg;
                        msg << spec.describe() << " side=" << to_string(side) << " a=" << a << " bound "
                            << label(id) << ": exact log " << exact_log << " > bound log " << b.log_value;
                        st.first_violation = msg.str();
                    }
                }
            }
        }
    }
    return st;
}

}  // namespace tailbound::testing
