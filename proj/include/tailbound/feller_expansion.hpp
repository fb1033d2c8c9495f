#pragma once

// Cumulant-corrected Gaussian tail bounds from Feller's expansion
//   P(X >= EX + a) = exp(-(x^2/2) Q(x)) (1 - Phi(x) + theta(x) e^{-x^2/2} / sigma),
//   x = a/sigma, Q(x) = sum_{v>=1} q_v x^v, |q_v| < (12/sigma)^v / 7,
// valid in the window sigma <= a <= sigma^2/24.

#include "tailbound/errors.hpp"
#include "tailbound/exact_oracles.hpp"
#include "tailbound/spec.hpp"

#include <cmath>
#include <optional>
#include <string>

namespace tailbound {

struct FellerCoefficients {
    double q1 = 0.0;
    double q2 = 0.0;
};

/// q1 = -kappa3 / (3 sigma^3),  q2 = -kappa4 / (12 sigma^4) + kappa3^2 / (4 sigma^6).
inline FellerCoefficients feller_coefficients(const CumulantSet<double>& k) {
    if (!(k.kappa2 > 0.0)) throw DomainError("feller_coefficients: kappa2 must be > 0");
    const double s2 = k.kappa2;
    const double s3 = s2 * std::sqrt(s2);
    return {-k.kappa3 / (3.0 * s3), -k.kappa4 / (12.0 * s2 * s2) + k.kappa3 * k.kappa3 / (4.0 * s2 * s2 * s2)};
}

/// The same coefficients from skewness gamma1 and excess kurtosis gamma2.
inline FellerCoefficients feller_coefficients_from_shape(double gamma1, double gamma2) {
    return {-gamma1 / 3.0, -gamma2 / 12.0 + gamma1 * gamma1 / 4.0};
}

inline double skewness(const CumulantSet<double>& k) { return k.kappa3 / std::pow(k.kappa2, 1.5); }
inline double excess_kurtosis(const CumulantSet<double>& k) { return k.kappa4 / (k.kappa2 * k.kappa2); }

inline bool in_feller_window(double a, double sigma) { return sigma <= a && a <= sigma * sigma / 24.0; }

/// exp(-(a^2/2 sigma^2)(1 - (24/7) a/sigma^2)) without kappa3, or, given
/// kappa3,
///   exp(-(a^2/2 sigma^2)(1 - (288/7) a^2/sigma^4 - a kappa3/(3 sigma^4))).
/// The lower tail uses Q(-x), which flips the sign of the kappa3 term; the
/// kappa3-free form is the same for both tails.
inline LogBound feller_upper_bound(double a, double sigma, std::optional<double> kappa3 = std::nullopt,
                                   Side side = Side::upper) {
    if (!(sigma > 0.0)) throw DomainError("feller bound: sigma must be > 0");
    if (!in_feller_window(a, sigma))
        throw ValidityError("feller bound: need sigma <= a <= sigma^2/24 (a = " + std::to_string(a) +
                            ", sigma = " + std::to_string(sigma) + ")");
    const double s2 = sigma * sigma;
    const double lead = a * a / (2.0 * s2);
    if (!kappa3) return {-lead * (1.0 - (24.0 / 7.0) * a / s2), BoundId::feller_uniform, true};
    const double skew_term = a * *kappa3 / (3.0 * s2 * s2);
    const double signed_skew = side == Side::upper ? skew_term : -skew_term;
    return {-lead * (1.0 - (288.0 / 7.0) * a * a / (s2 * s2) - signed_skew), BoundId::feller_skew, true};
}

}  // namespace tailbound
