#pragma once

// Core value types: what X looks like, which tail is asked for, and the
// log-domain carrier every bound returns.

#include "tailbound/errors.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace tailbound {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kPosInf = std::numeric_limits<double>::infinity();

enum class Side { upper, lower };

inline std::string_view to_string(Side side) { return side == Side::upper ? "upper" : "lower"; }

inline Side parse_side(std::string_view text) {
    if (text == "upper") return Side::upper;
    if (text == "lower") return Side::lower;
    throw std::invalid_argument("side must be 'upper' or 'lower', got '" + std::string(text) + "'");
}

/// P(X >= EX + a) for Side::upper, P(X <= EX - a) for Side::lower.
struct TailQuery {
    Side side = Side::upper;
    double a = 0.0;

    TailQuery() = default;
    TailQuery(Side s, double deviation) : side(s), a(deviation) {
        if (!(deviation >= 0.0)) throw DomainError("tail query: deviation a must be >= 0");
    }
};

/// X ~ Bi(n, p).
struct Homogeneous {
    int n = 0;
    double p = 0.0;
};

/// X = sum of independent Be(p_i).
struct Heterogeneous {
    std::vector<double> ps;
};

/// Only the first two moments are known (and possibly the number of summands).
struct Moments {
    double lambda = 0.0;
    double sigma2 = 0.0;
    std::optional<int> n;
};

/// X ~ Po(lambda), the n -> infinity limit with np = lambda.
struct PoissonLimit {
    double lambda = 0.0;
};

class IndicatorSumSpec {
public:
    using Kind = std::variant<Homogeneous, Heterogeneous, Moments, PoissonLimit>;

    static IndicatorSumSpec homogeneous(int n, double p) {
        if (n <= 0) throw DomainError("homogeneous spec: n must be positive");
        if (!(p >= 0.0 && p <= 1.0)) throw DomainError("homogeneous spec: p must lie in [0,1]");
        return IndicatorSumSpec(Homogeneous{n, p}, n * p, n * p * (1.0 - p));
    }

    static IndicatorSumSpec heterogeneous(std::vector<double> ps) {
        long double lambda = 0.0L;
        long double sigma2 = 0.0L;
        for (double p : ps) {
            if (!(p >= 0.0 && p <= 1.0)) throw DomainError("heterogeneous spec: every p_i must lie in [0,1]");
            lambda += p;
            sigma2 += static_cast<long double>(p) * (1.0L - p);
        }
        const auto l = static_cast<double>(lambda);
        const auto s = static_cast<double>(sigma2);
        return IndicatorSumSpec(Heterogeneous{std::move(ps)}, l, s);
    }

    /// Heterogeneous spec whose moments were computed elsewhere (e.g. exactly).
    static IndicatorSumSpec heterogeneous(std::vector<double> ps, double lambda, double sigma2) {
        auto spec = heterogeneous(std::move(ps));
        spec.lambda_ = lambda;
        spec.sigma2_ = sigma2;
        return spec;
    }

    static IndicatorSumSpec moments(double lambda, double sigma2, std::optional<int> n = std::nullopt) {
        if (!(lambda >= 0.0)) throw DomainError("moments spec: lambda must be >= 0");
        if (!(sigma2 >= 0.0)) throw DomainError("moments spec: sigma2 must be >= 0");
        if (!(sigma2 < lambda || (sigma2 == 0.0 && lambda == 0.0)))
            throw DomainError("moments spec: need sigma2 < lambda (or sigma2 = lambda = 0)");
        if (n) {
            if (*n <= 0) throw DomainError("moments spec: n must be positive");
            if (lambda > *n) throw DomainError("moments spec: lambda exceeds n");
            const double cap = lambda - lambda * lambda / *n;
            if (sigma2 > cap * (1.0 + 1e-12) + 1e-15)
                throw DomainError("moments spec: sigma2 exceeds lambda - lambda^2/n");
        }
        return IndicatorSumSpec(Moments{lambda, sigma2, n}, lambda, sigma2);
    }

    static IndicatorSumSpec poisson(double lambda) {
        if (!(lambda > 0.0)) throw DomainError("poisson spec: lambda must be > 0");
        return IndicatorSumSpec(PoissonLimit{lambda}, lambda, lambda);
    }

    const Kind& kind() const noexcept { return kind_; }
    double lambda() const noexcept { return lambda_; }
    double sigma2() const noexcept { return sigma2_; }

    std::optional<int> n() const {
        if (const auto* h = std::get_if<Homogeneous>(&kind_)) return h->n;
        if (const auto* h = std::get_if<Heterogeneous>(&kind_)) return static_cast<int>(h->ps.size());
        if (const auto* m = std::get_if<Moments>(&kind_)) return m->n;
        return std::nullopt;
    }

    bool is_poisson() const noexcept { return std::holds_alternative<PoissonLimit>(kind_); }

    /// Short human-readable descriptor used in reports.
    std::string describe() const;

private:
    IndicatorSumSpec(Kind kind, double lambda, double sigma2)
        : kind_(std::move(kind)), lambda_(lambda), sigma2_(sigma2) {}

    Kind kind_;
    double lambda_ = 0.0;
    double sigma2_ = 0.0;
};

inline std::string IndicatorSumSpec::describe() const {
    auto num = [](double v) {
        std::string s = std::to_string(v);
        s.erase(s.find_last_not_of('0') + 1);
        if (!s.empty() && s.back() == '.') s.pop_back();
        return s;
    };
    if (const auto* h = std::get_if<Homogeneous>(&kind_))
        return "binomial(n=" + std::to_string(h->n) + ",p=" + num(h->p) + ")";
    if (const auto* h = std::get_if<Heterogeneous>(&kind_))
        return "heterogeneous(n=" + std::to_string(h->ps.size()) + ")";
    if (const auto* m = std::get_if<Moments>(&kind_)) {
        std::string out = "moments(lambda=" + num(m->lambda) + ",sigma2=" + num(m->sigma2);
        if (m->n) out += ",n=" + std::to_string(*m->n);
        return out + ")";
    }
    return "poisson(lambda=" + num(lambda_) + ")";
}

/// Every bound the catalog can produce.  The string labels are the public
/// identifiers accepted on the command line.
enum class BoundId {
    chernoff_binomial_upper,         // "1.2"
    chernoff_binomial_lower,         // "1.3"
    bernstein_pq_upper,              // "1.4a"
    bernstein_upper,                 // "1.4b"
    bernstein_quadratic_upper,       // "1.4c"
    bennett_mean_upper,              // "1.5"
    bernstein_mean_upper,            // "1.6a"
    bernstein_mean_quadratic_upper,  // "1.6b"
    bernstein_pq_lower,              // "1.7a"
    bernstein_lower,                 // "1.7b"
    bernstein_quadratic_lower,       // "1.7c"
    bennett_mean_lower,              // "1.8"
    gaussian_mean_lower,             // "1.9"
    gaussian_pq_lower,               // "1.10"
    bennett_variance,                // "1.13"
    bernstein_variance,              // "1.14a"
    bernstein_variance_quadratic,    // "1.14b"
    linear_exponent_variance,        // "1.15"
    gaussian_variance_lower,         // "1.16"
    two_point_lower,                 // "3.8"
    feller_uniform,                  // "1.20"
    feller_skew,                     // "1.23"
    numeric_chernoff,                // "chernoff"
};

inline constexpr std::array<std::pair<BoundId, std::string_view>, 23> kBoundLabels{{
    {BoundId::chernoff_binomial_upper, "1.2"},
    {BoundId::chernoff_binomial_lower, "1.3"},
    {BoundId::bernstein_pq_upper, "1.4a"},
    {BoundId::bernstein_upper, "1.4b"},
    {BoundId::bernstein_quadratic_upper, "1.4c"},
    {BoundId::bennett_mean_upper, "1.5"},
    {BoundId::bernstein_mean_upper, "1.6a"},
    {BoundId::bernstein_mean_quadratic_upper, "1.6b"},
    {BoundId::bernstein_pq_lower, "1.7a"},
    {BoundId::bernstein_lower, "1.7b"},
    {BoundId::bernstein_quadratic_lower, "1.7c"},
    {BoundId::bennett_mean_lower, "1.8"},
    {BoundId::gaussian_mean_lower, "1.9"},
    {BoundId::gaussian_pq_lower, "1.10"},
    {BoundId::bennett_variance, "1.13"},
    {BoundId::bernstein_variance, "1.14a"},
    {BoundId::bernstein_variance_quadratic, "1.14b"},
    {BoundId::linear_exponent_variance, "1.15"},
    {BoundId::gaussian_variance_lower, "1.16"},
    {BoundId::two_point_lower, "3.8"},
    {BoundId::feller_uniform, "1.20"},
    {BoundId::feller_skew, "1.23"},
    {BoundId::numeric_chernoff, "chernoff"},
}};

inline std::string_view label(BoundId id) {
    for (const auto& [key, text] : kBoundLabels)
        if (key == id) return text;
    return "?";
}

inline BoundId parse_bound_id(std::string_view text) {
    for (const auto& [key, value] : kBoundLabels)
        if (value == text) return key;
    throw std::invalid_argument("unknown bound id '" + std::string(text) + "'");
}

/// A tail-probability bound carried as its natural log.
///
/// log_value may be positive (the bound exceeds 1 and is then vacuous) and is
/// -inf when the queried event is impossible.  in_validity_domain is false
/// when the formula was not evaluated because `a` lies past the support.
struct LogBound {
    double log_value = 0.0;
    BoundId bound_id = BoundId::numeric_chernoff;
    bool in_validity_domain = true;

    double value() const { return std::exp(log_value); }
    double clamped_value() const { return log_value >= 0.0 ? 1.0 : std::exp(log_value); }
};

}  // namespace tailbound
