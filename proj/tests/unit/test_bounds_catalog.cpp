#include "domination.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace tailbound;
using namespace tailbound::testing;

namespace {

double ln(double x) { return std::log(x); }

LogBound eval(const IndicatorSumSpec& s, Side side, double a, BoundId id) {
    return evaluate_bound(s, TailQuery{side, a}, id);
}

}  // namespace

TEST(RateFunction, KnownValues) {
    EXPECT_EQ(h(0.0), 0.0);
    EXPECT_NEAR(h(1.0), 2 * ln(2) - 1, 1e-15);
    EXPECT_NEAR(h(1.0), 0.386294, 1e-6);
    EXPECT_NEAR(h(std::exp(1.0) - 1), 1.0, 1e-14);
    EXPECT_THROW(h(-0.5), DomainError);
}

TEST(RateFunction, MatchesHighPrecisionAcrossScales) {
    for (double y : {1e-12, 1e-8, 1e-5, 1e-3, 0.01, 0.05, 0.0999, 0.1, 0.1001, 0.5, 1.0, 3.0, 50.0, 1e4}) {
        const double ref = to_double(h_high(HighFloat(y)));
        EXPECT_NEAR(h(y), ref, 1e-12 * ref) << "y=" << y;
    }
}

TEST(RateFunction, LowerEstimatesHoldOnDenseGrid) {
    for (int i = 0; i <= 10000; ++i) {
        const double y = i * 0.01;
        const double hy = h(y);
        const double bernstein = y * y / (2 * (1 + y / 3));
        EXPECT_GE(hy + 1e-12, bernstein) << y;
        EXPECT_GE(bernstein + 1e-12, y * y / 2 * (1 - y / 3)) << y;
        for (double c : {0.1, 0.5, 1.0, 2.0, 10.0})
            if (y >= c) EXPECT_GE(hy + 1e-12 * hy, y * h(c) / c) << "y=" << y << " c=" << c;
    }
}

TEST(BinomialChernoff, ZeroDeviation) {
    const auto s = IndicatorSumSpec::homogeneous(2, 0.4);
    EXPECT_EQ(binomial_chernoff(s, {Side::upper, 0.0}).log_value, 0.0);
}

TEST(BinomialChernoff, ClosedFormAndDomination) {
    const auto s = IndicatorSumSpec::homogeneous(10, 0.3);
    const LogBound b = binomial_chernoff(s, {Side::upper, 3.0});
    EXPECT_NEAR(b.log_value, -(6 * ln(2) + 4 * ln(4.0 / 7.0)), 1e-12);
    EXPECT_EQ(b.bound_id, BoundId::chernoff_binomial_upper);
    EXPECT_TRUE(b.in_validity_domain);

    Rational tail(0);
    for (int k = 6; k <= 10; ++k) tail += binomial_pmf(10, Rational(3, 10), k);
    EXPECT_NEAR(to_double(tail), 0.0473490, 5e-7);
    EXPECT_LT(log_of(tail), b.log_value);
}

TEST(BinomialChernoff, BeyondSupportIsMinusInfinity) {
    const auto s = IndicatorSumSpec::homogeneous(10, 0.3);
    const LogBound lower = binomial_chernoff(s, {Side::lower, 3.5});
    EXPECT_EQ(lower.log_value, kNegInf);
    EXPECT_FALSE(lower.in_validity_domain);
    const LogBound upper = binomial_chernoff(s, {Side::upper, 8.0});
    EXPECT_EQ(upper.log_value, kNegInf);
    EXPECT_FALSE(upper.in_validity_domain);
}

TEST(BinomialChernoff, EndpointUsesZeroLogZero) {
    const auto s = IndicatorSumSpec::homogeneous(10, 0.3);
    // P(X >= 10) = 0.3^10 exactly, and the Chernoff bound is sharp there.
    EXPECT_NEAR(binomial_chernoff(s, {Side::upper, 7.0}).log_value, 10 * ln(0.3), 1e-12);
    EXPECT_NEAR(binomial_chernoff(s, {Side::lower, 3.0}).log_value, 10 * ln(0.7), 1e-12);
}

TEST(BinomialChernoff, NeedsN) {
    const auto s = IndicatorSumSpec::moments(3.0, 1.0);
    EXPECT_THROW(binomial_chernoff(s, {Side::upper, 1.0}), UnsupportedSpecError);
}

TEST(BinomialTypeBounds, SymmetricBernsteinLosesLinearTerm) {
    const auto s = IndicatorSumSpec::homogeneous(100, 0.5);
    EXPECT_EQ(eval(s, Side::upper, 0.0, BoundId::bernstein_pq_upper).value(), 1.0);
    EXPECT_NEAR(eval(s, Side::upper, 10.0, BoundId::bernstein_pq_upper).log_value, -2.0, 1e-14);
}

TEST(BinomialTypeBounds, BennettMeanForm) {
    const auto s = IndicatorSumSpec::homogeneous(20, 0.1);
    const LogBound b = eval(s, Side::upper, 4.0, BoundId::bennett_mean_upper);
    EXPECT_NEAR(b.log_value, -2 * (3 * ln(3) - 2), 1e-12);
    EXPECT_NEAR(b.value(), 0.0748946, 1e-7);
    Rational tail(0);
    for (int k = 6; k <= 20; ++k) tail += binomial_pmf(20, Rational(1, 10), k);
    EXPECT_LT(to_double(tail), b.value());
}

TEST(BinomialTypeBounds, Errors) {
    const auto s = IndicatorSumSpec::homogeneous(10, 0.7);
    EXPECT_THROW(eval(s, Side::lower, 1.0, BoundId::gaussian_pq_lower), PreconditionError);
    EXPECT_THROW(eval(s, Side::lower, 1.0, BoundId::bennett_mean_upper), SideMismatchError);
    EXPECT_THROW(eval(s, Side::upper, 1.0, BoundId::gaussian_mean_lower), SideMismatchError);
    EXPECT_NO_THROW(eval(IndicatorSumSpec::homogeneous(10, 0.5), Side::lower, 1.0, BoundId::gaussian_pq_lower));
}

TEST(BinomialTypeBounds, BernsteinChainsArePointwiseOrdered) {
    for (int n = 2; n <= 60; n += 3)
        for (int k = 1; k <= 19; ++k) {
            const auto s = IndicatorSumSpec::homogeneous(n, k * 0.05);
            for (int i = 0; i <= 100; ++i) {
                const double a = i * 0.1 * std::sqrt(s.sigma2()) ;
                const double u1 = eval(s, Side::upper, a, BoundId::bernstein_pq_upper).log_value;
                const double u2 = eval(s, Side::upper, a, BoundId::bernstein_upper).log_value;
                const double u3 = eval(s, Side::upper, a, BoundId::bernstein_quadratic_upper).log_value;
                EXPECT_LE(u1, u2 + 1e-12);
                EXPECT_LE(u2, u3 + 1e-12);
                const double l1 = eval(s, Side::lower, a, BoundId::bernstein_pq_lower).log_value;
                const double l2 = eval(s, Side::lower, a, BoundId::bernstein_lower).log_value;
                const double l3 = eval(s, Side::lower, a, BoundId::bernstein_quadratic_lower).log_value;
                EXPECT_LE(l1, l2 + 1e-12) << "n=" << n << " p=" << k * 0.05 << " a=" << a;
                EXPECT_LE(l2, l3 + 1e-12);
            }
        }
}

TEST(BinomialTypeBounds, MirrorSymmetry) {
    for (int n : {3, 10, 25})
        for (double p : {0.1, 0.3, 0.45, 0.8}) {
            const auto s = IndicatorSumSpec::homogeneous(n, p);
            const auto m = IndicatorSumSpec::homogeneous(n, 1 - p);
            for (double a : {0.0, 0.5, 1.0, 2.0, 3.3}) {
                if (a > n * p || a > n * (1 - p)) continue;
                EXPECT_NEAR(eval(s, Side::upper, a, BoundId::bernstein_pq_upper).log_value,
                            eval(m, Side::lower, a, BoundId::bernstein_pq_lower).log_value, 1e-12);
                EXPECT_NEAR(eval(s, Side::upper, a, BoundId::chernoff_binomial_upper).log_value,
                            eval(m, Side::lower, a, BoundId::chernoff_binomial_lower).log_value, 1e-12);
            }
        }
}

TEST(VarianceBounds, Examples) {
    const auto any = IndicatorSumSpec::moments(4.0, 2.0);
    EXPECT_EQ(eval(any, Side::upper, 0.0, BoundId::bennett_variance).value(), 1.0);
    EXPECT_NEAR(eval(any, Side::upper, 2.0, BoundId::bennett_variance).log_value, -2 * h(1.0), 1e-14);

    const auto half = IndicatorSumSpec::moments(5.0, 2.5);
    const LogBound g = eval(half, Side::lower, 2.0, BoundId::gaussian_variance_lower);
    EXPECT_NEAR(g.log_value, -0.8, 1e-14);
    EXPECT_NEAR(g.value(), 0.44933, 5e-6);
    // Ten fair indicators have these moments; P(X <= 3) = 176/1024.
    const auto ten = binomial_distribution(10, Rational(1, 2));
    EXPECT_EQ(exact_tail(ten, Side::lower, Rational(3)), Rational(176, 1024));
    EXPECT_LT(176.0 / 1024.0, g.value());
}

TEST(VarianceBounds, LinearExponentForm) {
    const auto s = IndicatorSumSpec::moments(2.0, 1.0);
    const LogBound b = variance_bound(s, {Side::upper, 3.0}, BoundId::linear_exponent_variance, 3.0);
    EXPECT_NEAR(b.log_value, -(4 * ln(4) - 3), 1e-12);
    EXPECT_NEAR(b.log_value, -2.54518, 5e-6);
    EXPECT_LE(eval(s, Side::upper, 3.0, BoundId::bennett_variance).log_value, b.log_value + 1e-14);
    // With the default c = a / sigma^2 it coincides with the Bennett form.
    EXPECT_NEAR(eval(s, Side::upper, 3.0, BoundId::linear_exponent_variance).log_value,
                eval(s, Side::upper, 3.0, BoundId::bennett_variance).log_value, 1e-12);
}

TEST(VarianceBounds, Errors) {
    const auto s = IndicatorSumSpec::moments(5.0, 2.0);
    EXPECT_THROW(eval(s, Side::lower, 1.0, BoundId::gaussian_variance_lower), PreconditionError);
    EXPECT_THROW(eval(s, Side::upper, 1.0, BoundId::gaussian_variance_lower), SideMismatchError);
    EXPECT_THROW(eval(s, Side::upper, 0.0, BoundId::linear_exponent_variance), PreconditionError);
    EXPECT_THROW(variance_bound(s, {Side::upper, 1.0}, BoundId::linear_exponent_variance, 1.0), PreconditionError);
}

TEST(VarianceBounds, BennettImprovesOnMeanForm) {
    // x -> x h(a/x) is nonincreasing, so the variance form is never weaker.
    for (double lambda : {0.5, 2.0, 7.0, 30.0})
        for (int i = 1; i <= 50; ++i) {
            const double s2 = lambda * i / 50.0 * 0.999;
            const auto v = IndicatorSumSpec::moments(lambda, s2);
            for (double a : {0.1, 1.0, 3.0, 10.0}) {
                EXPECT_LE(eval(v, Side::upper, a, BoundId::bennett_variance).log_value,
                          eval(v, Side::upper, a, BoundId::bennett_mean_upper).log_value + 1e-12);
            }
        }
    for (double a : {0.3, 1.0, 5.0}) {
        double prev = kPosInf;
        for (int i = 1; i <= 400; ++i) {
            const double x = i * 0.05;
            const double v = x * h(a / x);
            EXPECT_LE(v, prev + 1e-12);
            prev = v;
        }
    }
}

TEST(AllBounds, ZeroDeviationGivesZero) {
    const auto s = IndicatorSumSpec::homogeneous(12, 0.3);
    for (BoundId id : catalog_bounds()) {
        if (id == BoundId::linear_exponent_variance || id == BoundId::gaussian_variance_lower) continue;
        for (Side side : {Side::upper, Side::lower}) {
            if (!applies_to(id, side)) continue;
            EXPECT_EQ(eval(s, side, 0.0, id).log_value, 0.0) << label(id);
        }
    }
    EXPECT_EQ(eval(IndicatorSumSpec::homogeneous(10, 0.5), Side::lower, 0.0, BoundId::gaussian_variance_lower).log_value,
              0.0);
}

TEST(AllBounds, MonotoneInDeviation) {
    const auto s = IndicatorSumSpec::homogeneous(30, 0.25);
    for (BoundId id : catalog_bounds()) {
        for (Side side : {Side::upper, Side::lower}) {
            if (!applies_to(id, side)) continue;
            double prev = kPosInf;
            for (int i = 1; i <= 200; ++i) {
                const double a = i * 0.05;
                LogBound b;
                try {
                    b = eval(s, side, a, id);
                } catch (const std::exception&) {
                    continue;
                }
                if (!b.in_validity_domain) continue;
                // The quadratic forms turn around past their validity range.
                if ((id == BoundId::bernstein_quadratic_upper || id == BoundId::bernstein_quadratic_lower ||
                     id == BoundId::bernstein_mean_quadratic_upper || id == BoundId::bernstein_variance_quadratic) &&
                    b.log_value > prev)
                    break;
                EXPECT_LE(b.log_value, prev + 1e-12) << label(id) << " a=" << a;
                prev = b.log_value;
            }
        }
    }
}

TEST(AllBounds, DominateExactTailsOnSmallGrid) {
    DominationStats total;
    for (int n = 2; n <= 12; ++n)
        for (int k = 0; k <= 20; ++k) {
            const Rational p(k, 20);
            const auto spec = IndicatorSumSpec::homogeneous(n, to_double(p));
            total.merge(check_domination(spec, binomial_distribution(n, p), catalog_bounds()));
        }
    Gen gen(20240611);
    for (int trial = 0; trial < 30; ++trial) {
        const auto ps = gen.rational_ps(gen.integer(1, 12));
        Rational lambda(0), s2(0);
        for (const auto& p : ps) {
            lambda += p;
            s2 += p * (1 - p);
        }
        const auto spec = IndicatorSumSpec::heterogeneous(to_doubles(ps), to_double(lambda), to_double(s2));
        total.merge(check_domination(spec, poisson_binomial_distribution<Rational>(ps), catalog_bounds()));
    }
    EXPECT_EQ(total.violations, 0) << total.first_violation;
    EXPECT_GT(total.evaluated, 10000);
}

TEST(Spec, Validation) {
    EXPECT_THROW(IndicatorSumSpec::moments(2.0, 2.0), DomainError);
    EXPECT_NO_THROW(IndicatorSumSpec::moments(0.0, 0.0));
    EXPECT_THROW(IndicatorSumSpec::moments(2.0, 1.5, 4), DomainError);  // sigma2 > lambda - lambda^2/n = 1
    EXPECT_THROW(IndicatorSumSpec::homogeneous(3, 1.5), DomainError);
    EXPECT_THROW((TailQuery{Side::upper, -1.0}), DomainError);
    EXPECT_EQ(parse_bound_id("1.14b"), BoundId::bernstein_variance_quadratic);
    EXPECT_EQ(label(BoundId::two_point_lower), "3.8");
    EXPECT_THROW(parse_bound_id("9.9"), std::invalid_argument);
}
