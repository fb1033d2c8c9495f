#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace tailbound;
using namespace tailbound::testing;

TEST(BinomialDistribution, SmallExamples) {
    const auto one = binomial_distribution(1, Rational(1, 2));
    EXPECT_EQ(one.offset, 0);
    EXPECT_EQ(one.probs, (std::vector<Rational>{Rational(1, 2), Rational(1, 2)}));

    const auto two = binomial_distribution(2, Rational(2, 5));
    EXPECT_EQ(two.probs, (std::vector<Rational>{Rational(9, 25), Rational(12, 25), Rational(4, 25)}));
    EXPECT_EQ(exact_tail(two, Side::upper, Rational(1)), Rational(16, 25));
}

TEST(BinomialDistribution, TenThreeTenths) {
    const auto d = binomial_distribution(10, Rational(3, 10));
    const Rational tail = exact_tail(d, Side::upper, Rational(6));
    Rational direct(0);
    for (int k = 6; k <= 10; ++k) direct += binomial_pmf(10, Rational(3, 10), k);
    EXPECT_EQ(tail, direct);
    EXPECT_NEAR(to_double(tail), 0.0473490, 5e-8);
}

TEST(BinomialDistribution, DegenerateAndErrors) {
    EXPECT_EQ(binomial_distribution(5, Rational(0)).probs, std::vector<Rational>{Rational(1)});
    const auto all = binomial_distribution(5, Rational(1));
    EXPECT_EQ(all.offset, 5);
    EXPECT_THROW(binomial_distribution(3, Rational(3, 2)), DomainError);
    EXPECT_THROW(binomial_distribution(-1, Rational(1, 2)), DomainError);
}

TEST(PoissonBinomial, Examples) {
    const auto d = poisson_binomial_distribution<Rational>({Rational(1, 5), Rational(3, 5)});
    EXPECT_EQ(exact_tail(d, Side::upper, Rational(1)), Rational(17, 25));
    const auto empty = poisson_binomial_distribution<Rational>(std::vector<Rational>{});
    EXPECT_EQ(empty.probs, std::vector<Rational>{Rational(1)});
    EXPECT_EQ(poisson_binomial_distribution<Rational>(std::vector<Rational>(4, Rational(1, 2))).probs,
              binomial_distribution(4, Rational(1, 2)).probs);
    EXPECT_THROW(poisson_binomial_distribution<Rational>({Rational(-1, 5)}), DomainError);
}

TEST(PoissonBinomial, ConvolutionMatchesClosedFormAndEnumeration) {
    for (int n = 0; n <= 25; ++n)
        for (int k = 0; k <= 8; ++k) {
            const Rational p(k, 8);
            EXPECT_TRUE(same_law(poisson_binomial_distribution<Rational>(std::vector<Rational>(n, p)),
                                 binomial_distribution(n, p)))
                << n << " " << p;
        }
    Gen gen(5);
    for (int trial = 0; trial < 40; ++trial) {
        const auto ps = gen.rational_ps(gen.integer(0, 12), 32);
        EXPECT_EQ(poisson_binomial_distribution<Rational>(ps).probs, enumerate_independent(ps).probs);
    }
}

TEST(PoissonBinomial, MomentsAreExact) {
    Gen gen(6);
    for (int trial = 0; trial < 100; ++trial) {
        const auto ps = gen.rational_ps(gen.integer(0, 30), 97);
        const auto d = poisson_binomial_distribution<Rational>(ps);
        Rational lambda(0), s2(0);
        for (const auto& p : ps) {
            lambda += p;
            s2 += p * (1 - p);
        }
        EXPECT_EQ(d.total(), Rational(1));
        EXPECT_EQ(mean(d), lambda);
        EXPECT_EQ(variance(d), s2);
        const auto k = cumulants(ps);
        EXPECT_EQ(k.kappa1, lambda);
        EXPECT_EQ(k.kappa2, s2);
    }
}

TEST(PoissonTail, Values) {
    EXPECT_EQ(poisson_tail(1.0, 0), 1.0);
    EXPECT_NEAR(poisson_tail(1.0, 2), 1 - 2 / std::exp(1.0), 1e-15);
    EXPECT_NEAR(poisson_tail(1.0, 2), 0.2642411, 1e-7);
    const double chernoff = std::exp(-4 * h(1.0));
    EXPECT_NEAR(chernoff, 0.213274, 1e-6);
    EXPECT_LE(poisson_tail(4.0, 8), chernoff);
    EXPECT_THROW(poisson_tail(0.0, 1), DomainError);
}

TEST(PoissonTail, MatchesHighPrecisionSeries) {
    for (double lambda : {0.1, 1.0, 4.0, 30.0, 200.0})
        for (std::int64_t k : {1, 2, 5, 10, 40, 300}) {
            // 1 - sum_{j<k} e^-lambda lambda^j / j! in 50 digits.
            const HighFloat lam(lambda);
            HighFloat term = exp(-lam), lower(0);
            for (std::int64_t j = 0; j < k; ++j) {
                lower += term;
                term *= lam / HighFloat(j + 1);
            }
            HighFloat upper(0);
            for (std::int64_t j = k; j < k + 4000; ++j) {
                upper += term;
                term *= lam / HighFloat(j + 1);
            }
            const double ref = to_double(upper);
            EXPECT_NEAR(poisson_tail(lambda, k), ref, 1e-15 + 1e-12 * ref) << lambda << " " << k;
            EXPECT_NEAR(to_double(HighFloat(1 - lower)), ref, 1e-30 + 1e-20 * ref);
        }
}

TEST(Cumulants, Examples) {
    const auto sym = cumulants(std::vector<Rational>(7, Rational(1, 2)));
    EXPECT_EQ(sym.kappa3, Rational(0));
    EXPECT_EQ(cumulants(std::vector<Rational>{Rational(1, 4)}).kappa3, Rational(3, 32));
    const auto two = cumulants(std::vector<Rational>{Rational(1, 5), Rational(7, 10)});
    EXPECT_EQ(two.kappa2, Rational(37, 100));
    EXPECT_EQ(variance(poisson_binomial_distribution<Rational>({Rational(1, 5), Rational(7, 10)})), Rational(37, 100));
}

TEST(Cumulants, ThirdCentralMomentOfOneIndicator) {
    for (int k = 0; k <= 10; ++k) {
        const Rational p(k, 10);
        const auto d = binomial_distribution(1, p);
        Rational third(0);
        for (std::size_t i = 0; i < d.probs.size(); ++i) {
            const Rational dev = Rational(d.offset + static_cast<std::int64_t>(i)) - p;
            third += d.probs[i] * dev * dev * dev;
        }
        EXPECT_EQ(cumulants(std::vector<Rational>{p}).kappa3, third);
    }
}

TEST(Cumulants, MatchFiniteDifferences) {
    Gen gen(7);
    for (int trial = 0; trial < 25; ++trial) {
        const auto ps = gen.rational_ps(gen.integer(1, 20), 50);
        const auto fd = finite_difference_cumulants(poisson_binomial_distribution<Rational>(ps));
        const auto k = cumulants(ps);
        EXPECT_NEAR(fd.kappa1, to_double(k.kappa1), 1e-6);
        EXPECT_NEAR(fd.kappa2, to_double(k.kappa2), 1e-6);
        EXPECT_NEAR(fd.kappa3, to_double(k.kappa3), 1e-6);
        EXPECT_NEAR(fd.kappa4, to_double(k.kappa4), 1e-6);
    }
}

TEST(ExactTail, Thresholds) {
    const auto point = degenerate_distribution(0);
    EXPECT_EQ(exact_tail(point, Side::upper, Rational(1)), Rational(0));
    EXPECT_EQ(exact_tail(point, Side::lower, Rational(0)), Rational(1));
    const auto d = binomial_distribution(4, Rational(1, 2));
    // Non-integer thresholds keep the boundary support point on the far side only.
    EXPECT_EQ(exact_tail(d, Side::upper, Rational(5, 2)), Rational(5, 16));
    EXPECT_EQ(exact_tail(d, Side::lower, Rational(3, 2)), Rational(5, 16));
    EXPECT_EQ(exact_tail(d, Side::upper, Rational(-3)), Rational(1));
    EXPECT_EQ(exact_tail(d, Side::upper, Rational(9)), Rational(0));
    EXPECT_EQ(exact_tail(d, Side::lower, Rational(-1)), Rational(0));
    EXPECT_EQ(exact_tail(d, Side::upper, -kPosInf), Rational(1));
    EXPECT_EQ(exact_tail(d, Side::upper, 2.0), Rational(11, 16));
}

TEST(LogMgf, MatchesProductForm) {
    Gen gen(8);
    for (int trial = 0; trial < 30; ++trial) {
        const auto ps = gen.rational_ps(gen.integer(1, 40), 1000);
        const auto d = poisson_binomial_distribution<Rational>(ps);
        for (int i = -30; i <= 30; ++i) {
            const double t = i * 0.1;
            HighFloat product(0);
            for (const auto& p : ps) product += log1p(to_high(p) * expm1(HighFloat(t)));
            const double ref = to_double(product);
            EXPECT_NEAR(log_mgf(d, t), ref, 1e-12 * std::max(1.0, std::fabs(ref)));
            EXPECT_NEAR(to_double(log_mgf_high(d, HighFloat(t))), ref, 1e-30 + 1e-25 * std::fabs(ref));
        }
    }
}

TEST(HighPrecisionMode, AgreesWithRationalMode) {
    Gen gen(9);
    const auto ps = gen.rational_ps(60, 128);
    const auto exact = poisson_binomial_distribution<Rational>(ps);
    std::vector<HighFloat> hp;
    for (const auto& p : ps) hp.push_back(to_high(p));
    const auto approx = poisson_binomial_distribution<HighFloat>(hp);
    ASSERT_EQ(approx.probs.size(), exact.probs.size());
    EXPECT_LT(abs(approx.total() - 1), HighFloat("1e-40"));
    for (std::size_t i = 0; i < exact.probs.size(); ++i)
        EXPECT_LE(abs(approx.probs[i] - to_high(exact.probs[i])), HighFloat("1e-45"));
}
