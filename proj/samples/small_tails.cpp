// Exact tails of two small indicator sums next to a few bounds.

#include "tailbound/tailbound.hpp"

#include <iostream>

int main() {
    using namespace tailbound;

    // Two independent indicators with unequal means, and the binomial with
    // the same mean.
    const auto mixed = poisson_binomial_distribution<Rational>({Rational(1, 5), Rational(3, 5)});
    const auto even = binomial_distribution(2, Rational(2, 5));
    std::cout << "P(X >= 1), p = (1/5, 3/5): " << exact_tail(mixed, Side::upper, Rational(1)) << "\n";
    std::cout << "P(X >= 1), Bi(2, 2/5):     " << exact_tail(even, Side::upper, Rational(1)) << "\n";

    const auto spec = IndicatorSumSpec::homogeneous(10, 0.3);
    const TailQuery q{Side::upper, 3.0};
    const auto tail = exact_tail(binomial_distribution(10, Rational(3, 10)), Side::upper, Rational(6));
    std::cout << "\nBi(10, 0.3), P(X >= 6) = " << to_double(tail) << "\n";
    for (const char* id : {"1.2", "1.4a", "1.5", "1.13"}) {
        const LogBound b = evaluate_bound(spec, q, parse_bound_id(id));
        std::cout << "  bound " << id << ": " << b.value() << "\n";
    }

    const auto pgf = pgf_of(barbour_distribution());
    std::cout << "\n" << is_real_rooted(pgf).summary() << "\n";
    return 0;
}
