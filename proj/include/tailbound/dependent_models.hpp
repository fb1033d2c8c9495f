#pragma once

// Sums of negatively related indicators: urn models, the binomial
// conditioned on a large value, and the explicit couplings that witness
// negative relatedness.

#include "tailbound/errors.hpp"
#include "tailbound/exact_oracles.hpp"
#include "tailbound/numeric.hpp"

#include <algorithm>
#include <atomic>
#include <concepts>
#include <cstdint>
#include <exception>
#include <map>
#include <mutex>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

namespace tailbound {

/// m balls into m distinct urns among N; X counts occupied urns among 1..n.
struct Hypergeometric {
    int N = 0;
    int m = 0;
    int n = 0;
};

/// m balls thrown independently into n urns; X counts empty urns.
struct Occupancy {
    int n = 0;
    int m = 0;
};

/// U ~ Bi(n, p) conditioned on U >= k.
struct ConditionedBinomial {
    int n = 0;
    Rational p;
    int k = 0;
};

/// P(X=3) = 4/13, P(X=4) = 5/13, P(X=5) = 4/13 with the five indicators
/// uniform given X.  Negatively related, yet not a sum of independent
/// indicators.
struct Barbour {};

using DependentModel = std::variant<Hypergeometric, Occupancy, ConditionedBinomial, Barbour>;

inline void validate(const Hypergeometric& h) {
    if (h.N <= 0 || h.m <= 0 || h.n <= 0) throw DomainError("hypergeometric: N, m, n must be positive");
    if (std::max(h.m, h.n) > h.N) throw DomainError("hypergeometric: need max(m, n) <= N");
}

inline void validate(const Occupancy& o) {
    if (o.n < 1) throw DomainError("occupancy: need at least one urn");
    if (o.m < 0) throw DomainError("occupancy: ball count must be >= 0");
}

inline void validate(const ConditionedBinomial& c) {
    if (c.n < 1) throw DomainError("conditioned binomial: n must be >= 1");
    if (!(c.p > 0 && c.p < 1)) throw DomainError("conditioned binomial: need 0 < p < 1");
    if (c.k < 0 || c.k > c.n) throw DomainError("conditioned binomial: need 0 <= k <= n");
}

inline void validate(const Barbour&) {}

/// Number of indicators X is the sum of.
inline int indicator_count(const DependentModel& model) {
    return std::visit(
        [](const auto& m) -> int {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, Hypergeometric>) return m.n;
            else if constexpr (std::is_same_v<M, Occupancy>) return m.n;
            else if constexpr (std::is_same_v<M, ConditionedBinomial>) return m.n;
            else return 5;
        },
        model);
}

inline std::string describe(const DependentModel& model) {
    return std::visit(
        [](const auto& m) -> std::string {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, Hypergeometric>)
                return "hypergeometric(N=" + std::to_string(m.N) + ",m=" + std::to_string(m.m) + ",n=" + std::to_string(m.n) + ")";
            else if constexpr (std::is_same_v<M, Occupancy>)
                return "occupancy(n=" + std::to_string(m.n) + ",m=" + std::to_string(m.m) + ")";
            else if constexpr (std::is_same_v<M, ConditionedBinomial>)
                return "conditioned-binomial(n=" + std::to_string(m.n) + ",p=" + m.p.str() + ",k=" + std::to_string(m.k) + ")";
            else
                return "barbour";
        },
        model);
}

// ---------------------------------------------------------------------------
// Exact laws

inline RationalDistribution hypergeometric_distribution(int N, int m, int n) {
    validate(Hypergeometric{N, m, n});
    const int lo = std::max(0, m - (N - n));
    const int hi = std::min(n, m);
    const BigInt total = choose(N, m);
    RationalDistribution dist{lo, {}};
    for (int k = lo; k <= hi; ++k) {
        const BigInt ways = choose(n, k) * choose(N - n, m - k);
        dist.probs.emplace_back(Rational(ways, total));
    }
    return dist;
}

/// Number of empty urns by inclusion-exclusion:
///   P(X = k) = C(n,k) sum_j (-1)^j C(n-k, j) ((n-k-j)/n)^m.
inline RationalDistribution occupancy_distribution(int n, int m) {
    validate(Occupancy{n, m});
    RationalDistribution dist{0, std::vector<Rational>(static_cast<std::size_t>(n) + 1)};
    // Powers ((n-i)/n)^m shared by every k.
    std::vector<Rational> power(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) power[i] = ipow(Rational(n - i, n), static_cast<std::uint64_t>(m));
    for (int k = 0; k <= n; ++k) {
        Rational sum(0);
        for (int j = 0; j <= n - k; ++j) {
            const Rational term = Rational(choose(n - k, j)) * power[static_cast<std::size_t>(k + j)];
            if (j % 2 == 0) sum += term;
            else sum -= term;
        }
        dist.probs[k] = Rational(choose(n, k)) * sum;
    }
    // Strip zero-probability ends so offset is the smallest support point.
    std::size_t first = 0;
    while (first + 1 < dist.probs.size() && dist.probs[first] == 0) ++first;
    std::size_t last = dist.probs.size();
    while (last > first + 1 && dist.probs[last - 1] == 0) --last;
    return RationalDistribution{static_cast<std::int64_t>(first),
                                std::vector<Rational>(dist.probs.begin() + first, dist.probs.begin() + last)};
}

struct MomentPair {
    Rational lambda;
    Rational sigma2;
};

/// EX = n(1-1/n)^m and Var X = n(1-1/n)^m + n(n-1)(1-2/n)^m - n^2(1-1/n)^{2m}.
inline MomentPair occupancy_moments(int n, int m) {
    validate(Occupancy{n, m});
    const auto mm = static_cast<std::uint64_t>(m);
    const Rational one_gone = ipow(Rational(n - 1, n), mm);
    const Rational two_gone = ipow(Rational(n - 2, n), mm);
    const Rational lambda = n * one_gone;
    const Rational sigma2 = lambda + Rational(n) * (n - 1) * two_gone - Rational(n) * n * one_gone * one_gone;
    return {lambda, sigma2};
}

/// P(U = i) / P(U >= k) for i >= k, U ~ Bi(n, p).
inline RationalDistribution conditioned_binomial(int n, const Rational& p, int k) {
    validate(ConditionedBinomial{n, p, k});
    // Integer weights C(n,i) a^i b^(n-i) with p = a/d, q = b/d.
    const BigInt a(numerator(p));
    const BigInt b = BigInt(denominator(p)) - a;
    std::vector<BigInt> weights;
    weights.reserve(static_cast<std::size_t>(n - k + 1));
    BigInt w = choose(n, k) * ipow(a, static_cast<std::uint64_t>(k)) * ipow(b, static_cast<std::uint64_t>(n - k));
    BigInt total(0);
    for (int i = k; i <= n; ++i) {
        weights.push_back(w);
        total += w;
        if (i < n) {
            w *= (n - i);
            w *= a;
            w /= BigInt(i + 1) * b;  // exact: the result is the next integer weight
        }
    }
    if (total == 0) throw DomainError("conditioned binomial: conditioning event has probability 0");
    RationalDistribution dist{k, {}};
    dist.probs.reserve(weights.size());
    for (const auto& wi : weights) dist.probs.emplace_back(Rational(wi, total));
    return dist;
}

/// P(X = k+i+1) / P(X = k+i) for the conditioned binomial: (p/q)(n-k-i)/(k+i+1).
inline Rational conditioned_binomial_ratio(int n, const Rational& p, int k, int i) {
    return p / (1 - p) * Rational(n - k - i, k + i + 1);
}

inline RationalDistribution barbour_distribution() {
    return RationalDistribution{3, {Rational(4, 13), Rational(5, 13), Rational(4, 13)}};
}

inline RationalDistribution distribution_of(const DependentModel& model) {
    return std::visit(
        [](const auto& m) -> RationalDistribution {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, Hypergeometric>) return hypergeometric_distribution(m.N, m.m, m.n);
            else if constexpr (std::is_same_v<M, Occupancy>) return occupancy_distribution(m.n, m.m);
            else if constexpr (std::is_same_v<M, ConditionedBinomial>) return conditioned_binomial(m.n, m.p, m.k);
            else return barbour_distribution();
        },
        model);
}

/// P(Y > x) for Y geometric on {0,1,...} with P(Y = i) = (1-r) r^i.
inline double geometric_tail(double r, double x) {
    if (!(r >= 0.0 && r < 1.0)) throw DomainError("geometric_tail: need 0 <= r < 1");
    if (x < 0.0) return 1.0;
    return std::pow(r, std::floor(x) + 1.0);
}

// ---------------------------------------------------------------------------
// Heavy-tail witness search

/// Search schedule: p fixed, eps halved from eps_start, and for each eps
/// n doubled from n_start up to n_max with k = floor(n(p+eps)) + 1.  An
/// instance is examined once the first successive-probability ratio is
/// within ratio_tolerance of its limit r = p(q-eps)/((p+eps)q).  Values of
/// eps whose limiting variance r/(1-r)^2 does not exceed A are skipped.
struct WitnessSchedule {
    Rational p{1, 2};
    Rational eps_start{1, 5};
    int eps_halvings = 10;
    int n_start = 64;
    int n_max = 1 << 14;
    double ratio_tolerance = 0.01;
};

struct WitnessCertificate {
    ConditionedBinomial model;
    Rational epsilon;
    Rational mean;
    Rational variance;
    Rational tail;        // exact P(X > EX + alpha sigma)
    HighFloat threshold;  // EX + alpha sigma
    HighFloat target;     // c e^{-alpha}
    std::string log;
};

/// Finds a conditioned binomial with Var X > A and
/// P(X > EX + alpha sigma) > c e^{-alpha}.
inline WitnessCertificate find_heavy_tail_witness(double alpha, double c, double A, const WitnessSchedule& schedule = {}) {
    if (!(alpha > 0.0)) throw PreconditionError("witness search: alpha must be > 0");
    if (!(c > 0.0 && c < std::exp(-1.0))) throw PreconditionError("witness search: c must lie in (0, 1/e)");
    if (!(A > 0.0) || std::isinf(A)) throw PreconditionError("witness search: A must be positive and finite");
    const Rational& p = schedule.p;
    const Rational q = 1 - p;
    const HighFloat target = HighFloat(c) * exp(-HighFloat(alpha));
    std::ostringstream log;

    Rational eps = schedule.eps_start;
    for (int step = 0; step <= schedule.eps_halvings; ++step, eps /= 2) {
        if (eps >= q) continue;
        const Rational r = p * (q - eps) / ((p + eps) * q);
        const double rd = to_double(r);
        const double limit_var = rd / ((1 - rd) * (1 - rd));
        log << "eps=" << eps << " r=" << rd << " limit_var=" << limit_var;
        if (!(limit_var > A)) {
            log << " skipped (limit variance <= A)\n";
            continue;
        }
        log << "\n";
        for (int n = schedule.n_start; n <= schedule.n_max; n *= 2) {
            const int k = floor_of(Rational(n) * (p + eps)).convert_to<int>() + 1;
            if (k > n) continue;
            const Rational ratio0 = conditioned_binomial_ratio(n, p, k, 0);
            const double rel = std::fabs(to_double(Rational(ratio0 / r)) - 1.0);
            log << "  n=" << n << " k=" << k << " ratio_rel_err=" << rel;
            if (rel > schedule.ratio_tolerance) {
                log << " (not yet geometric)\n";
                continue;
            }
            const RationalDistribution dist = conditioned_binomial(n, p, k);
            const Rational mu = mean(dist);
            const Rational var = variance(dist);
            const HighFloat threshold = to_high(mu) + HighFloat(alpha) * sqrt(to_high(var));
            Rational tail(0);
            for (std::size_t i = 0; i < dist.probs.size(); ++i)
                if (HighFloat(dist.offset + static_cast<std::int64_t>(i)) > threshold) tail += dist.probs[i];
            log << " var=" << to_double(var) << " tail=" << to_double(tail);
            if (var > Rational(A) && to_high(tail) > target) {
                log << " accepted\n";
                return WitnessCertificate{ConditionedBinomial{n, p, k}, eps, mu, var, tail, threshold, target, log.str()};
            }
            log << "\n";
        }
    }
    throw NotFoundError("witness search exhausted its budget", log.str());
}

// ---------------------------------------------------------------------------
// Couplings

/// One joint draw of the indicator vector I and the vector J, where J has the
/// law of I given I_j = 1 and J_i <= I_i for i != j.
struct CouplingSample {
    std::vector<std::uint8_t> i_vector;
    std::size_t j_index = 0;
    std::vector<std::uint8_t> j_vector;

    bool coupling_holds() const {
        if (j_vector.size() != i_vector.size() || j_index >= j_vector.size()) return false;
        if (j_vector[j_index] != 1) return false;
        for (std::size_t i = 0; i < i_vector.size(); ++i)
            if (i != j_index && j_vector[i] > i_vector[i]) return false;
        return true;
    }
};

template <typename S>
concept RandomSource = requires(S& s, std::size_t k) {
    { s.uniform(k) } -> std::convertible_to<std::size_t>;
    { s.uniform_excluding(k, k) } -> std::convertible_to<std::size_t>;
};

inline constexpr int kRedistributionCap = 10000;

/// Pseudo-random choices; uniform_excluding retries by rejection.
class RngSource {
public:
    explicit RngSource(std::uint64_t seed) : engine_(seed) {}
    explicit RngSource(std::seed_seq& seq) : engine_(seq) {}

    std::size_t uniform(std::size_t k) { return std::uniform_int_distribution<std::size_t>(0, k - 1)(engine_); }

    std::size_t uniform_excluding(std::size_t k, std::size_t excluded) {
        for (int attempt = 0; attempt < kRedistributionCap; ++attempt) {
            const std::size_t v = uniform(k);
            if (v != excluded) return v;
        }
        throw std::runtime_error("redistribution did not leave the excluded urn after " +
                                 std::to_string(kRedistributionCap) + " attempts");
    }

private:
    std::mt19937_64 engine_;
};

/// Replays a fixed sequence of choices and records the arity of each, so a
/// sampler can be driven through every branch of its choice tree.
class ChoicePath {
public:
    std::size_t uniform(std::size_t k) { return next(k); }

    std::size_t uniform_excluding(std::size_t k, std::size_t excluded) {
        const std::size_t c = next(k - 1);
        return c < excluded ? c : c + 1;
    }

    /// Probability of the branch just replayed.
    Rational weight() const {
        BigInt den(1);
        for (std::size_t i = 0; i < pos_; ++i) den *= arity_[i];
        return Rational(BigInt(1), den);
    }

    void rewind() { pos_ = 0; }

    /// Moves to the next branch (odometer order); false when exhausted.
    bool advance() {
        choices_.resize(pos_);
        arity_.resize(pos_);
        while (!choices_.empty()) {
            if (choices_.back() + 1 < arity_.back()) {
                ++choices_.back();
                pos_ = 0;
                return true;
            }
            choices_.pop_back();
            arity_.pop_back();
        }
        return false;
    }

private:
    std::size_t next(std::size_t k) {
        if (k == 0) throw std::logic_error("choice among zero options");
        if (pos_ == choices_.size()) {
            choices_.push_back(0);
            arity_.push_back(k);
        } else if (arity_[pos_] != k) {
            throw std::logic_error("sampler is not deterministic given its choices");
        }
        return choices_[pos_++];
    }

    std::vector<std::size_t> choices_;
    std::vector<std::size_t> arity_;
    std::size_t pos_ = 0;
};

/// Balls go to m distinct urns; if urn j is empty, a uniformly chosen ball is
/// moved there.
template <RandomSource S>
CouplingSample hypergeometric_coupling(const Hypergeometric& model, std::size_t j, S& src) {
    validate(model);
    if (j >= static_cast<std::size_t>(model.n)) throw DomainError("coupling: index j out of range");
    const auto N = static_cast<std::size_t>(model.N);
    const auto m = static_cast<std::size_t>(model.m);
    const auto n = static_cast<std::size_t>(model.n);
    std::vector<std::size_t> urns(N);
    std::iota(urns.begin(), urns.end(), std::size_t{0});
    for (std::size_t b = 0; b < m; ++b) std::swap(urns[b], urns[b + src.uniform(N - b)]);
    std::vector<std::uint8_t> occupied(N, 0);
    for (std::size_t b = 0; b < m; ++b) occupied[urns[b]] = 1;

    CouplingSample s;
    s.j_index = j;
    s.i_vector.assign(occupied.begin(), occupied.begin() + static_cast<std::ptrdiff_t>(n));
    if (!occupied[j]) {
        const std::size_t ball = src.uniform(m);
        occupied[urns[ball]] = 0;
        occupied[j] = 1;
    }
    s.j_vector.assign(occupied.begin(), occupied.begin() + static_cast<std::ptrdiff_t>(n));
    return s;
}

/// Balls thrown independently; the balls found in urn j are re-thrown until
/// each lands elsewhere.  Indicators mark empty urns.
template <RandomSource S>
CouplingSample occupancy_coupling(const Occupancy& model, std::size_t j, S& src) {
    validate(model);
    const auto n = static_cast<std::size_t>(model.n);
    if (j >= n) throw DomainError("coupling: index j out of range");
    if (n == 1 && model.m > 0) throw DomainError("coupling: the single urn can never be empty");
    std::vector<int> count(n, 0);
    for (int b = 0; b < model.m; ++b) ++count[src.uniform(n)];

    CouplingSample s;
    s.j_index = j;
    s.i_vector.resize(n);
    for (std::size_t i = 0; i < n; ++i) s.i_vector[i] = count[i] == 0;
    const int moved = count[j];
    count[j] = 0;
    for (int b = 0; b < moved; ++b) ++count[src.uniform_excluding(n, j)];
    s.j_vector.resize(n);
    for (std::size_t i = 0; i < n; ++i) s.j_vector[i] = count[i] == 0;
    return s;
}

template <RandomSource S>
CouplingSample coupling_sample(const DependentModel& model, std::size_t j, S& src) {
    if (const auto* h = std::get_if<Hypergeometric>(&model)) return hypergeometric_coupling(*h, j, src);
    if (const auto* o = std::get_if<Occupancy>(&model)) return occupancy_coupling(*o, j, src);
    throw DomainError("coupling: only the hypergeometric and occupancy models have an explicit coupling");
}

inline CouplingSample coupling_sample(const DependentModel& model, std::size_t j, std::uint64_t seed) {
    RngSource src(seed);
    return coupling_sample(model, j, src);
}

using PatternLaw = std::map<std::vector<std::uint8_t>, Rational>;

/// Exact law of the coupled vector J, by walking every branch of the
/// sampler's choice tree.
inline PatternLaw coupling_law_exact(const DependentModel& model, std::size_t j) {
    PatternLaw law;
    ChoicePath path;
    do {
        path.rewind();
        const CouplingSample s = coupling_sample(model, j, path);
        law[s.j_vector] += path.weight();
    } while (path.advance());
    return law;
}

struct CouplingTrialStats {
    std::uint64_t trials = 0;
    std::uint64_t violations = 0;
    std::map<std::uint64_t, std::uint64_t> j_patterns;  // bit i set iff J_i = 1 (n <= 64)
    std::vector<std::uint64_t> x_histogram;             // counts of X = sum I_i

    void merge(const CouplingTrialStats& other) {
        trials += other.trials;
        violations += other.violations;
        for (const auto& [k, v] : other.j_patterns) j_patterns[k] += v;
        if (x_histogram.size() < other.x_histogram.size()) x_histogram.resize(other.x_histogram.size(), 0);
        for (std::size_t i = 0; i < other.x_histogram.size(); ++i) x_histogram[i] += other.x_histogram[i];
    }

    double mean_x() const {
        double s = 0.0;
        for (std::size_t i = 0; i < x_histogram.size(); ++i) s += static_cast<double>(i) * static_cast<double>(x_histogram[i]);
        return trials ? s / static_cast<double>(trials) : 0.0;
    }

    double variance_x() const {
        const double mu = mean_x();
        double s = 0.0;
        for (std::size_t i = 0; i < x_histogram.size(); ++i) {
            const double d = static_cast<double>(i) - mu;
            s += d * d * static_cast<double>(x_histogram[i]);
        }
        return trials > 1 ? s / static_cast<double>(trials - 1) : 0.0;
    }

    /// Number of trials with X >= threshold (or X <= threshold for lower).
    std::uint64_t tail_count(Side side, double threshold) const {
        std::uint64_t c = 0;
        for (std::size_t i = 0; i < x_histogram.size(); ++i) {
            const auto x = static_cast<double>(i);
            if (side == Side::upper ? x >= threshold : x <= threshold) c += x_histogram[i];
        }
        return c;
    }
};

inline constexpr std::uint64_t kTrialsPerChunk = 1U << 16;

/// Runs `trials` coupling draws.  Trials are cut into fixed chunks, chunk c
/// seeded from (seed, c), so the result does not depend on `threads`.
inline CouplingTrialStats run_coupling_trials(const DependentModel& model, std::size_t j, std::uint64_t seed,
                                              std::uint64_t trials, unsigned threads = 1) {
    const int n = indicator_count(model);
    const std::uint64_t chunks = (trials + kTrialsPerChunk - 1) / kTrialsPerChunk;
    std::vector<CouplingTrialStats> per_chunk(chunks);
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        try {
            for (std::uint64_t c = next++; c < chunks; c = next++) {
                std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32U),
                                  static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32U)};
                RngSource src(seq);
                CouplingTrialStats& st = per_chunk[c];
                st.x_histogram.assign(static_cast<std::size_t>(n) + 1, 0);
                const std::uint64_t count = std::min(kTrialsPerChunk, trials - c * kTrialsPerChunk);
                for (std::uint64_t t = 0; t < count; ++t) {
                    const CouplingSample s = coupling_sample(model, j, src);
                    ++st.trials;
                    if (!s.coupling_holds()) ++st.violations;
                    std::size_t x = 0;
                    for (auto v : s.i_vector) x += v;
                    ++st.x_histogram[x];
                    if (n <= 64) {
                        std::uint64_t bits = 0;
                        for (std::size_t i = 0; i < s.j_vector.size(); ++i)
                            if (s.j_vector[i]) bits |= std::uint64_t{1} << i;
                        ++st.j_patterns[bits];
                    }
                }
            }
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = chunks;
        }
    };

    threads = std::max(1U, threads);
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);

    CouplingTrialStats total;
    total.x_histogram.assign(static_cast<std::size_t>(n) + 1, 0);
    for (const auto& st : per_chunk) total.merge(st);
    return total;
}

}  // namespace tailbound
