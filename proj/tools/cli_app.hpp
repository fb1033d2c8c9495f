#pragma once

// Command-line front end: bound, compare, oracle, decompose, simulate.
// run() is the whole program minus process setup, so tests can drive it.

#include "cli_json.hpp"

#include "tailbound/seed_manifest.hpp"
#include "tailbound/tailbound.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace tailbound::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitUsage = 2;
inline constexpr double kDominationSlack = 1e-12;

struct Flags {
    std::string dist;
    std::string model;
    std::string ps;
    std::optional<int> n;
    std::string p;
    std::optional<double> lambda;
    std::optional<double> sigma2;
    std::optional<int> N;
    std::optional<int> m;
    std::optional<int> k;
    std::string a;
    std::string side = "upper";
    std::string bound;
    std::uint64_t seed = 1;
    std::uint64_t trials = 100000;
    bool json = false;
    bool csv = false;
    bool clamp = false;
    std::optional<double> c;
    std::optional<double> kappa3;
    bool exact_moments = false;
    std::size_t j = 0;
    unsigned threads = 1;
    bool witness = false;
    double alpha = 4.0;
    double A = 10.0;
    std::string manifest;
};

// ---------------------------------------------------------------------------
// Flag parsing helpers

inline std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(text);
    while (std::getline(in, cur, sep))
        if (!cur.empty()) out.push_back(cur);
    return out;
}

/// "2", "0.2,1/3", "1..18" (integer steps) or "0..2:1/2".
inline std::vector<Rational> parse_a_list(const std::string& text) {
    std::vector<Rational> out;
    for (const auto& item : split(text, ',')) {
        const auto dots = item.find("..");
        if (dots == std::string::npos) {
            out.push_back(parse_rational(item));
            continue;
        }
        std::string hi_text = item.substr(dots + 2);
        Rational step(1);
        if (const auto colon = hi_text.find(':'); colon != std::string::npos) {
            step = parse_rational(hi_text.substr(colon + 1));
            hi_text = hi_text.substr(0, colon);
        }
        if (step <= 0) throw std::invalid_argument("range step must be positive in '" + item + "'");
        const Rational lo = parse_rational(item.substr(0, dots));
        const Rational hi = parse_rational(hi_text);
        for (Rational v = lo; v <= hi; v += step) out.push_back(v);
    }
    for (const auto& v : out)
        if (v < 0) throw std::invalid_argument("--a values must be >= 0");
    if (out.empty()) throw std::invalid_argument("--a is required");
    return out;
}

inline std::vector<Side> parse_sides(const std::string& text) {
    if (text == "both") return {Side::upper, Side::lower};
    return {parse_side(text)};
}

inline std::vector<Rational> parse_ps(const std::string& text) {
    std::vector<Rational> out;
    for (const auto& item : split(text, ',')) out.push_back(parse_rational(item));
    if (out.empty()) throw std::invalid_argument("--ps must list at least one probability");
    return out;
}

template <typename T>
T require(const std::optional<T>& v, const char* name) {
    if (!v) throw std::invalid_argument(std::string("missing required flag ") + name);
    return *v;
}

inline Rational require_p(const Flags& f) {
    if (f.p.empty()) throw std::invalid_argument("missing required flag --p");
    return parse_rational(f.p);
}

// ---------------------------------------------------------------------------
// Subjects: what a command is asked about

struct ExactTail {
    std::optional<Rational> exact;  // when the law is rational
    double log_value = kNegInf;
};

struct Subject {
    std::string descriptor;
    IndicatorSumSpec spec;                      // drives every bound
    std::optional<IndicatorSumSpec> variance_spec;  // exact moments for variance-type bounds
    std::optional<Rational> exact_mean;
    std::function<ExactTail(Side, const Rational&)> tail;  // empty when no law is known
    std::optional<RationalDistribution> law;
};

inline Rational threshold_of(const Rational& mean, Side side, const Rational& a) {
    return side == Side::upper ? Rational(mean + a) : Rational(mean - a);
}

inline ExactTail tail_from(const RationalDistribution& dist, Side side, const Rational& threshold) {
    const Rational t = exact_tail(dist, side, threshold);
    return {t, log_of(t)};
}

inline Subject subject_from_distribution(std::string descriptor, IndicatorSumSpec spec, RationalDistribution dist) {
    Subject s{std::move(descriptor), std::move(spec), std::nullopt, mean(dist), {}, dist};
    const Rational mu = *s.exact_mean;
    s.tail = [dist = std::move(dist), mu](Side side, const Rational& a) {
        return tail_from(dist, side, threshold_of(mu, side, a));
    };
    return s;
}

inline DependentModel model_from_flags(const Flags& f) {
    if (f.model == "hypergeometric") {
        Hypergeometric h{require(f.N, "--N"), require(f.m, "--m"), require(f.n, "--n")};
        validate(h);
        return h;
    }
    if (f.model == "occupancy") {
        Occupancy o{require(f.n, "--n"), require(f.m, "--m")};
        validate(o);
        return o;
    }
    if (f.model == "conditioned-binomial") {
        ConditionedBinomial c{require(f.n, "--n"), require_p(f), require(f.k, "--k")};
        validate(c);
        return c;
    }
    if (f.model == "barbour") return Barbour{};
    throw std::invalid_argument("unknown --model '" + f.model + "'");
}

inline Subject subject_from_dist_flags(const Flags& f) {
    if (f.dist == "binomial") {
        const int n = require(f.n, "--n");
        const Rational p = require_p(f);
        auto spec = IndicatorSumSpec::homogeneous(n, to_double(p));
        const std::string desc = "binomial(n=" + std::to_string(n) + ",p=" + p.str() + ")";
        if (n <= kRationalSizeLimit) return subject_from_distribution(desc, spec, binomial_distribution(n, p));
        Subject s{desc, spec, std::nullopt, Rational(n) * p, {}, std::nullopt};
        const HighDistribution dist = poisson_binomial_distribution<HighFloat>(std::vector<HighFloat>(n, to_high(p)));
        const Rational mu = *s.exact_mean;
        s.tail = [dist, mu](Side side, const Rational& a) {
            return ExactTail{std::nullopt, log_of(exact_tail(dist, side, threshold_of(mu, side, a)))};
        };
        return s;
    }
    if (f.dist == "heterogeneous") {
        const auto ps = parse_ps(f.ps);
        std::vector<double> pd;
        Rational lambda(0), sigma2(0);
        for (const auto& p : ps) {
            pd.push_back(to_double(p));
            lambda += p;
            sigma2 += p * (1 - p);
        }
        auto spec = IndicatorSumSpec::heterogeneous(pd, to_double(lambda), to_double(sigma2));
        std::string desc = "heterogeneous(n=" + std::to_string(ps.size()) + ")";
        if (static_cast<int>(ps.size()) <= kRationalSizeLimit)
            return subject_from_distribution(desc, spec, poisson_binomial_distribution<Rational>(ps));
        std::vector<HighFloat> ph;
        for (const auto& p : ps) ph.push_back(to_high(p));
        Subject s{desc, spec, std::nullopt, lambda, {}, std::nullopt};
        const HighDistribution dist = poisson_binomial_distribution<HighFloat>(ph);
        s.tail = [dist, lambda](Side side, const Rational& a) {
            return ExactTail{std::nullopt, log_of(exact_tail(dist, side, threshold_of(lambda, side, a)))};
        };
        return s;
    }
    if (f.dist == "moments") {
        auto spec = IndicatorSumSpec::moments(require(f.lambda, "--lambda"), require(f.sigma2, "--sigma2"), f.n);
        return Subject{spec.describe(), spec, std::nullopt, std::nullopt, {}, std::nullopt};
    }
    if (f.dist == "poisson") {
        const double lambda = require(f.lambda, "--lambda");
        auto spec = IndicatorSumSpec::poisson(lambda);
        Subject s{spec.describe(), spec, std::nullopt, std::nullopt, {}, std::nullopt};
        s.tail = [lambda](Side side, const Rational& a) {
            const double ad = to_double(a);
            double t;
            if (side == Side::upper) {
                t = poisson_tail(lambda, static_cast<std::int64_t>(std::ceil(lambda + ad)));
            } else {
                const double last = std::floor(lambda - ad);
                t = last < 0 ? 0.0 : 1.0 - poisson_tail(lambda, static_cast<std::int64_t>(last) + 1);
            }
            return ExactTail{std::nullopt, t > 0 ? std::log(t) : kNegInf};
        };
        return s;
    }
    throw std::invalid_argument("unknown --dist '" + f.dist + "'");
}

/// Negatively related indicators: binomial-type and variance bounds are
/// evaluated for Bi(n, EX/n).  With --exact-moments (hypergeometric and occupancy
/// only) the variance-type bounds use the exact mean and variance instead.
inline Subject subject_from_model_flags(const Flags& f) {
    const DependentModel model = model_from_flags(f);
    const int n = indicator_count(model);
    RationalDistribution dist = distribution_of(model);
    const Rational mu = mean(dist);
    auto spec = IndicatorSumSpec::homogeneous(n, to_double(Rational(mu / n)));
    Subject s = subject_from_distribution(describe(model), spec, std::move(dist));
    if (f.exact_moments) {
        if (!std::holds_alternative<Hypergeometric>(model) && !std::holds_alternative<Occupancy>(model))
            throw std::invalid_argument("--exact-moments applies only to the hypergeometric and occupancy models");
        const Rational var = variance(*s.law);
        s.variance_spec = IndicatorSumSpec::moments(to_double(mu), to_double(var), n);
    }
    return s;
}

inline Subject subject_from_flags(const Flags& f) {
    if (!f.dist.empty() && !f.model.empty()) throw std::invalid_argument("give either --dist or --model, not both");
    if (!f.dist.empty()) return subject_from_dist_flags(f);
    if (!f.model.empty()) return subject_from_model_flags(f);
    throw std::invalid_argument("one of --dist or --model is required");
}

// ---------------------------------------------------------------------------
// Bound evaluation

inline std::vector<BoundId> bounds_for(const std::string& text, Side side) {
    std::vector<BoundId> out;
    if (text.empty() || text == "all") {
        for (const auto& [id, lbl] : kBoundLabels)
            if (applies_to(id, side)) out.push_back(id);
        return out;
    }
    for (const auto& item : split(text, ',')) {
        const BoundId id = parse_bound_id(item);
        if (applies_to(id, side)) out.push_back(id);
    }
    return out;
}

inline LogBound evaluate_for_subject(const Subject& s, const TailQuery& q, BoundId id, const Flags& f) {
    BoundOptions opt;
    opt.c = f.c;
    opt.kappa3 = f.kappa3;
    const bool variance_kind = is_variance_type(id) || id == BoundId::two_point_lower ||
                               id == BoundId::feller_uniform || id == BoundId::feller_skew;
    if (s.variance_spec && variance_kind) return evaluate_bound(*s.variance_spec, q, id, opt);
    return evaluate_bound(s.spec, q, id, opt);
}

inline Json log_json(double v) { return Json(v); }

inline Json exact_json(const ExactTail& t) {
    Json j;
    j["exact_tail"] = t.exact ? Json(t.exact->str()) : Json(std::exp(t.log_value));
    j["exact_log_tail"] = log_json(t.log_value);
    return j;
}

// ---------------------------------------------------------------------------
// Commands

inline int cmd_bound(const Flags& f, std::ostream& out) {
    const Subject s = subject_from_flags(f);
    const auto as = parse_a_list(f.a);
    if (as.size() != 1) throw std::invalid_argument("bound takes a single --a value");
    if (f.bound.empty()) throw std::invalid_argument("missing required flag --bound");
    const Side side = parse_side(f.side);
    const BoundId id = parse_bound_id(f.bound);
    const LogBound b = evaluate_for_subject(s, TailQuery{side, to_double(as[0])}, id, f);
    Json j;
    j["command"] = "bound";
    j["spec"] = s.descriptor;
    j["side"] = std::string(to_string(side));
    j["a"] = to_double(as[0]);
    j["bound_id"] = std::string(label(id));
    j["log_value"] = log_json(b.log_value);
    j["value"] = f.clamp ? b.clamped_value() : b.value();
    j["clamped"] = f.clamp;
    j["in_validity_domain"] = b.in_validity_domain;
    write_json(out, j);
    out << "\n";
    return kExitOk;
}

struct CompareRow {
    std::string spec;
    Rational a;
    Side side = Side::upper;
    std::optional<ExactTail> exact;
    std::vector<std::pair<BoundId, std::optional<LogBound>>> bounds;
    std::vector<std::string> errors;  // parallel to bounds; empty string when evaluated
    std::optional<BoundId> tightest;
    bool violation = false;
};

inline CompareRow compare_row(const Subject& s, const Rational& a, Side side, const Flags& f) {
    CompareRow row{s.descriptor, a, side, std::nullopt, {}, {}, std::nullopt, false};
    if (s.tail) row.exact = s.tail(side, a);
    const TailQuery q{side, to_double(a)};
    double best = kPosInf;
    for (BoundId id : bounds_for(f.bound, side)) {
        try {
            const LogBound b = evaluate_for_subject(s, q, id, f);
            row.bounds.emplace_back(id, b);
            row.errors.emplace_back();
            if (b.in_validity_domain && b.log_value < best) {
                best = b.log_value;
                row.tightest = id;
            }
            if (row.exact && row.exact->log_value > b.log_value + kDominationSlack) row.violation = true;
        } catch (const std::exception& e) {
            row.bounds.emplace_back(id, std::nullopt);
            row.errors.emplace_back(e.what());
        }
    }
    return row;
}

inline std::vector<CompareRow> compare_rows(const Subject& s, const Flags& f) {
    const auto as = parse_a_list(f.a);
    const auto sides = parse_sides(f.side);
    std::vector<std::pair<Rational, Side>> grid;
    for (const auto& a : as)
        for (Side side : sides) grid.emplace_back(a, side);
    std::vector<CompareRow> rows(grid.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < grid.size(); i = next++) rows[i] = compare_row(s, grid[i].first, grid[i].second, f);
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < std::max(1U, f.threads); ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    return rows;
}

inline int cmd_compare(const Flags& f, std::ostream& out) {
    const Subject s = subject_from_flags(f);
    const auto rows = compare_rows(s, f);
    std::size_t violations = 0;
    for (const auto& r : rows) violations += r.violation ? 1 : 0;

    if (f.csv) {
        std::vector<BoundId> columns;
        for (const auto& r : rows)
            for (const auto& [id, b] : r.bounds)
                if (std::find(columns.begin(), columns.end(), id) == columns.end()) columns.push_back(id);
        std::sort(columns.begin(), columns.end());
        out << "spec,a,side,exact_tail,exact_log_tail";
        for (BoundId id : columns) out << ",log_" << label(id) << ",valid_" << label(id);
        out << ",tightest_bound_id,violation\n";
        for (const auto& r : rows) {
            out << r.spec << ',' << r.a.str() << ',' << to_string(r.side) << ',';
            if (r.exact) {
                out << (r.exact->exact ? r.exact->exact->str() : format_double(std::exp(r.exact->log_value))) << ','
                    << format_double(r.exact->log_value);
            } else {
                out << ',';
            }
            for (BoundId id : columns) {
                auto it = std::find_if(r.bounds.begin(), r.bounds.end(), [id](const auto& e) { return e.first == id; });
                if (it == r.bounds.end() || !it->second)
                    out << ",,";
                else
                    out << ',' << format_double(it->second->log_value) << ',' << (it->second->in_validity_domain ? 1 : 0);
            }
            out << ',' << (r.tightest ? std::string(label(*r.tightest)) : std::string()) << ',' << (r.violation ? 1 : 0)
                << "\n";
        }
        return violations ? kExitViolation : kExitOk;
    }

    Json report;
    report["command"] = "compare";
    report["spec"] = s.descriptor;
    if (s.variance_spec) {
        report["variance_bounds_use"] = {{"lambda", s.variance_spec->lambda()}, {"sigma2", s.variance_spec->sigma2()}};
        if (s.law) {
            report["variance_bounds_use"]["lambda_exact"] = mean(*s.law).str();
            report["variance_bounds_use"]["sigma2_exact"] = variance(*s.law).str();
        }
    }
    Json arr = Json::array();
    for (const auto& r : rows) {
        Json row;
        row["spec"] = r.spec;
        row["a"] = to_double(r.a);
        row["a_exact"] = r.a.str();
        row["side"] = std::string(to_string(r.side));
        if (r.exact) {
            const Json e = exact_json(*r.exact);
            row["exact_tail"] = e["exact_tail"];
            row["exact_log_tail"] = e["exact_log_tail"];
        } else {
            row["exact_tail"] = nullptr;
            row["exact_log_tail"] = nullptr;
        }
        Json bounds = Json::object();
        for (std::size_t i = 0; i < r.bounds.size(); ++i) {
            const auto& [id, b] = r.bounds[i];
            if (b)
                bounds[std::string(label(id))] = {{"log_value", log_json(b->log_value)},
                                                  {"in_validity_domain", b->in_validity_domain}};
            else
                bounds[std::string(label(id))] = {{"error", r.errors[i]}};
        }
        row["bounds"] = bounds;
        row["tightest_bound_id"] = r.tightest ? Json(std::string(label(*r.tightest))) : Json(nullptr);
        row["violation"] = r.violation;
        arr.push_back(row);
    }
    report["rows"] = arr;
    report["violations"] = violations;
    write_json(out, report);
    out << "\n";
    return violations ? kExitViolation : kExitOk;
}

inline int cmd_oracle(const Flags& f, std::ostream& out) {
    const Subject s = subject_from_flags(f);
    Json j;
    j["command"] = "oracle";
    j["spec"] = s.descriptor;
    if (s.law) {
        const auto& d = *s.law;
        Json pmf = Json::array();
        for (std::size_t i = 0; i < d.probs.size(); ++i)
            pmf.push_back({{"k", d.offset + static_cast<std::int64_t>(i)},
                           {"p", d.probs[i].str()},
                           {"log_p", log_json(log_of(d.probs[i]))}});
        j["pmf"] = pmf;
        j["mean"] = mean(d).str();
        j["variance"] = variance(d).str();
    } else {
        j["mean"] = s.spec.lambda();
        j["variance"] = s.spec.sigma2();
    }
    if (!f.a.empty()) {
        if (!s.tail) throw std::invalid_argument("no exact law is available for " + s.descriptor);
        Json tails = Json::array();
        for (const auto& a : parse_a_list(f.a))
            for (Side side : parse_sides(f.side)) {
                Json t = exact_json(s.tail(side, a));
                t["a"] = to_double(a);
                t["a_exact"] = a.str();
                t["side"] = std::string(to_string(side));
                tails.push_back(t);
            }
        j["tails"] = tails;
    }
    write_json(out, j);
    out << "\n";
    return kExitOk;
}

inline RationalDistribution decompose_target(const Flags& f, std::string& descriptor) {
    if (f.model == "binomial" || f.dist == "binomial") {
        const int n = require(f.n, "--n");
        const Rational p = require_p(f);
        descriptor = "binomial(n=" + std::to_string(n) + ",p=" + p.str() + ")";
        return binomial_distribution(n, p);
    }
    if (f.model == "heterogeneous" || f.dist == "heterogeneous") {
        const auto ps = parse_ps(f.ps);
        descriptor = "heterogeneous(n=" + std::to_string(ps.size()) + ")";
        return poisson_binomial_distribution<Rational>(ps);
    }
    if (f.model.empty()) throw std::invalid_argument("decompose needs --model");
    const DependentModel model = model_from_flags(f);
    descriptor = describe(model);
    return distribution_of(model);
}

inline int cmd_decompose(const Flags& f, std::ostream& out) {
    std::string descriptor;
    const RationalDistribution dist = decompose_target(f, descriptor);
    const RationalPolynomial pgf = pgf_of(dist);
    const RealRootCertificate cert = is_real_rooted(pgf);
    Json j;
    j["command"] = "decompose";
    j["model"] = descriptor;
    j["verdict"] = cert.real_rooted ? "real-rooted" : "non-real-rooted";
    Json pgf_coeffs = Json::array();
    for (const auto& c : pgf.coefficients()) pgf_coeffs.push_back(c.str());
    j["pgf"] = pgf_coeffs;
    Json c;
    c["degree"] = cert.degree;
    c["zero_roots"] = cert.zero_roots;
    c["real_roots"] = cert.real_root_count;
    c["nonreal_roots"] = cert.nonreal_root_count;
    c["sturm_counts"] = cert.sturm_counts;
    Json intervals = Json::array();
    for (const auto& r : cert.roots)
        intervals.push_back({{"lower", r.lower.str()}, {"upper", r.upper.str()}, {"multiplicity", r.multiplicity}});
    c["isolating_intervals"] = intervals;
    if (cert.reduced_quadratic_discriminant) c["reduced_quadratic_discriminant"] = cert.reduced_quadratic_discriminant->str();
    c["summary"] = cert.summary();
    j["certificate"] = c;
    if (cert.real_rooted) {
        const BernoulliDecomposition dec = bernoulli_decomposition(pgf);
        Json ps = Json::array();
        Json ps_text = Json::array();
        for (const auto& p : dec.probs) {
            ps.push_back(to_double(p));
            ps_text.push_back(to_decimal_string(p, 30));
        }
        j["p"] = ps;
        j["p_decimal"] = ps_text;
        j["unit_indicators"] = dec.unit_indicators;
        j["residual"] = to_double(dec.residual);
        const Rational mu = mean(dist);
        const Rational var = variance(dist);
        j["moments"] = {{"sum_p", to_decimal_string(dec.mean(), 30)},
                        {"mean", mu.str()},
                        {"mean_error", to_double(HighFloat(abs(dec.mean() - to_high(mu))))},
                        {"sum_pq", to_decimal_string(dec.variance(), 30)},
                        {"variance", var.str()},
                        {"variance_error", to_double(HighFloat(abs(dec.variance() - to_high(var))))}};
    }
    write_json(out, j);
    out << "\n";
    return kExitOk;
}

/// 95% Wilson score interval for a binomial proportion.
inline std::pair<double, double> wilson_interval(std::uint64_t hits, std::uint64_t trials) {
    if (trials == 0) return {0.0, 1.0};
    constexpr double z = 1.959963984540054;
    const double nn = static_cast<double>(trials);
    const double phat = static_cast<double>(hits) / nn;
    const double denom = 1.0 + z * z / nn;
    const double centre = (phat + z * z / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(phat * (1.0 - phat) / nn + z * z / (4.0 * nn * nn)) / denom;
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

inline Json simulate_coupling(const DependentModel& model, std::size_t j, std::uint64_t seed, std::uint64_t trials,
                              const Flags& f, bool& violated) {
    const CouplingTrialStats st = run_coupling_trials(model, j, seed, trials, f.threads);
    Rational exact_mean;
    if (const auto* o = std::get_if<Occupancy>(&model))
        exact_mean = occupancy_moments(o->n, o->m).lambda;
    else if (const auto* h = std::get_if<Hypergeometric>(&model))
        exact_mean = Rational(h->n) * h->m / h->N;
    const double se = std::sqrt(st.variance_x() / static_cast<double>(st.trials));
    Json r;
    r["model"] = describe(model);
    r["j"] = j;
    r["seed"] = seed;
    r["trials"] = st.trials;
    r["coupling_violations"] = st.violations;
    r["empirical_mean"] = st.mean_x();
    r["standard_error"] = se;
    r["exact_mean"] = exact_mean.str();
    r["mean_z_score"] = se > 0 ? (st.mean_x() - to_double(exact_mean)) / se : 0.0;
    if (!f.a.empty()) {
        const RationalDistribution law = distribution_of(model);
        Json tails = Json::array();
        for (const auto& a : parse_a_list(f.a))
            for (Side side : parse_sides(f.side)) {
                const Rational threshold = threshold_of(exact_mean, side, a);
                const double th = to_double(threshold);
                // Histogram entries are integers, so round the threshold inward.
                const double cut = side == Side::upper ? std::ceil(th - 1e-12) : std::floor(th + 1e-12);
                const std::uint64_t hits = st.tail_count(side, cut);
                const auto [lo, hi] = wilson_interval(hits, st.trials);
                const Rational exact = exact_tail(law, side, threshold);
                tails.push_back({{"a", to_double(a)},
                                 {"side", std::string(to_string(side))},
                                 {"empirical", static_cast<double>(hits) / static_cast<double>(st.trials)},
                                 {"ci95", {lo, hi}},
                                 {"exact", exact.str()}});
            }
        r["tails"] = tails;
    }
    if (st.violations) violated = true;
    return r;
}

inline int cmd_simulate(const Flags& f, std::ostream& out) {
    Json j;
    j["command"] = "simulate";
    bool violated = false;

    if (!f.manifest.empty()) {
        Json runs = Json::array();
        for (const auto& e : load_seed_manifest(f.manifest))
            runs.push_back(simulate_coupling(e.model, e.j, e.seed, e.trials, f, violated));
        j["runs"] = runs;
        write_json(out, j);
        out << "\n";
        return violated ? kExitViolation : kExitOk;
    }

    if (f.model == "conditioned-binomial") {
        const double c = f.c.value_or(1.0 / (2.0 * std::exp(1.0)));
        const HighFloat target = HighFloat(c) * exp(-HighFloat(f.alpha));
        if (f.witness) {
            const WitnessCertificate w = find_heavy_tail_witness(f.alpha, c, f.A);
            j["model"] = describe(w.model);
            j["epsilon"] = w.epsilon.str();
            j["mean"] = w.mean.str();
            j["variance"] = w.variance.str();
            j["variance_value"] = to_double(w.variance);
            j["threshold"] = to_double(w.threshold);
            j["tail"] = w.tail.str();
            j["tail_value"] = to_double(w.tail);
            j["target"] = to_double(w.target);
            j["exceeds_target"] = to_high(w.tail) > w.target;
            j["variance_exceeds_A"] = w.variance > Rational(f.A);
            j["search_log"] = w.log;
        } else {
            const DependentModel model = model_from_flags(f);
            const RationalDistribution law = distribution_of(model);
            const Rational mu = mean(law);
            const Rational var = variance(law);
            const HighFloat threshold = to_high(mu) + HighFloat(f.alpha) * sqrt(to_high(var));
            Rational tail(0);
            for (std::size_t i = 0; i < law.probs.size(); ++i)
                if (HighFloat(law.offset + static_cast<std::int64_t>(i)) > threshold) tail += law.probs[i];
            j["model"] = describe(model);
            j["mean"] = mu.str();
            j["variance"] = var.str();
            j["threshold"] = to_double(threshold);
            j["tail"] = tail.str();
            j["tail_value"] = to_double(tail);
            j["target"] = to_double(target);
            j["exceeds_target"] = to_high(tail) > target;
        }
        write_json(out, j);
        out << "\n";
        return kExitOk;
    }

    const DependentModel model = model_from_flags(f);
    j["run"] = simulate_coupling(model, f.j, f.seed, f.trials, f, violated);
    write_json(out, j);
    out << "\n";
    return violated ? kExitViolation : kExitOk;
}

// ---------------------------------------------------------------------------

inline void add_common_flags(CLI::App* app, Flags& f) {
    app->add_option("--dist", f.dist, "binomial | heterogeneous | moments | poisson");
    app->add_option("--model", f.model, "hypergeometric | occupancy | conditioned-binomial | barbour");
    app->add_option("--ps", f.ps, "comma-separated success probabilities");
    app->add_option("--n", f.n, "number of indicators (urns for occupancy)");
    app->add_option("--p", f.p, "success probability (decimal or a/b, read exactly)");
    app->add_option("--lambda", f.lambda, "mean");
    app->add_option("--sigma2", f.sigma2, "variance");
    app->add_option("--N", f.N, "hypergeometric urn count");
    app->add_option("--m", f.m, "ball count");
    app->add_option("--k", f.k, "conditioning threshold");
    app->add_option("--a", f.a, "deviation: value, list (1,2.5,1/3) or range (1..18, 0..2:1/2)");
    app->add_option("--side", f.side, "upper | lower (compare and oracle also accept both)");
    app->add_option("--bound", f.bound, "bound label, comma list, or all");
    app->add_option("--seed", f.seed, "random seed");
    app->add_option("--trials", f.trials, "Monte Carlo trials");
    app->add_flag("--json", f.json, "JSON output (default)");
    app->add_flag("--csv", f.csv, "CSV output (compare)");
    app->add_flag("--clamp", f.clamp, "clamp reported values to at most 1");
    app->add_option("--c", f.c, "constant of bound 1.15; c of the witness search");
    app->add_option("--kappa3", f.kappa3, "third cumulant for bound 1.23");
    app->add_flag("--exact-moments", f.exact_moments, "use exact mean and variance in variance-type bounds");
    app->add_option("--j", f.j, "conditioning index (0-based) for couplings");
    app->add_option("--threads", f.threads, "worker threads");
    app->add_flag("--witness", f.witness, "search for a heavy-tailed conditioned binomial");
    app->add_option("--alpha", f.alpha, "deviation in standard deviations");
    app->add_option("--A", f.A, "variance the witness must exceed");
    app->add_option("--manifest", f.manifest, "JSON seed manifest of coupling runs");
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Tail bounds for sums of indicator variables"};
    app.name("tailbound");
    app.require_subcommand(1);
    Flags f;
    struct Command {
        const char* name;
        const char* help;
        int (*fn)(const Flags&, std::ostream&);
    };
    const Command commands[] = {
        {"bound", "evaluate one bound", cmd_bound},
        {"compare", "compare bounds with exact tails over a grid of deviations", cmd_compare},
        {"oracle", "exact distribution and tails", cmd_oracle},
        {"decompose", "real-rootedness of the PGF and Bernoulli decomposition", cmd_decompose},
        {"simulate", "coupling simulations and the heavy-tail witness", cmd_simulate},
    };
    std::vector<CLI::App*> subs;
    for (const auto& c : commands) {
        CLI::App* sub = app.add_subcommand(c.name, c.help);
        add_common_flags(sub, f);
        subs.push_back(sub);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return kExitUsage;
    }
    for (std::size_t i = 0; i < subs.size(); ++i) {
        if (!subs[i]->parsed()) continue;
        try {
            return commands[i].fn(f, out);
        } catch (const NotFoundError& e) {
            err << "error: " << e.what() << "\n" << e.log();
            return kExitViolation;
        } catch (const std::exception& e) {
            err << "error: " << e.what() << "\n" << subs[i]->help();
            return kExitUsage;
        }
    }
    err << app.help();
    return kExitUsage;
}

}  // namespace tailbound::cli
