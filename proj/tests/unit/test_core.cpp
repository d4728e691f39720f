#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "snl/plugin.hpp"
#include "snl/profile.hpp"

using namespace snl;

namespace {

struct Draw {
    SnlParams params;
    std::vector<int> targets;
};

// Random feasible parameter set with J in [2, 6] and a random non-empty strict target subset.
Draw random_feasible(std::mt19937_64& rng, bool interior = true) {
    std::uniform_int_distribution<int> jd(2, 6);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const int J = jd(rng);
    std::vector<int> targets;
    while (targets.empty() || static_cast<int>(targets.size()) == J) {
        targets.clear();
        for (int j = 1; j <= J; ++j)
            if (u(rng) < 0.4) targets.push_back(j);
    }
    Draw d;
    d.targets = targets;
    std::gamma_distribution<double> ga(1.0);
    double tot = 0.0;
    for (int j = 0; j < J; ++j) tot += d.params.p_c.emplace_back(ga(rng) + (interior ? 0.02 : 0.0));
    for (auto& v : d.params.p_c) v /= tot;
    double pcg = 0.0;
    for (int t : targets) pcg += d.params.p_c[static_cast<std::size_t>(t - 1)];
    d.params.I_E = u(rng) < 0.2 ? 0.0 : 0.95 * pcg * u(rng);
    const double lo = sieve_strength_lower_bound(d.params.I_E, pcg);
    d.params.p_s = lo + (1.0 - lo) * (interior ? 0.05 + 0.9 * u(rng) : u(rng));
    d.params.r_c0 = 0.95 * u(rng);
    tot = 0.0;
    for (int j = 0; j < J - static_cast<int>(targets.size()); ++j)
        tot += d.params.q.emplace_back(ga(rng) + (interior ? 0.02 : 0.0));
    for (auto& v : d.params.q) v /= tot;
    return d;
}

}  // namespace

TEST_SUITE("core") {

TEST_CASE("simplex closure and proportional targeted reduction over random feasible sets") {
    std::mt19937_64 rng(11);
    for (int it = 0; it < 2000; ++it) {
        const Draw d = random_feasible(rng, false);
        const TargetSpec t(d.targets, static_cast<int>(d.params.p_c.size()));
        const DerivedRates r = vaccine_profile(d.params, t);
        const double s = std::accumulate(r.p_v.begin(), r.p_v.end(), 0.0);
        CHECK(std::abs(s - 1.0) < 1e-10);
        for (double v : r.p_v) CHECK(v >= -1e-15);
        for (int j : d.targets) {
            const auto k = static_cast<std::size_t>(j - 1);
            CHECK(1.0 - r.p_v[k] / d.params.p_c[k] == doctest::Approx(d.params.p_s).epsilon(1e-12));
        }
    }
}

TEST_CASE("profile matches the subject-level event story") {
    std::mt19937_64 rng(12);
    for (int it = 0; it < 500; ++it) {
        const Draw d = random_feasible(rng);
        const int J = static_cast<int>(d.params.p_c.size());
        const TargetSpec t(d.targets, J);
        std::vector<int> is_t(static_cast<std::size_t>(J), 0);
        for (int j : d.targets) is_t[static_cast<std::size_t>(j - 1)] = 1;
        std::vector<double> q_full(static_cast<std::size_t>(J), 0.0);
        for (std::size_t i = 0; i < t.non_targets().size(); ++i)
            q_full[static_cast<std::size_t>(t.non_targets()[i] - 1)] = d.params.q[i];
        const auto [pt, p2] = oracle::take_and_replacement(d.params.p_s, d.params.I_E, d.params.targeted_mass(t));
        const auto expect = oracle::event_profile(d.params.p_c, is_t, q_full, pt, p2);
        const DerivedRates r = vaccine_profile(d.params, t);
        CHECK(r.p_t == doctest::Approx(pt).epsilon(1e-12));
        CHECK(r.p_2 == doctest::Approx(p2).epsilon(1e-12));
        for (int j = 0; j < J; ++j) CHECK(std::abs(r.p_v[static_cast<std::size_t>(j)] - expect[static_cast<std::size_t>(j)]) < 1e-12);
        // efficacy identity I_E = p_cG p_t (1 - p_2)
        CHECK(std::abs(d.params.targeted_mass(t) * r.p_t * (1.0 - r.p_2) - d.params.I_E) < 1e-12);
    }
}

TEST_CASE("null reduction: p_s = 0 and I_E = 0 leave p_c unchanged") {
    const SnlParams p{{0.5, 0.3, 0.2}, 0.0, 0.0, 0.8, {0.25, 0.75}};
    const DerivedRates r = vaccine_profile(p, TargetSpec({1}, 3));
    for (std::size_t j = 0; j < 3; ++j) CHECK(r.p_v[j] == p.p_c[j]);
    CHECK(r.r_v0 == doctest::Approx(0.8));
}

TEST_CASE("insert-only replacement leaves the non-targeted conditionals unchanged") {
    std::mt19937_64 rng(13);
    for (int it = 0; it < 1000; ++it) {
        Draw d = random_feasible(rng);
        const TargetSpec t(d.targets, static_cast<int>(d.params.p_c.size()));
        double tot = 0.0;
        for (std::size_t i = 0; i < t.non_targets().size(); ++i)
            tot += (d.params.q[i] = d.params.p_c[static_cast<std::size_t>(t.non_targets()[i] - 1)]);
        for (auto& v : d.params.q) v /= tot;
        const DerivedRates r = vaccine_profile(d.params, t);
        double vt = 0.0;
        for (int j : t.non_targets()) vt += r.p_v[static_cast<std::size_t>(j - 1)];
        for (std::size_t i = 0; i < t.non_targets().size(); ++i) {
            const auto k = static_cast<std::size_t>(t.non_targets()[i] - 1);
            CHECK(r.p_v[k] / vt == doctest::Approx(d.params.q[i]).epsilon(1e-11));
        }
    }
}

TEST_CASE("constraint forms agree on the 101^3 grid") {
    long disagreements = 0, checked = 0;
    for (int a = 0; a <= 100; ++a)
        for (int b = 0; b <= 100; ++b)
            for (int c = 0; c <= 100; ++c) {
                const double I_E = a / 100.0, pcg = b / 100.0, ps = c / 100.0;
                const FeasibilityReport r = feasibility_check(I_E, pcg, ps);
                const double slack = pcg * (1.0 - (1.0 - ps) * (1.0 - I_E)) - I_E;
                if (std::abs(slack) < 1e-12) continue;  // ties
                ++checked;
                const bool base = slack > 0.0;
                bool ok = r.feasible == base;
                // each one-sided bound, where its denominator is non-zero
                if (1.0 - pcg * (1.0 - ps) > 0.0) ok = ok && ((I_E <= pcg * ps / (1.0 - pcg * (1.0 - ps))) == base);
                if (ps + I_E * (1.0 - ps) > 0.0) ok = ok && ((pcg >= I_E / (ps + I_E * (1.0 - ps))) == base);
                if (pcg > 0.0 && I_E < 1.0) ok = ok && ((ps >= I_E * (1.0 - pcg) / (pcg * (1.0 - I_E))) == base);
                // and the library's reported bounds
                if (1.0 - pcg * (1.0 - ps) > 0.0) ok = ok && ((I_E <= r.ie_upper) == base);
                if (ps + I_E * (1.0 - ps) > 0.0) ok = ok && ((pcg >= r.pcg_lower) == base);
                if (pcg > 0.0 && I_E < 1.0) ok = ok && ((ps >= r.ps_lower) == base);
                if (!ok) ++disagreements;
            }
    CHECK(checked > 900000);
    CHECK(disagreements == 0);
}

TEST_CASE("feasibility corner cases") {
    CHECK(feasibility_check(0.0, 0.0, 0.0).feasible);
    CHECK_FALSE(feasibility_check(0.5, 0.15, 0.9).feasible);  // I_E above p_cG can never be met
    CHECK(feasibility_check(0.5, 1.0, 0.0).feasible);
    CHECK(sieve_strength_lower_bound(0.0, 0.3) == 0.0);
    CHECK(std::isinf(sieve_strength_lower_bound(0.2, 0.0)));
    CHECK_THROWS_AS(vaccine_profile(SnlParams{{0.2, 0.8}, 0.1, 0.5, 0.9, {1.0}}, TargetSpec({1}, 2)), InfeasibleError);
}

TEST_CASE("plug-in round trip from exact expected counts") {
    std::mt19937_64 rng(14);
    int with_q = 0;
    for (int it = 0; it < 2000; ++it) {
        const Draw d = random_feasible(rng);
        const int J = static_cast<int>(d.params.p_c.size());
        const TargetSpec t(d.targets, J);
        const DerivedRates r = vaccine_profile(d.params, t);
        std::vector<double> cp(static_cast<std::size_t>(J) + 1), cv(static_cast<std::size_t>(J) + 1);
        const double n_p = 1000.0, n_v = 1300.0;
        cp[0] = n_p * d.params.r_c0;
        cv[0] = n_v * r.r_v0;
        for (int j = 0; j < J; ++j) {
            cp[static_cast<std::size_t>(j) + 1] = n_p * (1.0 - d.params.r_c0) * d.params.p_c[static_cast<std::size_t>(j)];
            cv[static_cast<std::size_t>(j) + 1] = n_v * (1.0 - r.r_v0) * r.p_v[static_cast<std::size_t>(j)];
        }
        const PluginEstimate e = plugin_estimates(cp, cv, t, false);
        CHECK(std::abs(e.I_E - d.params.I_E) < 1e-9);
        CHECK(std::abs(e.p_s - d.params.p_s) < 1e-9);
        CHECK(std::abs(e.p_t - r.p_t) < 1e-9);
        CHECK(std::abs(e.p_2 - r.p_2) < 1e-9);
        CHECK(e.valid());
        if (e.q) {
            ++with_q;
            for (std::size_t i = 0; i < d.params.q.size(); ++i) CHECK(std::abs((*e.q)[i] - d.params.q[i]) < 1e-9);
        }
    }
    CHECK(with_q > 1500);
}

TEST_CASE("plug-in clamps negative efficacy and flags unidentified q") {
    // more vaccine failures than placebo failures
    const FailureTable tab({80, 10, 10}, {70, 20, 10});
    const PluginEstimate e = plugin_estimates(tab, TargetSpec({1}, 2), false);
    CHECK(e.ie_clamped);
    CHECK(e.I_E == 0.0);
    CHECK(e.I_E_raw < 0.0);
    // no change at all: nothing replaced
    const PluginEstimate z = plugin_estimates(FailureTable({80, 10, 10}, {80, 10, 10}), TargetSpec({1}, 2), false);
    CHECK(z.p_s == doctest::Approx(0.0));
    CHECK_FALSE(z.q.has_value());
}

TEST_CASE("brute-force generative simulator agrees with the profile at N = 1e6") {
    const SnlParams cases[] = {
        {{0.815, 0.171, 0.014}, 0.5, 0.2, 0.0, {0.6, 0.4}},
        {{0.4, 0.3, 0.2, 0.1}, 0.3, 0.0, 0.0, {0.2, 0.3, 0.5}},
        {{0.3, 0.3, 0.4}, 0.9, 0.35, 0.0, {1.0}},
    };
    const std::vector<int> targets[] = {{1}, {2}, {1, 3}};
    for (int c = 0; c < 3; ++c) {
        const SnlParams& p = cases[c];
        const TargetSpec t(targets[c], static_cast<int>(p.p_c.size()));
        const DerivedRates r = vaccine_profile(p, t);
        std::vector<int> is_t(p.p_c.size(), 0);
        for (int j : targets[c]) is_t[static_cast<std::size_t>(j - 1)] = 1;
        std::vector<double> q_full(p.p_c.size(), 0.0);
        for (std::size_t i = 0; i < t.non_targets().size(); ++i)
            q_full[static_cast<std::size_t>(t.non_targets()[i] - 1)] = p.q[i];
        const auto [pt, p2] = oracle::take_and_replacement(p.p_s, p.I_E, p.targeted_mass(t));
        const auto counts = oracle::simulate_subjects(p.p_c, is_t, q_full, pt, p2, 1'000'000, 100 + c);
        const double n = static_cast<double>(std::accumulate(counts.begin(), counts.end(), 0L));
        CHECK(n / 1e6 == doctest::Approx(1.0 - p.I_E).epsilon(0.01));
        for (std::size_t j = 0; j < counts.size(); ++j) {
            const double pv = r.p_v[j];
            CHECK(std::abs(counts[j] / n - pv) < 3.0 * std::sqrt(pv * (1.0 - pv) / n) + 1e-12);
        }
    }
}

TEST_CASE("target specification and tables") {
    const TargetSpec t({3, 1}, 4);
    CHECK(t.targets() == std::vector<int>{1, 3});
    CHECK(t.non_targets() == std::vector<int>{2, 4});
    CHECK(t.reindexing() == std::vector<int>{1, 3, 2, 4});
    CHECK(t.contains(3));
    CHECK_FALSE(t.contains(2));
    CHECK_THROWS_AS(TargetSpec({1, 2}, 2), InputError);
    CHECK_THROWS_AS(TargetSpec({0}, 3), InputError);
    CHECK_THROWS_AS(TargetSpec({2, 2}, 3), InputError);
    CHECK_THROWS_AS(FailureTable({1, 2}, {1, 2, 3}), InputError);
    CHECK_THROWS_AS(FailureTable({1, 2}, {1, 2}), InputError);  // J = 1
    const FailureTable tab({10, 2, 3}, {8, 1, 5});
    CHECK(tab.J() == 2);
    CHECK(tab.placebo_size() == 15);
    CHECK(tab.vaccine_failure_total() == 6);
}

TEST_CASE("simplex hygiene") {
    const auto p = normalized_simplex({0.815, 0.171, 0.0135, 0.0005, 0.000006}, "p_c", 1e-4);
    CHECK(std::accumulate(p.begin(), p.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(normalized_simplex({0.5, 0.6}, "p_c"), InputError);
    CHECK_THROWS_AS(normalized_simplex({1.2, -0.2}, "p_c"), InputError);
}

TEST_CASE("variant and phase names round trip") {
    for (Variant v : {Variant::all_or_none, Variant::some_or_none, Variant::replacement_only, Variant::insert_only})
        CHECK(parse_variant(to_string(v)) == v);
    for (Phase p : {Phase::one_phase, Phase::two_phase}) CHECK(parse_phase(to_string(p)) == p);
    CHECK_THROWS_AS(parse_variant("leaky"), InputError);
}

}  // TEST_SUITE
