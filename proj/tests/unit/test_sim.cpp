#include <doctest.h>

#include <set>

#include "snl/sim.hpp"

using namespace snl;

TEST_SUITE("sim") {

TEST_CASE("eleven builtin scenarios with distinct labels and seeds") {
    const auto s = builtin_scenarios(10, 1);
    REQUIRE(s.size() == 11);
    std::set<std::string> labels;
    std::set<std::uint64_t> seeds;
    for (const auto& c : s) {
        labels.insert(c.label);
        seeds.insert(c.seed);
        CHECK(c.replicates == 10);
        CHECK(c.n_p == 1000);
        CHECK(c.n_v == 1000);
        CHECK_NOTHROW(c.validate());
    }
    CHECK(labels.size() == 11);
    CHECK(seeds.size() == 11);
    CHECK(labels.count("null_all_or_none_IE0.5"));
    CHECK(labels.count("null_permuted"));
}

TEST_CASE("published p_c is renormalised") {
    const auto p = published_p_c();
    double s = 0.0;
    for (double v : p) s += v;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(p[0] == doctest::Approx(0.815 / 1.000006));
}

TEST_CASE("infeasible scenarios are rejected before sampling") {
    ScenarioConfig c;
    c.label = "bad";
    c.p_c = published_p_c();
    c.I_E = 0.5;
    c.p_s = 0.15;
    CHECK_THROWS_AS(c.validate(), InfeasibleError);
    CHECK_THROWS_AS(simulate_dataset(c, 0), InfeasibleError);
    c.null_mode = NullMode::all_or_none_null;  // p_s is ignored under the all-or-none null
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("simulated tables are reproducible and arm sizes are exact") {
    const auto s = builtin_scenarios(5, 3);
    for (const auto& c : s) {
        const FailureTable a = simulate_dataset(c, 2);
        const FailureTable b = simulate_dataset(c, 2);
        CHECK(a == b);
        CHECK(a.placebo_size() == c.n_p);
        CHECK(a.vaccine_size() == c.n_v);
        CHECK_FALSE(simulate_dataset(c, 3) == a);
    }
}

TEST_CASE("permuted-null tables keep the pooled margins of their source table") {
    auto s = builtin_scenarios(5, 4);
    ScenarioConfig perm = s.back();
    REQUIRE(perm.null_mode == NullMode::permuted_one_or_none);
    ScenarioConfig base = perm;
    base.null_mode = NullMode::none;
    for (int r = 0; r < 5; ++r) {
        const FailureTable a = simulate_dataset(base, r);
        const FailureTable b = simulate_dataset(perm, r);
        for (int k = 0; k <= a.J(); ++k)
            CHECK(a.placebo()[static_cast<std::size_t>(k)] + a.vaccine()[static_cast<std::size_t>(k)] ==
                  b.placebo()[static_cast<std::size_t>(k)] + b.vaccine()[static_cast<std::size_t>(k)]);
    }
}

TEST_CASE("grid reports are reproducible and independent of thread count") {
    auto s = builtin_scenarios(6, 9);
    s.resize(3);
    GridOptions o;
    o.n_mc = 200;
    o.B = 9;
    o.threads = 1;
    const std::vector<std::string> m{"2phase", "Fisher", "BF2ph", "MBS"};
    const GridReport a = run_grid(s, m, o);
    o.threads = 3;
    const GridReport b = run_grid(s, m, o);
    CHECK(a.rejection_rate == b.rejection_rate);
    CHECK(a.scores == b.scores);
    CHECK(a.decisions == b.decisions);
    REQUIRE(a.rows.size() == 3);
    REQUIRE(a.cols == m);
    for (const auto& row : a.rejection_rate)
        for (double v : row) CHECK((v >= 0.0 && v <= 1.0));
}

TEST_CASE("external decisions and unknown methods") {
    auto s = builtin_scenarios(4, 1);
    s.resize(2);
    GridOptions o;
    o.external["GWJ"][s[0].label] = {1, 0, 1, 1};
    o.external["GWJ"][s[1].label] = {0, 0};
    const GridReport r = run_grid(s, {"GWJ"}, o);
    CHECK(r.rejection_rate[0][0] == doctest::Approx(0.75));
    CHECK(r.rejection_rate[1][0] == doctest::Approx(0.0));
    CHECK(r.errors[1][0] == 2);  // missing replicates count as errors
    CHECK_THROWS_AS(run_grid(s, {"leaky-test"}, o), InputError);
}

TEST_CASE("scenario names round trip") {
    for (QMode q : {QMode::uniform, QMode::insert_only}) CHECK(parse_q_mode(to_string(q)) == q);
    for (NullMode n : {NullMode::none, NullMode::all_or_none_null, NullMode::permuted_one_or_none})
        CHECK(parse_null_mode(to_string(n)) == n);
}

}  // TEST_SUITE
