#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "snl/fisher.hpp"
#include "snl/io.hpp"

using namespace snl;

TEST_SUITE("fisher") {

TEST_CASE("2 x 2 tables with row margins up to 20 match direct hypergeometric enumeration") {
    long n = 0;
    double worst = 0.0;
    for (long a = 0; a <= 20; ++a)
        for (long b = 0; a + b <= 20; ++b)
            for (long c = 0; c <= 20; ++c)
                for (long d = 0; c + d <= 20; ++d) {
                    if (a + b == 0 || c + d == 0) continue;
                    const FisherResult r = fisher_exact(ContingencySlice{{a, b}, {c, d}});
                    worst = std::max(worst, std::abs(r.p_value - oracle::fisher_2x2(a, b, c, d)));
                    ++n;
                }
    CHECK(n > 50000);
    CHECK(worst < 1e-10);
}

TEST_CASE("enumerated probabilities sum to one") {
    std::mt19937_64 rng(41);
    std::uniform_int_distribution<int> cnt(0, 9);
    for (int it = 0; it < 60; ++it) {
        ContingencySlice s;
        const int J = 2 + it % 4;
        for (int j = 0; j < J; ++j) {
            s.placebo.push_back(cnt(rng));
            s.vaccine.push_back(cnt(rng));
        }
        s.placebo[0] += 1;
        s.vaccine[0] += 1;
        const FisherResult r = fisher_exact(s);
        REQUIRE(r.exact);
        CHECK(std::abs(r.total_probability - 1.0) < 1e-10);
        CHECK(r.p_value > 0.0);
        CHECK(r.p_value <= 1.0);
    }
}

TEST_CASE("published tables") {
    const FailureTable step = read_table_csv(std::string(SNL_DATA_DIR) + "/step_gag84.csv");
    CHECK(fisher_test(step).p_value.value() == doctest::Approx(0.001).epsilon(0.5));
    const FailureTable rv = read_table_csv(std::string(SNL_DATA_DIR) + "/rv144_env169.csv");
    const FisherResult r = fisher_exact(ContingencySlice::failures_of(rv));
    CHECK(r.exact);
    CHECK(r.p_value == doctest::Approx(0.089).epsilon(0.005 / 0.089));
}

TEST_CASE("large tables fall back to seeded Monte Carlo") {
    const ContingencySlice s{{300, 200, 100}, {280, 230, 90}};
    FisherOptions o;
    o.n_mc = 20000;
    const FisherResult a = fisher_exact(s, o);
    CHECK_FALSE(a.exact);
    REQUIRE(a.mc_se.has_value());
    const FisherResult b = fisher_exact(s, o);
    CHECK(a.p_value == b.p_value);
    // same answer as exact enumeration on the halved table, within MC error, is not expected;
    // only p in (0, 1] and a plausible standard error
    CHECK(a.p_value > 0.0);
    CHECK(*a.mc_se < 0.01);
}

TEST_CASE("empty columns are dropped") {
    const FisherResult a = fisher_exact(ContingencySlice{{3, 0, 5}, {6, 0, 1}});
    const FisherResult b = fisher_exact(ContingencySlice{{3, 5}, {6, 1}});
    CHECK(a.p_value == doctest::Approx(b.p_value).epsilon(1e-12));
}

}  // TEST_SUITE
