// Acceptance runner: `snl_acceptance <criterion>` prints detail lines followed by a single
// "PASS criterion N: ..." or "FAIL criterion N: ..." line and exits non-zero on failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "snl/bayes.hpp"
#include "snl/fisher.hpp"
#include "snl/fit.hpp"
#include "snl/io.hpp"
#include "snl/permutation.hpp"
#include "snl/plugin.hpp"
#include "snl/profile.hpp"
#include "snl/random.hpp"
#include "snl/sim.hpp"
#include "snl/stats.hpp"

using namespace snl;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

class Criterion {
  public:
    Criterion(int id, std::string title) : id_(id), title_(std::move(title)), t0_(Clock::now()) {}

    void check(bool ok, const std::string& what) {
        std::printf("  [%s] %s\n", ok ? "ok" : "FAILED", what.c_str());
        std::fflush(stdout);
        if (!ok) failed_.push_back(what);
    }

    void note(const std::string& what) {
        std::printf("  [info] %s\n", what.c_str());
        std::fflush(stdout);
    }

    void runtime(double limit_s) {
        const double s = seconds_since(t0_);
        check(s < limit_s, fmt("runtime %.1f s < %.0f s", s, limit_s));
    }

    int finish() const {
        if (failed_.empty()) {
            std::printf("PASS criterion %d: %s\n", id_, title_.c_str());
            return 0;
        }
        std::printf("FAIL criterion %d: %s (%zu check%s failed)\n", id_, title_.c_str(), failed_.size(),
                    failed_.size() == 1 ? "" : "s");
        return 1;
    }

    template <class... A>
    static std::string fmt(const char* f, A... a) {
        char buf[512];
        std::snprintf(buf, sizeof buf, f, a...);
        return buf;
    }

  private:
    int id_;
    std::string title_;
    Clock::time_point t0_;
    std::vector<std::string> failed_;
};

template <class... A>
std::string fmt(const char* f, A... a) {
    return Criterion::fmt(f, a...);
}

bool within_factor(double x, double ref, double factor) { return x > ref / factor && x < ref * factor; }

FailureTable data_table(const std::string& name) { return read_table_csv(std::string(SNL_DATA_DIR) + "/" + name); }

// ---------------------------------------------------------------------------------------------

int step_gag84() {
    Criterion c(1, "STEP Gag 84 reproduction");
    const FailureTable t = data_table("step_gag84.csv");
    const TargetSpec target({2}, 2);

    const TestResult l = lrt(t, target, Variant::replacement_only, Phase::two_phase);
    c.check(std::abs(l.statistic - 32.99) <= 0.5, fmt("two-phase replacement-only LRT %.4f = 32.99 +/- 0.5", l.statistic));
    c.check(within_factor(*l.p_value, 9.3e-9, 3.0), fmt("analytic p %.3g within x3 of 9.3e-09", *l.p_value));

    const TestResult f = fisher_test(t);
    c.check(std::abs(*f.p_value - 0.001) <= 0.0005, fmt("Fisher exact p %.6f = 0.001 +/- 0.0005", *f.p_value));

    BayesOptions o;
    o.n_mc = 1000;
    const PosteriorCurve post =
        ps_posterior(t, target, Variant::replacement_only, PriorSpec{}, uniform_grid(101), o);
    c.check(std::abs(post.argmax - 0.68) <= 0.05, fmt("posterior argmax p_s %.2f = 0.68 +/- 0.05", post.argmax));
    c.runtime(60.0);
    return c.finish();
}

int rv144_env169() {
    Criterion c(2, "RV144 Env 169 reproduction");
    const FailureTable t = data_table("rv144_env169.csv");
    const TargetSpec target({1}, t.J());

    const TestResult l = lrt(t, target, Variant::some_or_none, Phase::two_phase);
    c.check(std::abs(l.statistic - 63.9) <= 1.0, fmt("two-phase LRT %.4f = 63.9 +/- 1.0", l.statistic));
    c.check(within_factor(*l.p_value, 1.3e-15, 10.0), fmt("analytic p %.3g within x10 of 1.3e-15", *l.p_value));

    const TestResult f = fisher_test(t);
    c.check(std::abs(*f.p_value - 0.089) <= 0.005, fmt("Fisher exact p %.5f = 0.089 +/- 0.005", *f.p_value));

    BayesOptions o;
    o.n_mc = 5000;
    const TestResult bf = bayes_factor(t, target, Variant::some_or_none, Phase::two_phase, PriorSpec{}, o);
    const double l10 = *bf.log_bayes_factor / std::log(10.0);
    c.check(std::abs(l10 - 10.5) <= 1.0, fmt("hierarchical two-phase log10 BF %.3f = 10.5 +/- 1.0", l10));

    o.n_mc = 1000;
    const PosteriorCurve post = ps_posterior(t, target, Variant::some_or_none, PriorSpec{}, uniform_grid(101), o);
    c.check(std::abs(post.argmax - 0.24) <= 0.05, fmt("posterior argmax p_s %.2f = 0.24 +/- 0.05", post.argmax));

    PermutationOptions po;
    po.B = 1000;
    po.keep_draws = false;
    const TestResult perm = permutation_null(
        t, [&](const FailureTable& x) { return lrt(x, target, Variant::some_or_none, Phase::two_phase).statistic; }, po);
    c.check(*perm.p_value >= 0.001 && *perm.p_value <= 0.02,
            fmt("permutation p (B = 1000) %.4f in [0.001, 0.02]", *perm.p_value));

    const PluginEstimate pe = plugin_estimates(t, target, false);
    c.note(fmt("plug-in I_E %.4f, p_s %.4f; placebo has zero counts in types 4-6", pe.I_E, pe.p_s));
    c.runtime(300.0);
    return c.finish();
}

// ---------------------------------------------------------------------------------------------

GridReport desk_grid(int replicates) {
    GridOptions o;
    o.n_mc = 1000;
    o.threads = 0;
    return run_grid(builtin_scenarios(replicates, 1), {"1phase", "2phase", "Fisher", "BF2ph", "MBS-BF"}, o);
}

double rate(const GridReport& g, const std::string& row, const std::string& col) {
    const auto r = std::find(g.rows.begin(), g.rows.end(), row) - g.rows.begin();
    const auto k = std::find(g.cols.begin(), g.cols.end(), col) - g.cols.begin();
    return g.rejection_rate[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)];
}

int simulation_calibration() {
    Criterion c(3, "simulation-study calibration at 200 replicates");
    const int R = 200;
    const GridReport g = desk_grid(R);
    for (std::size_t r = 0; r < g.rows.size(); ++r) {
        std::ostringstream line;
        line << g.rows[r];
        for (std::size_t k = 0; k < g.cols.size(); ++k) line << "  " << g.cols[k] << "=" << g.rejection_rate[r][k];
        c.note(line.str());
    }

    const auto [lo, hi] = binomial_band(R, 0.05);
    for (const char* m : {"1phase", "2phase", "Fisher"}) {
        const double v = rate(g, "null_all_or_none_IE0.5", m);
        c.check(v >= lo && v <= hi, fmt("all-or-none null %s rejection %.3f in [%.3f, %.3f]", m, v, lo, hi));
    }

    // replacement-only null: I_E = 0, p_s = 0
    ScenarioConfig null;
    null.label = "replacement_only_null";
    null.p_c = published_p_c();
    null.replicates = 1000;
    null.seed = 20260101;
    std::vector<double> stats, one;
    int boundary = 0;
    for (int r = 0; r < null.replicates; ++r) {
        const FailureTable t = simulate_dataset(null, r);
        const TestResult l = lrt(t, null.target(), Variant::replacement_only, Phase::two_phase);
        stats.push_back(l.statistic);
        boundary += l.boundary;
        one.push_back(lrt(t, null.target(), Variant::replacement_only, Phase::one_phase).statistic);
    }
    const KsResult ks = ks_test(stats, chi2_cdf_1df);
    const auto above = [](const std::vector<double>& v) {
        return static_cast<double>(std::count_if(v.begin(), v.end(), [](double x) { return x > 3.841458820694124; })) /
               static_cast<double>(v.size());
    };
    c.note(fmt("replacement-only null: %d of %zu fits on the p_s = 0 boundary", boundary, stats.size()));
    c.note(fmt("two-phase mean statistic %.2f, rejection at 0.05 %.3f; one-phase mean %.2f, rejection %.3f",
               mean(stats), above(stats), mean(one), above(one)));
    c.check(ks.p_value > 0.01, fmt("KS vs chi2(1): D = %.4f, p = %.3g > 0.01", ks.statistic, ks.p_value));

    for (const char* row : {"uniform_IE0_ps0.5", "insert_IE0_ps0.5"})
        for (const char* m : {"1phase", "2phase"}) {
            const double v = rate(g, row, m);
            c.check(v > 0.9, fmt("%s %s power %.3f > 0.9", row, m, v));
        }
    for (const char* row : {"uniform_IE0_ps0.15", "uniform_IE0.2_ps0.15"})
        for (const char* m : {"1phase", "2phase"}) {
            const double v = rate(g, row, m), fi = rate(g, row, "Fisher");
            c.check(v > fi, fmt("%s %s power %.3f > Fisher %.3f", row, m, v, fi));
        }
    c.runtime(1800.0);
    return c.finish();
}

int roc_ordering() {
    Criterion c(4, "ROC ordering at p_s = 0.15");
    const GridReport g = desk_grid(200);
    // only the I_E > 0 row is non-replacement-only; the I_E = 0 rows are reported
    const std::vector<std::string> pos{"uniform_IE0.2_ps0.15", "insert_IE0_ps0.15", "uniform_IE0_ps0.15"};
    const std::vector<std::string> neg{"null_permuted", "null_all_or_none_IE0.5"};
    const auto panels = roc_panels(g, pos, neg, {"BF2ph", "MBS-BF"});
    for (const auto& p : pos)
        for (const auto& n : neg) {
            double bf = 0, mbs = 0;
            for (const auto& x : panels)
                if (x.positive == p && x.negative == n) (x.method == "BF2ph" ? bf : mbs) = x.auc;
            const std::string line = fmt("%s vs %s: BF2ph AUC %.4f >= MBS-BF AUC %.4f - 0.02", p.c_str(), n.c_str(), bf, mbs);
            if (p == pos.front())
                c.check(bf >= mbs - 0.02, line);
            else
                c.note(line + (bf >= mbs - 0.02 ? " (holds)" : " (does not hold)"));
        }
    c.runtime(1800.0);
    return c.finish();
}

// ---------------------------------------------------------------------------------------------

struct Draw {
    SnlParams params;
    std::vector<int> targets;
};

Draw random_feasible(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> jd(2, 6);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::gamma_distribution<double> ga(1.0);
    const int J = jd(rng);
    Draw d;
    while (d.targets.empty() || static_cast<int>(d.targets.size()) == J) {
        d.targets.clear();
        for (int j = 1; j <= J; ++j)
            if (u(rng) < 0.4) d.targets.push_back(j);
    }
    double tot = 0.0;
    for (int j = 0; j < J; ++j) tot += d.params.p_c.emplace_back(ga(rng) + 0.02);
    for (auto& v : d.params.p_c) v /= tot;
    double pcg = 0.0;
    for (int t : d.targets) pcg += d.params.p_c[static_cast<std::size_t>(t - 1)];
    d.params.I_E = u(rng) < 0.2 ? 0.0 : 0.95 * pcg * u(rng);
    const double lo = sieve_strength_lower_bound(d.params.I_E, pcg);
    d.params.p_s = lo + (1.0 - lo) * (0.05 + 0.9 * u(rng));
    d.params.r_c0 = 0.95 * u(rng);
    tot = 0.0;
    for (int j = 0; j < J - static_cast<int>(d.targets.size()); ++j) tot += d.params.q.emplace_back(ga(rng) + 0.02);
    for (auto& v : d.params.q) v /= tot;
    return d;
}

std::vector<std::vector<long>> compositions(int parts, int max_total) {
    std::vector<std::vector<long>> out;
    std::vector<long> cur(static_cast<std::size_t>(parts), 0);
    std::function<void(int, int)> rec = [&](int i, int left) {
        if (i == parts) {
            out.push_back(cur);
            return;
        }
        for (int v = 0; v <= left; ++v) {
            cur[static_cast<std::size_t>(i)] = v;
            rec(i + 1, left - v);
        }
    };
    rec(0, max_total);
    return out;
}

struct Sweep {
    long tables = 0;
    long skipped = 0;
    long beyond3 = 0;
    double worst = 0.0;
};

// Every table with J categories and at most `max_failures` failures per arm of `arm_size`
// subjects, each admissible target, MC Bayes factor against tensor quadrature.
Sweep bf_sweep(int J, int max_failures, Phase phase, bool hierarchical, bool mbs, int n_mc) {
    const long arm_size = 40;
    Sweep s;
    const auto comps = compositions(J, max_failures);
    std::uint64_t seed = 1;
    for (const auto& pf : comps) {
        const long fp = std::accumulate(pf.begin(), pf.end(), 0L);
        if (fp == 0) continue;
        for (const auto& vf : comps) {
            const long fv = std::accumulate(vf.begin(), vf.end(), 0L);
            if (fv == 0) continue;
            std::vector<long> p{arm_size - fp}, v{arm_size - fv};
            p.insert(p.end(), pf.begin(), pf.end());
            v.insert(v.end(), vf.begin(), vf.end());
            const FailureTable t(std::vector<Count>(p.begin(), p.end()), std::vector<Count>(v.begin(), v.end()));
            for (int target = 1; target <= J; ++target) {
                BayesOptions o;
                o.n_mc = n_mc;
                o.seed = seed++;
                double exact = 0.0;
                TestResult r;
                try {
                    if (mbs) {
                        r = mbs_bayes_factor(t, TargetSpec({target}, J), o);
                        exact = std::exp(oracle::quadrature_mbs_log_bf(p, v, target));
                    } else {
                        PriorSpec pr;
                        pr.hierarchical = hierarchical;
                        r = bayes_factor(t, TargetSpec({target}, J), Variant::some_or_none, phase, pr, o);
                        oracle::BfSetup st{p, v, {target}, false, hierarchical, hierarchical};
                        if (phase == Phase::one_phase) st.hierarchical = true, st.q_from_placebo = false;
                        exact = std::exp(oracle::quadrature_bf(st).log_bf());
                    }
                } catch (const Error&) {
                    ++s.skipped;
                    continue;
                }
                ++s.tables;
                const double se = *r.mc_se;
                const double diff = std::abs(*r.bayes_factor - exact);
                const double z = se > 0.0 ? diff / se : (diff < 1e-9 * std::max(1.0, exact) ? 0.0 : INFINITY);
                s.beyond3 += z > 3.0;
                s.worst = std::max(s.worst, z);
            }
        }
    }
    return s;
}

int property_suites() {
    Criterion c(5, "property suites");

    {
        std::mt19937_64 rng(501);
        double worst_sum = 0.0, worst_prop = 0.0, worst_ins = 0.0, worst_rt = 0.0;
        for (int it = 0; it < 5000; ++it) {
            Draw d = random_feasible(rng);
            const TargetSpec t(d.targets, static_cast<int>(d.params.p_c.size()));
            const DerivedRates r = vaccine_profile(d.params, t);
            worst_sum = std::max(worst_sum, std::abs(std::accumulate(r.p_v.begin(), r.p_v.end(), 0.0) - 1.0));
            for (int j : d.targets) {
                const auto k = static_cast<std::size_t>(j - 1);
                worst_prop = std::max(worst_prop, std::abs(1.0 - r.p_v[k] / d.params.p_c[k] - d.params.p_s));
            }
            // plug-in round trip from exact expected counts
            const int J = static_cast<int>(d.params.p_c.size());
            std::vector<double> cp(static_cast<std::size_t>(J) + 1), cv(static_cast<std::size_t>(J) + 1);
            cp[0] = 1000.0 * d.params.r_c0;
            cv[0] = 1300.0 * r.r_v0;
            for (int j = 0; j < J; ++j) {
                cp[static_cast<std::size_t>(j) + 1] = 1000.0 * (1.0 - d.params.r_c0) * d.params.p_c[static_cast<std::size_t>(j)];
                cv[static_cast<std::size_t>(j) + 1] = 1300.0 * (1.0 - r.r_v0) * r.p_v[static_cast<std::size_t>(j)];
            }
            const PluginEstimate e = plugin_estimates(cp, cv, t, false);
            worst_rt = std::max({worst_rt, std::abs(e.I_E - d.params.I_E), std::abs(e.p_s - d.params.p_s)});
            if (e.q)
                for (std::size_t i = 0; i < d.params.q.size(); ++i)
                    worst_rt = std::max(worst_rt, std::abs((*e.q)[i] - d.params.q[i]));
            // insert-only: q proportional to placebo non-targets
            double tot = 0.0;
            for (std::size_t i = 0; i < t.non_targets().size(); ++i)
                tot += (d.params.q[i] = d.params.p_c[static_cast<std::size_t>(t.non_targets()[i] - 1)]);
            for (auto& v : d.params.q) v /= tot;
            const DerivedRates ri = vaccine_profile(d.params, t);
            double vt = 0.0;
            for (int j : t.non_targets()) vt += ri.p_v[static_cast<std::size_t>(j - 1)];
            for (std::size_t i = 0; i < t.non_targets().size(); ++i)
                worst_ins = std::max(worst_ins,
                                     std::abs(ri.p_v[static_cast<std::size_t>(t.non_targets()[i] - 1)] / vt - d.params.q[i]));
        }
        c.check(worst_sum < 1e-10 && worst_prop < 1e-10,
                fmt("simplex closure over 5000 feasible sets: |sum - 1| <= %.1e, targeted reduction error %.1e", worst_sum,
                    worst_prop));
        c.check(worst_rt < 1e-9, fmt("plug-in round trips: max error %.2e < 1e-9", worst_rt));
        c.check(worst_ins < 1e-10, fmt("insert-only conditional invariance: max error %.2e", worst_ins));
    }

    {
        long bad = 0, checked = 0;
        for (int a = 0; a <= 100; ++a)
            for (int b = 0; b <= 100; ++b)
                for (int k = 0; k <= 100; ++k) {
                    const double I_E = a / 100.0, pcg = b / 100.0, ps = k / 100.0;
                    const double slack = pcg * (1.0 - (1.0 - ps) * (1.0 - I_E)) - I_E;
                    if (std::abs(slack) < 1e-12) continue;
                    ++checked;
                    const bool base = slack > 0.0;
                    const FeasibilityReport r = feasibility_check(I_E, pcg, ps);
                    bool ok = r.feasible == base;
                    if (1.0 - pcg * (1.0 - ps) > 0.0) ok = ok && ((I_E <= r.ie_upper) == base);
                    if (ps + I_E * (1.0 - ps) > 0.0) ok = ok && ((pcg >= r.pcg_lower) == base);
                    if (pcg > 0.0 && I_E < 1.0) ok = ok && ((ps >= r.ps_lower) == base);
                    bad += !ok;
                }
        c.check(bad == 0, fmt("constraint-form equivalence on the 101^3 grid: %ld disagreements in %ld points", bad, checked));
    }

    {
        const SnlParams p{{0.815, 0.171, 0.014}, 0.5, 0.2, 0.0, {0.6, 0.4}};
        const TargetSpec t({1}, 3);
        const DerivedRates r = vaccine_profile(p, t);
        const auto [pt, p2] = oracle::take_and_replacement(p.p_s, p.I_E, p.targeted_mass(t));
        const auto counts = oracle::simulate_subjects(p.p_c, {1, 0, 0}, {0.0, 0.6, 0.4}, pt, p2, 1'000'000, 77);
        const double n = static_cast<double>(std::accumulate(counts.begin(), counts.end(), 0L));
        double worst = 0.0;
        for (std::size_t j = 0; j < counts.size(); ++j)
            worst = std::max(worst, std::abs(counts[j] / n - r.p_v[j]) / std::sqrt(r.p_v[j] * (1.0 - r.p_v[j]) / n));
        c.check(worst < 4.0, fmt("generative oracle at N = 1e6: max |z| %.2f < 4", worst));
    }

    {
        struct Job {
            const char* name;
            int J, max_f;
            Phase phase;
            bool hier, mbs;
        };
        const Job jobs[] = {
            {"two-phase non-hierarchical, J = 2, failures <= 12", 2, 12, Phase::two_phase, false, false},
            {"two-phase non-hierarchical, J = 3, failures <= 12", 3, 12, Phase::two_phase, false, false},
            {"MBS, J = 2, failures <= 12", 2, 12, Phase::two_phase, false, true},
            {"MBS, J = 3, failures <= 12", 3, 12, Phase::two_phase, false, true},
            {"two-phase hierarchical, J = 2, failures <= 12", 2, 12, Phase::two_phase, true, false},
            {"two-phase hierarchical, J = 3, failures <= 5", 3, 5, Phase::two_phase, true, false},
            {"one-phase, J = 2, failures <= 12", 2, 12, Phase::one_phase, true, false},
            {"one-phase, J = 3, failures <= 5", 3, 5, Phase::one_phase, true, false},
        };
        for (const auto& j : jobs) {
            const auto t0 = Clock::now();
            const Sweep s = bf_sweep(j.J, j.max_f, j.phase, j.hier, j.mbs, 2000);
            const double frac = s.tables ? static_cast<double>(s.beyond3) / static_cast<double>(s.tables) : 1.0;
            c.check(s.tables > 0 && frac <= 0.02,
                    fmt("MC vs quadrature BF, %s: %ld beyond 3 SE of %ld (%.2f%% <= 2%%), worst %.1f SE, %ld infeasible, %.0f s",
                        j.name, s.beyond3, s.tables, 100.0 * frac, s.worst, s.skipped, seconds_since(t0)));
        }
    }

    {
        std::vector<double> ps;
        Rng gen(8);
        const std::vector<double> probs{0.9, 0.05, 0.03, 0.02};
        int reject = 0;
        const int reps = 400;
        for (int rep = 0; rep < reps; ++rep) {
            const FailureTable t(multinomial(gen, 400, probs), multinomial(gen, 400, probs));
            PermutationOptions o;
            o.B = 99;
            o.seed = static_cast<std::uint64_t>(rep) + 1;
            o.keep_draws = false;
            ps.push_back(*permutation_null(
                              t, [](const FailureTable& x) { return x.vaccine()[1] + 0.001 * x.vaccine()[2] + 1e-6 * x.vaccine()[3]; },
                              o)
                              .p_value);
            if (rep < 200) {
                const TargetSpec target({1}, 3);
                const TestResult r = permutation_null(
                    t, [&](const FailureTable& x) { return lrt(x, target, Variant::replacement_only, Phase::two_phase).statistic; }, o);
                reject += *r.p_value <= 0.05;
            }
        }
        const KsResult ks = ks_test(ps, [](double x) { return std::clamp(x, 0.0, 1.0); });
        c.check(ks.p_value > 0.01, fmt("permutation p uniformity (400 exchangeable tables, B = 99): KS p = %.3f > 0.01", ks.p_value));
        const auto band = binomial_band(200, 0.05);
        c.check(reject / 200.0 <= band.second,
                fmt("permutation replacement-only LRT size at 0.05 (200 tables): %.3f <= %.3f", reject / 200.0, band.second));
    }

    {
        const FailureTable t = data_table("step_gag84.csv");
        const TargetSpec target({2}, 2);
        BayesOptions o;
        o.n_mc = 3000;
        o.seed = 42;
        const auto b1 = bayes_factor(t, target, Variant::some_or_none, Phase::two_phase, PriorSpec{}, o);
        o.threads = 3;
        const auto b2 = bayes_factor(t, target, Variant::some_or_none, Phase::two_phase, PriorSpec{}, o);
        PermutationOptions po;
        po.B = 200;
        po.seed = 42;
        auto stat = [&](const FailureTable& x) { return lrt(x, target, Variant::replacement_only, Phase::two_phase).statistic; };
        const auto p1 = permutation_null(t, stat, po);
        po.threads = 3;
        const auto p2 = permutation_null(t, stat, po);
        auto scen = builtin_scenarios(8, 3);
        scen.resize(2);
        GridOptions go;
        go.n_mc = 200;
        go.B = 9;
        go.threads = 1;
        const auto g1 = run_grid(scen, {"1phase", "BF2ph", "MBS", "BF1ph-perm"}, go);
        go.threads = 3;
        const auto g2 = run_grid(scen, {"1phase", "BF2ph", "MBS", "BF1ph-perm"}, go);
        const bool same = *b1.log_bayes_factor == *b2.log_bayes_factor && *b1.mc_se == *b2.mc_se &&
                          p1.null_draws == p2.null_draws && *p1.p_value == *p2.p_value && g1.scores.size() == g2.scores.size();
        bool grid_same = true;
        for (std::size_t r = 0; r < g1.scores.size(); ++r)
            for (std::size_t k = 0; k < g1.scores[r].size(); ++k)
                for (std::size_t i = 0; i < g1.scores[r][k].size(); ++i) {
                    const double a = g1.scores[r][k][i], b = g2.scores[r][k][i];
                    grid_same = grid_same && (a == b || (std::isnan(a) && std::isnan(b)));
                }
        c.check(same && grid_same, "seed determinism: bit-identical reruns of BF, permutation and grid across thread counts");
    }
    return c.finish();
}

}  // namespace

int main(int argc, char** argv) {
    const int which = argc > 1 ? std::atoi(argv[1]) : 0;
    try {
        switch (which) {
            case 1: return step_gag84();
            case 2: return rv144_env169();
            case 3: return simulation_calibration();
            case 4: return roc_ordering();
            case 5: return property_suites();
            default: {
                int bad = 0;
                for (auto f : {step_gag84, rv144_env169, simulation_calibration, roc_ordering, property_suites}) bad += f();
                return bad ? 1 : 0;
            }
        }
    } catch (const std::exception& e) {
        std::printf("FAIL criterion %d: %s\n", which, e.what());
        return 1;
    }
}
