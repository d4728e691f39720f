#include "snl/sim.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <optional>
#include <sstream>

#include "snl/bayes.hpp"
#include "snl/fisher.hpp"
#include "snl/fit.hpp"
#include "snl/parallel.hpp"
#include "snl/permutation.hpp"
#include "snl/profile.hpp"
#include "snl/random.hpp"
#include "snl/stats.hpp"

namespace snl {

std::string to_string(QMode mode) { return mode == QMode::uniform ? "uniform" : "insert_only"; }

std::string to_string(NullMode mode) {
    switch (mode) {
        case NullMode::none: return "none";
        case NullMode::all_or_none_null: return "all_or_none_null";
        case NullMode::permuted_one_or_none: return "permuted_one_or_none";
    }
    return "unknown";
}

QMode parse_q_mode(const std::string& text) {
    if (text == "uniform") return QMode::uniform;
    if (text == "insert_only") return QMode::insert_only;
    throw InputError("unknown q_mode '" + text + "'");
}

NullMode parse_null_mode(const std::string& text) {
    if (text == "none") return NullMode::none;
    if (text == "all_or_none_null") return NullMode::all_or_none_null;
    if (text == "permuted_one_or_none") return NullMode::permuted_one_or_none;
    throw InputError("unknown null_mode '" + text + "'");
}

TargetSpec ScenarioConfig::target() const { return TargetSpec(targets, static_cast<int>(p_c.size())); }

SnlParams ScenarioConfig::params() const {
    const TargetSpec t = target();
    SnlParams p;
    p.p_c = normalized_simplex(p_c, "p_c");
    p.p_s = null_mode == NullMode::all_or_none_null ? 0.0 : p_s;
    p.I_E = I_E;
    p.r_c0 = r_c0;
    const auto& others = t.non_targets();
    if (q_mode == QMode::uniform) {
        p.q.assign(others.size(), 1.0 / static_cast<double>(others.size()));
    } else {
        double tot = 0.0;
        for (int j : others) tot += p.p_c[static_cast<std::size_t>(j - 1)];
        for (int j : others) p.q.push_back(p.p_c[static_cast<std::size_t>(j - 1)] / tot);
    }
    if (null_mode == NullMode::all_or_none_null) {
        if (!(I_E >= 0.0 && I_E < 1.0)) throw InputError("I_E must lie in [0, 1)");
        return p;
    }
    return validated(p, t);
}

void ScenarioConfig::validate() const {
    if (replicates < 1) throw InputError("scenario '" + label + "': replicates must be at least 1");
    if (n_p < 1 || n_v < 1) throw InputError("scenario '" + label + "': arm sizes must be positive");
    if (!(r_c0 >= 0.0 && r_c0 < 1.0)) throw InputError("scenario '" + label + "': r_c0 must lie in [0, 1)");
    try {
        (void)params();
    } catch (const InfeasibleError& e) {
        throw InfeasibleError("scenario '" + label + "'", e.report());
    }
}

std::vector<double> published_p_c() {
    return normalized_simplex({0.815, 0.171, 0.0135, 0.0005, 0.000006}, "p_c", 1e-4);
}

std::vector<ScenarioConfig> builtin_scenarios(int replicates, std::uint64_t seed) {
    std::vector<ScenarioConfig> out;
    auto add = [&](std::string label, double I_E, double p_s, QMode q, NullMode null) {
        ScenarioConfig c;
        c.label = std::move(label);
        c.p_c = published_p_c();
        c.I_E = I_E;
        c.p_s = p_s;
        c.q_mode = q;
        c.null_mode = null;
        c.replicates = replicates;
        c.seed = derive_seed(seed, 0x5ce, out.size());
        out.push_back(std::move(c));
    };
    for (double ps : {0.15, 0.25, 0.5}) {
        std::ostringstream l;
        l << "uniform_IE0_ps" << ps;
        add(l.str(), 0.0, ps, QMode::uniform, NullMode::none);
    }
    add("uniform_IE0.2_ps0.15", 0.2, 0.15, QMode::uniform, NullMode::none);
    for (double ps : {0.25, 0.5}) {
        std::ostringstream l;
        l << "uniform_IE0.5_ps" << ps;
        add(l.str(), 0.5, ps, QMode::uniform, NullMode::none);
    }
    for (double ps : {0.15, 0.25, 0.5}) {
        std::ostringstream l;
        l << "insert_IE0_ps" << ps;
        add(l.str(), 0.0, ps, QMode::insert_only, NullMode::none);
    }
    add("null_all_or_none_IE0.5", 0.5, 0.0, QMode::uniform, NullMode::all_or_none_null);
    add("null_permuted", 0.5, 0.5, QMode::uniform, NullMode::permuted_one_or_none);
    for (const auto& c : out) c.validate();
    return out;
}

FailureTable simulate_dataset(const ScenarioConfig& cfg, int replicate_index) {
    cfg.validate();
    const SnlParams p = cfg.params();
    const TargetSpec t = cfg.target();
    const std::size_t J = p.p_c.size();

    std::vector<double> p_v;
    double r_v0 = 0.0;
    if (cfg.null_mode == NullMode::all_or_none_null) {
        p_v = p.p_c;
        r_v0 = 1.0 - (1.0 - p.I_E) * (1.0 - p.r_c0);
    } else {
        const DerivedRates rates = vaccine_profile(p, t);
        p_v = rates.p_v;
        r_v0 = rates.r_v0;
    }

    Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(replicate_index), 0x51));
    std::vector<double> cat_p(J + 1), cat_v(J + 1);
    cat_p[0] = p.r_c0;
    cat_v[0] = r_v0;
    for (std::size_t k = 0; k < J; ++k) {
        cat_p[k + 1] = (1.0 - p.r_c0) * p.p_c[k];
        cat_v[k + 1] = (1.0 - r_v0) * p_v[k];
    }
    FailureTable table(multinomial(rng, cfg.n_p, cat_p), multinomial(rng, cfg.n_v, cat_v));
    if (cfg.null_mode == NullMode::permuted_one_or_none) return permute_table(table, rng);
    return table;
}

const std::vector<std::string>& known_methods() {
    static const std::vector<std::string> names{"1phase", "2phase",     "BF1ph", "BF2ph", "MBS-BF",
                                                "BF1ph-perm", "BF2ph-perm", "MBS",   "Fisher"};
    return names;
}

namespace {

struct Evaluation {
    double score = 0.0;
    bool reject = false;
};

class ReplicateRunner {
  public:
    ReplicateRunner(const FailureTable& table, const TargetSpec& target, const GridOptions& opt, std::uint64_t seed)
        : table_(table), target_(target), opt_(opt), seed_(seed) {}

    Evaluation run(const std::string& method) {
        if (method == "1phase" || method == "2phase") {
            FitOptions fo;
            fo.starts = opt_.fit_starts;
            fo.seed = derive_seed(seed_, 0xf17);
            const TestResult r = lrt(table_, target_, Variant::some_or_none,
                                     method == "1phase" ? Phase::one_phase : Phase::two_phase, fo);
            return {r.statistic, *r.p_value <= opt_.alpha};
        }
        if (method == "Fisher") {
            FisherOptions fo;
            fo.seed = derive_seed(seed_, 0xf15);
            const FisherResult r = fisher_exact(ContingencySlice::failures_of(table_), fo);
            return {1.0 - r.p_value, r.p_value <= opt_.alpha};
        }
        std::string base = method;
        bool perm = false;
        if (method == "MBS") {
            base = "MBS-BF";
            perm = true;
        } else if (method.size() > 5 && method.compare(method.size() - 5, 5, "-perm") == 0) {
            base = method.substr(0, method.size() - 5);
            perm = true;
        }
        if (base != "BF1ph" && base != "BF2ph" && base != "MBS-BF") throw InputError("unknown method '" + method + "'");
        const double observed = log10_bf(base, table_);
        if (!perm) return {observed, observed > std::log10(opt_.bf_threshold)};

        PermutationOptions po;
        po.B = opt_.B;
        po.seed = derive_seed(seed_, 0x9e7, stable_hash(base));
        po.threads = 1;
        po.keep_draws = false;
        const TestResult r = permutation_null(table_, [&](const FailureTable& t) { return log10_bf(base, t); }, po);
        return {observed, *r.p_value <= opt_.alpha};
    }

  private:
    double log10_bf(const std::string& base, const FailureTable& t) {
        BayesOptions bo;
        bo.n_mc = opt_.n_mc;
        bo.seed = derive_seed(seed_, 0xbf, stable_hash(base));
        if (&t == &table_) {
            auto it = cache_.find(base);
            if (it != cache_.end()) return it->second;
        }
        PriorSpec priors;
        double v = 0.0;
        if (base == "BF1ph")
            v = bayes_factor(t, target_, Variant::some_or_none, Phase::one_phase, priors, bo).statistic;
        else if (base == "BF2ph")
            v = bayes_factor(t, target_, Variant::some_or_none, Phase::two_phase, priors, bo).statistic;
        else
            v = mbs_bayes_factor(t, target_, bo).statistic;
        if (&t == &table_) cache_[base] = v;
        return v;
    }

    const FailureTable& table_;
    const TargetSpec& target_;
    const GridOptions& opt_;
    std::uint64_t seed_;
    std::map<std::string, double> cache_;
};

}  // namespace

GridReport run_grid(const std::vector<ScenarioConfig>& scenarios, const std::vector<std::string>& methods,
                    const GridOptions& options, const std::function<void(const std::string&)>& progress) {
    for (const auto& m : methods) {
        const auto& known = known_methods();
        if (std::find(known.begin(), known.end(), m) == known.end() && !options.external.count(m))
            throw InputError("unknown method '" + m + "'");
    }
    for (const auto& s : scenarios) s.validate();

    GridReport rep;
    rep.cols = methods;
    const std::size_t M = methods.size();
    for (std::size_t row = 0; row < scenarios.size(); ++row) {
        const ScenarioConfig& cfg = scenarios[row];
        const TargetSpec target = cfg.target();
        const auto R = static_cast<std::size_t>(cfg.replicates);
        rep.rows.push_back(cfg.label);
        rep.replicates.push_back(cfg.replicates);
        rep.seeds.push_back(cfg.seed);
        std::vector<std::vector<double>> scores(M, std::vector<double>(R, std::nan("")));
        std::vector<std::vector<int>> decisions(M, std::vector<int>(R, 0));
        std::vector<std::vector<char>> failed(M, std::vector<char>(R, 0));

        parallel_for(
            R,
            [&](std::size_t r) {
                const FailureTable table = simulate_dataset(cfg, static_cast<int>(r));
                ReplicateRunner runner(table, target, options, derive_seed(options.seed, row, r));
                for (std::size_t m = 0; m < M; ++m) {
                    const auto ext = options.external.find(methods[m]);
                    if (ext != options.external.end()) {
                        const auto col = ext->second.find(cfg.label);
                        if (col == ext->second.end() || col->second.size() <= r) {
                            failed[m][r] = 1;
                        } else {
                            decisions[m][r] = col->second[r] != 0;
                            scores[m][r] = decisions[m][r];
                        }
                        continue;
                    }
                    try {
                        const Evaluation e = runner.run(methods[m]);
                        scores[m][r] = e.score;
                        decisions[m][r] = e.reject ? 1 : 0;
                    } catch (const Error&) {
                        failed[m][r] = 1;
                    }
                }
            },
            options.threads);

        std::vector<double> rates(M);
        std::vector<int> errs(M);
        for (std::size_t m = 0; m < M; ++m) {
            int rejects = 0, e = 0;
            for (std::size_t r = 0; r < R; ++r) {
                rejects += decisions[m][r];
                e += failed[m][r];
            }
            rates[m] = static_cast<double>(rejects) / static_cast<double>(R);
            errs[m] = e;
        }
        rep.rejection_rate.push_back(std::move(rates));
        rep.errors.push_back(std::move(errs));
        rep.scores.push_back(std::move(scores));
        rep.decisions.push_back(std::move(decisions));
        if (progress) progress(cfg.label);
    }
    return rep;
}

std::vector<RocPanel> roc_panels(const GridReport& report, const std::vector<std::string>& positives,
                                 const std::vector<std::string>& negatives, const std::vector<std::string>& methods) {
    auto index_of = [](const std::vector<std::string>& v, const std::string& name) {
        const auto it = std::find(v.begin(), v.end(), name);
        if (it == v.end()) throw InputError("'" + name + "' is not in the grid report");
        return static_cast<std::size_t>(it - v.begin());
    };
    auto finite = [](const std::vector<double>& s) {
        std::vector<double> out;
        for (double v : s)
            if (!std::isnan(v)) out.push_back(v);
        return out;
    };
    std::vector<RocPanel> out;
    for (const auto& pos : positives)
        for (const auto& neg : negatives)
            for (const auto& m : methods) {
                const std::size_t c = index_of(report.cols, m);
                const auto a = finite(report.scores[index_of(report.rows, pos)][c]);
                const auto b = finite(report.scores[index_of(report.rows, neg)][c]);
                RocPanel p{pos, neg, m, 0.5, static_cast<int>(a.size()), static_cast<int>(b.size())};
                if (!a.empty() && !b.empty()) p.auc = roc_auc(a, b);
                out.push_back(std::move(p));
            }
    return out;
}

}  // namespace snl
