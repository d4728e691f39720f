#include "snl/bayes.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/special_functions/beta.hpp>

#include "snl/likelihood.hpp"
#include "snl/parallel.hpp"
#include "snl/profile.hpp"
#include "snl/random.hpp"

namespace snl {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::uint64_t kAltStream = 0xb4f;
constexpr std::uint64_t kPosteriorStream = 0x9057;
constexpr std::uint64_t kMbsStream = 0x3b5;
constexpr std::uint64_t kScanStream = 0x5ca7;

double log_sum_exp(std::span<const double> v) {
    double mx = kNegInf;
    for (double x : v) mx = std::max(mx, x);
    if (!std::isfinite(mx)) return mx;
    double s = 0.0;
    for (double x : v) s += std::exp(x - mx);
    return mx + std::log(s);
}

std::vector<double> concentration(const std::vector<double>& given, std::size_t n, const char* name) {
    if (given.empty()) return std::vector<double>(n, 1.0);
    if (given.size() != n) throw InputError(std::string(name) + " concentration has the wrong length");
    for (double a : given)
        if (!(a > 0.0) || !std::isfinite(a)) throw InputError(std::string(name) + " concentrations must be positive");
    return given;
}

double log_dirichlet_multinomial(std::span<const Count> counts, std::span<const double> alpha) {
    double A = 0.0, N = 0.0, out = 0.0;
    for (std::size_t k = 0; k < counts.size(); ++k) {
        const double n = static_cast<double>(counts[k]);
        A += alpha[k];
        N += n;
        out += std::lgamma(alpha[k] + n) - std::lgamma(alpha[k]);
    }
    return out + std::lgamma(A) - std::lgamma(A + N);
}

bool feasible_lo(double lo) { return lo < 1.0 - 1e-12; }

double log_dirichlet_density(std::span<const double> x, std::span<const double> alpha) {
    double A = 0.0, out = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        A += alpha[k];
        out += (alpha[k] - 1.0) * std::log(x[k]) - std::lgamma(alpha[k]);
    }
    return out + std::lgamma(A);
}

struct Nuisance {
    std::vector<double> p_c;
    std::vector<double> q;
    double p_cG = 0.0;
    double lo = 0.0;  // feasible p_s lower bound; >= 1 means no feasible p_s
};

class NuisanceSampler {
  public:
    NuisanceSampler(const FailureTable& table, const TargetSpec& target, Variant variant, Phase phase,
                    const PriorSpec& priors, const BayesOptions& options)
        : table_(table), target_(target), insert_only_(variant == Variant::insert_only) {
        if (table.J() != target.J()) throw InputError("table and target disagree on J");
        if (variant == Variant::all_or_none) throw UnsupportedError("the all-or-none model is the Bayes-factor null");
        if (table.vaccine_failure_total() <= 0 || table.placebo_failure_total() <= 0)
            throw DegenerateDataError("Bayes factors need at least one failure in each arm");
        J_ = static_cast<std::size_t>(target.J());
        m_ = target.non_targets().size();
        I_E_ = analysis_efficacy(table, variant, options);
        alpha_ = concentration(priors.p_c_concentration, J_, "p_c");
        beta_ = concentration(priors.q_concentration, m_, "q");
        const auto fp = table.placebo_failures();
        const auto fv = table.vaccine_failures();
        if (phase == Phase::two_phase && !priors.hierarchical) {
            fixed_p_c_ = placebo_plugin_pc(table, options.zero_cell);
            log_m0_ = log_multinomial(fv, fixed_p_c_, false);
            return;
        }
        for (std::size_t k = 0; k < J_; ++k) alpha_[k] += static_cast<double>(fp[k]);
        if (phase == Phase::two_phase) {
            for (std::size_t i = 0; i < m_; ++i)
                beta_[i] += static_cast<double>(fp[static_cast<std::size_t>(target.non_targets()[i] - 1)]);
        }
        log_m0_ = log_dirichlet_multinomial(fv, alpha_);
        // p_c proposal: even mixture of the prior and the null posterior, both restricted to the
        // feasible region p_cG > I_E (Beta aggregate by inversion, Dirichlet within groups)
        std::vector<double> post(alpha_);
        for (std::size_t k = 0; k < J_; ++k) post[k] += static_cast<double>(fv[k]);
        prior_ = component(alpha_);
        post_ = component(post);
        if (!std::isfinite(post_.log_tail)) post_weight_ = 0.0;
    }

    double I_E() const { return I_E_; }

    /// log prior probability that p_c admits a feasible p_s
    double log_feasible_mass() const {
        if (!fixed_p_c_.empty()) return feasible_lo(typical_lo()) ? 0.0 : kNegInf;
        return prior_.log_tail;
    }

    /// targeted mass at the fixed p_c, or its prior mean
    double typical_p_cG() const {
        if (!fixed_p_c_.empty()) {
            double g = 0.0;
            for (int t : target_.targets()) g += fixed_p_c_[static_cast<std::size_t>(t - 1)];
            return g;
        }
        return prior_.a_G / (prior_.a_G + prior_.a_R);
    }

    double typical_lo() const {
        const double g = typical_p_cG();
        return g > 0.0 ? sieve_strength_lower_bound(I_E_, g) : std::numeric_limits<double>::infinity();
    }

    void draw(Rng& rng, Nuisance& out) const {
        out.p_c.resize(J_);
        if (fixed_p_c_.empty())
            draw_p_c(rng, uniform01(rng) < post_weight_ ? post_ : prior_, out.p_c);
        else
            out.p_c = fixed_p_c_;
        out.p_cG = 0.0;
        for (int t : target_.targets()) out.p_cG += out.p_c[static_cast<std::size_t>(t - 1)];
        out.q.resize(m_);
        if (insert_only_) {
            double tot = 0.0;
            for (std::size_t i = 0; i < m_; ++i)
                tot += (out.q[i] = out.p_c[static_cast<std::size_t>(target_.non_targets()[i] - 1)]);
            for (auto& v : out.q) v = tot > 0.0 ? v / tot : 1.0 / static_cast<double>(m_);
        } else {
            dirichlet(rng, beta_, out.q);
        }
        out.lo = out.p_cG > 0.0 ? sieve_strength_lower_bound(I_E_, out.p_cG) : std::numeric_limits<double>::infinity();
    }

    double log_lik(const Nuisance& nz, double p_s, std::vector<double>& p_v) const {
        p_v.resize(J_);
        vaccine_failure_profile(nz.p_c, p_s, I_E_, nz.q, target_, p_v);
        return log_multinomial(table_.vaccine_failures(), p_v, false);
    }

    /// log of L1 (pi_F / g) / m0 at a proposal draw, where pi_F is the p_c prior restricted to the
    /// feasible region and m0 the null marginal; its mean is the Bayes factor.
    double log_ratio(const Nuisance& nz, double p_s, std::vector<double>& p_v) const {
        const double l1 = log_lik(nz, p_s, p_v);
        if (!fixed_p_c_.empty()) return l1 - log_m0_;
        const double a = log_dirichlet_density(nz.p_c, prior_.alpha) - prior_.log_tail;
        if (post_weight_ == 0.0) return l1 - log_m0_;
        const double b = log_dirichlet_density(nz.p_c, post_.alpha) - post_.log_tail;
        const double mx = std::max(a, b);
        const double log_g = mx + std::log((1.0 - post_weight_) * std::exp(a - mx) + post_weight_ * std::exp(b - mx));
        return l1 + a - log_g - log_m0_;
    }

  private:
    struct Component {
        std::vector<double> alpha;
        std::vector<double> alpha_targets, alpha_rest;
        double a_G = 0.0, a_R = 0.0;
        double log_tail = 0.0;  // log P(p_cG > I_E)
        double tail = 1.0;
    };

    Component component(const std::vector<double>& alpha) const {
        Component c;
        c.alpha = alpha;
        for (std::size_t k = 0; k < J_; ++k) {
            if (target_.contains(static_cast<int>(k) + 1)) {
                c.alpha_targets.push_back(alpha[k]);
                c.a_G += alpha[k];
            } else {
                c.alpha_rest.push_back(alpha[k]);
                c.a_R += alpha[k];
            }
        }
        if (I_E_ > 0.0) {
            c.tail = boost::math::ibetac(c.a_G, c.a_R, I_E_);
            c.log_tail = c.tail > 0.0 ? std::log(c.tail) : kNegInf;
        }
        return c;
    }

    void draw_p_c(Rng& rng, const Component& c, std::vector<double>& p_c) const {
        double g = 0.0;
        if (I_E_ > 0.0) {
            const double q = (1.0 - uniform01(rng)) * c.tail;
            g = boost::math::ibetac_inv(c.a_G, c.a_R, q);
        } else {
            const std::array<double, 2> ab{c.a_G, c.a_R};
            std::array<double, 2> w{};
            dirichlet(rng, ab, w);
            g = w[0];
        }
        std::vector<double> wt(c.alpha_targets.size()), wr(c.alpha_rest.size());
        dirichlet(rng, c.alpha_targets, wt);
        dirichlet(rng, c.alpha_rest, wr);
        std::size_t it = 0, ir = 0;
        for (std::size_t k = 0; k < J_; ++k)
            p_c[k] = target_.contains(static_cast<int>(k) + 1) ? g * wt[it++] : (1.0 - g) * wr[ir++];
    }

    const FailureTable& table_;
    const TargetSpec& target_;
    bool insert_only_;
    std::size_t J_ = 0, m_ = 0;
    double I_E_ = 0.0;
    std::vector<double> alpha_, beta_, fixed_p_c_;
    Component prior_, post_;
    double post_weight_ = 0.5;
    double log_m0_ = 0.0;
};

struct BatchedEstimate {
    double log_mean = kNegInf;
    double rel_se = 0.0;
    int accepted = 0;
    int dropped = 0;
};

// Batched Monte-Carlo average on the log scale; draw(rng, out) appends log values (or NaN = dropped).
template <class DrawFn>
BatchedEstimate batched_mean(int n_mc, int batches, std::uint64_t seed, std::uint64_t stream, unsigned threads,
                             DrawFn&& draw_one) {
    if (n_mc < 1) throw InputError("n_mc must be positive");
    batches = std::max(1, std::min(batches, n_mc));
    std::vector<std::vector<double>> values(static_cast<std::size_t>(batches));
    parallel_for(
        static_cast<std::size_t>(batches),
        [&](std::size_t b) {
            const int count = n_mc / batches + (static_cast<int>(b) < n_mc % batches ? 1 : 0);
            Rng rng(derive_seed(seed, stream, b));
            auto& out = values[b];
            out.reserve(static_cast<std::size_t>(count));
            for (int i = 0; i < count; ++i) out.push_back(draw_one(rng));
        },
        threads);

    BatchedEstimate est;
    double mx = kNegInf;
    for (const auto& v : values)
        for (double x : v) {
            if (std::isnan(x)) {
                ++est.dropped;
                continue;
            }
            ++est.accepted;
            mx = std::max(mx, x);
        }
    if (est.accepted == 0 || !std::isfinite(mx)) {
        est.log_mean = kNegInf;
        return est;
    }
    double total = 0.0;
    std::vector<double> means;
    for (const auto& v : values) {
        double s = 0.0;
        int n = 0;
        for (double x : v) {
            if (std::isnan(x)) continue;
            s += std::exp(x - mx);
            ++n;
        }
        total += s;
        if (n > 0) means.push_back(s / n);
    }
    const double overall = total / est.accepted;
    est.log_mean = mx + std::log(overall);
    if (means.size() > 1) {
        double var = 0.0;
        for (double m : means) var += (m - overall) * (m - overall);
        var /= static_cast<double>(means.size() - 1);
        est.rel_se = std::sqrt(var / static_cast<double>(means.size())) / overall;
    }
    return est;
}

void fill_bf(TestResult& out, double log_alt, double log_null, double rel_se) {
    const double log_bf = log_alt - log_null;
    out.log_bayes_factor = log_bf;
    out.bayes_factor = std::exp(log_bf);
    out.mc_se = *out.bayes_factor * rel_se;
    out.statistic = log_bf / std::log(10.0);
    out.raw_statistic = out.statistic;
}

}  // namespace

double analysis_efficacy(const FailureTable& table, Variant variant, const BayesOptions& options) {
    if (options.fixed_I_E) {
        const double v = *options.fixed_I_E;
        if (!(v >= 0.0 && v < 1.0)) throw InputError("fixed I_E must lie in [0, 1)");
        return v;
    }
    if (variant == Variant::replacement_only) return 0.0;
    return std::max(0.0, plugin_efficacy(table));
}

TestResult bayes_factor(const FailureTable& table, const TargetSpec& target, Variant variant, Phase phase,
                        const PriorSpec& priors, const BayesOptions& options) {
    if (options.n_mc < 100) throw InputError("n_mc must be at least 100");
    const NuisanceSampler sampler(table, target, variant, phase, priors, options);
    if (!std::isfinite(sampler.log_feasible_mass())) {
        throw InfeasibleError("no prior draw admits a feasible p_s",
                              feasibility_check(sampler.I_E(), sampler.typical_p_cG(), 1.0));
    }

    const BatchedEstimate alt = batched_mean(
        options.n_mc, options.batches, options.seed, kAltStream, options.threads, [&](Rng& rng) {
            Nuisance nz;
            std::vector<double> p_v;
            sampler.draw(rng, nz);
            const double u = uniform01(rng);
            if (!feasible_lo(nz.lo)) return kNegInf;
            return sampler.log_ratio(nz, nz.lo + (1.0 - nz.lo) * u, p_v);
        });

    TestResult out;
    out.method = std::string(phase == Phase::one_phase ? "bf-1ph" : (priors.hierarchical ? "bf-hier" : "bf-2ph")) +
                 "-" + to_string(variant);
    fill_bf(out, alt.log_mean, 0.0, alt.rel_se);
    if (sampler.log_feasible_mass() < 0.0)
        out.notes.push_back("the alternative conditions on a feasible p_c, which has prior probability " +
                            std::to_string(std::exp(sampler.log_feasible_mass())));
    return out;
}

std::pair<double, double> mbs_log_likelihoods(const FailureTable& table, const TargetSpec& target, double p_s,
                                              double pseudocount) {
    if (target.g() != 1) throw UnsupportedError("MBS Bayes factor is defined for a single targeted type");
    if (table.J() != target.J()) throw InputError("table and target disagree on J");
    const std::size_t J = static_cast<std::size_t>(table.J());
    const double c = pseudocount > 0.0 ? pseudocount : 1.0 / static_cast<double>(J);
    const auto fp = table.placebo_failures();
    std::vector<double> p0(J);
    const double denom = static_cast<double>(table.placebo_failure_total()) + c * static_cast<double>(J);
    for (std::size_t k = 0; k < J; ++k) p0[k] = (static_cast<double>(fp[k]) + c) / denom;
    const auto t = static_cast<std::size_t>(target.targets().front() - 1);
    const double removed = p0[t] * p_s;

    std::vector<double> prop(p0), unif(p0);
    prop[t] = unif[t] = p0[t] - removed;
    for (std::size_t k = 0; k < J; ++k) {
        if (k == t) continue;
        prop[k] = p0[k] * (1.0 + removed / (1.0 - p0[t]));
        unif[k] = p0[k] + removed / static_cast<double>(J - 1);
    }
    const auto nv = table.vaccine_failures();
    return {log_multinomial(nv, prop, false), log_multinomial(nv, unif, false)};
}

TestResult mbs_bayes_factor(const FailureTable& table, const TargetSpec& target, const BayesOptions& options,
                            double pseudocount) {
    if (options.n_mc < 100) throw InputError("n_mc must be at least 100");
    if (target.g() != 1) throw UnsupportedError("MBS Bayes factor is defined for a single targeted type");
    if (table.vaccine_failure_total() <= 0 || table.placebo_failure_total() <= 0)
        throw DegenerateDataError("Bayes factors need at least one failure in each arm");
    const auto null = mbs_log_likelihoods(table, target, 0.0, pseudocount);
    const BatchedEstimate alt = batched_mean(
        options.n_mc, options.batches, options.seed, kMbsStream, options.threads, [&](Rng& rng) {
            const auto [a, b] = mbs_log_likelihoods(table, target, uniform01(rng), pseudocount);
            const double mx = std::max(a, b);
            return mx + std::log(0.5 * std::exp(a - mx) + 0.5 * std::exp(b - mx));
        });
    TestResult out;
    out.method = "mbs-bf";
    fill_bf(out, alt.log_mean, null.first, alt.rel_se);
    return out;
}

std::vector<double> uniform_grid(int points) {
    if (points < 2) throw InputError("posterior grid needs at least 2 points");
    std::vector<double> g(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) g[static_cast<std::size_t>(i)] = static_cast<double>(i) / (points - 1);
    return g;
}

PosteriorCurve ps_posterior(const FailureTable& table, const TargetSpec& target, Variant variant,
                            const PriorSpec& priors, const std::vector<double>& grid, const BayesOptions& options) {
    if (grid.empty()) throw InputError("posterior grid is empty");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] >= 0.0 && grid[i] <= 1.0)) throw InputError("posterior grid values must lie in [0, 1]");
        if (i > 0 && grid[i] <= grid[i - 1]) throw InputError("posterior grid must be increasing");
    }
    const NuisanceSampler sampler(table, target, variant, Phase::two_phase, priors, options);
    Rng rng(derive_seed(options.seed, kPosteriorStream));
    std::vector<Nuisance> draws(static_cast<std::size_t>(options.n_mc));
    for (auto& d : draws) sampler.draw(rng, d);

    PosteriorCurve curve;
    curve.grid = grid;
    curve.mc_draws_per_point = options.n_mc;
    curve.I_E = sampler.I_E();
    curve.log_density.assign(grid.size(), kNegInf);
    parallel_for(
        grid.size(),
        [&](std::size_t i) {
            std::vector<double> terms;
            std::vector<double> p_v;
            terms.reserve(draws.size());
            for (const auto& d : draws) {
                if (!feasible_lo(d.lo) || grid[i] < d.lo - 1e-12) continue;
                terms.push_back(sampler.log_ratio(d, grid[i], p_v) - std::log1p(-d.lo));
            }
            if (!terms.empty())
                curve.log_density[i] = log_sum_exp(terms) - std::log(static_cast<double>(draws.size()));
        },
        options.threads);

    std::size_t best = 0;
    bool any = false;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!std::isfinite(curve.log_density[i])) continue;
        if (!any || curve.log_density[i] > curve.log_density[best]) best = i;
        any = true;
    }
    if (!any)
        throw InfeasibleError("posterior grid", feasibility_check(sampler.I_E(), sampler.typical_p_cG(), grid.back()));
    curve.argmax = grid[best];
    return curve;
}

std::vector<PosteriorDraw> sample_alternative(const FailureTable& table, const TargetSpec& target, Variant variant,
                                              Phase phase, const PriorSpec& priors, const BayesOptions& options) {
    const NuisanceSampler sampler(table, target, variant, phase, priors, options);
    Rng rng(derive_seed(options.seed, kAltStream, 0xd));
    std::vector<PosteriorDraw> out;
    out.reserve(static_cast<std::size_t>(options.n_mc));
    Nuisance nz;
    for (int i = 0; i < options.n_mc; ++i) {
        sampler.draw(rng, nz);
        const double u = uniform01(rng);
        if (!feasible_lo(nz.lo)) continue;
        PosteriorDraw d;
        d.p_c = nz.p_c;
        d.q = nz.q;
        d.p_s = nz.lo + (1.0 - nz.lo) * u;
        d.log_weight = sampler.log_ratio(nz, d.p_s, d.p_v);
        sampler.log_lik(nz, d.p_s, d.p_v);
        out.push_back(std::move(d));
    }
    const double norm = [&] {
        std::vector<double> w;
        for (const auto& d : out) w.push_back(d.log_weight);
        return log_sum_exp(w);
    }();
    if (std::isfinite(norm))
        for (auto& d : out) d.log_weight -= norm;
    return out;
}

std::vector<ScanEntry> model_scan(const FailureTable& table, const std::vector<TargetSpec>& candidates,
                                  Variant variant, Phase phase, const PriorSpec& priors,
                                  const std::vector<double>& prior_probs, const BayesOptions& options,
                                  bool include_null) {
    if (candidates.empty()) throw InputError("model scan needs at least one candidate");
    const std::size_t K = candidates.size();
    const std::size_t N = K + (include_null ? 1 : 0);
    std::vector<double> prior(prior_probs);
    if (prior.empty()) prior.assign(N, 1.0 / static_cast<double>(N));
    if (prior.size() != N)
        throw InputError(include_null ? "prior model probabilities need one entry per candidate plus the null"
                                      : "prior model probabilities need one entry per candidate");
    double psum = 0.0;
    for (double p : prior) {
        if (!(p >= 0.0)) throw InputError("prior model probabilities must be non-negative");
        psum += p;
    }
    if (std::abs(psum - 1.0) > 1e-9) throw InputError("prior model probabilities must sum to 1");

    std::vector<ScanEntry> entries(N);
    std::vector<double> rel_se(N, 0.0);
    for (std::size_t k = 0; k < K; ++k) {
        auto& e = entries[k];
        e.target = candidates[k];
        e.label = candidates[k].to_string();
        e.prior = prior[k];
        BayesOptions o = options;
        o.seed = derive_seed(options.seed, kScanStream, k);
        try {
            const TestResult bf = bayes_factor(table, candidates[k], variant, phase, priors, o);
            e.log_bayes_factor = *bf.log_bayes_factor;
            rel_se[k] = *bf.bayes_factor > 0.0 && std::isfinite(*bf.bayes_factor) ? *bf.mc_se / *bf.bayes_factor : 0.0;
            if (!std::isfinite(e.log_bayes_factor) && !bf.notes.empty()) e.error = bf.notes.back();
        } catch (const Error& err) {
            e.error = err.what();
            e.log_bayes_factor = kNegInf;
        }
    }
    if (include_null) {
        entries[K].label = "null";
        entries[K].prior = prior[K];
        entries[K].log_bayes_factor = 0.0;
    }

    std::vector<double> logw(N);
    for (std::size_t k = 0; k < N; ++k)
        logw[k] = entries[k].prior > 0.0 ? std::log(entries[k].prior) + entries[k].log_bayes_factor : kNegInf;
    const double lse = log_sum_exp(logw);
    if (!std::isfinite(lse)) throw DegenerateDataError("no candidate model is feasible for this table");
    std::vector<double> w(N);
    for (std::size_t k = 0; k < N; ++k) w[k] = std::exp(logw[k] - lse);
    for (std::size_t k = 0; k < N; ++k) {
        entries[k].posterior = w[k];
        double var = 0.0;
        for (std::size_t j = 0; j < N; ++j) {
            const double d = (j == k ? w[k] * (1.0 - w[k]) : -w[k] * w[j]);  // d pi_k / d log w_j
            var += d * d * rel_se[j] * rel_se[j];
        }
        entries[k].posterior_se = std::sqrt(var);
    }
    std::stable_sort(entries.begin(), entries.end(),
                     [](const ScanEntry& a, const ScanEntry& b) { return a.posterior > b.posterior; });
    return entries;
}

std::vector<TargetSpec> all_target_sets(int J) {
    if (J < 2) throw InputError("J must be at least 2");
    if (J > 12) throw InputError("exhaustive target-set enumeration is limited to J <= 12; pass a candidate list");
    std::vector<std::vector<int>> sets;
    for (unsigned mask = 1; mask + 1 < (1u << J); ++mask) {
        std::vector<int> s;
        for (int j = 0; j < J; ++j)
            if (mask & (1u << j)) s.push_back(j + 1);
        sets.push_back(std::move(s));
    }
    std::sort(sets.begin(), sets.end(), [](const auto& a, const auto& b) {
        return a.size() != b.size() ? a.size() < b.size() : a < b;
    });
    std::vector<TargetSpec> out;
    for (auto& s : sets) out.emplace_back(s, J);
    return out;
}

}  // namespace snl
