#include "snl/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "snl/likelihood.hpp"
#include "snl/optimize.hpp"
#include "snl/profile.hpp"
#include "snl/random.hpp"

namespace snl {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
double logit(double p) { return std::log(p / (1.0 - p)); }

double clamp_logit(double p) { return std::clamp(logit(std::clamp(p, 1e-6, 1.0 - 1e-6)), -12.0, 12.0); }

// softmax with the last logit pinned at zero
void softmax_into(const double* z, std::size_t free, std::span<double> out) {
    double mx = 0.0;
    for (std::size_t k = 0; k < free; ++k) mx = std::max(mx, z[k]);
    double total = std::exp(-mx);
    for (std::size_t k = 0; k < free; ++k) total += (out[k] = std::exp(z[k] - mx));
    out[free] = std::exp(-mx);
    for (auto& v : out) v /= total;
}

void logits_from(std::span<const double> p, std::vector<double>& theta) {
    const double last = std::max(p.back(), 1e-8);
    for (std::size_t k = 0; k + 1 < p.size(); ++k)
        theta.push_back(std::clamp(std::log(std::max(p[k], 1e-8) / last), -20.0, 20.0));
}

std::vector<double> uniform(std::size_t n) { return std::vector<double>(n, 1.0 / static_cast<double>(n)); }

double targeted_sum(std::span<const double> p, const TargetSpec& target) {
    double s = 0.0;
    for (int t : target.targets()) s += p[static_cast<std::size_t>(t - 1)];
    return s;
}

std::vector<double> nontargeted_conditional(std::span<const double> p_c, const TargetSpec& target) {
    std::vector<double> q;
    double total = 0.0;
    for (int j : target.non_targets()) {
        q.push_back(p_c[static_cast<std::size_t>(j - 1)]);
        total += q.back();
    }
    if (total <= 0.0) return uniform(q.size());
    for (auto& v : q) v /= total;
    return q;
}

struct TwoPhaseContext {
    std::vector<double> p_c;
    double r_c0 = 0.0;
    double I_E = 0.0;
};

TwoPhaseContext two_phase_context(const FailureTable& table, Variant variant,
                                  const FitOptions& options) {
    TwoPhaseContext ctx;
    ctx.p_c = placebo_plugin_pc(table, options.zero_cell);
    ctx.r_c0 = static_cast<double>(table.placebo()[0]) / static_cast<double>(table.placebo_size());
    ctx.I_E = variant == Variant::replacement_only ? 0.0 : std::max(0.0, plugin_efficacy(table));
    return ctx;
}

FitResult two_phase_null(const FailureTable& table, const TargetSpec& target, Variant variant,
                         const FitOptions& options) {
    const TwoPhaseContext ctx = two_phase_context(table, variant, options);
    FitResult fit;
    fit.variant = Variant::all_or_none;
    fit.phase = Phase::two_phase;
    fit.params.p_c = ctx.p_c;
    fit.params.p_s = 0.0;
    fit.params.I_E = ctx.I_E;
    fit.params.r_c0 = ctx.r_c0;
    fit.params.q = uniform(target.non_targets().size());
    fit.p_v = ctx.p_c;
    fit.r_v0 = 1.0 - (1.0 - ctx.I_E) * (1.0 - ctx.r_c0);
    fit.log_lik = log_multinomial(table.vaccine_failures(), fit.p_v);
    fit.converged = true;
    return fit;
}

FitResult two_phase_alternative(const FailureTable& table, const TargetSpec& target, Variant variant,
                                const FitOptions& options) {
    const TwoPhaseContext ctx = two_phase_context(table, variant, options);
    const TwoPhaseSolution sol = solve_two_phase(table.vaccine_failures(), ctx.p_c, ctx.I_E, target,
                                                 variant == Variant::insert_only);
    FitResult fit;
    fit.variant = variant;
    fit.phase = Phase::two_phase;
    fit.params.p_c = ctx.p_c;
    fit.params.p_s = sol.p_s;
    fit.params.I_E = ctx.I_E;
    fit.params.r_c0 = ctx.r_c0;
    fit.params.q = sol.q;
    fit.p_v = sol.p_v;
    fit.r_v0 = 1.0 - (1.0 - ctx.I_E) * (1.0 - ctx.r_c0);
    fit.log_lik = log_multinomial(table.vaccine_failures(), fit.p_v);
    fit.converged = true;
    fit.boundary = sol.boundary;
    return fit;
}

// Closed-form all-or-none fit on both arms.
FitResult one_phase_null(const FailureTable& table, const TargetSpec& target, bool efficacy_free) {
    const auto fp = table.placebo_failures();
    const auto fv = table.vaccine_failures();
    std::vector<double> p_c(fp.size());
    double total = 0.0;
    for (std::size_t k = 0; k < fp.size(); ++k) total += (p_c[k] = static_cast<double>(fp[k] + fv[k]));
    for (auto& v : p_c) v /= total;

    const double np = static_cast<double>(table.placebo_size());
    const double nv = static_cast<double>(table.vaccine_size());
    double r_c0 = static_cast<double>(table.placebo()[0]) / np;
    double r_v0 = static_cast<double>(table.vaccine()[0]) / nv;
    if (!efficacy_free || r_v0 < r_c0) {
        r_c0 = r_v0 = static_cast<double>(table.placebo()[0] + table.vaccine()[0]) / (np + nv);
    }

    FitResult fit;
    fit.variant = Variant::all_or_none;
    fit.phase = Phase::one_phase;
    fit.params.p_c = p_c;
    fit.params.p_s = 0.0;
    fit.params.I_E = r_c0 < 1.0 ? 1.0 - (1.0 - r_v0) / (1.0 - r_c0) : 0.0;
    fit.params.r_c0 = r_c0;
    fit.params.q = uniform(target.non_targets().size());
    fit.p_v = p_c;
    fit.r_v0 = r_v0;
    fit.log_lik = log_likelihood_pv(table, p_c, p_c, r_c0, r_v0, LikelihoodScope::one_phase);
    fit.converged = true;
    return fit;
}

// Transformed-coordinate model for one-phase some-or-none fits.
class OnePhaseModel {
  public:
    OnePhaseModel(const FailureTable& table, const TargetSpec& target, Variant variant)
        : table_(table), target_(target), J_(static_cast<std::size_t>(target.J())),
          m_(target.non_targets().size()) {
        free_r_ = variant != Variant::replacement_only;
        free_ie_ = variant != Variant::replacement_only;
        free_q_ = variant != Variant::insert_only;
        pooled_r_ = static_cast<double>(table.placebo()[0] + table.vaccine()[0]) /
                    static_cast<double>(table.placebo_size() + table.vaccine_size());
    }

    std::size_t dim() const { return (J_ - 1) + (free_r_ ? 1 : 0) + (free_ie_ ? 1 : 0) + 1 + (free_q_ ? m_ - 1 : 0); }

    struct Point {
        std::vector<double> p_c, q, p_v;
        double r_c0 = 0.0, r_v0 = 0.0, I_E = 0.0, p_s = 0.0;
    };

    Point decode(const std::vector<double>& theta) const {
        Point pt;
        pt.p_c.resize(J_);
        std::size_t at = 0;
        softmax_into(theta.data(), J_ - 1, pt.p_c);
        at += J_ - 1;
        pt.r_c0 = free_r_ ? sigmoid(theta[at++]) : pooled_r_;
        const double p_cG = targeted_sum(pt.p_c, target_);
        pt.I_E = free_ie_ ? p_cG * sigmoid(theta[at++]) : 0.0;
        const double lo = std::min(1.0, sieve_strength_lower_bound(pt.I_E, p_cG));
        pt.p_s = lo + (1.0 - lo) * sigmoid(theta[at++]);
        if (free_q_) {
            pt.q.resize(m_);
            softmax_into(theta.data() + at, m_ - 1, pt.q);
        } else {
            pt.q = nontargeted_conditional(pt.p_c, target_);
        }
        pt.r_v0 = 1.0 - (1.0 - pt.I_E) * (1.0 - pt.r_c0);
        pt.p_v.resize(J_);
        vaccine_failure_profile(pt.p_c, pt.p_s, pt.I_E, pt.q, target_, pt.p_v);
        return pt;
    }

    std::vector<double> encode(std::span<const double> p_c, double r_c0, double I_E, double p_s,
                               std::span<const double> q) const {
        std::vector<double> theta;
        logits_from(p_c, theta);
        if (free_r_) theta.push_back(clamp_logit(r_c0));
        const double p_cG = targeted_sum(p_c, target_);
        const double ie = std::min(I_E, 0.98 * p_cG);
        if (free_ie_) theta.push_back(clamp_logit(ie / p_cG));
        const double lo = std::min(1.0, sieve_strength_lower_bound(ie, p_cG));
        theta.push_back(lo < 1.0 ? clamp_logit((p_s - lo) / (1.0 - lo)) : 0.0);
        if (free_q_) {
            std::vector<double> qs(q.begin(), q.end());
            for (auto& v : qs) v = v + 1e-3;
            logits_from(qs, theta);
        }
        return theta;
    }

    double log_lik(const std::vector<double>& theta) const {
        const Point pt = decode(theta);
        return log_likelihood_pv(table_, pt.p_c, pt.p_v, pt.r_c0, pt.r_v0, LikelihoodScope::one_phase);
    }

  private:
    const FailureTable& table_;
    const TargetSpec& target_;
    std::size_t J_, m_;
    bool free_r_ = true, free_ie_ = true, free_q_ = true;
    double pooled_r_ = 0.0;
};

FitResult one_phase_alternative(const FailureTable& table, const TargetSpec& target, Variant variant,
                                const FitOptions& options) {
    OnePhaseModel model(table, target, variant);
    const auto fp = table.placebo_failures();
    const auto fv = table.vaccine_failures();
    const std::size_t J = fp.size();

    // data-driven start: smoothed placebo p_c with the exact two-phase solution on top
    std::vector<double> p_c0(J);
    double tot = 0.0;
    for (std::size_t k = 0; k < J; ++k) tot += (p_c0[k] = static_cast<double>(fp[k]) + 0.5);
    for (auto& v : p_c0) v /= tot;
    const double ie_raw = plugin_efficacy(table);
    const double p_cG0 = targeted_sum(p_c0, target);
    const double ie0 = variant == Variant::replacement_only ? 0.0 : std::clamp(ie_raw, 0.01 * p_cG0, 0.9 * p_cG0);
    const double r0 = (static_cast<double>(table.placebo()[0]) + 0.5) / (static_cast<double>(table.placebo_size()) + 1.0);
    const TwoPhaseSolution sol0 = solve_two_phase(fv, p_c0, ie0, target, variant == Variant::insert_only);

    std::vector<std::vector<double>> starts;
    starts.push_back(model.encode(p_c0, r0, ie0, sol0.p_s, sol0.q));

    Rng rng(derive_seed(options.seed, 0x1f17));
    std::vector<double> alpha(J);
    for (std::size_t k = 0; k < J; ++k) alpha[k] = static_cast<double>(fp[k] + fv[k]) + 1.0;
    std::normal_distribution<double> noise(0.0, 1.5);
    for (int s = 1; s < options.starts; ++s) {
        const std::vector<double> pc = dirichlet(rng, alpha);
        const double pcg = targeted_sum(pc, target);
        const double ie = variant == Variant::replacement_only ? 0.0 : pcg * uniform01(rng) * 0.95;
        const double lo = std::min(1.0, sieve_strength_lower_bound(ie, pcg));
        const double ps = lo + (1.0 - lo) * uniform01(rng);
        std::vector<double> ones(target.non_targets().size(), 1.0);
        const std::vector<double> q = dirichlet(rng, ones);
        std::vector<double> theta = model.encode(pc, sigmoid(logit(r0) + 0.3 * noise(rng)), ie, ps, q);
        starts.push_back(std::move(theta));
    }

    MinimizeOptions mo;
    mo.max_iterations = options.max_iterations;
    const Objective objective = [&](const std::vector<double>& th) { return -model.log_lik(th); };

    MinimizeResult best;
    best.value = std::numeric_limits<double>::infinity();
    int total_iterations = 0;
    for (auto& x0 : starts) {
        MinimizeResult r = minimize_bfgs(objective, x0, mo);
        total_iterations += r.iterations;
        if (r.value < best.value) best = std::move(r);
    }

    FitResult fit;
    fit.variant = variant;
    fit.phase = Phase::one_phase;
    fit.iterations = total_iterations;
    if (!std::isfinite(best.value)) {
        fit.log_lik = kNegInf;
        fit.converged = false;
        return fit;
    }
    const auto pt = model.decode(best.x);
    fit.params.p_c = pt.p_c;
    fit.params.p_s = pt.p_s;
    fit.params.I_E = pt.I_E;
    fit.params.r_c0 = pt.r_c0;
    fit.params.q = pt.q;
    fit.p_v = pt.p_v;
    fit.r_v0 = pt.r_v0;
    fit.log_lik = -best.value;
    fit.converged = best.converged;
    const double lo = sieve_strength_lower_bound(pt.I_E, targeted_sum(pt.p_c, target));
    fit.boundary = pt.p_s - lo < 1e-6;
    return fit;
}

}  // namespace

TwoPhaseSolution solve_two_phase(std::span<const Count> vaccine_failures, std::span<const double> p_c,
                                 double I_E, const TargetSpec& target, bool insert_only) {
    const std::size_t J = p_c.size();
    if (vaccine_failures.size() != J || static_cast<int>(J) != target.J())
        throw InputError("two-phase fit: dimension mismatch");
    const double p_cG = targeted_sum(p_c, target);
    if (p_cG <= 0.0) throw DegenerateDataError("targeted failure types have zero placebo frequency");
    if (I_E > p_cG + kFeasibilityTolerance)
        throw InfeasibleError("two-phase fit", feasibility_check(I_E, p_cG, 1.0));

    double N = 0.0, n_G = 0.0;
    for (std::size_t k = 0; k < J; ++k) N += static_cast<double>(vaccine_failures[k]);
    for (int t : target.targets()) n_G += static_cast<double>(vaccine_failures[static_cast<std::size_t>(t - 1)]);
    if (N <= 0.0) throw DegenerateDataError("vaccine arm has no failures");

    const auto& others = target.non_targets();
    const std::size_t m = others.size();
    const double x_max = std::max(0.0, (p_cG - I_E) / (1.0 - I_E));
    TwoPhaseSolution sol;
    sol.p_v.assign(J, 0.0);
    double x_G = 0.0;
    std::vector<double> x(m);

    if (insert_only) {
        x_G = std::clamp(n_G / N, 0.0, x_max);
        const double rest = 1.0 - p_cG;
        for (std::size_t i = 0; i < m; ++i)
            x[i] = rest > 0.0 ? (1.0 - x_G) * p_c[static_cast<std::size_t>(others[i] - 1)] / rest : 0.0;
        sol.q = nontargeted_conditional(p_c, target);
        sol.boundary = x_G >= x_max - 1e-12;
    } else {
        std::vector<double> n(m), l(m);
        for (std::size_t i = 0; i < m; ++i) {
            const auto k = static_cast<std::size_t>(others[i] - 1);
            n[i] = static_cast<double>(vaccine_failures[k]);
            l[i] = p_c[k] / (1.0 - I_E);
        }
        std::vector<std::size_t> order(m);
        std::iota(order.begin(), order.end(), 0);
        auto ratio = [&](std::size_t i) {
            return l[i] > 0.0 ? n[i] / l[i] : std::numeric_limits<double>::infinity();
        };
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ratio(a) < ratio(b); });

        // water-filling: the first `bound` coordinates (by n/l) sit at their lower bounds
        bool solved = false;
        double lambda = 0.0;
        std::size_t bound = 0;
        double n_bound = 0.0, l_bound = 0.0;
        for (bound = 0; bound <= m; ++bound) {
            if (bound > 0) {
                n_bound += n[order[bound - 1]];
                l_bound += l[order[bound - 1]];
            }
            const double rest = 1.0 - l_bound;
            const double free_n = N - n_bound;
            if (rest <= 0.0 || free_n <= 0.0) {
                if (rest > -1e-12 && free_n <= 0.0) {
                    lambda = std::numeric_limits<double>::infinity();
                    solved = true;
                    break;
                }
                continue;
            }
            lambda = free_n / rest;
            const bool bound_ok = bound == 0 || n[order[bound - 1]] <= lambda * l[order[bound - 1]] * (1.0 + 1e-12);
            const bool free_ok = bound == m || n[order[bound]] >= lambda * l[order[bound]] * (1.0 - 1e-12);
            if (bound_ok && free_ok) {
                solved = true;
                break;
            }
        }
        if (!solved) throw NumericalError("two-phase water-filling failed to find a consistent active set");
        std::vector<char> at_bound(m, 0);
        for (std::size_t i = 0; i < bound && i < m; ++i) at_bound[order[i]] = 1;
        x_G = std::isfinite(lambda) ? n_G / lambda : 0.0;
        for (std::size_t i = 0; i < m; ++i) x[i] = at_bound[i] || !std::isfinite(lambda) ? l[i] : n[i] / lambda;

        const double replaced = p_cG - I_E - (1.0 - I_E) * x_G;
        sol.q.assign(m, 0.0);
        if (replaced > 1e-12) {
            double total = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                const auto k = static_cast<std::size_t>(others[i] - 1);
                sol.q[i] = std::max(0.0, (x[i] * (1.0 - I_E) - p_c[k]) / replaced);
                total += sol.q[i];
            }
            for (auto& v : sol.q) v /= total;
        } else {
            sol.q = uniform(m);
            sol.boundary = true;
        }
    }

    sol.p_s = std::clamp(1.0 - x_G / p_cG, 0.0, 1.0);
    for (int t : target.targets()) {
        const auto k = static_cast<std::size_t>(t - 1);
        sol.p_v[k] = p_c[k] * x_G / p_cG;
    }
    for (std::size_t i = 0; i < m; ++i) sol.p_v[static_cast<std::size_t>(others[i] - 1)] = x[i];
    return sol;
}

FitResult fit_mle(const FailureTable& table, const TargetSpec& target, Variant variant, Phase phase,
                  const FitOptions& options) {
    if (table.J() != target.J()) throw InputError("table and target disagree on J");
    if (table.placebo_failure_total() <= 0 || table.vaccine_failure_total() <= 0)
        throw DegenerateDataError("fitting needs at least one failure in each arm");
    if (phase == Phase::two_phase) {
        if (variant == Variant::all_or_none) return two_phase_null(table, target, variant, options);
        return two_phase_alternative(table, target, variant, options);
    }
    if (variant == Variant::all_or_none) return one_phase_null(table, target, true);
    return one_phase_alternative(table, target, variant, options);
}

FitResult fit_null(const FailureTable& table, const TargetSpec& target, Variant variant, Phase phase,
                   const FitOptions& options) {
    if (table.J() != target.J()) throw InputError("table and target disagree on J");
    if (table.placebo_failure_total() <= 0 || table.vaccine_failure_total() <= 0)
        throw DegenerateDataError("fitting needs at least one failure in each arm");
    if (phase == Phase::two_phase) return two_phase_null(table, target, variant, options);
    return one_phase_null(table, target, variant != Variant::replacement_only);
}

double chi2_sf_1df(double x) {
    if (std::isnan(x) || x < 0.0) throw InputError("chi-squared statistic must be non-negative");
    if (std::isinf(x)) return 0.0;
    return std::erfc(std::sqrt(0.5 * x));
}

TestResult lrt(const FailureTable& table, const TargetSpec& target, Variant variant, Phase phase,
               const FitOptions& options) {
    if (variant == Variant::all_or_none) throw UnsupportedError("the all-or-none model is the LRT null");
    const FitResult null = fit_null(table, target, variant, phase, options);
    const FitResult alt = fit_mle(table, target, variant, phase, options);

    TestResult out;
    out.method = std::string("lrt-") + (phase == Phase::one_phase ? "1phase" : "2phase") + "-" + to_string(variant);
    if (!std::isfinite(alt.log_lik)) {
        if (!std::isfinite(null.log_lik))
            throw DegenerateDataError("both models assign zero probability to the observed table");
        throw NumericalError("alternative fit assigns zero probability where the null does not");
    }
    out.raw_statistic = std::isfinite(null.log_lik) ? -2.0 * (null.log_lik - alt.log_lik)
                                                    : std::numeric_limits<double>::infinity();
    out.statistic = std::max(0.0, out.raw_statistic);
    out.p_value = chi2_sf_1df(out.statistic);
    out.boundary = alt.boundary;
    if (!alt.converged) out.notes.push_back("alternative fit did not converge");
    if (out.raw_statistic < -1e-8) out.notes.push_back("alternative below null (non-nested); statistic clipped at 0");
    if (alt.boundary) out.notes.push_back("optimum on the feasibility boundary; chi-squared reference is approximate");
    if (!std::isfinite(null.log_lik)) out.notes.push_back("null assigns zero probability to the table");
    return out;
}

}  // namespace snl
