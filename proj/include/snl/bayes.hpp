#pragma once
// Monte-Carlo Bayes factors and posterior summaries of the sieve-effect strength p_s.
//
// All marginal likelihoods are for the vaccine failure-type counts given the placebo
// information; multinomial coefficients are dropped because they cancel in every ratio.
// I_E is held at its plug-in value (0 for replacement_only) and p_s ~ Uniform(0, 1)
// truncated to the feasible interval [lower bound(I_E, p_cG), 1].

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "snl/plugin.hpp"
#include "snl/result.hpp"
#include "snl/types.hpp"

namespace snl {

struct PriorSpec {
    std::vector<double> p_c_concentration;  ///< length J; empty selects all ones
    std::vector<double> q_concentration;    ///< length J - g; empty selects all ones
    bool hierarchical = true;               ///< add placebo failure counts to both concentrations
    double mbs_pseudocount = 0.0;           ///< per category; 0 selects 1/J
};

struct BayesOptions {
    int n_mc = 1000;
    std::uint64_t seed = 1;
    int batches = 20;  ///< batch means for the Monte-Carlo standard error
    unsigned threads = 1;
    ZeroCellCorrection zero_cell;  ///< plug-in p_c of non-hierarchical two-phase analyses
    std::optional<double> fixed_I_E;  ///< overrides the plug-in efficacy
};

/// The efficacy value an analysis conditions on.
double analysis_efficacy(const FailureTable& table, Variant variant, const BayesOptions& options);

/// Bayes factor of `variant` (some_or_none, replacement_only or insert_only) against the
/// all-or-none null.
///   two_phase, hierarchical:     p_c ~ Dir(alpha + n_p), q ~ Dir(beta + placebo non-target counts)
///   two_phase, non-hierarchical: p_c fixed at placebo frequencies, q ~ Dir(beta)
///   one_phase:                   p_c ~ Dir(alpha + n_p), q ~ Dir(beta); the placebo marginal
///                                cancels, leaving the vaccine-arm factor only
/// TestResult.statistic holds log10 BF; mc_se is the standard error of bayes_factor.
TestResult bayes_factor(const FailureTable& table, const TargetSpec& target, Variant variant, Phase phase,
                        const PriorSpec& priors, const BayesOptions& options);

/// Even-odds mixture of proportional and uniform reallocation of the removed targeted mass,
/// against the multinomial at pseudocount-smoothed placebo frequencies. Requires g = 1.
TestResult mbs_bayes_factor(const FailureTable& table, const TargetSpec& target, const BayesOptions& options,
                            double pseudocount = 0.0);

/// MBS integrand at fixed p_s: (proportional, uniform) component likelihoods, log scale.
std::pair<double, double> mbs_log_likelihoods(const FailureTable& table, const TargetSpec& target, double p_s,
                                              double pseudocount = 0.0);

struct PosteriorCurve {
    std::vector<double> grid;
    std::vector<double> log_density;  ///< unnormalised; -inf where p_s is infeasible for every draw
    int mc_draws_per_point = 0;
    double argmax = 0.0;
    double I_E = 0.0;
};

std::vector<double> uniform_grid(int points);

/// log of the Monte-Carlo average over nuisance draws of the truncated-prior density times
/// the vaccine-arm likelihood at each grid value. One set of draws is shared by all points.
PosteriorCurve ps_posterior(const FailureTable& table, const TargetSpec& target, Variant variant,
                            const PriorSpec& priors, const std::vector<double>& grid,
                            const BayesOptions& options);

/// Importance-weighted posterior draws under a some-or-none alternative.
struct PosteriorDraw {
    std::vector<double> p_c;
    std::vector<double> q;
    std::vector<double> p_v;
    double p_s = 0.0;
    double log_weight = 0.0;
};
std::vector<PosteriorDraw> sample_alternative(const FailureTable& table, const TargetSpec& target, Variant variant,
                                              Phase phase, const PriorSpec& priors, const BayesOptions& options);

struct ScanEntry {
    std::string label;                ///< target indices, or "null"
    std::optional<TargetSpec> target;  ///< empty for the all-or-none null
    double prior = 0.0;
    double log_bayes_factor = 0.0;   ///< against the null (0 for the null itself)
    double posterior = 0.0;
    double posterior_se = 0.0;
    std::string error;
};

/// Posterior model probabilities over candidate target sets, plus the all-or-none null when
/// `include_null`. `prior_probs` has one entry per candidate, then one for the null if
/// included; empty means even odds. Entries come back sorted by posterior.
std::vector<ScanEntry> model_scan(const FailureTable& table, const std::vector<TargetSpec>& candidates,
                                  Variant variant, Phase phase, const PriorSpec& priors,
                                  const std::vector<double>& prior_probs, const BayesOptions& options,
                                  bool include_null = true);

/// Every non-empty strict subset of {1..J}, ordered by size then lexicographically.
std::vector<TargetSpec> all_target_sets(int J);

}  // namespace snl
