#pragma once
// Maximum-likelihood fits of all-or-none and some-or-none models and likelihood-ratio tests.

#include <cstdint>
#include <vector>

#include "snl/plugin.hpp"
#include "snl/result.hpp"
#include "snl/types.hpp"

namespace snl {

struct FitOptions {
    int starts = 8;               ///< one-phase multi-start count (first start is data-driven)
    std::uint64_t seed = 1;
    int max_iterations = 2000;
    ZeroCellCorrection zero_cell;  ///< two-phase placebo p_c
};

struct FitResult {
    /// For all_or_none fits p_s = 0 and q is uniform; with I_E > 0 this point lies
    /// outside the some-or-none family, so use p_v rather than vaccine_profile(params).
    SnlParams params;
    std::vector<double> p_v;
    double r_v0 = 0.0;
    double log_lik = 0.0;
    Variant variant = Variant::all_or_none;
    Phase phase = Phase::two_phase;
    bool converged = false;
    int iterations = 0;
    bool boundary = false;  ///< optimum sits on the feasibility bound p_s = lower bound
};

FitResult fit_mle(const FailureTable& table, const TargetSpec& target, Variant variant, Phase phase,
                  const FitOptions& options = {});

/// Null fit used by lrt for `variant`: all-or-none, with I_E fixed at 0 for replacement_only.
FitResult fit_null(const FailureTable& table, const TargetSpec& target, Variant variant, Phase phase,
                   const FitOptions& options = {});

/// -2 log(L_null / L_alt) against chi-squared(1). The statistic is clipped at 0;
/// raw_statistic keeps the signed value.
TestResult lrt(const FailureTable& table, const TargetSpec& target, Variant variant, Phase phase,
               const FitOptions& options = {});

/// Upper tail of chi-squared with one degree of freedom.
double chi2_sf_1df(double x);

/// Exact two-phase maximiser of the vaccine failure multinomial at fixed (p_c, I_E).
/// Exposed for testing; `boundary` reports whether no mass is replaced.
struct TwoPhaseSolution {
    std::vector<double> p_v;
    double p_s = 0.0;
    std::vector<double> q;
    bool boundary = false;
};
TwoPhaseSolution solve_two_phase(std::span<const Count> vaccine_failures, std::span<const double> p_c,
                                 double I_E, const TargetSpec& target, bool insert_only);

}  // namespace snl
