#pragma once
// Parameter-to-vaccine-profile mapping and the some-or-none feasibility constraint.

#include <span>
#include <vector>

#include "snl/types.hpp"

namespace snl {

/// Tolerance used when deciding feasibility at a tie.
inline constexpr double kFeasibilityTolerance = 1e-12;

/// Total function on [0,1]^3: feasible iff I_E <= p_cG (1 - (1 - p_s)(1 - I_E)).
FeasibilityReport feasibility_check(double I_E, double p_cG, double p_s);

/// Smallest feasible p_s for the given efficacy and targeted mass (may exceed 1).
double sieve_strength_lower_bound(double I_E, double p_cG);

/// p_t and p_2 from (p_s, I_E, p_cG); p_2 = 1 at the degenerate point p_t p_cG = 0, I_E = 0.
double take_rate(double p_s, double I_E);
double replacement_rate(double p_s, double I_E, double p_cG);

/// Treated-arm profile of a feasible parameter set, in original category order.
DerivedRates vaccine_profile(const SnlParams& params, const TargetSpec& target);

/// Treated-arm failure-type simplex only. Assumes feasible inputs; no validation.
void vaccine_failure_profile(std::span<const double> p_c, double p_s, double I_E,
                             std::span<const double> q, const TargetSpec& target,
                             std::span<double> p_v);

/// Expected treated-arm counts (categories 0..J) given counterfactual counts n_c (0..J).
std::vector<double> expected_counts(const SnlParams& params, const TargetSpec& target,
                                    std::span<const double> counterfactual_counts);

}  // namespace snl
