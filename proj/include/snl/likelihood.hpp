#pragma once

#include <span>

#include "snl/types.hpp"

namespace snl {

/// log of the multinomial mass; 0*log(0) = 0, positive count on a zero cell gives -inf.
double log_multinomial(std::span<const Count> counts, std::span<const double> probs,
                       bool with_coefficient = true);
double log_multinomial(std::span<const double> counts, std::span<const double> probs,
                       bool with_coefficient = true);

/// log P(k successes out of n) with success probability p.
double log_binomial(Count k, Count n, double p, bool with_coefficient = true);

/// Which terms of the joint likelihood are evaluated.
enum class LikelihoodScope {
    one_phase,              ///< both binomial non-failure terms and both failure multinomials
    two_phase_conditional,  ///< the vaccine failure multinomial at fixed p_c
};

/// Joint or conditional log-likelihood of a some-or-none parameter set.
/// `include_nonfailure` adds the vaccine non-failure binomial to the conditional scope.
double log_likelihood(const FailureTable& table, const SnlParams& params, const TargetSpec& target,
                      LikelihoodScope scope, bool include_nonfailure = false);

/// Same, with the vaccine failure simplex supplied directly (no feasibility check).
double log_likelihood_pv(const FailureTable& table, std::span<const double> p_c,
                         std::span<const double> p_v, double r_c0, double r_v0,
                         LikelihoodScope scope, bool include_nonfailure = false);

}  // namespace snl
