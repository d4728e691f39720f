#pragma once

#include <optional>
#include <string>
#include <vector>

namespace snl {

/// Outcome of a hypothesis test or Bayes-factor computation.
struct TestResult {
    std::string method;
    double statistic = 0.0;
    double raw_statistic = 0.0;  ///< before clipping at zero (LRTs only)
    std::optional<double> p_value;
    std::optional<double> bayes_factor;
    std::optional<double> log_bayes_factor;  ///< natural log; survives overflow of bayes_factor
    std::optional<double> mc_se;              ///< standard error of p_value or bayes_factor
    std::vector<double> null_draws;
    bool boundary = false;
    std::vector<std::string> notes;
};

}  // namespace snl
