#pragma once
// Unconstrained quasi-Newton minimisation with numerical gradients.

#include <functional>
#include <vector>

namespace snl {

struct MinimizeOptions {
    int max_iterations = 500;
    double gradient_tolerance = 1e-7;
    double value_tolerance = 1e-13;  ///< relative change in f over one iteration
    double gradient_step = 1e-6;
};

struct MinimizeResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

using Objective = std::function<double(const std::vector<double>&)>;

/// BFGS with central-difference gradients and backtracking line search.
/// Non-finite objective values are treated as +inf and rejected by the line search.
MinimizeResult minimize_bfgs(const Objective& f, std::vector<double> x0, const MinimizeOptions& options = {});

/// Golden-section search for a minimum of a univariate function on [lo, hi].
double golden_section(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-12);

}  // namespace snl
