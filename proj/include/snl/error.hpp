#pragma once

#include <stdexcept>
#include <string>

namespace snl {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed or out-of-range input (maps to CLI exit code 2).
class InputError : public Error {
  public:
    using Error::Error;
};

/// Data that cannot support the requested computation, e.g. an arm with no failures.
class DegenerateDataError : public InputError {
  public:
    using InputError::InputError;
};

/// A model variant or option combination that is not implemented for this input.
class UnsupportedError : public InputError {
  public:
    using InputError::InputError;
};

/// Non-convergence or a numerical failure that would otherwise yield a NaN (exit code 4).
class NumericalError : public Error {
  public:
    using Error::Error;
};

/// Verdict of the some-or-none feasibility constraint I_E <= p_cG * p_t, together with the
/// three equivalent one-sided bounds (each computed from the other two quantities).
struct FeasibilityReport {
    bool feasible = true;
    double slack = 0.0;      ///< p_cG * (1 - (1 - p_s)(1 - I_E)) - I_E
    double ie_upper = 1.0;   ///< I_E <= p_cG p_s / (1 - p_cG (1 - p_s))
    double pcg_lower = 0.0;  ///< p_cG >= I_E / (p_s + I_E (1 - p_s))
    double ps_lower = 0.0;   ///< p_s >= I_E (1 - p_cG) / (p_cG (1 - I_E))
    double intervention_efficacy = 0.0;
    double targeted_mass = 0.0;
    double sieve_strength = 0.0;

    std::string describe() const;
};

/// Parameters violate I_E <= p_cG * p_t (exit code 3).
class InfeasibleError : public Error {
  public:
    explicit InfeasibleError(FeasibilityReport report)
        : Error(report.describe()), report_(report) {}
    InfeasibleError(const std::string& context, FeasibilityReport report)
        : Error(context + ": " + report.describe()), report_(report) {}

    const FeasibilityReport& report() const noexcept { return report_; }

  private:
    FeasibilityReport report_;
};

}  // namespace snl
