#pragma once
// Fisher's exact test on the 2 x J failure-type table (non-failures excluded).

#include <cstdint>
#include <optional>
#include <vector>

#include "snl/result.hpp"
#include "snl/types.hpp"

namespace snl {

struct ContingencySlice {
    std::vector<Count> placebo;
    std::vector<Count> vaccine;

    static ContingencySlice failures_of(const FailureTable& table);
};

struct FisherOptions {
    Count exact_limit = 500;              ///< total failures above which Monte Carlo is used
    std::uint64_t max_tables = 50'000'000; ///< enumeration cap before falling back to Monte Carlo
    int n_mc = 100'000;
    std::uint64_t seed = 1;
};

struct FisherResult {
    double p_value = 1.0;
    bool exact = true;
    std::optional<double> mc_se;
    double total_probability = 0.0;  ///< mass of all enumerated tables (exact mode)
    std::uint64_t tables = 0;
};

/// Two-sided p: total probability of margin-consistent tables no more probable than the
/// observed one (relative tie tolerance 1e-7).
FisherResult fisher_exact(const ContingencySlice& slice, const FisherOptions& options = {});

TestResult fisher_test(const FailureTable& table, const FisherOptions& options = {});

}  // namespace snl
