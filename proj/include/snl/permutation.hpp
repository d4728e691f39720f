#pragma once
// Label-permutation null distributions conditioning on arm sizes and pooled category totals.

#include <cstdint>
#include <functional>

#include "snl/random.hpp"
#include "snl/result.hpp"
#include "snl/types.hpp"

namespace snl {

using TableStatistic = std::function<double(const FailureTable&)>;

/// Shuffles arm labels over the subject-level outcomes reconstructed from `table`.
FailureTable permute_table(const FailureTable& table, Rng& rng);

struct PermutationOptions {
    int B = 1000;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    bool keep_draws = true;
};

/// p = (1 + #{null >= observed}) / (1 + B). Replicate r, attempt a uses seed derive_seed(seed, r, a);
/// a draw whose statistic throws or is NaN is redrawn, with at most 10 B attempts in total.
TestResult permutation_null(const FailureTable& table, const TableStatistic& statistic,
                            const PermutationOptions& options);

/// Tie rule shared by permutation p-values: `draw` counts as an exceedance of `observed`.
bool at_least(double draw, double observed);

}  // namespace snl
