#include "snl/permutation.hpp"

#include <atomic>
#include <cmath>
#include <limits>

#include "snl/parallel.hpp"

namespace snl {

FailureTable permute_table(const FailureTable& table, Rng& rng) {
    const auto p = table.placebo();
    const auto v = table.vaccine();
    const std::size_t K = p.size();
    const auto n_p = static_cast<std::size_t>(table.placebo_size());
    const auto n_v = static_cast<std::size_t>(table.vaccine_size());

    std::vector<int> subjects;
    subjects.reserve(n_p + n_v);
    for (std::size_t k = 0; k < K; ++k)
        subjects.insert(subjects.end(), static_cast<std::size_t>(p[k] + v[k]), static_cast<int>(k));

    // partial Fisher-Yates: the first `take` positions become the smaller arm
    const std::size_t take = std::min(n_p, n_v);
    for (std::size_t i = 0; i < take; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, subjects.size() - 1);
        std::swap(subjects[i], subjects[pick(rng)]);
    }
    std::vector<Count> small(K, 0), large(K, 0);
    for (std::size_t i = 0; i < take; ++i) ++small[static_cast<std::size_t>(subjects[i])];
    for (std::size_t k = 0; k < K; ++k) large[k] = p[k] + v[k] - small[k];

    if (n_v <= n_p) return FailureTable(std::move(large), std::move(small), table.labels());
    return FailureTable(std::move(small), std::move(large), table.labels());
}

bool at_least(double draw, double observed) {
    if (std::isinf(observed)) return draw == observed || (observed < 0);
    return draw >= observed - 1e-9 * std::max(1.0, std::abs(observed));
}

TestResult permutation_null(const FailureTable& table, const TableStatistic& statistic,
                            const PermutationOptions& options) {
    if (options.B < 1) throw InputError("permutation replicate count must be at least 1");
    const double observed = statistic(table);
    if (std::isnan(observed)) throw NumericalError("observed statistic is NaN");

    const auto B = static_cast<std::size_t>(options.B);
    std::vector<double> draws(B, std::numeric_limits<double>::quiet_NaN());
    std::vector<int> attempts_used(B, 0);
    const int per_replicate_cap = 10 * options.B;
    std::atomic<long long> total_attempts{0};
    const long long total_cap = 10LL * options.B;

    parallel_for(
        B,
        [&](std::size_t r) {
            for (int a = 0; a < per_replicate_cap; ++a) {
                if (++total_attempts > total_cap)
                    throw NumericalError("permutation statistic failed on too many permuted tables");
                Rng rng(derive_seed(options.seed, r, static_cast<std::uint64_t>(a)));
                try {
                    const FailureTable perm = permute_table(table, rng);
                    const double s = statistic(perm);
                    if (std::isnan(s)) continue;
                    draws[r] = s;
                    attempts_used[r] = a + 1;
                    return;
                } catch (const Error&) {
                    continue;
                }
            }
        },
        options.threads);

    std::size_t exceed = 0;
    int redraws = 0;
    for (std::size_t r = 0; r < B; ++r) {
        if (at_least(draws[r], observed)) ++exceed;
        redraws += attempts_used[r] - 1;
    }

    TestResult out;
    out.method = "permutation";
    out.statistic = observed;
    out.raw_statistic = observed;
    out.p_value = (1.0 + static_cast<double>(exceed)) / (1.0 + static_cast<double>(B));
    const double p = *out.p_value;
    out.mc_se = std::sqrt(p * (1.0 - p) / static_cast<double>(B));
    if (options.keep_draws) out.null_draws = std::move(draws);
    if (redraws > 0) out.notes.push_back(std::to_string(redraws) + " permuted tables redrawn after statistic failure");
    return out;
}

}  // namespace snl
