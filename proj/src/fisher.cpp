#include "snl/fisher.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "snl/random.hpp"

namespace snl {

namespace {

constexpr double kTieTolerance = 1e-7;

struct Enumerator {
    std::vector<Count> cols;
    std::vector<Count> suffix;                    // suffix[j] = sum of cols[j..]
    std::vector<std::vector<double>> log_choose;  // log C(cols[j], x)
    double log_norm = 0.0;
    double threshold = 0.0;
    double p_sum = 0.0;
    double total = 0.0;
    std::uint64_t tables = 0;
    std::uint64_t cap = 0;
    bool aborted = false;

    void run(std::size_t j, Count remaining, double acc) {
        if (aborted) return;
        if (j + 1 == cols.size()) {
            const double lp = acc + log_choose[j][static_cast<std::size_t>(remaining)] - log_norm;
            const double prob = std::exp(lp);
            total += prob;
            if (lp <= threshold) p_sum += prob;
            if (++tables > cap) aborted = true;
            return;
        }
        const Count lo = std::max<Count>(0, remaining - suffix[j + 1]);
        const Count hi = std::min(cols[j], remaining);
        for (Count x = lo; x <= hi && !aborted; ++x)
            run(j + 1, remaining - x, acc + log_choose[j][static_cast<std::size_t>(x)]);
    }
};

double log_table_prob(const std::vector<Count>& row, const std::vector<Count>& cols, double log_norm) {
    double lp = -log_norm;
    for (std::size_t j = 0; j < cols.size(); ++j)
        lp += std::lgamma(static_cast<double>(cols[j]) + 1.0) - std::lgamma(static_cast<double>(row[j]) + 1.0) -
              std::lgamma(static_cast<double>(cols[j] - row[j]) + 1.0);
    return lp;
}

}  // namespace

ContingencySlice ContingencySlice::failures_of(const FailureTable& table) {
    ContingencySlice s;
    s.placebo.assign(table.placebo_failures().begin(), table.placebo_failures().end());
    s.vaccine.assign(table.vaccine_failures().begin(), table.vaccine_failures().end());
    return s;
}

FisherResult fisher_exact(const ContingencySlice& slice, const FisherOptions& options) {
    if (slice.placebo.size() != slice.vaccine.size() || slice.placebo.empty())
        throw InputError("contingency rows must have equal, non-zero length");
    for (std::size_t j = 0; j < slice.placebo.size(); ++j)
        if (slice.placebo[j] < 0 || slice.vaccine[j] < 0) throw InputError("negative count in contingency slice");
    const Count r1 = std::accumulate(slice.placebo.begin(), slice.placebo.end(), Count{0});
    const Count r2 = std::accumulate(slice.vaccine.begin(), slice.vaccine.end(), Count{0});
    if (r1 == 0 || r2 == 0) throw DegenerateDataError("Fisher test needs at least one failure in each arm");

    // drop empty columns; they do not change the conditional law
    std::vector<Count> cols, row;
    for (std::size_t j = 0; j < slice.placebo.size(); ++j) {
        const Count c = slice.placebo[j] + slice.vaccine[j];
        if (c == 0) continue;
        cols.push_back(c);
        row.push_back(slice.placebo[j]);
    }
    const Count N = r1 + r2;
    const double log_norm = std::lgamma(static_cast<double>(N) + 1.0) - std::lgamma(static_cast<double>(r1) + 1.0) -
                            std::lgamma(static_cast<double>(r2) + 1.0);
    const double observed = log_table_prob(row, cols, log_norm);
    const double threshold = observed + std::log1p(kTieTolerance);

    FisherResult result;
    if (cols.size() == 1) {
        result.p_value = 1.0;
        result.total_probability = 1.0;
        result.tables = 1;
        return result;
    }

    if (N <= options.exact_limit) {
        Enumerator e;
        e.cols = cols;
        e.suffix.assign(cols.size() + 1, 0);
        for (std::size_t j = cols.size(); j-- > 0;) e.suffix[j] = e.suffix[j + 1] + cols[j];
        e.log_choose.resize(cols.size());
        for (std::size_t j = 0; j < cols.size(); ++j) {
            const double c = static_cast<double>(cols[j]);
            e.log_choose[j].resize(static_cast<std::size_t>(cols[j]) + 1);
            for (Count x = 0; x <= cols[j]; ++x)
                e.log_choose[j][static_cast<std::size_t>(x)] =
                    std::lgamma(c + 1.0) - std::lgamma(static_cast<double>(x) + 1.0) - std::lgamma(c - static_cast<double>(x) + 1.0);
        }
        e.log_norm = log_norm;
        e.threshold = threshold;
        e.cap = options.max_tables;
        e.run(0, r1, 0.0);
        if (!e.aborted) {
            result.p_value = std::min(1.0, e.p_sum);
            result.total_probability = e.total;
            result.tables = e.tables;
            return result;
        }
    }

    // Monte Carlo over random label assignments with the same margins
    Rng rng(derive_seed(options.seed, 0xf15e));
    std::vector<int> pool;
    pool.reserve(static_cast<std::size_t>(N));
    for (std::size_t j = 0; j < cols.size(); ++j) pool.insert(pool.end(), static_cast<std::size_t>(cols[j]), static_cast<int>(j));
    std::size_t hits = 0;
    std::vector<Count> draw(cols.size());
    for (int it = 0; it < options.n_mc; ++it) {
        std::fill(draw.begin(), draw.end(), 0);
        for (Count i = 0; i < r1; ++i) {
            std::uniform_int_distribution<std::size_t> pick(static_cast<std::size_t>(i), pool.size() - 1);
            std::swap(pool[static_cast<std::size_t>(i)], pool[pick(rng)]);
            ++draw[static_cast<std::size_t>(pool[static_cast<std::size_t>(i)])];
        }
        if (log_table_prob(draw, cols, log_norm) <= threshold) ++hits;
    }
    result.exact = false;
    result.p_value = static_cast<double>(hits) / options.n_mc;
    result.mc_se = std::sqrt(result.p_value * (1.0 - result.p_value) / options.n_mc);
    return result;
}

TestResult fisher_test(const FailureTable& table, const FisherOptions& options) {
    const FisherResult r = fisher_exact(ContingencySlice::failures_of(table), options);
    TestResult out;
    out.method = r.exact ? "fisher-exact" : "fisher-mc";
    out.p_value = r.p_value;
    out.statistic = r.p_value;
    out.raw_statistic = r.p_value;
    out.mc_se = r.mc_se;
    return out;
}

}  // namespace snl
