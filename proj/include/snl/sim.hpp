#pragma once
// Simulation study: scenario generation, method execution over replicates and ROC summaries.

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "snl/types.hpp"

namespace snl {

enum class QMode { uniform, insert_only };
enum class NullMode { none, all_or_none_null, permuted_one_or_none };

std::string to_string(QMode mode);
std::string to_string(NullMode mode);
QMode parse_q_mode(const std::string& text);
NullMode parse_null_mode(const std::string& text);

struct ScenarioConfig {
    std::string label;
    Count n_p = 1000;
    Count n_v = 1000;
    double r_c0 = 0.9;
    std::vector<double> p_c;
    std::vector<int> targets{1};
    double I_E = 0.0;
    double p_s = 0.0;
    QMode q_mode = QMode::uniform;
    NullMode null_mode = NullMode::none;
    int replicates = 1000;
    std::uint64_t seed = 1;

    TargetSpec target() const;
    /// Normalised generating parameters (q built from q_mode). Throws InfeasibleError.
    SnlParams params() const;
    /// Full check; all_or_none_null ignores p_s.
    void validate() const;
};

/// The eleven published scenarios, each with its own derived seed.
std::vector<ScenarioConfig> builtin_scenarios(int replicates = 1000, std::uint64_t seed = 1);

/// The published counterfactual failure-type distribution, renormalised.
std::vector<double> published_p_c();

FailureTable simulate_dataset(const ScenarioConfig& cfg, int replicate_index);

/// Names accepted by run_grid.
const std::vector<std::string>& known_methods();

struct GridOptions {
    double alpha = 0.05;
    double bf_threshold = 1.0;
    int n_mc = 1000;     ///< Monte-Carlo draws per Bayes factor
    int B = 100;         ///< permutations for the -perm variants
    int fit_starts = 4;  ///< one-phase multi-start count
    unsigned threads = 0;
    std::uint64_t seed = 1;
    /// Externally computed 0/1 decisions: method -> scenario label -> per-replicate decision.
    std::map<std::string, std::map<std::string, std::vector<int>>> external;
};

struct GridReport {
    std::vector<std::string> rows;
    std::vector<std::string> cols;
    std::vector<std::vector<double>> rejection_rate;
    std::vector<std::vector<int>> errors;
    std::vector<int> replicates;
    std::vector<std::uint64_t> seeds;
    /// scores[row][col][replicate]: LRT statistic, log10 BF or 1 - p, larger = more evidence.
    std::vector<std::vector<std::vector<double>>> scores;
    std::vector<std::vector<std::vector<int>>> decisions;
};

/// Runs every method on every replicate; replicates fan out over workers and are merged in
/// index order, so the report does not depend on the thread count.
GridReport run_grid(const std::vector<ScenarioConfig>& scenarios, const std::vector<std::string>& methods,
                    const GridOptions& options, const std::function<void(const std::string&)>& progress = {});

struct RocPanel {
    std::string positive;
    std::string negative;
    std::string method;
    double auc = 0.5;
    int n_pos = 0;
    int n_neg = 0;
};

/// AUC for every (positive row, negative row, method column) triple of a report.
std::vector<RocPanel> roc_panels(const GridReport& report, const std::vector<std::string>& positives,
                                 const std::vector<std::string>& negatives, const std::vector<std::string>& methods);

}  // namespace snl
