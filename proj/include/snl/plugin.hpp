#pragma once
// Closed-form plug-in estimators of the some-or-none parameters.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "snl/types.hpp"

namespace snl {

struct PluginEstimate {
    std::vector<double> p_c;  ///< placebo failure-type frequencies
    std::vector<double> p_v;  ///< vaccine failure-type frequencies
    double r_c0 = 0.0;
    double r_v0 = 0.0;
    double I_E = 0.0;
    double I_E_raw = 0.0;     ///< before clamping at zero
    double p_s = 0.0;
    double p_t = 0.0;
    double p_2 = 1.0;
    std::optional<std::vector<double>> q;  ///< unset when no mass is replaced

    bool ie_clamped = false;
    bool replacement_only = false;
    /// Simultaneous constraints the plug-ins fail to satisfy; empty when all hold.
    std::vector<std::string> violations;

    bool valid() const noexcept { return violations.empty(); }
};

/// Plug-in estimates from integer counts.
PluginEstimate plugin_estimates(const FailureTable& table, const TargetSpec& target,
                                bool assume_replacement_only);

/// Same estimators on real-valued (e.g. expected) counts over categories 0..J.
PluginEstimate plugin_estimates(std::span<const double> placebo, std::span<const double> vaccine,
                                const TargetSpec& target, bool assume_replacement_only);

/// Unclamped efficacy estimate 1 - [vaccine failure rate] / [placebo failure rate].
double plugin_efficacy(const FailureTable& table);

/// How empty placebo categories are handled when p_c is fixed at placebo frequencies.
struct ZeroCellCorrection {
    enum class Mode { none, when_needed, always };
    Mode mode = Mode::when_needed;
    double pseudocount = 0.0;  ///< per failure type; 0 selects 1/J
};

/// Placebo failure-type frequencies used as the fixed p_c of two-phase analyses.
/// `when_needed` adds the pseudocount to every failure type only if some type has
/// no placebo failures but at least one vaccine failure.
std::vector<double> placebo_plugin_pc(const FailureTable& table, const ZeroCellCorrection& correction);

std::string to_string(ZeroCellCorrection::Mode mode);
ZeroCellCorrection::Mode parse_zero_cell_mode(const std::string& text);

}  // namespace snl
