#include "snl/plugin.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "snl/profile.hpp"

namespace snl {

namespace {

constexpr double kSumTolerance = 1e-9;

bool in_unit(double x) { return x >= -kSumTolerance && x <= 1.0 + kSumTolerance; }

}  // namespace

double plugin_efficacy(const FailureTable& table) {
    if (table.placebo_failure_total() <= 0)
        throw DegenerateDataError("placebo arm has no failures; efficacy is undefined");
    const double vaccine_rate =
        static_cast<double>(table.vaccine_failure_total()) / static_cast<double>(table.vaccine_size());
    const double placebo_rate =
        static_cast<double>(table.placebo_failure_total()) / static_cast<double>(table.placebo_size());
    return 1.0 - vaccine_rate / placebo_rate;
}

PluginEstimate plugin_estimates(std::span<const double> placebo, std::span<const double> vaccine,
                                const TargetSpec& target, bool assume_replacement_only) {
    const std::size_t K = placebo.size();
    if (vaccine.size() != K || static_cast<int>(K) != target.J() + 1)
        throw InputError("count vectors must cover categories 0..J");

    const double n_p = std::accumulate(placebo.begin(), placebo.end(), 0.0);
    const double n_v = std::accumulate(vaccine.begin(), vaccine.end(), 0.0);
    const double f_p = n_p - placebo[0];
    const double f_v = n_v - vaccine[0];
    if (f_p <= 0.0 || f_v <= 0.0)
        throw DegenerateDataError("plug-in estimates need at least one failure in each arm");

    PluginEstimate est;
    est.replacement_only = assume_replacement_only;
    est.p_c.resize(K - 1);
    est.p_v.resize(K - 1);
    for (std::size_t j = 1; j < K; ++j) {
        est.p_c[j - 1] = placebo[j] / f_p;
        est.p_v[j - 1] = vaccine[j] / f_v;
    }
    est.r_c0 = placebo[0] / n_p;
    est.r_v0 = vaccine[0] / n_v;

    est.I_E_raw = 1.0 - (f_v / n_v) / (f_p / n_p);
    est.I_E = est.I_E_raw;
    if (assume_replacement_only) {
        est.I_E = 0.0;
    } else if (est.I_E < 0.0) {
        est.I_E = 0.0;
        est.ie_clamped = true;
    }

    double p_cG = 0.0, p_vG = 0.0;
    for (int t : target.targets()) {
        p_cG += est.p_c[static_cast<std::size_t>(t - 1)];
        p_vG += est.p_v[static_cast<std::size_t>(t - 1)];
    }
    if (p_cG <= 0.0)
        throw DegenerateDataError("targeted failure types have no placebo failures; p_s is undefined");

    est.p_s = 1.0 - p_vG / p_cG;
    est.p_t = take_rate(est.p_s, est.I_E);

    const double protected_mass = p_cG * est.p_t;
    if (protected_mass != 0.0) {
        est.p_2 = 1.0 - est.I_E / protected_mass;
    } else if (est.I_E == 0.0) {
        est.p_2 = 1.0;
    } else {
        throw NumericalError("plug-in replacement rate divides by p_t * p_cG = 0");
    }

    const double replaced = protected_mass * est.p_2;  // = p_cG p_t - I_E
    if (std::abs(replaced) > 1e-15) {
        std::vector<double> q;
        q.reserve(target.non_targets().size());
        for (int j : target.non_targets()) {
            const auto k = static_cast<std::size_t>(j - 1);
            q.push_back(((1.0 - est.I_E) * est.p_v[k] - est.p_c[k]) / replaced);
        }
        est.q = std::move(q);
    }

    auto flag = [&](const std::string& what, double value) {
        std::ostringstream out;
        out << what << " = " << value;
        est.violations.push_back(out.str());
    };
    if (!in_unit(est.p_s)) flag("p_s outside [0,1]", est.p_s);
    if (!in_unit(est.p_t)) flag("p_t outside [0,1]", est.p_t);
    if (!in_unit(est.p_2)) flag("p_2 outside [0,1]", est.p_2);
    if (est.q) {
        double sum = 0.0;
        for (double v : *est.q) {
            sum += v;
            if (!in_unit(v)) flag("q entry outside [0,1]", v);
        }
        if (std::abs(sum - 1.0) > kSumTolerance) flag("q does not sum to 1", sum);
    } else {
        est.violations.push_back("q unidentified: no replaced mass");
    }
    const FeasibilityReport feas = feasibility_check(est.I_E, p_cG, est.p_s);
    if (!feas.feasible) flag("feasibility slack", feas.slack);
    return est;
}

PluginEstimate plugin_estimates(const FailureTable& table, const TargetSpec& target,
                                bool assume_replacement_only) {
    if (target.J() != table.J()) throw InputError("target spec and table disagree on J");
    std::vector<double> p(table.placebo().begin(), table.placebo().end());
    std::vector<double> v(table.vaccine().begin(), table.vaccine().end());
    return plugin_estimates(p, v, target, assume_replacement_only);
}

std::vector<double> placebo_plugin_pc(const FailureTable& table, const ZeroCellCorrection& correction) {
    const auto placebo = table.placebo_failures();
    const auto vaccine = table.vaccine_failures();
    const std::size_t J = placebo.size();
    bool needed = false;
    for (std::size_t k = 0; k < J; ++k)
        if (placebo[k] == 0 && vaccine[k] > 0) needed = true;

    bool apply = false;
    switch (correction.mode) {
        case ZeroCellCorrection::Mode::none: apply = false; break;
        case ZeroCellCorrection::Mode::when_needed: apply = needed; break;
        case ZeroCellCorrection::Mode::always: apply = true; break;
    }
    const double pseudo = apply ? (correction.pseudocount > 0.0 ? correction.pseudocount
                                                                : 1.0 / static_cast<double>(J))
                                : 0.0;
    std::vector<double> p_c(J);
    double total = 0.0;
    for (std::size_t k = 0; k < J; ++k) {
        p_c[k] = static_cast<double>(placebo[k]) + pseudo;
        total += p_c[k];
    }
    if (total <= 0.0) throw DegenerateDataError("placebo arm has no failures");
    for (double& v : p_c) v /= total;
    return p_c;
}

std::string to_string(ZeroCellCorrection::Mode mode) {
    switch (mode) {
        case ZeroCellCorrection::Mode::none: return "none";
        case ZeroCellCorrection::Mode::when_needed: return "when_needed";
        case ZeroCellCorrection::Mode::always: return "always";
    }
    return "unknown";
}

ZeroCellCorrection::Mode parse_zero_cell_mode(const std::string& text) {
    if (text == "none") return ZeroCellCorrection::Mode::none;
    if (text == "when_needed" || text == "auto") return ZeroCellCorrection::Mode::when_needed;
    if (text == "always") return ZeroCellCorrection::Mode::always;
    throw InputError("unknown zero-cell correction '" + text + "'");
}

}  // namespace snl
