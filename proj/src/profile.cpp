#include "snl/profile.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace snl {

std::string FeasibilityReport::describe() const {
    std::ostringstream out;
    out << (feasible ? "feasible" : "infeasible") << " (I_E=" << intervention_efficacy
        << ", p_cG=" << targeted_mass << ", p_s=" << sieve_strength
        << "): requires I_E <= p_cG*(1-(1-p_s)(1-I_E)); slack=" << slack
        << "; equivalent bounds I_E <= " << ie_upper << ", p_cG >= " << pcg_lower
        << ", p_s >= " << ps_lower;
    return out.str();
}

double sieve_strength_lower_bound(double I_E, double p_cG) {
    if (I_E <= 0.0) return 0.0;
    if (p_cG <= 0.0) return std::numeric_limits<double>::infinity();
    if (I_E >= 1.0) return p_cG >= 1.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return I_E * (1.0 - p_cG) / (p_cG * (1.0 - I_E));
}

FeasibilityReport feasibility_check(double I_E, double p_cG, double p_s) {
    FeasibilityReport r;
    r.intervention_efficacy = I_E;
    r.targeted_mass = p_cG;
    r.sieve_strength = p_s;
    r.slack = p_cG * (1.0 - (1.0 - p_s) * (1.0 - I_E)) - I_E;
    r.feasible = r.slack >= -kFeasibilityTolerance;

    const double ie_den = 1.0 - p_cG * (1.0 - p_s);
    r.ie_upper = ie_den > 0.0 ? p_cG * p_s / ie_den : 1.0;

    const double pcg_den = p_s + I_E * (1.0 - p_s);
    r.pcg_lower = pcg_den > 0.0 ? I_E / pcg_den : 0.0;

    r.ps_lower = sieve_strength_lower_bound(I_E, p_cG);
    return r;
}

double take_rate(double p_s, double I_E) { return 1.0 - (1.0 - p_s) * (1.0 - I_E); }

double replacement_rate(double p_s, double I_E, double p_cG) {
    const double protected_mass = p_cG * take_rate(p_s, I_E);
    if (protected_mass > 0.0) return 1.0 - I_E / protected_mass;
    if (I_E == 0.0) return 1.0;
    throw NumericalError("replacement rate undefined: p_t * p_cG = 0 with I_E > 0");
}

void vaccine_failure_profile(std::span<const double> p_c, double p_s, double I_E,
                             std::span<const double> q, const TargetSpec& target,
                             std::span<double> p_v) {
    double p_cG = 0.0;
    for (int t : target.targets()) p_cG += p_c[static_cast<std::size_t>(t - 1)];
    double replaced = p_cG * take_rate(p_s, I_E) - I_E;
    if (replaced < 0.0 && replaced > -kFeasibilityTolerance) replaced = 0.0;
    const double scale = 1.0 / (1.0 - I_E);
    for (int t : target.targets()) {
        const auto k = static_cast<std::size_t>(t - 1);
        p_v[k] = p_c[k] * (1.0 - p_s);
    }
    const auto& others = target.non_targets();
    for (std::size_t i = 0; i < others.size(); ++i) {
        const auto k = static_cast<std::size_t>(others[i] - 1);
        p_v[k] = (p_c[k] + replaced * q[i]) * scale;
    }
}

DerivedRates vaccine_profile(const SnlParams& params, const TargetSpec& target) {
    const SnlParams p = validated(params, target);
    const double p_cG = p.targeted_mass(target);
    DerivedRates out;
    out.p_t = take_rate(p.p_s, p.I_E);
    out.p_2 = replacement_rate(p.p_s, p.I_E, p_cG);
    out.p_v.assign(p.p_c.size(), 0.0);
    vaccine_failure_profile(p.p_c, p.p_s, p.I_E, p.q, target, out.p_v);
    out.r_v0 = 1.0 - (1.0 - p.I_E) * (1.0 - p.r_c0);
    return out;
}

std::vector<double> expected_counts(const SnlParams& params, const TargetSpec& target,
                                    std::span<const double> counterfactual_counts) {
    const SnlParams p = validated(params, target);
    if (counterfactual_counts.size() != p.p_c.size() + 1)
        throw InputError("counterfactual counts must cover categories 0..J");
    const double p_t = take_rate(p.p_s, p.I_E);
    const double p_2 = replacement_rate(p.p_s, p.I_E, p.targeted_mass(target));

    double n_cG = 0.0;
    for (int t : target.targets()) n_cG += counterfactual_counts[static_cast<std::size_t>(t)];

    std::vector<double> out(counterfactual_counts.begin(), counterfactual_counts.end());
    out[0] += n_cG * p_t * (1.0 - p_2);
    for (int t : target.targets()) out[static_cast<std::size_t>(t)] *= (1.0 - p_t);
    const auto& others = target.non_targets();
    for (std::size_t i = 0; i < others.size(); ++i)
        out[static_cast<std::size_t>(others[i])] += n_cG * p_t * p_2 * p.q[i];
    return out;
}

}  // namespace snl
