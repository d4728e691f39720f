#include "snl/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "snl/profile.hpp"

namespace snl {

std::string to_string(Phase phase) {
    return phase == Phase::one_phase ? "one_phase" : "two_phase";
}

std::string to_string(Variant variant) {
    switch (variant) {
        case Variant::all_or_none: return "all_or_none";
        case Variant::some_or_none: return "some_or_none";
        case Variant::replacement_only: return "replacement_only";
        case Variant::insert_only: return "insert_only";
    }
    return "unknown";
}

Phase parse_phase(const std::string& text) {
    if (text == "one_phase" || text == "1phase" || text == "one") return Phase::one_phase;
    if (text == "two_phase" || text == "2phase" || text == "two") return Phase::two_phase;
    throw InputError("unknown phase '" + text + "'");
}

Variant parse_variant(const std::string& text) {
    if (text == "all_or_none") return Variant::all_or_none;
    if (text == "some_or_none") return Variant::some_or_none;
    if (text == "replacement_only") return Variant::replacement_only;
    if (text == "insert_only") return Variant::insert_only;
    throw InputError("unknown model variant '" + text + "'");
}

FailureTable::FailureTable(std::vector<Count> placebo, std::vector<Count> vaccine,
                           std::vector<std::string> labels)
    : placebo_(std::move(placebo)), vaccine_(std::move(vaccine)), labels_(std::move(labels)) {
    if (placebo_.size() != vaccine_.size())
        throw InputError("placebo and vaccine rows have different lengths");
    if (placebo_.size() < 3)
        throw InputError("a failure table needs categories 0..J with J >= 2");
    for (std::size_t j = 0; j < placebo_.size(); ++j) {
        if (placebo_[j] < 0 || vaccine_[j] < 0)
            throw InputError("negative count in category " + std::to_string(j));
    }
    placebo_total_ = std::accumulate(placebo_.begin(), placebo_.end(), Count{0});
    vaccine_total_ = std::accumulate(vaccine_.begin(), vaccine_.end(), Count{0});
    if (placebo_total_ <= 0 || vaccine_total_ <= 0)
        throw DegenerateDataError("each arm needs at least one subject");
    if (!labels_.empty() && labels_.size() != placebo_.size()) {
        if (labels_.size() + 1 == placebo_.size())
            labels_.insert(labels_.begin(), "0");
        else
            throw InputError("label count does not match the number of categories");
    }
}

std::string FailureTable::label(int category) const {
    if (!labels_.empty()) return labels_.at(static_cast<std::size_t>(category));
    return "cat" + std::to_string(category);
}

TargetSpec::TargetSpec(std::vector<int> targets, int J) : J_(J), targets_(std::move(targets)) {
    if (J_ < 2) throw InputError("target spec needs J >= 2");
    std::sort(targets_.begin(), targets_.end());
    if (std::adjacent_find(targets_.begin(), targets_.end()) != targets_.end())
        throw InputError("target set lists a failure type twice");
    if (targets_.empty()) throw InputError("target set is empty");
    if (targets_.front() < 1 || targets_.back() > J_)
        throw InputError("target index out of range 1.." + std::to_string(J_));
    if (static_cast<int>(targets_.size()) >= J_)
        throw InputError("target set must be a strict subset of the failure types");
    mask_.assign(static_cast<std::size_t>(J_) + 1, 0);
    for (int t : targets_) mask_[static_cast<std::size_t>(t)] = 1;
    for (int j = 1; j <= J_; ++j)
        if (!mask_[static_cast<std::size_t>(j)]) non_targets_.push_back(j);
}

bool TargetSpec::contains(int failure_type) const {
    if (failure_type < 1 || failure_type > J_) return false;
    return mask_[static_cast<std::size_t>(failure_type)] != 0;
}

std::vector<int> TargetSpec::reindexing() const {
    std::vector<int> order(targets_);
    order.insert(order.end(), non_targets_.begin(), non_targets_.end());
    return order;
}

std::string TargetSpec::to_string() const {
    std::ostringstream out;
    for (std::size_t i = 0; i < targets_.size(); ++i) out << (i ? "," : "") << targets_[i];
    return out.str();
}

double SnlParams::targeted_mass(const TargetSpec& target) const {
    double mass = 0.0;
    for (int t : target.targets()) mass += p_c.at(static_cast<std::size_t>(t - 1));
    return mass;
}

std::vector<double> normalized_simplex(std::vector<double> values, const std::string& name,
                                       double tolerance) {
    double sum = 0.0;
    for (double v : values) {
        if (!std::isfinite(v) || v < 0.0) throw InputError(name + " has a negative or non-finite entry");
        sum += v;
    }
    if (values.empty() || std::abs(sum - 1.0) > tolerance) {
        std::ostringstream msg;
        msg << name << " sums to " << sum << ", not 1";
        throw InputError(msg.str());
    }
    for (double& v : values) v /= sum;
    return values;
}

SnlParams validated(SnlParams params, const TargetSpec& target) {
    const auto J = static_cast<std::size_t>(target.J());
    if (params.p_c.size() != J) throw InputError("p_c must have length J");
    if (params.q.size() != J - static_cast<std::size_t>(target.g()))
        throw InputError("q must have length J - g");
    params.p_c = normalized_simplex(std::move(params.p_c), "p_c");
    params.q = normalized_simplex(std::move(params.q), "q");
    if (!(params.p_s >= 0.0 && params.p_s <= 1.0)) throw InputError("p_s must lie in [0, 1]");
    if (!(params.I_E >= 0.0 && params.I_E < 1.0)) throw InputError("I_E must lie in [0, 1)");
    if (!(params.r_c0 >= 0.0 && params.r_c0 < 1.0)) throw InputError("r_c0 must lie in [0, 1)");
    const FeasibilityReport report =
        feasibility_check(params.I_E, params.targeted_mass(target), params.p_s);
    if (!report.feasible) throw InfeasibleError("parameters", report);
    return params;
}

}  // namespace snl
