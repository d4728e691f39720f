#pragma once
// Domain types shared by every module: outcome tables, target sets and the
// primary some-or-none parameters.
//
// Indexing convention: outcome category 0 is non-failure and categories 1..J are
// failure types. Vectors that range over failure types only (p_c, p_v) are stored
// 0-based, so element k holds failure type k + 1. The replacement distribution q is
// indexed over the non-targeted failure types in ascending original order.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "snl/error.hpp"

namespace snl {

using Count = std::int64_t;

enum class Phase { one_phase, two_phase };

/// Model variants. all_or_none is the sieve null; the rest are some-or-none alternatives.
enum class Variant { all_or_none, some_or_none, replacement_only, insert_only };

std::string to_string(Phase phase);
std::string to_string(Variant variant);
Phase parse_phase(const std::string& text);
Variant parse_variant(const std::string& text);

/// Per-arm outcome counts over categories 0..J.
class FailureTable {
  public:
    FailureTable(std::vector<Count> placebo, std::vector<Count> vaccine,
                 std::vector<std::string> labels = {});

    int J() const noexcept { return static_cast<int>(placebo_.size()) - 1; }

    std::span<const Count> placebo() const noexcept { return placebo_; }
    std::span<const Count> vaccine() const noexcept { return vaccine_; }
    std::span<const Count> placebo_failures() const noexcept { return {placebo_.data() + 1, placebo_.size() - 1}; }
    std::span<const Count> vaccine_failures() const noexcept { return {vaccine_.data() + 1, vaccine_.size() - 1}; }

    Count placebo_size() const noexcept { return placebo_total_; }
    Count vaccine_size() const noexcept { return vaccine_total_; }
    Count placebo_failure_total() const noexcept { return placebo_total_ - placebo_[0]; }
    Count vaccine_failure_total() const noexcept { return vaccine_total_ - vaccine_[0]; }

    /// Category names for 0..J; empty when no labels were supplied.
    const std::vector<std::string>& labels() const noexcept { return labels_; }
    std::string label(int category) const;

    bool operator==(const FailureTable& other) const {
        return placebo_ == other.placebo_ && vaccine_ == other.vaccine_;
    }

  private:
    std::vector<Count> placebo_;
    std::vector<Count> vaccine_;
    std::vector<std::string> labels_;
    Count placebo_total_ = 0;
    Count vaccine_total_ = 0;
};

/// The g targeted failure types of a g-or-none model (1 <= g < J).
class TargetSpec {
  public:
    /// `targets` holds failure-type indices in 1..J.
    TargetSpec(std::vector<int> targets, int J);

    int J() const noexcept { return J_; }
    int g() const noexcept { return static_cast<int>(targets_.size()); }
    const std::vector<int>& targets() const noexcept { return targets_; }
    const std::vector<int>& non_targets() const noexcept { return non_targets_; }
    bool contains(int failure_type) const;

    /// Internal ordering that places targets first: position k holds original failure type.
    std::vector<int> reindexing() const;

    std::string to_string() const;

    bool operator==(const TargetSpec& other) const { return J_ == other.J_ && targets_ == other.targets_; }

  private:
    int J_;
    std::vector<int> targets_;
    std::vector<int> non_targets_;
    std::vector<char> mask_;
};

/// Primary some-or-none parameters.
struct SnlParams {
    std::vector<double> p_c;  ///< counterfactual failure-type simplex, length J
    double p_s = 0.0;         ///< sieve-effect strength in [0, 1]
    double I_E = 0.0;         ///< intervention efficacy in [0, 1)
    double r_c0 = 0.9;        ///< counterfactual non-failure probability in [0, 1)
    std::vector<double> q;    ///< replacement simplex over non-targeted types, length J - g

    /// targeted mass p_cG
    double targeted_mass(const TargetSpec& target) const;
};

/// Checks ranges and simplex sums (renormalising deviations up to 1e-6) and the
/// feasibility bound. Returns the cleaned parameters; throws InputError/InfeasibleError.
SnlParams validated(SnlParams params, const TargetSpec& target);

/// Rates implied by the primary parameters.
struct DerivedRates {
    double p_t = 0.0;           ///< take rate
    double p_2 = 1.0;           ///< cause replacement rate
    std::vector<double> p_v;    ///< treated-arm failure-type simplex, length J
    double r_v0 = 0.0;          ///< treated-arm non-failure probability
};

/// Renormalises a probability vector whose sum is within `tolerance` of one; throws otherwise.
std::vector<double> normalized_simplex(std::vector<double> values, const std::string& name,
                                       double tolerance = 1e-6);

}  // namespace snl
