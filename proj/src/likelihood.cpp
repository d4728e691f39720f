#include "snl/likelihood.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "snl/profile.hpp"

namespace snl {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

template <class T>
double log_multinomial_impl(std::span<const T> counts, std::span<const double> probs, bool coeff) {
    if (counts.size() != probs.size()) throw InputError("count and probability vectors differ in length");
    double total = 0.0;
    double out = 0.0;
    for (std::size_t k = 0; k < counts.size(); ++k) {
        const double n = static_cast<double>(counts[k]);
        if (n == 0.0) continue;
        if (probs[k] <= 0.0) return kNegInf;
        out += n * std::log(probs[k]);
        if (coeff) out -= std::lgamma(n + 1.0);
        total += n;
    }
    if (coeff) out += std::lgamma(total + 1.0);
    return out;
}

}  // namespace

double log_multinomial(std::span<const Count> counts, std::span<const double> probs, bool with_coefficient) {
    return log_multinomial_impl(counts, probs, with_coefficient);
}

double log_multinomial(std::span<const double> counts, std::span<const double> probs, bool with_coefficient) {
    return log_multinomial_impl(counts, probs, with_coefficient);
}

double log_binomial(Count k, Count n, double p, bool with_coefficient) {
    if (k < 0 || k > n) throw InputError("binomial count out of range");
    const double kk = static_cast<double>(k);
    const double rest = static_cast<double>(n - k);
    double out = 0.0;
    if (kk > 0.0) {
        if (p <= 0.0) return kNegInf;
        out += kk * std::log(p);
    }
    if (rest > 0.0) {
        if (p >= 1.0) return kNegInf;
        out += rest * std::log1p(-p);
    }
    if (with_coefficient)
        out += std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(kk + 1.0) - std::lgamma(rest + 1.0);
    return out;
}

double log_likelihood_pv(const FailureTable& table, std::span<const double> p_c,
                         std::span<const double> p_v, double r_c0, double r_v0,
                         LikelihoodScope scope, bool include_nonfailure) {
    double ll = log_multinomial(table.vaccine_failures(), p_v);
    if (scope == LikelihoodScope::one_phase) {
        ll += log_multinomial(table.placebo_failures(), p_c);
        ll += log_binomial(table.placebo()[0], table.placebo_size(), r_c0);
        ll += log_binomial(table.vaccine()[0], table.vaccine_size(), r_v0);
    } else if (include_nonfailure) {
        ll += log_binomial(table.vaccine()[0], table.vaccine_size(), r_v0);
    }
    return ll;
}

double log_likelihood(const FailureTable& table, const SnlParams& params, const TargetSpec& target,
                      LikelihoodScope scope, bool include_nonfailure) {
    if (table.J() != target.J()) throw InputError("table and target disagree on J");
    const DerivedRates rates = vaccine_profile(params, target);
    return log_likelihood_pv(table, params.p_c, rates.p_v, params.r_c0, rates.r_v0, scope,
                             include_nonfailure);
}

}  // namespace snl
