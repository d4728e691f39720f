#include "snl/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "snl/error.hpp"

namespace snl {

double kolmogorov_sf(double lambda) {
    if (lambda <= 0.0) return 1.0;
    if (lambda < 0.2) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 ? 1.0 : -1.0) * term;
        if (term < 1e-16) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_test(std::vector<double> sample, const std::function<double(double)>& cdf) {
    if (sample.empty()) throw InputError("KS test needs a non-empty sample");
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    const double sn = std::sqrt(n);
    return {d, kolmogorov_sf((sn + 0.12 + 0.11 / sn) * d)};
}

double chi2_cdf_1df(double x) { return x <= 0.0 ? 0.0 : std::erf(std::sqrt(0.5 * x)); }

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw InputError("quantile of an empty sample");
    std::sort(values.begin(), values.end());
    const double h = (static_cast<double>(values.size()) - 1.0) * std::clamp(q, 0.0, 1.0);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

double mean(std::span<const double> values) {
    if (values.empty()) return 0.0;
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double variance(std::span<const double> values) {
    if (values.size() < 2) return 0.0;
    const double m = mean(values);
    double s = 0.0;
    for (double v : values) s += (v - m) * (v - m);
    return s / static_cast<double>(values.size() - 1);
}

std::pair<double, double> binomial_band(int n, double p, double level) {
    std::vector<double> pmf(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k)
        pmf[static_cast<std::size_t>(k)] =
            std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) + k * std::log(p) +
                     (n - k) * std::log1p(-p));
    const double tail = 0.5 * (1.0 - level);
    int lo = 0, hi = n;
    double acc = 0.0;
    for (int k = 0; k <= n; ++k) {
        acc += pmf[static_cast<std::size_t>(k)];
        if (acc > tail) { lo = k; break; }
    }
    acc = 0.0;
    for (int k = n; k >= 0; --k) {
        acc += pmf[static_cast<std::size_t>(k)];
        if (acc > tail) { hi = k; break; }
    }
    return {static_cast<double>(lo) / n, static_cast<double>(hi) / n};
}

double roc_auc(std::span<const double> effect_scores, std::span<const double> null_scores) {
    if (effect_scores.empty() || null_scores.empty()) throw InputError("ROC AUC needs non-empty score lists");
    std::vector<double> neg(null_scores.begin(), null_scores.end());
    std::sort(neg.begin(), neg.end());
    double wins = 0.0;
    for (double s : effect_scores) {
        const auto below = std::lower_bound(neg.begin(), neg.end(), s) - neg.begin();
        const auto upto = std::upper_bound(neg.begin(), neg.end(), s) - neg.begin();
        wins += static_cast<double>(below) + 0.5 * static_cast<double>(upto - below);
    }
    return wins / (static_cast<double>(effect_scores.size()) * static_cast<double>(null_scores.size()));
}

std::vector<RocPoint> roc_curve(std::span<const double> effect_scores, std::span<const double> null_scores) {
    std::vector<double> thresholds(effect_scores.begin(), effect_scores.end());
    thresholds.insert(thresholds.end(), null_scores.begin(), null_scores.end());
    std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
    std::vector<RocPoint> out;
    out.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
    for (double t : thresholds) {
        const double tp = static_cast<double>(std::count_if(effect_scores.begin(), effect_scores.end(), [t](double s) { return s >= t; }));
        const double fp = static_cast<double>(std::count_if(null_scores.begin(), null_scores.end(), [t](double s) { return s >= t; }));
        out.push_back({t, tp / static_cast<double>(effect_scores.size()), fp / static_cast<double>(null_scores.size())});
    }
    return out;
}

}  // namespace snl
