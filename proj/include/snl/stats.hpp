#pragma once

#include <functional>
#include <span>
#include <vector>

namespace snl {

struct KsResult {
    double statistic = 0.0;  ///< sup |F_n - F|
    double p_value = 1.0;
};

/// One-sample Kolmogorov-Smirnov test against a continuous CDF (asymptotic law with
/// Stephens' small-sample correction).
KsResult ks_test(std::vector<double> sample, const std::function<double(double)>& cdf);

/// Kolmogorov limiting survival function Q(lambda) = 2 sum (-1)^(k-1) exp(-2 k^2 lambda^2).
double kolmogorov_sf(double lambda);

double chi2_cdf_1df(double x);

/// Linear-interpolation quantile (type 7), q in [0, 1].
double quantile(std::vector<double> values, double q);

double mean(std::span<const double> values);
double variance(std::span<const double> values);

/// Exact binomial central interval [lo, hi] of counts with probability >= level under Bin(n, p),
/// returned as proportions.
std::pair<double, double> binomial_band(int n, double p, double level = 0.95);

/// P(effect > null) + P(tie)/2 over all pairs.
double roc_auc(std::span<const double> effect_scores, std::span<const double> null_scores);

struct RocPoint {
    double threshold;
    double tpr;
    double fpr;
};
/// Empirical ROC curve, thresholds descending.
std::vector<RocPoint> roc_curve(std::span<const double> effect_scores, std::span<const double> null_scores);

}  // namespace snl
