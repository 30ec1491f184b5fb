#pragma once
// Test statistics for the experiment harness: two-sample Kolmogorov-Smirnov
// with classical asymptotic critical values, the fully-specified
// Anderson-Darling normality statistic, and a chi-square goodness-of-fit.
#include <cstdint>
#include <vector>

namespace cactus {

double normal_cdf(double z);

// sup |F_a - F_b| over the pooled sample (exact small-sample handling of
// ties); throws on empty input
double ks_statistic(std::vector<double> a, std::vector<double> b);

// asymptotic two-sample critical value c(alpha) * sqrt((n+m)/(n m)),
// alpha in {0.05, 0.01}
double ks_two_sample_critical(size_t n, size_t m, double alpha);

// A^2 against N(mean, sd^2) with all parameters specified (no estimation
// correction); 1% critical value 3.857
double anderson_darling(std::vector<double> x, double mean, double sd);
inline double ad_critical_1pct() { return 3.857; }

// sum (obs - exp)^2 / exp; bins with expected <= 0 rejected
double chi_square_stat(const std::vector<double>& observed,
                       const std::vector<double>& expected);

}  // namespace cactus
