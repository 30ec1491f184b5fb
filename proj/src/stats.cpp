#include "cactus/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cactus {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double ks_statistic(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = (double)a.size(), nb = (double)b.size();
  size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    // advance past ties in the pooled order before comparing the CDFs
    double t = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= t) ++i;
    while (j < b.size() && b[j] <= t) ++j;
    d = std::max(d, std::abs((double)i / na - (double)j / nb));
  }
  return d;
}

double ks_two_sample_critical(size_t n, size_t m, double alpha) {
  double c;
  if (alpha == 0.05)
    c = 1.358;
  else if (alpha == 0.01)
    c = 1.628;
  else
    throw std::invalid_argument("supported alphas: 0.05, 0.01");
  return c * std::sqrt((double)(n + m) / ((double)n * (double)m));
}

double anderson_darling(std::vector<double> x, double mean, double sd) {
  if (x.empty()) throw std::invalid_argument("empty sample");
  if (sd <= 0) throw std::invalid_argument("sd must be positive");
  std::sort(x.begin(), x.end());
  const size_t n = x.size();
  double s = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double u = normal_cdf((x[i] - mean) / sd);
    u = std::min(std::max(u, 1e-300), 1.0 - 1e-16);
    double v = normal_cdf((x[n - 1 - i] - mean) / sd);
    v = std::min(std::max(v, 1e-300), 1.0 - 1e-16);
    s += (2.0 * (double)i + 1.0) * (std::log(u) + std::log1p(-v));
  }
  return -(double)n - s / (double)n;
}

double chi_square_stat(const std::vector<double>& observed,
                       const std::vector<double>& expected) {
  if (observed.size() != expected.size() || observed.empty())
    throw std::invalid_argument("bin mismatch");
  double s = 0.0;
  for (size_t i = 0; i < observed.size(); ++i) {
    if (expected[i] <= 0) throw std::invalid_argument("nonpositive expected bin");
    double d = observed[i] - expected[i];
    s += d * d / expected[i];
  }
  return s;
}

}  // namespace cactus
