#include "cactus/limits.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cactus/metric.hpp"

namespace cactus {

std::vector<double> sample_brownian_excursion(size_t N, Rng& rng) {
  if (N < 2) throw std::invalid_argument("excursion grid too small");
  const double dt = 1.0 / (double)N;
  // Brownian bridge on [0,1]: random walk minus its linear drift to W_1
  std::vector<double> b(N + 1, 0.0);
  double w = 0.0;
  for (size_t k = 1; k <= N; ++k) {
    w += std::sqrt(dt) * rng.normal();
    b[k] = w;
  }
  for (size_t k = 0; k <= N; ++k) b[k] -= ((double)k * dt) * w;
  // Vervaat: rotate at the argmin; the rotated bridge is the excursion
  size_t am = 0;
  for (size_t k = 1; k < N; ++k)
    if (b[k] < b[am]) am = k;
  std::vector<double> e(N + 1);
  for (size_t k = 0; k <= N; ++k) e[k] = b[(am + k) % N] - b[am];
  e[N] = 0.0;
  return e;
}

std::vector<double> sample_limit_height(size_t N, Rng& rng) {
  auto e = sample_brownian_excursion(N, rng);
  for (double& v : e) v *= std::sqrt(2.0);
  return e;
}

std::vector<double> sample_snake_endpoint(const std::vector<double>& h, Rng& rng) {
  if (h.empty() || h[0] != 0.0) throw std::invalid_argument("lifetime must start at 0");
  std::vector<double> w(h.size(), 0.0);
  // ancestral path as (level, value) knots, increasing level, Brownian in
  // between; knots[0] stays (0, 0)
  std::vector<std::pair<double, double>> knots{{0.0, 0.0}};
  for (size_t k = 1; k < h.size(); ++k) {
    double m = std::min(h[k - 1], h[k]);
    // drop the discarded upper branch, bridging the value at level m
    while (knots.size() >= 2 && knots[knots.size() - 2].first >= m) knots.pop_back();
    if (knots.back().first > m) {
      auto [l1, v1] = knots.back();
      knots.pop_back();
      auto [l0, v0] = knots.back();
      double span = l1 - l0;
      double mean = v0 + (m - l0) / span * (v1 - v0);
      double var = (m - l0) * (l1 - m) / span;
      knots.push_back({m, mean + std::sqrt(std::max(var, 0.0)) * rng.normal()});
    }
    if (h[k] > knots.back().first) {
      double v = knots.back().second + std::sqrt(h[k] - knots.back().first) * rng.normal();
      knots.push_back({h[k], v});
    }
    w[k] = knots.back().second;
  }
  return w;
}

double sample_cactus_two_point(size_t N, Rng& rng) {
  auto h = sample_limit_height(N, rng);
  auto w = sample_snake_endpoint(h, rng);
  size_t i = rng.below(N + 1), j = rng.below(N + 1);
  return snake_two_point_grid(h, w, i, j);
}

}  // namespace cactus
