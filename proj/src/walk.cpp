#include "cactus/walk.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <cmath>
#include <stdexcept>

namespace cactus {

int32_t biased_step(PointedEnvironment& env, int32_t x, double lambda, Rng& rng) {
  const int32_t k = env.at_cap(x) ? 0 : env.kid_count(x);  // capped: act as leaf
  const int32_t par = env.parent(x);
  if (par < 0) {
    // spine top: reflect uniformly over children
    int32_t kk = env.kid_count(x);
    if (kk == 0) throw std::runtime_error("walk stuck: childless spine top");
    return env.child(x, (int32_t)rng.below((uint64_t)kk));
  }
  double u = rng.u01() * (lambda + (double)k);
  if (u < lambda || k == 0) return par;
  int32_t j = (int32_t)((u - lambda));  // floor of the child coordinate
  if (j >= k) j = k - 1;
  return env.child(x, j);
}

WalkPath run_walk(PointedEnvironment& env, int32_t x0, double lambda, int64_t steps,
                  Rng& rng) {
  WalkPath path;
  path.lambda = lambda;
  path.vertices.reserve((size_t)steps + 1);
  path.vertices.push_back(x0);
  int32_t x = x0;
  for (int64_t i = 0; i < steps; ++i) {
    if (env.parent(x) < 0) path.touched_top = true;
    if (env.at_cap(x)) path.touched_cap = true;
    x = biased_step(env, x, lambda, rng);
    path.vertices.push_back(x);
  }
  return path;
}

double hitting_prob_formula(int32_t hx_meet_y, int32_t hy, int32_t hz, double lambda) {
  if (lambda <= 1.0) throw std::domain_error("closed form needs lambda > 1");
  if (hz >= hy) throw std::invalid_argument("z must be a strict ancestor of y");
  double num = std::pow(lambda, (double)hx_meet_y) - std::pow(lambda, (double)hz);
  if (num < 0) num = 0;
  return num / (std::pow(lambda, (double)hy) - std::pow(lambda, (double)hz));
}

double hitting_prob_formula(const PointedEnvironment& env, int32_t x, int32_t y,
                            int32_t z, double lambda) {
  int32_t meet = env.mrca(x, y);
  return hitting_prob_formula(env.rel_height(meet), env.rel_height(y),
                              env.rel_height(z), lambda);
}

double return_prob_formula(int64_t kx, double lambda) {
  if (lambda <= 1.0) throw std::domain_error("closed form needs lambda > 1");
  return (1.0 + (double)kx) / (lambda + (double)kx);
}

double green_formula(int64_t ky, int32_t hy_minus_hmeet, double lambda) {
  if (lambda <= 1.0) throw std::domain_error("closed form needs lambda > 1");
  return (lambda + (double)ky) / (lambda - 1.0) *
         std::pow(lambda, -(double)hy_minus_hmeet);
}

std::vector<double> hitting_prob_exact(const OrderedTree& t, int32_t y, int32_t z,
                                       double lambda) {
  const int64_t n = t.size();
  if (y == z) throw std::invalid_argument("absorbing states must differ");
  using Trip = Eigen::Triplet<double>;
  std::vector<Trip> trips;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  // child adjacency
  std::vector<std::vector<int32_t>> ch((size_t)n);
  for (int64_t u = 1; u < n; ++u) ch[(size_t)t.parent[(size_t)u]].push_back((int32_t)u);
  for (int64_t u = 0; u < n; ++u) {
    if (u == y || u == z) {
      trips.emplace_back((int)u, (int)u, 1.0);
      if (u == y) rhs[(Eigen::Index)u] = 1.0;
      continue;
    }
    int32_t par = t.parent[(size_t)u];
    double k = (double)ch[(size_t)u].size();
    double denom = (par < 0) ? k : lambda + k;
    if (denom == 0) throw std::invalid_argument("isolated root");
    trips.emplace_back((int)u, (int)u, 1.0);
    if (par >= 0) trips.emplace_back((int)u, (int)par, -lambda / denom);
    for (int32_t c : ch[(size_t)u]) trips.emplace_back((int)u, (int)c, -1.0 / denom);
  }
  Eigen::SparseMatrix<double> A((Eigen::Index)n, (Eigen::Index)n);
  A.setFromTriplets(trips.begin(), trips.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) throw std::runtime_error("singular hitting system");
  Eigen::VectorXd h = lu.solve(rhs);
  return std::vector<double>(h.data(), h.data() + n);
}

}  // namespace cactus
