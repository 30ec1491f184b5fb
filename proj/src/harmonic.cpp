#include "cactus/harmonic.hpp"

#include <cmath>
#include <stdexcept>

namespace cactus {

HarmonicWeights::HarmonicWeights(PointedEnvironment& env, int32_t n_u)
    : env_(env), n_u_(n_u), m_(env.law().mean()) {
  if (n_u < 1) throw std::invalid_argument("truncation depth must be >= 1");
  if (m_ <= 1.0) throw std::domain_error("harmonic weights need a supercritical law");
}

bool HarmonicWeights::clipped(int32_t v) const {
  return env_.rel_height(v) + n_u_ > env_.height_cap();
}

double HarmonicWeights::U_at(int32_t v, int32_t d) {
  int64_t key = ((int64_t)v << 8) | (int64_t)d;
  auto it = u_cache_.find(key);
  if (it != u_cache_.end()) return it->second;
  double u = (double)env_.descendant_count(v, d) * std::pow(m_, -(double)d);
  u_cache_.emplace(key, u);
  return u;
}

double HarmonicWeights::U(int32_t v) { return U_at(v, n_u_); }

double HarmonicWeights::S(int32_t v) {
  auto it = s_cache_.find(v);
  if (it != s_cache_.end()) return it->second;
  double s;
  int32_t h = env_.rel_height(v);
  if (v == env_.origin()) {
    s = 0.0;
  } else if (h <= 0 && env_.spine(-h) == v) {
    // spine vertex o(p): anchor downward, S_{o(p)} = S_{o(p-1)} - U_{o(p-1)}
    int32_t below = env_.spine(-h - 1);
    s = S(below) - U(below);
  } else {
    int32_t par = env_.parent(v);
    if (par < 0) throw std::runtime_error("S query above the spine top");
    s = S(par) + U(v);
  }
  s_cache_.emplace(v, s);
  return s;
}

double HarmonicWeights::martingale_residual(int32_t x) {
  const double lambda = m_;
  int32_t k = env_.kid_count(x);
  if (env_.parent(x) < 0 || env_.at_cap(x))
    throw std::domain_error("residual undefined at the spine top or the cap");
  // matched truncation depths make the counting identity exact:
  //   sum_children U^{(n_U - 1)} = m * U_x^{(n_U)}
  double acc = -lambda * U_at(x, n_u_);
  for (int32_t j = 0; j < k; ++j) acc += U_at(env_.child(x, j), n_u_ - 1);
  return acc / (lambda + (double)k);
}

double HarmonicWeights::step_variance(int32_t x) {
  const double lambda = m_;
  int32_t k = env_.kid_count(x);
  if (env_.parent(x) < 0 || env_.at_cap(x))
    throw std::domain_error("step variance undefined at the spine top or the cap");
  double sx = S(x);
  double dp = S(env_.parent(x)) - sx;
  double acc = lambda * dp * dp;
  for (int32_t j = 0; j < k; ++j) {
    double d = S(env_.child(x, j)) - sx;
    acc += d * d;
  }
  return acc / (lambda + (double)k);
}

std::pair<double, double> HarmonicWeights::spine_increment(int32_t p) {
  if (p < 1 || p > env_.spine_depth()) throw std::out_of_range("spine increment index");
  int32_t op = env_.spine(p), om = env_.spine(p - 1);
  double direct = U_at(op, n_u_) - U_at(om, n_u_ - 1) / m_;
  double alt = 0.0;
  int32_t k = env_.kid_count(op);
  for (int32_t j = 0; j < k; ++j) {
    int32_t c = env_.child(op, j);
    if (c == om) continue;
    alt += U_at(c, n_u_ - 1);
  }
  alt /= m_;
  return {direct, alt};
}

double phi2_average(PointedEnvironment& env, HarmonicWeights& w, const WalkPath& path) {
  if (path.vertices.empty()) throw std::invalid_argument("empty walk");
  double acc = 0.0;
  int64_t cnt = 0;
  for (size_t i = 0; i + 1 < path.vertices.size(); ++i) {
    acc += w.step_variance(path.vertices[i]);
    ++cnt;
  }
  (void)env;
  return acc / (double)cnt;
}

}  // namespace cactus
