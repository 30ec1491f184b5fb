#include "cactus/snake.hpp"

#include <cmath>
#include <stdexcept>

namespace cactus {

BranchingWalk sample_brw(PointedEnvironment& env, const OrderedTree& t, double lambda,
                         Rng& rng) {
  BranchingWalk brw;
  brw.genealogy = &t;
  brw.position.resize((size_t)t.size());
  brw.position[0] = env.origin();
  for (int64_t u = 1; u < t.size(); ++u) {
    int32_t from = brw.position[(size_t)t.parent[(size_t)u]];
    if (env.at_cap(from) || env.parent(from) < 0) brw.contaminated = true;
    brw.position[(size_t)u] = biased_step(env, from, lambda, rng);
  }
  return brw;
}

std::vector<double> relative_height_labels(const PointedEnvironment& env,
                                           const BranchingWalk& brw) {
  std::vector<double> out(brw.position.size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = (double)env.rel_height(brw.position[i]);
  return out;
}

std::vector<double> harmonic_labels(HarmonicWeights& w, const BranchingWalk& brw) {
  std::vector<double> out(brw.position.size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = w.S(brw.position[i]);
  return out;
}

DiscreteSnake::DiscreteSnake(const OrderedTree& t, std::vector<double> labels)
    : t_(&t), labels_(std::move(labels)), order_(contour_order(t)) {
  if ((int64_t)labels_.size() != t.size())
    throw std::invalid_argument("one label per genealogy vertex required");
}

double DiscreteSnake::endpoint_contour(double s) const {
  const int64_t n = t_->size();
  if (s < 0 || s > (double)(2 * n)) throw std::domain_error("endpoint_contour range");
  double fl = std::floor(s);
  int64_t k = (int64_t)fl;
  if (k >= 2 * (n - 1)) return labels_[0];  // padding: the snake sits at the root
  double f = s - fl;
  double a = labels_[(size_t)order_[(size_t)k]];
  double b = labels_[(size_t)order_[(size_t)k + 1]];
  return a + f * (b - a);
}

double DiscreteSnake::endpoint_height(double s) const {
  return endpoint_contour(timechange_at(*t_, s));
}

double DiscreteSnake::path_value_contour(double s, double r) const {
  const int64_t n = t_->size();
  if (s < 0 || s > (double)(2 * n)) throw std::domain_error("path_value range");
  int64_t k = (int64_t)std::floor(s);
  int32_t v;
  if (k >= 2 * (n - 1)) {
    v = 0;
  } else if (s == (double)k) {
    v = order_[(size_t)k];
  } else {
    // between steps the active path is the deeper of the two endpoints
    int32_t a = order_[(size_t)k], b = order_[(size_t)k + 1];
    v = (t_->depth[(size_t)b] > t_->depth[(size_t)a]) ? b : a;
  }
  double cs = contour_at(contour_samples(*t_), s);  // cheap enough for tests
  if (r > cs) r = cs;
  if (r < 0) throw std::domain_error("negative path level");
  // ancestor labels straddling level r
  int32_t lo = (int32_t)std::floor(r);
  int32_t hi = (int32_t)std::ceil(r);
  int32_t u = v;
  while (t_->depth[(size_t)u] > hi) u = t_->parent[(size_t)u];
  double label_hi = labels_[(size_t)u];
  if (lo == hi || t_->depth[(size_t)u] < hi) return label_hi;
  int32_t w = t_->parent[(size_t)u];
  double label_lo = labels_[(size_t)w];
  double f = r - (double)lo;
  return label_lo + f * (label_hi - label_lo);
}

double DiscreteSnake::geodesic_min(int64_t k, int64_t kp) const {
  int32_t a = order_[(size_t)k], b = order_[(size_t)kp];
  double m = std::min(labels_[(size_t)a], labels_[(size_t)b]);
  while (a != b) {
    if (t_->depth[(size_t)a] >= t_->depth[(size_t)b]) {
      a = t_->parent[(size_t)a];
      m = std::min(m, labels_[(size_t)a]);
    } else {
      b = t_->parent[(size_t)b];
      m = std::min(m, labels_[(size_t)b]);
    }
  }
  return m;
}

}  // namespace cactus
