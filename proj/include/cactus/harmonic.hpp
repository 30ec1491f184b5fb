#pragma once
// Truncated harmonic vertex weights on an environment: U_x estimates the
// normalized descendant-count martingale limit by counting at a fixed depth
// n_U below x, which keeps the recursion U_x = (1/m) sum_children U_y an
// exact counting identity. S accumulates U along ancestry with S_o = 0, so
// S along the critically biased walk is an exact martingale at unclipped
// vertices.
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "cactus/env.hpp"
#include "cactus/walk.hpp"

namespace cactus {

class HarmonicWeights {
 public:
  HarmonicWeights(PointedEnvironment& env, int32_t n_u);

  int32_t truncation_depth() const { return n_u_; }
  double U(int32_t v);             // U_at(v, n_U)
  double U_at(int32_t v, int32_t d);  // m^{-d} * descendant count d levels below v
  double S(int32_t v);             // S_o = 0, S_x - S_parent(x) = U_x
  // vertices whose counting cone would cross the growth cap; identities are
  // monitored there, never asserted
  bool clipped(int32_t v) const;

  // exact one-step martingale residual at the critical bias lambda = m,
  // with matched truncation depths (n_U on the parent edge, n_U - 1 on the
  // child edges) so the counting identity makes it exactly zero
  double martingale_residual(int32_t x);
  // one-step conditional variance sum_y p(x,y) (S_y - S_x)^2 at lambda = m
  double step_variance(int32_t x);

  // spine increment both ways at matched depths: U_{o(p)} - (1/m) U_{o(p-1)}
  // and (1/m) sum over off-spine children of o(p); they agree exactly
  std::pair<double, double> spine_increment(int32_t p);

 private:
  PointedEnvironment& env_;
  int32_t n_u_;
  double m_;
  std::unordered_map<int64_t, double> u_cache_;  // keyed (vertex, depth)
  std::unordered_map<int32_t, double> s_cache_;
};

// ergodic average of step_variance along a critical walk on an invariant
// environment; converges to (m2 - m)/(m^2 - m)
double phi2_average(PointedEnvironment& env, HarmonicWeights& w, const WalkPath& path);

}  // namespace cactus
