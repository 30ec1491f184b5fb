#pragma once
// Biased nearest-neighbor walks on environments: one unit of weight per
// child edge, lambda units toward the parent. Includes the closed-form
// hitting/return/Green quantities (valid for lambda > 1) and an independent
// linear-system oracle for the hitting probability on finite trees.
#include <cstdint>
#include <vector>

#include "cactus/env.hpp"
#include "cactus/rng.hpp"
#include "cactus/tree.hpp"

namespace cactus {

struct WalkPath {
  std::vector<int32_t> vertices;  // arena indices, X_0..X_N
  double lambda = 1.0;
  bool touched_top = false;       // reflected at o(q) at least once
  bool touched_cap = false;       // stepped on a growth-capped vertex
};

// one transition; reflects uniformly over children at the spine top and
// treats growth-capped vertices as leaves (both recorded by run_walk)
int32_t biased_step(PointedEnvironment& env, int32_t x, double lambda, Rng& rng);

WalkPath run_walk(PointedEnvironment& env, int32_t x0, double lambda, int64_t steps,
                  Rng& rng);

// closed form for P_x(hit y before z) with z a strict ancestor of y, on the
// height coordinates: (lam^{|x/\y|} - lam^{|z|})_+ / (lam^{|y|} - lam^{|z|})
double hitting_prob_formula(int32_t hx_meet_y, int32_t hy, int32_t hz, double lambda);
// environment wrapper: heights are relative heights, x /\ y via mrca
double hitting_prob_formula(const PointedEnvironment& env, int32_t x, int32_t y,
                            int32_t z, double lambda);

// P(return to x) = (1 + k_x)/(lambda + k_x), for a vertex with a parent
double return_prob_formula(int64_t kx, double lambda);
// Green function G(x,y) = (lambda + k_y)/(lambda - 1) * lam^{-(|y| - |x/\y|)}
double green_formula(int64_t ky, int32_t hy_minus_hmeet, double lambda);

// independent oracle on a finite rooted tree: the lambda-biased walk
// (uniform over children at the parentless root), absorbed at y and z;
// returns P_x(hit y before z) for every x, by sparse linear solve
std::vector<double> hitting_prob_exact(const OrderedTree& t, int32_t y, int32_t z,
                                       double lambda);

}  // namespace cactus
