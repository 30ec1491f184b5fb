#pragma once
// Tree-indexed branching walks on an environment and their discrete snakes:
// the exploration-time endpoint processes of the vertex labels in contour
// and in depth-first order, with exact piecewise-linear interpolation and
// ancestry (path-value) queries.
#include <cstdint>
#include <vector>

#include "cactus/coding.hpp"
#include "cactus/env.hpp"
#include "cactus/harmonic.hpp"
#include "cactus/tree.hpp"
#include "cactus/walk.hpp"

namespace cactus {

struct BranchingWalk {
  const OrderedTree* genealogy = nullptr;
  std::vector<int32_t> position;  // environment arena index per genealogy vertex
  bool contaminated = false;      // a step was taken from a capped vertex or the top
};

// Each child's position is one biased step from its parent's position,
// independent given the parent; position[0] = env.origin().
BranchingWalk sample_brw(PointedEnvironment& env, const OrderedTree& t, double lambda,
                         Rng& rng);

std::vector<double> relative_height_labels(const PointedEnvironment& env,
                                           const BranchingWalk& brw);
std::vector<double> harmonic_labels(HarmonicWeights& w, const BranchingWalk& brw);

class DiscreteSnake {
 public:
  // labels are indexed by genealogy vertex (depth-first order)
  DiscreteSnake(const OrderedTree& t, std::vector<double> labels);

  const OrderedTree& tree() const { return *t_; }
  const std::vector<double>& labels() const { return labels_; }
  const std::vector<int32_t>& contour() const { return order_; }

  // contour-time endpoint: linear interpolation of labels in contour order,
  // bridged to the root label on the final padding unit
  double endpoint_contour(double s) const;
  // depth-first-time endpoint: the contour endpoint composed with the
  // height/contour time-change
  double endpoint_height(double s) const;
  // snake path value W_s(r): label of the ancestor of the current contour
  // vertex at height r (linear between integer heights)
  double path_value_contour(double s, double r) const;

  // min label along the genealogy geodesic between the vertices at contour
  // steps k and k' (exact; this is the min over both ancestral segments
  // above the exploration minimum)
  double geodesic_min(int64_t k, int64_t kp) const;

 private:
  const OrderedTree* t_;
  std::vector<double> labels_;
  std::vector<int32_t> order_;  // contour order, length 2n-1
};

}  // namespace cactus
