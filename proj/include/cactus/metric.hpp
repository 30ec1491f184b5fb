#pragma once
// Pseudometrics over exploration-time grids: the tree pseudometric coded by
// a height function, snake pseudometrics, the range pseudometric of a
// branching walk, the 3/2 sup-difference bound for rooted measured
// Gromov-Hausdorff-Prokhorov distance, and an exact small-space GHP oracle.
#include <cstdint>
#include <vector>

#include "cactus/snake.hpp"

namespace cactus {

struct PseudometricGrid {
  std::vector<double> times;
  std::vector<double> d;  // row-major N x N
  size_t n() const { return times.size(); }
  double& at(size_t i, size_t j) { return d[i * times.size() + j]; }
  double at(size_t i, size_t j) const { return d[i * times.size() + j]; }
};

// d_h(s_i, s_j) = h_i + h_j - 2 min h over [i, j] (range-minimum table)
PseudometricGrid tree_pseudometric_from_height(const std::vector<double>& times,
                                               const std::vector<double>& h);

// helper: O(n log n) sparse-table range-minimum over a value sequence
class RangeMin {
 public:
  explicit RangeMin(const std::vector<double>& v);
  double min(size_t i, size_t j) const;  // inclusive
 private:
  std::vector<std::vector<double>> table_;
};

// snake pseudometric of a discrete snake at integer contour times:
// d(k,k') = w_k + w_k' - 2 min label along the genealogy geodesic
PseudometricGrid snake_pseudometric(const DiscreteSnake& s,
                                    const std::vector<int64_t>& contour_steps);

// snake pseudometric from sampled (h, w) grids with coded ancestry:
// the ancestral-segment minimum is evaluated on the grid itself
PseudometricGrid snake_pseudometric_grid(const std::vector<double>& times,
                                         const std::vector<double>& h,
                                         const std::vector<double>& w);
double snake_two_point_grid(const std::vector<double>& h, const std::vector<double>& w,
                            size_t i, size_t j);

// range pseudometric of a branching walk at contour steps: graph distance
// between visited environment vertices through their environment mrca
PseudometricGrid range_pseudometric(const PointedEnvironment& env, const BranchingWalk& brw,
                                    const std::vector<int64_t>& contour_steps);

// max over the grid pairs of (snake pseudometric - range pseudometric);
// nonnegative, and small exactly when the walk rarely backtracks-and-glues
double cactus_discrepancy(const PointedEnvironment& env, const BranchingWalk& brw,
                          const std::vector<int64_t>& contour_steps);

// (3/2) sup |D - D'| upper bound for the rooted measured GHP distance of the
// spaces coded by two pseudometrics on a common grid
double ghp_upper_bound(const PseudometricGrid& a, const PseudometricGrid& b);

// four-point condition d(a,b)+d(c,d) <= max(d(a,c)+d(b,d), d(a,d)+d(b,c));
// checks all quadruples for n <= 40, otherwise `samples` random ones
bool four_point_ok(const PseudometricGrid& g, double tol, int64_t samples, Rng& rng);
bool triangle_ok(const PseudometricGrid& g, double tol);

// exact rooted measured GHP between small finite spaces (point 0 is the
// root): branch-and-bound over correspondences with a transportation
// max-flow for the measure term; exponential, capped at 7 points
struct FiniteSpace {
  std::vector<double> d;     // row-major n x n
  std::vector<double> mass;  // nonnegative, summing to 1
  size_t n() const { return mass.size(); }
  double at(size_t i, size_t j) const { return d[i * mass.size() + j]; }
};
double ghp_exact_small(const FiniteSpace& x, const FiniteSpace& y);

}  // namespace cactus
