#include "cactus/metric.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cactus {

RangeMin::RangeMin(const std::vector<double>& v) {
  table_.push_back(v);
  for (size_t len = 1; 2 * len <= v.size(); len *= 2) {
    const auto& prev = table_.back();
    std::vector<double> row(v.size() - 2 * len + 1);
    for (size_t i = 0; i < row.size(); ++i) row[i] = std::min(prev[i], prev[i + len]);
    table_.push_back(std::move(row));
  }
}

double RangeMin::min(size_t i, size_t j) const {
  if (i > j) std::swap(i, j);
  size_t len = j - i + 1, k = 0;
  while ((2ULL << k) <= len) ++k;
  return std::min(table_[k][i], table_[k][j + 1 - (1ULL << k)]);
}

PseudometricGrid tree_pseudometric_from_height(const std::vector<double>& times,
                                               const std::vector<double>& h) {
  if (times.size() != h.size()) throw std::invalid_argument("grid size mismatch");
  RangeMin rm(h);
  PseudometricGrid g;
  g.times = times;
  g.d.assign(h.size() * h.size(), 0.0);
  for (size_t i = 0; i < h.size(); ++i)
    for (size_t j = i + 1; j < h.size(); ++j) {
      double v = h[i] + h[j] - 2.0 * rm.min(i, j);
      g.at(i, j) = v;
      g.at(j, i) = v;
    }
  return g;
}

PseudometricGrid snake_pseudometric(const DiscreteSnake& s,
                                    const std::vector<int64_t>& contour_steps) {
  PseudometricGrid g;
  g.times.assign(contour_steps.begin(), contour_steps.end());
  const size_t n = contour_steps.size();
  g.d.assign(n * n, 0.0);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j) {
      double wi = s.labels()[(size_t)s.contour()[(size_t)contour_steps[i]]];
      double wj = s.labels()[(size_t)s.contour()[(size_t)contour_steps[j]]];
      double v = wi + wj - 2.0 * s.geodesic_min(contour_steps[i], contour_steps[j]);
      g.at(i, j) = v;
      g.at(j, i) = v;
    }
  return g;
}

// min label over the grid ancestors of index `from` at levels >= m
static double grid_ancestor_min(const std::vector<double>& h, const std::vector<double>& w,
                                size_t from, double m) {
  double best = w[from];
  double run = h[from];
  for (size_t k = from; k-- > 0;) {
    if (h[k] < run) {
      run = h[k];
      if (run < m) break;
      best = std::min(best, w[k]);
    }
  }
  return best;
}

double snake_two_point_grid(const std::vector<double>& h, const std::vector<double>& w,
                            size_t i, size_t j) {
  if (i > j) std::swap(i, j);
  double m = h[i];
  for (size_t k = i; k <= j; ++k) m = std::min(m, h[k]);
  double mi = grid_ancestor_min(h, w, i, m);
  double mj = grid_ancestor_min(h, w, j, m);
  return w[i] + w[j] - 2.0 * std::min(mi, mj);
}

PseudometricGrid snake_pseudometric_grid(const std::vector<double>& times,
                                         const std::vector<double>& h,
                                         const std::vector<double>& w) {
  if (times.size() != h.size() || h.size() != w.size())
    throw std::invalid_argument("grid size mismatch");
  PseudometricGrid g;
  g.times = times;
  const size_t n = h.size();
  g.d.assign(n * n, 0.0);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j) {
      double v = snake_two_point_grid(h, w, i, j);
      g.at(i, j) = v;
      g.at(j, i) = v;
    }
  return g;
}

PseudometricGrid range_pseudometric(const PointedEnvironment& env, const BranchingWalk& brw,
                                    const std::vector<int64_t>& contour_steps) {
  auto order = contour_order(*brw.genealogy);
  PseudometricGrid g;
  g.times.assign(contour_steps.begin(), contour_steps.end());
  const size_t n = contour_steps.size();
  g.d.assign(n * n, 0.0);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j) {
      int32_t a = brw.position[(size_t)order[(size_t)contour_steps[i]]];
      int32_t b = brw.position[(size_t)order[(size_t)contour_steps[j]]];
      double v = (double)env.rel_height(a) + (double)env.rel_height(b) -
                 2.0 * (double)env.rel_height(env.mrca(a, b));
      g.at(i, j) = v;
      g.at(j, i) = v;
    }
  return g;
}

double cactus_discrepancy(const PointedEnvironment& env, const BranchingWalk& brw,
                          const std::vector<int64_t>& contour_steps) {
  const OrderedTree& t = *brw.genealogy;
  auto order = contour_order(t);
  auto labels = relative_height_labels(env, brw);
  DiscreteSnake snake(t, labels);
  double worst = 0.0;
  for (size_t i = 0; i < contour_steps.size(); ++i)
    for (size_t j = i + 1; j < contour_steps.size(); ++j) {
      int32_t a = brw.position[(size_t)order[(size_t)contour_steps[i]]];
      int32_t b = brw.position[(size_t)order[(size_t)contour_steps[j]]];
      double glue = (double)env.rel_height(env.mrca(a, b));
      double path = snake.geodesic_min(contour_steps[i], contour_steps[j]);
      worst = std::max(worst, 2.0 * (glue - path));
    }
  return worst;
}

double ghp_upper_bound(const PseudometricGrid& a, const PseudometricGrid& b) {
  if (a.n() != b.n()) throw std::invalid_argument("grid mismatch");
  double sup = 0.0;
  for (size_t i = 0; i < a.d.size(); ++i) sup = std::max(sup, std::abs(a.d[i] - b.d[i]));
  return 1.5 * sup;
}

bool triangle_ok(const PseudometricGrid& g, double tol) {
  const size_t n = g.n();
  for (size_t i = 0; i < n; ++i) {
    if (std::abs(g.at(i, i)) > tol) return false;
    for (size_t j = 0; j < n; ++j) {
      if (std::abs(g.at(i, j) - g.at(j, i)) > tol || g.at(i, j) < -tol) return false;
      for (size_t k = 0; k < n; ++k)
        if (g.at(i, j) > g.at(i, k) + g.at(k, j) + tol) return false;
    }
  }
  return true;
}

static bool four_point_one(const PseudometricGrid& g, size_t a, size_t b, size_t c,
                           size_t d, double tol) {
  double lhs = g.at(a, b) + g.at(c, d);
  double rhs = std::max(g.at(a, c) + g.at(b, d), g.at(a, d) + g.at(b, c));
  return lhs <= rhs + tol;
}

bool four_point_ok(const PseudometricGrid& g, double tol, int64_t samples, Rng& rng) {
  const size_t n = g.n();
  if (n <= 40) {
    for (size_t a = 0; a < n; ++a)
      for (size_t b = a; b < n; ++b)
        for (size_t c = b; c < n; ++c)
          for (size_t d = c; d < n; ++d) {
            // the condition must hold for every pairing of the quadruple
            if (!four_point_one(g, a, b, c, d, tol)) return false;
            if (!four_point_one(g, a, c, b, d, tol)) return false;
            if (!four_point_one(g, a, d, b, c, tol)) return false;
          }
    return true;
  }
  for (int64_t s = 0; s < samples; ++s) {
    size_t a = rng.below(n), b = rng.below(n), c = rng.below(n), d = rng.below(n);
    if (!four_point_one(g, a, b, c, d, tol)) return false;
  }
  return true;
}

// ---------- exact small-space rooted measured GHP ----------

namespace {

// transportation max-flow on a tiny bipartite graph (<= 7 rows): allowed arcs
// have infinite capacity, so by max-flow/min-cut the value is the minimum over
// row subsets A of (mass outside A) + (mass of columns reachable from A)
double max_allowed_mass(const std::vector<double>& mx, const std::vector<double>& my,
                        const std::vector<uint8_t>& allowed, size_t nx, size_t ny) {
  double best = 1e300;
  for (uint32_t a = 0; a < (1u << nx); ++a) {
    double cut = 0.0;
    uint32_t reach = 0;
    for (size_t i = 0; i < nx; ++i) {
      if (!(a & (1u << i))) {
        cut += mx[i];
        continue;
      }
      for (size_t j = 0; j < ny; ++j)
        if (allowed[i * ny + j]) reach |= 1u << j;
    }
    for (size_t j = 0; j < ny; ++j)
      if (reach & (1u << j)) cut += my[j];
    best = std::min(best, cut);
  }
  return best;
}

struct GhpSearch {
  const FiniteSpace* X;
  const FiniteSpace* Y;
  size_t nx, ny;
  double best;
  std::vector<std::pair<size_t, size_t>> cells;
  std::vector<uint32_t> masks;  // nonempty column subsets, fewest bits first

  // objective for the current (complete) correspondence, given its distortion
  double value(double dis) const {
    double half_dis = dis / 2.0;
    auto cross = [&](size_t i, size_t j) {
      double v = 1e300;
      for (auto& [a, b] : cells)
        v = std::min(v, X->at(i, a) + half_dis + Y->at(b, j));
      return v;
    };
    double root = cross(0, 0);
    if (half_dis + root >= best) return 1e300;  // Prokhorov term is nonnegative
    // Prokhorov term: min eps with mass outside { cross <= eps } <= eps
    std::vector<double> cr(nx * ny);
    std::vector<double> cands;
    for (size_t i = 0; i < nx; ++i)
      for (size_t j = 0; j < ny; ++j) {
        cr[i * ny + j] = cross(i, j);
        cands.push_back(cr[i * ny + j]);
      }
    std::sort(cands.begin(), cands.end());
    cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
    double prok = 1.0;  // total mass is always a valid eps
    for (double t : cands) {
      std::vector<uint8_t> allowed(nx * ny);
      for (size_t c = 0; c < allowed.size(); ++c) allowed[c] = cr[c] <= t + 1e-12;
      double deficiency = 1.0 - max_allowed_mass(X->mass, Y->mass, allowed, nx, ny);
      prok = std::min(prok, std::max(t, deficiency));
      if (t >= prok) break;  // thresholds only grow from here
    }
    return half_dis + root + prok;
  }

  // distortion of `cells` extended by cell (i, j); dis = distortion of `cells`
  double extend_distortion(double dis, size_t i, size_t j) const {
    for (auto& [a, b] : cells) dis = std::max(dis, std::abs(X->at(i, a) - Y->at(j, b)));
    return dis;
  }

  void run(size_t row, std::vector<uint8_t>& col_used, double dis) {
    // every cross-distance term carries +dis/2, so cross(0,0) >= dis/2 and
    // the objective is at least dis: prune on the full distortion
    if (dis >= best) return;
    if (row == nx) {
      for (size_t j = 0; j < ny; ++j)
        if (!col_used[j]) return;
      best = std::min(best, value(dis));
      return;
    }
    for (uint32_t mask : masks) {
      if (row == 0 && !(mask & 1u)) continue;  // roots must correspond
      size_t added = 0;
      double nd = dis;
      for (size_t j = 0; j < ny && nd < best; ++j)
        if (mask & (1u << j)) {
          nd = extend_distortion(nd, row, j);
          cells.push_back({row, j});
          ++col_used[j];
          ++added;
        }
      if (nd < best) run(row + 1, col_used, nd);
      for (size_t k = 0; k < added; ++k) {
        --col_used[cells.back().second];
        cells.pop_back();
      }
    }
  }

  // seed `best` with a simple complete correspondence so pruning bites
  // from the start: i -> min(i, ny-1) plus min(j, nx-1) <- j
  void seed() {
    double dis = 0;
    for (size_t i = 0; i < nx; ++i) {
      dis = extend_distortion(dis, i, std::min(i, ny - 1));
      cells.push_back({i, std::min(i, ny - 1)});
    }
    for (size_t j = nx; j < ny; ++j)
      {
        dis = extend_distortion(dis, std::min(j, nx - 1), j);
        cells.push_back({std::min(j, nx - 1), j});
      }
    best = value(dis);
    cells.clear();
  }
};

}  // namespace

namespace {

// quotient by distance-zero equivalence (an isometry of the measured space):
// merged points keep one representative and pool their mass.  The root's
// class is moved to index 0.
FiniteSpace merge_zero_distance(const FiniteSpace& x) {
  size_t n = x.n();
  std::vector<size_t> rep;           // representative original index per class
  std::vector<size_t> cls(n, SIZE_MAX);
  for (size_t i = 0; i < n; ++i) {
    for (size_t c = 0; c < rep.size(); ++c)
      if (x.at(i, rep[c]) == 0.0) {
        cls[i] = c;
        break;
      }
    if (cls[i] == SIZE_MAX) {
      cls[i] = rep.size();
      rep.push_back(i);
    }
  }
  size_t m = rep.size();
  FiniteSpace q;
  q.d.assign(m * m, 0.0);
  q.mass.assign(m, 0.0);
  for (size_t a = 0; a < m; ++a)
    for (size_t b = 0; b < m; ++b) q.d[a * m + b] = x.at(rep[a], rep[b]);
  for (size_t i = 0; i < n; ++i) q.mass[cls[i]] += x.mass[i];
  return q;  // class of original index 0 is class 0 by construction
}

}  // namespace

double ghp_exact_small(const FiniteSpace& x0, const FiniteSpace& y0) {
  if (x0.n() > 7 || y0.n() > 7) throw std::invalid_argument("exact GHP capped at 7 points");
  if (x0.n() == 0 || y0.n() == 0) throw std::invalid_argument("empty space");
  FiniteSpace x = merge_zero_distance(x0);
  FiniteSpace y = merge_zero_distance(y0);
  GhpSearch s{&x, &y, x.n(), y.n(), 1e300, {}, {}};
  for (uint32_t m = 1; m < (1u << y.n()); ++m) s.masks.push_back(m);
  std::sort(s.masks.begin(), s.masks.end(), [](uint32_t a, uint32_t b) {
    int pa = __builtin_popcount(a), pb = __builtin_popcount(b);
    return pa != pb ? pa < pb : a < b;
  });
  s.best = 1e300;
  s.seed();
  std::vector<uint8_t> used(y.n(), 0);
  s.run(0, used, 0.0);
  return s.best;
}

}  // namespace cactus
