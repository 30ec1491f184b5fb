#include "cactus/coding.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cactus {

std::vector<int64_t> lukasiewicz(const OrderedTree& t) {
  std::vector<int64_t> V(t.kids.size() + 1);
  V[0] = 0;
  for (size_t l = 0; l < t.kids.size(); ++l) V[l + 1] = V[l] + t.kids[l] - 1;
  return V;
}

std::optional<OrderedTree> decode_lukasiewicz(const std::vector<int64_t>& V) {
  if (V.size() < 2 || V.front() != 0 || V.back() != -1) return std::nullopt;
  std::vector<int32_t> kids(V.size() - 1);
  for (size_t l = 0; l + 1 < V.size(); ++l) {
    int64_t k = V[l + 1] - V[l] + 1;
    if (k < 0) return std::nullopt;
    if (V[l] < 0) return std::nullopt;  // hit -1 before the end
    kids[l] = (int32_t)k;
  }
  return OrderedTree::from_kids(std::move(kids));
}

std::vector<int32_t> height_recount(const std::vector<int64_t>& V) {
  // positions m < l whose value is a weak running minimum of V over [m, l],
  // maintained as a monotone stack (ties all count)
  const size_t n = V.size() - 1;
  std::vector<int32_t> H2(n);
  std::vector<int64_t> vals;
  std::vector<int32_t> cnts;
  int64_t total = 0;
  for (size_t l = 0; l < n; ++l) {
    if (l > 0) {
      int64_t v = V[l];
      while (!vals.empty() && vals.back() > v) {
        total -= cnts.back();
        vals.pop_back();
        cnts.pop_back();
      }
      vals.push_back(v);
      cnts.push_back(1);
      total += 1;
    }
    H2[l] = (int32_t)total;
  }
  return H2;
}

std::vector<int32_t> contour_order(const OrderedTree& t) {
  const int64_t n = t.size();
  std::vector<int32_t> order;
  order.reserve((size_t)(2 * n - 1));
  // first-child pointers: children of v are consecutive DFS blocks; precompute
  // child lists via parents
  std::vector<int32_t> head((size_t)n, -1), next((size_t)n, -1), tail((size_t)n, -1);
  for (int64_t u = 1; u < n; ++u) {
    int32_t p = t.parent[(size_t)u];
    if (head[(size_t)p] < 0) head[(size_t)p] = (int32_t)u;
    else next[(size_t)tail[(size_t)p]] = (int32_t)u;
    tail[(size_t)p] = (int32_t)u;
  }
  // explicit contour walk: at v, go to the next unvisited child, else to parent
  std::vector<int32_t> cursor = head;  // next child to enter
  int32_t v = 0;
  order.push_back(0);
  int64_t steps = 2 * (n - 1);
  for (int64_t k = 0; k < steps; ++k) {
    if (cursor[(size_t)v] >= 0) {
      int32_t c = cursor[(size_t)v];
      cursor[(size_t)v] = next[(size_t)c];
      v = c;
    } else {
      v = t.parent[(size_t)v];
    }
    order.push_back(v);
  }
  return order;
}

std::vector<int32_t> contour_samples(const OrderedTree& t) {
  auto order = contour_order(t);
  const int64_t n = t.size();
  std::vector<int32_t> C((size_t)(2 * n + 1), 0);
  for (size_t k = 0; k < order.size(); ++k) C[k] = t.depth[(size_t)order[k]];
  return C;  // entries 2n-1, 2n stay 0 by convention
}

double contour_at(const std::vector<int32_t>& C, double s) {
  if (s < 0 || s > (double)(C.size() - 1)) throw std::domain_error("contour_at range");
  double fl = std::floor(s);
  size_t k = (size_t)fl;
  if (k + 1 >= C.size()) return (double)C.back();
  double f = s - fl;
  return (double)C[k] + f * ((double)C[k + 1] - (double)C[k]);
}

double height_at(const OrderedTree& t, double s) {
  const int64_t n = t.size();
  if (s < 0 || s > (double)n) throw std::domain_error("height_at range");
  double fl = std::floor(s);
  int64_t l = (int64_t)fl;
  if (l == n) return 0.0;
  double f = s - fl;
  double hl = (double)t.depth[(size_t)l];
  if (l == n - 1) {
    // last interval: descend to the root and stay there (forest convention
    // floored at zero, which is what the time-change produces)
    double v = hl - (hl + 1.0) * std::min(2.0 * f, 1.0) + std::max(2.0 * f - 1.0, 0.0);
    return std::max(v, 0.0);
  }
  if (t.depth[(size_t)l + 1] > t.depth[(size_t)l]) return hl + f;  // ascent
  double m = (double)t.depth[(size_t)t.parent[(size_t)l + 1]];     // |u_l /\ u_{l+1}|
  return hl - (hl - m) * std::min(2.0 * f, 1.0) + std::max(2.0 * f - 1.0, 0.0);
}

double timechange_at(const OrderedTree& t, double s) {
  const int64_t n = t.size();
  if (s < 0 || s > (double)n) throw std::domain_error("timechange_at range");
  double fl = std::floor(s);
  int64_t l = (int64_t)fl;
  if (l == n) return (double)(2 * n);
  double f = s - fl;
  double Kl = (double)contour_index_K(t, l);
  double Kn = (double)contour_index_K(t, l + 1);
  if (l + 1 < n && t.depth[(size_t)l + 1] > t.depth[(size_t)l])
    return Kl + f;  // ascent: contour rises by one unit, unit speed matches H
  // descent: first half tracks the contour down to the common ancestor,
  // second half the one-unit rise to the next vertex
  return Kl + (Kn - 1.0 - Kl) * std::min(2.0 * f, 1.0) + std::max(2.0 * f - 1.0, 0.0);
}

int32_t mrca_depth_from_height(const OrderedTree& t, int64_t l, int64_t lp) {
  if (l > lp) std::swap(l, lp);
  if (l < 0 || lp >= t.size()) throw std::domain_error("mrca range");
  // min of the continuous height over [l, lp]: endpoint heights and the
  // inter-integer dips, which only occur on descents and reach |u_j /\ u_{j+1}|
  int32_t m = t.depth[(size_t)lp];
  for (int64_t j = l; j < lp; ++j) {
    m = std::min(m, t.depth[(size_t)j]);
    if (t.depth[(size_t)j + 1] <= t.depth[(size_t)j])
      m = std::min(m, t.depth[(size_t)t.parent[(size_t)j + 1]]);
  }
  return m;
}

int32_t mrca_depth_by_ancestors(const OrderedTree& t, int64_t l, int64_t lp) {
  int32_t a = (int32_t)l, b = (int32_t)lp;
  while (a != b) {
    if (a > b) a = t.parent[(size_t)a];
    else b = t.parent[(size_t)b];
  }
  return t.depth[(size_t)a];
}

std::pair<rational, rational> kemperman_check(
    const std::function<rational(int64_t)>& pmf, int64_t n) {
  if (n < 1) throw std::invalid_argument("kemperman_check needs n >= 1");
  // contributions to {V_n = -1} only pass through levels <= n-1-j at step j,
  // and increments k-1 with k <= n; both DPs are exact under this pruning.
  // first-passage DP: levels >= 0 until the last step
  std::vector<rational> fp((size_t)n, rational(0));
  fp[0] = 1;
  for (int64_t j = 1; j < n; ++j) {
    std::vector<rational> nxt((size_t)n, rational(0));
    int64_t vmax = n - 1 - j;
    for (int64_t v = 0; v <= std::min<int64_t>(n - 1, n - j); ++v) {
      if (fp[(size_t)v] == 0) continue;
      for (int64_t k = 0; k <= vmax - v + 1 && k <= n; ++k) {
        int64_t v2 = v + k - 1;
        if (v2 < 0 || v2 > vmax) continue;
        nxt[(size_t)v2] += fp[(size_t)v] * pmf(k);
      }
    }
    fp.swap(nxt);
  }
  rational first_passage = fp[0] * pmf(0);
  // unconstrained convolution DP for P(V_n = -1); the walk may dip below -1
  // and return, so levels range over [-j, n-j-1] (offset by +n)
  std::vector<rational> cv((size_t)(2 * n + 1), rational(0));
  cv[(size_t)n] = 1;  // level 0
  for (int64_t j = 1; j <= n; ++j) {
    std::vector<rational> nxt((size_t)(2 * n + 1), rational(0));
    int64_t vmax = std::max<int64_t>(n - j - 1, -1);  // reachable-to-(-1) bound
    for (int64_t idx = 0; idx <= 2 * n; ++idx) {
      if (cv[(size_t)idx] == 0) continue;
      int64_t v = idx - n;
      for (int64_t k = 0; k <= n; ++k) {
        int64_t v2 = v + k - 1;
        if (v2 < -j || v2 > vmax) continue;
        nxt[(size_t)(v2 + n)] += cv[(size_t)idx] * pmf(k);
      }
    }
    cv.swap(nxt);
  }
  rational conv = cv[(size_t)(n - 1)] / n;
  return {first_passage, conv};
}

rational rational_pmf_binary(int64_t k) {
  if (k == 0 || k == 2) return rational(1, 2);
  return rational(0);
}

rational rational_pmf_geometric(int64_t k) {
  if (k < 0) return rational(0);
  boost::multiprecision::cpp_int den = 1;
  den <<= (unsigned)(k + 1);
  return rational(1, den);
}

std::vector<int64_t> forest_lukasiewicz(const std::vector<OrderedTree>& f) {
  std::vector<int64_t> V{0};
  int64_t shift = 0;
  for (const auto& t : f) {
    auto v = lukasiewicz(t);
    for (size_t l = 1; l < v.size(); ++l) V.push_back(v[l] + shift);
    shift -= 1;
  }
  return V;
}

std::vector<int32_t> forest_heights(const std::vector<OrderedTree>& f) {
  std::vector<int32_t> H;
  for (const auto& t : f)
    for (int64_t l = 0; l < t.size(); ++l) H.push_back(t.depth[(size_t)l]);
  return H;
}

}  // namespace cactus
