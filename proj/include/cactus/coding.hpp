#pragma once
// Path encodings of ordered trees: Lukasiewicz walk, height and contour
// processes with their exact piecewise-linear interpolations, the
// height/contour time-change, ancestry-by-minimum queries, and the exact
// rational first-passage identities used as oracles.
#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "cactus/tree.hpp"

namespace cactus {

using rational = boost::multiprecision::cpp_rational;

// V_0 = 0, V_{l+1} = V_l + kids[l] - 1; length size()+1, ends at -1
std::vector<int64_t> lukasiewicz(const OrderedTree& t);

// inverse of lukasiewicz; nullopt on malformed paths
std::optional<OrderedTree> decode_lukasiewicz(const std::vector<int64_t>& V);

// independent recount of integer heights from the walk:
// H_l = #{m < l : V_m = min_{m<=j<=l} V_j}  (O(n) stack sweep)
std::vector<int32_t> height_recount(const std::vector<int64_t>& V);

// contour integer samples C_k = |v_k| for k <= 2(n-1), padded with
// C_{2n-1} = C_{2n} = 0; length 2n+1
std::vector<int32_t> contour_samples(const OrderedTree& t);

// contour order: the vertex index visited at each contour step k <= 2(n-1)
std::vector<int32_t> contour_order(const OrderedTree& t);

// continuous interpolations and the time-change, valid on [0, size()] resp.
// [0, 2 size()]; all are exact piecewise-linear forms
double height_at(const OrderedTree& t, double s);
double contour_at(const std::vector<int32_t>& C, double s);
double timechange_at(const OrderedTree& t, double s);  // H_s = C_{phi(s)}
inline int64_t contour_index_K(const OrderedTree& t, int64_t l) {
  return 2 * l - (l == t.size() ? 0 : t.depth[(size_t)l]);
}

// |u_l /\ u_l'| = min of the continuous height over [l, l']
int32_t mrca_depth_from_height(const OrderedTree& t, int64_t l, int64_t lp);
// pointer-chasing oracle for the same quantity
int32_t mrca_depth_by_ancestors(const OrderedTree& t, int64_t l, int64_t lp);

// exact rational pair (P(#tree = n) by first-passage DP,
//                      (1/n) P(V_n = -1) by unconstrained convolution DP).
// `pmf` must return the exact law value for 0 <= k <= n.
std::pair<rational, rational> kemperman_check(
    const std::function<rational(int64_t)>& pmf, int64_t n);

rational rational_pmf_binary(int64_t k);     // 1/2 at 0 and 2
rational rational_pmf_geometric(int64_t k);  // 2^{-k-1}

// forest encodings (concatenation conventions): V shifts down by one per
// completed tree, H and C restart at 0
std::vector<int64_t> forest_lukasiewicz(const std::vector<OrderedTree>& f);
std::vector<int32_t> forest_heights(const std::vector<OrderedTree>& f);

}  // namespace cactus
