#pragma once
// Finite rooted ordered trees in depth-first layout, plus the Galton-Watson
// samplers (free, conditioned on exact size, conditioned on size >= n).
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cactus/offspring.hpp"
#include "cactus/rng.hpp"

namespace cactus {

struct OrderedTree {
  std::vector<int32_t> kids;    // child counts, depth-first (lexicographic) order
  std::vector<int32_t> parent;  // parent index; -1 at the root
  std::vector<int32_t> depth;   // |u|

  int64_t size() const { return (int64_t)kids.size(); }

  // derive parent/depth from a child-count sequence; empty optional when the
  // sequence does not close a single tree
  static std::optional<OrderedTree> from_kids(std::vector<int32_t> kids);

  std::string serialize() const;  // "2,0,0"
  static std::optional<OrderedTree> parse(const std::string& text);
};

// Free GW tree, depth-first. Returns nullopt when the vertex budget `cap`
// is exceeded (distinguishable outcome, not an error).
std::optional<OrderedTree> sample_gw(const OffspringLaw& law, int64_t cap, Rng& rng);

// Exact conditional law given #tree = n, via the cycle rotation of an
// increment sequence conditioned to sum to -1. Throws when P(#tree = n) = 0
// (detectable parities) or the retry budget is exhausted.
OrderedTree sample_gw_conditioned_size(const OffspringLaw& law, int64_t n, Rng& rng);

// Exact law of the first tree with at least n vertices in an i.i.d. sequence.
OrderedTree sample_gw_conditioned_atleast(const OffspringLaw& law, int64_t n, Rng& rng);

// rotation index of the cycle lemma: the unique r such that the rotated
// increment sequence stays >= 0 strictly before its last step (sum must be -1)
size_t cycle_rotation(const std::vector<int32_t>& increments);

}  // namespace cactus
