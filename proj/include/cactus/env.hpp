#pragma once
// Pointed environments: a distinguished vertex o with a finite ancestor
// spine o(0)=o,...,o(q) and lazily grown hanging subtrees. All randomness is
// a pure function of (seed, stable vertex id), so growth is independent of
// exploration order: every copy of the same (seed, law, mode) environment is
// the same tree, which is what quenched experiments and deterministic
// parallel replay rely on.
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cactus/offspring.hpp"
#include "cactus/rng.hpp"

namespace cactus {

enum class EnvMode { infinite_gw, invariant };

class PointedEnvironment {
 public:
  // q: spine depth (vertices o(0)..o(q)); h_max: growth cap on relative
  // height above o; mode picks the root-degree weighting.
  PointedEnvironment(OffspringLaw nu, int32_t q, int32_t h_max, EnvMode mode,
                     uint64_t seed);

  const OffspringLaw& law() const { return nu_; }
  int32_t spine_depth() const { return q_; }
  int32_t height_cap() const { return h_max_; }
  EnvMode mode() const { return mode_; }

  int32_t origin() const { return o_; }            // arena index of o
  int32_t spine(int32_t p) const;                  // arena index of o(p)
  int32_t parent(int32_t v) const;                 // -1 at o(q)
  int32_t rel_height(int32_t v) const { return nodes_[(size_t)v].height; }
  int32_t kid_count(int32_t v) const { return nodes_[(size_t)v].nkids; }
  int32_t child(int32_t v, int32_t j);             // materializes on demand
  uint64_t uid(int32_t v) const { return nodes_[(size_t)v].uid; }
  int64_t materialized() const { return (int64_t)nodes_.size(); }

  // true when v sits at the growth cap (its children are not materializable);
  // callers must treat such visits as contamination
  bool at_cap(int32_t v) const { return nodes_[(size_t)v].height >= h_max_; }
  bool is_spine_top(int32_t v) const { return v == spine((int32_t)q_); }

  int32_t mrca(int32_t a, int32_t b) const;
  // depth-first list of the subtree below v clipped to `levels` levels;
  // materializes it (used by tests and exports)
  std::vector<int32_t> subtree(int32_t v, int32_t levels);

  // descendant count exactly `d` levels below v, computed from the hash
  // stream without materializing nodes
  int64_t descendant_count(int32_t v, int32_t d) const;
  int64_t descendant_count_uid(uint64_t uid, int32_t d) const;

  // child count the lazy growth will assign to vertex with this uid
  int64_t uid_kid_count(uint64_t uid) const;
  static uint64_t child_uid(uint64_t uid, int32_t j) { return hash2(uid, (uint64_t)j + 1); }

 private:
  struct Node {
    uint64_t uid;
    int32_t parent;
    int32_t height;       // relative height; o at 0, o(p) at -p
    int32_t nkids;
    int32_t spine_child;  // child slot continuing the spine, -1 off spine
    int64_t first_child;  // arena index of first child, -1 until materialized
  };

  int32_t add_node(uint64_t uid, int32_t parent, int32_t height, int32_t nkids,
                   int32_t spine_child);
  void materialize_children(int32_t v);

  OffspringLaw nu_;
  int32_t q_, h_max_;
  EnvMode mode_;
  uint64_t seed_;
  std::vector<Node> nodes_;
  std::vector<int32_t> spine_;  // spine_[p] = arena index of o(p)
  int32_t o_ = 0;
};

}  // namespace cactus
