#include "cactus/env.hpp"

#include <algorithm>

namespace cactus {

// one-shot draws from a uid-keyed stream
static Rng uid_stream(uint64_t seed, uint64_t uid) { return Rng(seed, uid); }

PointedEnvironment::PointedEnvironment(OffspringLaw nu, int32_t q, int32_t h_max,
                                       EnvMode mode, uint64_t seed)
    : nu_(std::move(nu)), q_(q), h_max_(h_max), mode_(mode), seed_(seed) {
  if (q < 0) throw std::invalid_argument("spine depth must be >= 0");
  spine_.resize((size_t)q + 1, -1);
  // build the spine top-down so parent links are plain arena indices
  for (int32_t p = q; p >= 0; --p) {
    uint64_t uid = hash2(0x5350494eULL /*'SPIN'*/, (uint64_t)p);
    Rng g = uid_stream(seed_, uid);
    int32_t nk, slot = -1;
    if (p == 0) {
      nk = (int32_t)(mode_ == EnvMode::invariant ? nu_.sample_degree_biased(g)
                                                 : nu_.sample(g));
    } else {
      // spine vertices carry a size-biased count and a uniform spine slot
      nk = (int32_t)nu_.sample_size_biased(g);
      slot = (int32_t)g.below((uint64_t)nk);
    }
    int32_t parent = (p == q) ? -1 : spine_[(size_t)p + 1];
    int32_t v = add_node(uid, parent, -p, nk, slot);
    spine_[(size_t)p] = v;
    if (parent >= 0) {
      // link: o(p) occupies the spine slot of o(p+1); the slot's child entry
      // is fixed up when o(p+1)'s children materialize
    }
  }
  o_ = spine_[0];
}

int32_t PointedEnvironment::spine(int32_t p) const {
  if (p < 0 || p > q_) throw std::out_of_range("spine index");
  return spine_[(size_t)p];
}

int32_t PointedEnvironment::parent(int32_t v) const { return nodes_[(size_t)v].parent; }

int32_t PointedEnvironment::add_node(uint64_t uid, int32_t parent, int32_t height,
                                     int32_t nkids, int32_t spine_child) {
  nodes_.push_back(Node{uid, parent, height, nkids, spine_child, -1});
  return (int32_t)nodes_.size() - 1;
}

int64_t PointedEnvironment::uid_kid_count(uint64_t uid) const {
  Rng g = uid_stream(seed_, uid);
  return nu_.sample(g);
}

void PointedEnvironment::materialize_children(int32_t v) {
  Node& nd = nodes_[(size_t)v];
  if (nd.first_child >= 0 || nd.nkids == 0) return;
  if (nd.height >= h_max_)
    throw std::runtime_error("environment-too-small: growth cap reached");
  int64_t first = (int64_t)nodes_.size();
  int32_t nk = nd.nkids;
  int32_t sp = nd.spine_child;
  uint64_t uid = nd.uid;
  int32_t h = nd.height;
  for (int32_t j = 0; j < nk; ++j) {  // nd may dangle after push_back: copy first
    if (j == sp) {
      // the spine continuation already exists; keep a placeholder slot and
      // resolve it in child()
      add_node(0, v, h + 1, 0, -1);
      nodes_.back().first_child = -2;  // marker: resolve via spine_
    } else {
      uint64_t cu = child_uid(uid, j);
      add_node(cu, v, h + 1, (int32_t)uid_kid_count(cu), -1);
    }
  }
  nodes_[(size_t)v].first_child = first;
}

int32_t PointedEnvironment::child(int32_t v, int32_t j) {
  const Node& nd = nodes_[(size_t)v];
  if (j < 0 || j >= nd.nkids) throw std::out_of_range("child slot");
  if (nd.spine_child == j) {
    // o(p)'s spine slot points back down to o(p-1)
    int32_t p = -nd.height;
    return spine_[(size_t)p - 1];
  }
  if (nd.first_child < 0) materialize_children(v);
  return (int32_t)(nodes_[(size_t)v].first_child + j);
}

int32_t PointedEnvironment::mrca(int32_t a, int32_t b) const {
  while (a != b) {
    if (a < 0 || b < 0) throw std::logic_error("mrca escaped the spine top");
    if (nodes_[(size_t)a].height > nodes_[(size_t)b].height) a = nodes_[(size_t)a].parent;
    else if (nodes_[(size_t)b].height > nodes_[(size_t)a].height) b = nodes_[(size_t)b].parent;
    else {
      a = nodes_[(size_t)a].parent;
      b = nodes_[(size_t)b].parent;
    }
  }
  return a;
}

std::vector<int32_t> PointedEnvironment::subtree(int32_t v, int32_t levels) {
  std::vector<int32_t> out;
  std::vector<std::pair<int32_t, int32_t>> stack{{v, 0}};
  while (!stack.empty()) {
    auto [u, d] = stack.back();
    stack.pop_back();
    out.push_back(u);
    if (d == levels) continue;
    for (int32_t j = kid_count(u); j-- > 0;) stack.push_back({child(u, j), d + 1});
  }
  return out;
}

int64_t PointedEnvironment::descendant_count_uid(uint64_t uid, int32_t d) const {
  if (d == 0) return 1;
  int64_t k = uid_kid_count(uid);
  int64_t total = 0;
  for (int32_t j = 0; j < (int32_t)k; ++j)
    total += descendant_count_uid(child_uid(uid, j), d - 1);
  return total;
}

int64_t PointedEnvironment::descendant_count(int32_t v, int32_t d) const {
  if (d == 0) return 1;
  const Node& nd = nodes_[(size_t)v];
  int64_t total = 0;
  for (int32_t j = 0; j < nd.nkids; ++j) {
    if (j == nd.spine_child) {
      total += descendant_count(spine_[(size_t)(-nd.height) - 1], d - 1);
    } else if (nd.first_child >= 0 &&
               nodes_[(size_t)(nd.first_child + j)].uid != 0) {
      total += descendant_count((int32_t)(nd.first_child + j), d - 1);
    } else {
      total += descendant_count_uid(child_uid(nd.uid, j), d - 1);
    }
  }
  return total;
}

}  // namespace cactus
