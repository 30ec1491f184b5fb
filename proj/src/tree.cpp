#include "cactus/tree.hpp"

#include <algorithm>
#include <charconv>
#include <stdexcept>

namespace cactus {

std::optional<OrderedTree> OrderedTree::from_kids(std::vector<int32_t> kids) {
  const int64_t n = (int64_t)kids.size();
  if (n == 0) return std::nullopt;
  OrderedTree t;
  t.kids = std::move(kids);
  t.parent.assign((size_t)n, -1);
  t.depth.assign((size_t)n, 0);
  // stack of (vertex, remaining children to attach)
  std::vector<std::pair<int32_t, int32_t>> stack;
  stack.reserve(64);
  stack.push_back({0, t.kids[0]});
  for (int64_t l = 1; l < n; ++l) {
    while (!stack.empty() && stack.back().second == 0) stack.pop_back();
    if (stack.empty()) return std::nullopt;  // new vertex with no open parent
    auto& [p, rem] = stack.back();
    t.parent[(size_t)l] = p;
    t.depth[(size_t)l] = t.depth[(size_t)p] + 1;
    --rem;
    stack.push_back({(int32_t)l, t.kids[(size_t)l]});
  }
  while (!stack.empty() && stack.back().second == 0) stack.pop_back();
  if (!stack.empty()) return std::nullopt;  // unattached children remain
  return t;
}

std::string OrderedTree::serialize() const {
  std::string out;
  out.reserve(kids.size() * 2);
  for (size_t i = 0; i < kids.size(); ++i) {
    if (i) out.push_back(',');
    out += std::to_string(kids[i]);
  }
  return out;
}

std::optional<OrderedTree> OrderedTree::parse(const std::string& text) {
  std::vector<int32_t> kids;
  const char* p = text.data();
  const char* end = p + text.size();
  while (p < end) {
    int32_t v = 0;
    auto [next, ec] = std::from_chars(p, end, v);
    if (ec != std::errc{} || v < 0) return std::nullopt;
    kids.push_back(v);
    p = next;
    if (p < end) {
      if (*p != ',') return std::nullopt;
      ++p;
    }
  }
  if (kids.empty()) return std::nullopt;
  return from_kids(std::move(kids));
}

std::optional<OrderedTree> sample_gw(const OffspringLaw& law, int64_t cap, Rng& rng) {
  std::vector<int32_t> kids;
  int64_t open = 1;  // vertices generated but not yet expanded
  while (open > 0) {
    if ((int64_t)kids.size() >= cap) return std::nullopt;
    int64_t k = law.sample(rng);
    kids.push_back((int32_t)k);
    open += k - 1;
  }
  auto t = OrderedTree::from_kids(std::move(kids));
  if (!t) throw std::logic_error("sample_gw produced a non-closing sequence");
  return t;
}

size_t cycle_rotation(const std::vector<int32_t>& increments) {
  // first position attaining the running minimum; rotate to start just after it
  int64_t sum = 0, best = 0;
  size_t arg = 0;
  for (size_t i = 0; i < increments.size(); ++i) {
    sum += increments[i];
    if (sum < best) {
      best = sum;
      arg = i;
    }
  }
  return (arg + 1) % increments.size();
}

static OrderedTree tree_from_increments(std::vector<int32_t>&& inc) {
  size_t r = cycle_rotation(inc);
  std::vector<int32_t> kids(inc.size());
  for (size_t i = 0; i < inc.size(); ++i) kids[i] = inc[(i + r) % inc.size()] + 1;
  auto t = OrderedTree::from_kids(std::move(kids));
  if (!t) throw std::logic_error("cycle rotation failed to close a tree");
  return *t;
}

OrderedTree sample_gw_conditioned_size(const OffspringLaw& law, int64_t n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("conditioned size needs n >= 1");
  // two-point laws: the increment multiset is deterministic, the conditional
  // law is an exact uniform shuffle (exchangeability) + cycle rotation
  if (law.max_support() == 2 && law.pmf(1) == 0.0) {
    if (n % 2 == 0) throw std::invalid_argument("impossible size for a 0/2-ary law");
    std::vector<int32_t> inc((size_t)n, -1);
    for (int64_t i = 0; i < (n - 1) / 2; ++i) inc[(size_t)i] = 1;
    for (int64_t i = n - 1; i > 0; --i)
      std::swap(inc[(size_t)i], inc[rng.below((uint64_t)i + 1)]);
    return tree_from_increments(std::move(inc));
  }
  // generic: rejection on the increment sum (success prob ~ const/b_n)
  const int64_t budget = 2000 * (int64_t)(2 + std::sqrt((double)n));
  std::vector<int32_t> inc((size_t)n);
  for (int64_t attempt = 0; attempt < budget; ++attempt) {
    int64_t sum = 0;
    for (int64_t i = 0; i < n; ++i) {
      int64_t k = law.sample(rng);
      inc[(size_t)i] = (int32_t)(k - 1);
      sum += k - 1;
      if (sum - (n - 1 - i) > -1) {
        // cannot reach -1 any more even with all-(-1) steps: abort early
        sum = 0;
        break;
      }
    }
    if (sum == -1) return tree_from_increments(std::move(inc));
  }
  throw std::runtime_error("conditioned-size sampler: retry budget exhausted");
}

OrderedTree sample_gw_conditioned_atleast(const OffspringLaw& law, int64_t n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("needs n >= 1");
  for (int64_t attempt = 0; attempt < 100'000'000; ++attempt) {
    // the cap only guards runaway memory; critical laws terminate a.s. A tree
    // hitting the cap would qualify (size >= cap >= n) but cannot be
    // materialized, so it is a reported failure, never a silent resample.
    auto t = sample_gw(law, 1LL << 28, rng);
    if (!t) throw std::runtime_error("conditioned-atleast: memory cap hit");
    if (t->size() >= n) return *t;
  }
  throw std::runtime_error("conditioned-atleast sampler: budget exhausted");
}

}  // namespace cactus
