#pragma once
// Counter-based deterministic RNG. Each replica gets an independent stream
// keyed by (seed, stream id); outputs depend only on (key, counter), so
// parallel runs reproduce byte-identically regardless of worker count.
#include <cstdint>
#include <cmath>

namespace cactus {

inline uint64_t mix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// order-sensitive combine for id chains (vertex ids, stream keys)
inline uint64_t hash2(uint64_t a, uint64_t b) {
  return mix64(a ^ (0xd1b54a32d192ed03ULL * (b + 0x632be59bd9b4e019ULL)));
}

class Rng {
 public:
  using result_type = uint64_t;
  explicit Rng(uint64_t seed, uint64_t stream = 0)
      : key_(hash2(mix64(seed), stream)), ctr_(0) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~0ULL; }

  result_type operator()() { return mix64(key_ + ++ctr_ * 0x9e3779b97f4a7c15ULL); }

  // uniform on (0,1) (never exactly 0 or 1)
  double u01() { return (double)(((*this)() >> 11) + 0.5) * (1.0 / 9007199254740992.0); }

  // uniform integer in [0, n)
  uint64_t below(uint64_t n) {
    // 128-bit multiply rejection-free method (Lemire, biased < 2^-64, fine here)
    return (uint64_t)(((__uint128_t)(*this)() * n) >> 64);
  }

  double normal() {
    if (have_spare_) { have_spare_ = false; return spare_; }
    double u = u01(), v = u01();
    double r = std::sqrt(-2.0 * std::log(u));
    double a = 6.283185307179586476925286766559 * v;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  uint64_t key_;
  uint64_t ctr_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace cactus
