#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "cactus/coding.hpp"
#include "cactus/harmonic.hpp"
#include "cactus/harness.hpp"
#include "cactus/limits.hpp"
#include "cactus/metric.hpp"
#include "cactus/snake.hpp"
#include "cactus/stats.hpp"
#include "cactus/tree.hpp"
#include "cactus/walk.hpp"

using namespace cactus;

static OffspringLaw env_law() { return OffspringLaw::supercritical({0.0, 0.5, 0.5}); }

TEST_CASE("rng determinism and ranges") {
  Rng a(42, 7), b(42, 7), c(42, 8);
  for (int i = 0; i < 100; ++i) CHECK(a() == b());
  bool differs = false;
  for (int i = 0; i < 100; ++i) differs |= (b() != c());
  CHECK(differs);
  Rng r(1);
  for (int i = 0; i < 1000; ++i) {
    double u = r.u01();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
    CHECK(r.below(17) < 17);
  }
}

TEST_CASE("offspring laws: moments and generating functions") {
  auto bin = OffspringLaw::critical_binary();
  CHECK(bin.pmf(0) == doctest::Approx(0.5));
  CHECK(bin.pmf(2) == doctest::Approx(0.5));
  CHECK(bin.mean() == doctest::Approx(1.0));
  CHECK(bin.variance() == doctest::Approx(1.0));
  CHECK(bin.pgf(0.6) == doctest::Approx(0.5 + 0.5 * 0.36));

  auto geo = OffspringLaw::critical_geometric(0.5);
  double tot = 0, mean = 0;
  for (int k = 0; k < 60; ++k) {
    tot += geo.pmf(k);
    mean += k * geo.pmf(k);
  }
  CHECK(tot == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(mean == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(geo.variance() == doctest::Approx(2.0));

  // binary tree-size pgf has the closed form (1 - sqrt(1 - r^2)) / r
  for (double r : {0.2, 0.5, 0.8, 0.95}) {
    double phi = bin.tree_size_pgf(r);
    CHECK(phi == doctest::Approx((1.0 - std::sqrt(1.0 - r * r)) / r).epsilon(1e-12));
  }

  auto nu = env_law();
  CHECK(nu.mean() == doctest::Approx(1.5));
  CHECK(nu.sigma_sq_ratio() == doctest::Approx(4.0 / 3.0));

  auto st = OffspringLaw::critical_stable_tail(1.5, 2);
  double m = 0, t2 = 0;
  for (int64_t k = 0; k < 4000000; ++k) {
    m += (double)k * st.pmf(k);
    t2 += st.pmf(k);
  }
  CHECK(t2 == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(m == doctest::Approx(1.0).epsilon(1e-2));  // heavy tail: slow partial sums
  // tail function pinned: P(X > 1) = 0.75, so P(X = 1) = 1 - 0.75 exactly
  CHECK(st.pmf(1) == doctest::Approx(0.25).epsilon(1e-12));
  // regular variation of the tail: T(2k)/T(k) -> 2^{-alpha}
  CHECK(st.pmf(1 << 16) / st.pmf(1 << 17) == doctest::Approx(std::pow(2.0, 2.5)).epsilon(5e-4));
  CHECK_THROWS(OffspringLaw::critical_stable_tail(2.0, 2));
}

TEST_CASE("tree: serialization and conditioned samplers") {
  auto t = OrderedTree::parse("2,0,0");
  REQUIRE(t.has_value());
  CHECK(t->size() == 3);
  CHECK(t->serialize() == "2,0,0");
  CHECK(t->depth[2] == 1);
  CHECK(!OrderedTree::parse("2,0").has_value());

  auto bin = OffspringLaw::critical_binary();
  Rng rng(11, 0);
  for (int64_t n : {3, 7, 101, 2001}) {
    OrderedTree tr = sample_gw_conditioned_size(bin, n, rng);
    CHECK(tr.size() == n);
  }
  CHECK_THROWS(sample_gw_conditioned_size(bin, 4, rng));  // even sizes impossible

  auto geo = OffspringLaw::critical_geometric(0.5);
  for (int64_t n : {1, 2, 17, 500}) {
    OrderedTree tr = sample_gw_conditioned_size(geo, n, rng);
    CHECK(tr.size() == n);
  }
  OrderedTree big = sample_gw_conditioned_atleast(geo, 50, rng);
  CHECK(big.size() >= 50);
}

TEST_CASE("tree: conditioned law matches exhaustive enumeration at n=5") {
  // geometric mu: P(t | #t=5) should be uniform over... no; compare empirical
  // frequency of each 5-vertex shape against its exact GW weight
  auto geo = OffspringLaw::critical_geometric(0.5);
  Rng rng(5, 1);
  std::map<std::string, int64_t> freq;
  const int64_t R = 40000;
  for (int64_t i = 0; i < R; ++i) ++freq[sample_gw_conditioned_size(geo, 5, rng).serialize()];
  // exact weights: product of pmf over kid counts, normalized over shapes
  std::map<std::string, double> w;
  double tot = 0;
  for (auto& [s, c] : freq) {
    auto t = OrderedTree::parse(s);
    REQUIRE(t.has_value());
    double p = 1;
    for (int32_t k : t->kids) p *= geo.pmf(k);
    w[s] = p;
    tot += p;
  }
  // all 14 shapes (Catalan(4)) should appear
  CHECK(freq.size() == 14);
  for (auto& [s, c] : freq) {
    double expect = w[s] / tot;
    CHECK((double)c / (double)R == doctest::Approx(expect).epsilon(0.08));
  }
}

TEST_CASE("coding: bijection, recount, time-change, mrca") {
  auto bin = OffspringLaw::critical_binary();
  auto geo = OffspringLaw::critical_geometric(0.5);
  Rng rng(3, 2);
  for (int rep = 0; rep < 300; ++rep) {
    const OffspringLaw& law = (rep % 2 == 0) ? bin : geo;
    auto ot = sample_gw(law, 400, rng);
    if (!ot) continue;
    OrderedTree& t = *ot;
    auto V = lukasiewicz(t);
    auto back = decode_lukasiewicz(V);
    REQUIRE(back.has_value());
    CHECK(back->kids == t.kids);
    auto H = height_recount(V);
    for (int64_t l = 0; l < t.size(); ++l) CHECK(H[(size_t)l] == t.depth[(size_t)l]);
    auto C = contour_samples(t);
    for (int s10 = 0; s10 <= 10; ++s10) {
      double s = (double)t.size() * s10 / 10.0;
      CHECK(height_at(t, s) ==
            doctest::Approx(contour_at(C, timechange_at(t, s))).epsilon(1e-12));
    }
    int64_t l1 = (int64_t)rng.below((uint64_t)t.size());
    int64_t l2 = (int64_t)rng.below((uint64_t)t.size());
    CHECK(mrca_depth_from_height(t, l1, l2) == mrca_depth_by_ancestors(t, l1, l2));
  }
}

TEST_CASE("coding: Kemperman identity exact in rationals") {
  for (int64_t n = 1; n <= 12; ++n) {
    auto [fp, conv] = kemperman_check(rational_pmf_binary, n);
    CHECK(fp == conv);
    auto [fg, cg] = kemperman_check(rational_pmf_geometric, n);
    CHECK(fg == cg);
    if (n % 2 == 1) CHECK(fg > 0);
  }
}

TEST_CASE("environment: hash-determined growth") {
  auto nu = env_law();
  PointedEnvironment a(nu, 10, 20, EnvMode::infinite_gw, 99);
  PointedEnvironment b(nu, 10, 20, EnvMode::infinite_gw, 99);
  // grow them in different orders; same uid => same child counts
  auto s1 = a.subtree(a.origin(), 5);
  Rng rng(4, 4);
  run_walk(b, b.origin(), 1.5, 200, rng);
  auto s2 = b.subtree(b.origin(), 5);
  REQUIRE(s1.size() == s2.size());
  for (size_t i = 0; i < s1.size(); ++i) {
    CHECK(a.uid(s1[i]) == b.uid(s2[i]));
    CHECK(a.kid_count(s1[i]) == b.kid_count(s2[i]));
  }
  // descendant_count agrees with explicit materialization
  for (int32_t d = 0; d <= 4; ++d) {
    int64_t cnt = 0;
    for (int32_t v : s1)
      if (a.rel_height(v) == d) ++cnt;
    CHECK(a.descendant_count(a.origin(), d) == cnt);
  }
  // mrca of two subtree leaves has height <= both
  if (s1.size() > 3) {
    int32_t m = a.mrca(s1[1], s1.back());
    CHECK(a.rel_height(m) <= a.rel_height(s1[1]));
    CHECK(a.rel_height(m) <= a.rel_height(s1.back()));
  }
}

TEST_CASE("walk: closed-form hitting probability vs linear solve") {
  auto geo = OffspringLaw::critical_geometric(0.5);
  Rng rng(21, 0);
  for (int rep = 0; rep < 10; ++rep) {
    OrderedTree t = sample_gw_conditioned_size(geo, 40 + 2 * rep, rng);
    // pick y with depth >= 2 and z a strict ancestor
    int32_t y = -1;
    for (int64_t v = 0; v < t.size(); ++v)
      if (t.depth[(size_t)v] >= 2) y = (int32_t)v;
    if (y < 0) continue;
    int32_t z = t.parent[(size_t)t.parent[(size_t)y]];
    for (double lam : {1.2, 2.0, 3.0}) {
      auto h = hitting_prob_exact(t, y, z, lam);
      for (int64_t x = 0; x < t.size(); ++x) {
        // meet depth of x and y
        std::set<int32_t> anc;
        for (int32_t u = y; u >= 0; u = t.parent[(size_t)u]) anc.insert(u);
        int32_t u = (int32_t)x;
        while (!anc.count(u)) u = t.parent[(size_t)u];
        double f = hitting_prob_formula(t.depth[(size_t)u], t.depth[(size_t)y],
                                        t.depth[(size_t)z], lam);
        CHECK(std::abs(h[(size_t)x] - f) < 1e-10);
      }
    }
  }
}

TEST_CASE("harmonic: recursion, martingale, spine increments") {
  auto nu = env_law();
  for (int rep = 0; rep < 10; ++rep) {
    PointedEnvironment env(nu, 15, 25, rep % 2 ? EnvMode::invariant : EnvMode::infinite_gw,
                           1000 + (uint64_t)rep);
    HarmonicWeights w(env, 8);
    Rng rng(55, (uint64_t)rep);
    WalkPath p = run_walk(env, env.origin(), nu.mean(), 150, rng);
    std::set<int32_t> seen(p.vertices.begin(), p.vertices.end());
    for (int32_t v : seen) {
      if (w.clipped(v) || env.is_spine_top(v)) continue;
      CHECK(std::abs(w.martingale_residual(v)) < 1e-12);
      // depth-matched counting recursion: U^{(d)}(v) = (1/m) sum_children U^{(d-1)}
      double s = 0;
      for (int32_t j = 0; j < env.kid_count(v); ++j) s += w.U_at(env.child(v, j), 7);
      CHECK(w.U_at(v, 8) == doctest::Approx(s / nu.mean()).epsilon(1e-12));
    }
    for (int32_t pp = 1; pp + 1 < 15; ++pp) {
      auto [lhs, rhs] = w.spine_increment(pp);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
  }
}

TEST_CASE("snake: endpoints, interpolation, geodesic minimum") {
  auto bin = OffspringLaw::critical_binary();
  auto nu = env_law();
  Rng rng(8, 8);
  PointedEnvironment env(nu, 40, 80, EnvMode::invariant, 12345);
  OrderedTree t = sample_gw_conditioned_size(bin, 201, rng);
  BranchingWalk brw = sample_brw(env, t, nu.mean(), rng);
  DiscreteSnake s(t, relative_height_labels(env, brw));
  auto order = contour_order(t);
  for (size_t k = 0; k < order.size(); k += 7)
    CHECK(s.endpoint_contour((double)k) == s.labels()[(size_t)order[k]]);
  for (int i = 0; i <= 20; ++i) {
    double u = (double)t.size() * i / 20.0;
    CHECK(s.endpoint_height(u) ==
          doctest::Approx(s.endpoint_contour(timechange_at(t, u))).epsilon(1e-12));
  }
  auto C = contour_samples(t);
  for (size_t k = 0; k < order.size(); k += 11) {
    // path value at the full height is the endpoint itself
    CHECK(s.path_value_contour((double)k, (double)C[k]) ==
          doctest::Approx(s.endpoint_contour((double)k)).epsilon(1e-12));
    CHECK(s.geodesic_min((int64_t)k, (int64_t)k) ==
          doctest::Approx(s.labels()[(size_t)order[k]]));
  }
  // symmetry
  CHECK(s.geodesic_min(3, 41) == doctest::Approx(s.geodesic_min(41, 3)));
}

TEST_CASE("metric: range-min, tree pseudometric, grid snake metric") {
  Rng rng(13, 0);
  std::vector<double> v;
  for (int i = 0; i < 200; ++i) v.push_back(rng.u01());
  RangeMin rm(v);
  for (int trial = 0; trial < 200; ++trial) {
    size_t i = rng.below(200), j = rng.below(200);
    if (i > j) std::swap(i, j);
    double lo = v[i];
    for (size_t k = i; k <= j; ++k) lo = std::min(lo, v[k]);
    CHECK(rm.min(i, j) == doctest::Approx(lo));
  }

  // tree pseudometric from a sampled excursion is a real-tree pseudometric
  auto h = sample_brownian_excursion(128, rng);
  std::vector<double> times(h.size());
  for (size_t i = 0; i < h.size(); ++i) times[i] = (double)i / 128.0;
  auto g = tree_pseudometric_from_height(times, h);
  CHECK(triangle_ok(g, 1e-9));
  CHECK(four_point_ok(g, 1e-9, 20000, rng));

  // grid snake metric on the exact contour grid equals the discrete one
  auto bin = OffspringLaw::critical_binary();
  auto nu = env_law();
  PointedEnvironment env(nu, 40, 80, EnvMode::invariant, 777);
  OrderedTree t = sample_gw_conditioned_size(bin, 101, rng);
  BranchingWalk brw = sample_brw(env, t, nu.mean(), rng);
  DiscreteSnake s(t, relative_height_labels(env, brw));
  auto C = contour_samples(t);
  auto order = contour_order(t);
  std::vector<double> hh, ww;
  std::vector<int64_t> steps;
  for (size_t k = 0; k < order.size(); ++k) {
    hh.push_back((double)C[k]);
    ww.push_back(s.labels()[(size_t)order[k]]);
    steps.push_back((int64_t)k);
  }
  auto gd = snake_pseudometric(s, steps);
  auto gg = snake_pseudometric_grid(hh, hh, ww);
  REQUIRE(gd.n() == gg.n());
  for (size_t i = 0; i < gd.d.size(); ++i)
    CHECK(gd.d[i] == doctest::Approx(gg.d[i]).epsilon(1e-12));
}

TEST_CASE("metric: exact GHP oracle basics") {
  FiniteSpace x;
  x.d = {0, 1, 1, 0};
  x.mass = {0.5, 0.5};
  CHECK(ghp_exact_small(x, x) == doctest::Approx(0.0).epsilon(1e-12));
  FiniteSpace y = x;
  y.d = {0, 1.2, 1.2, 0};
  double v = ghp_exact_small(x, y);
  CHECK(v > 0.0);
  CHECK(v <= 1.5 * 0.2 + 1e-12);
}

TEST_CASE("limits: excursion and snake endpoint moments") {
  Rng rng(17, 0);
  double mx = 0;
  const int R = 4000;
  for (int i = 0; i < R; ++i) {
    auto e = sample_brownian_excursion(512, rng);
    CHECK(e.front() == 0.0);
    CHECK(e.back() == 0.0);
    double m = 0;
    for (double t : e) {
      CHECK(t >= 0.0);
      m = std::max(m, t);
    }
    mx += m;
  }
  mx /= R;
  // E[max of the normalized excursion] = sqrt(pi/2), minus O(N^{-1/2}) grid deficit
  CHECK(mx == doctest::Approx(std::sqrt(3.14159265358979 / 2)).epsilon(0.035));

  // snake over the deterministic ramp lifetime h(t)=t is Brownian motion
  std::vector<double> ramp(257);
  for (size_t i = 0; i < ramp.size(); ++i) ramp[i] = (double)i / 256.0;
  double v_end = 0, cov = 0;
  for (int i = 0; i < R; ++i) {
    auto w = sample_snake_endpoint(ramp, rng);
    v_end += w.back() * w.back();
    cov += w[128] * w.back();
  }
  CHECK(v_end / R == doctest::Approx(1.0).epsilon(0.08));
  CHECK(cov / R == doctest::Approx(0.5).epsilon(0.12));
}

TEST_CASE("stats: KS, Anderson-Darling, chi-square") {
  std::vector<double> a{1, 2, 3, 4, 5}, b{1, 2, 3, 4, 5}, c{10, 11, 12};
  CHECK(ks_statistic(a, b) == doctest::Approx(0.0));
  CHECK(ks_statistic(a, c) == doctest::Approx(1.0));
  CHECK_THROWS(ks_statistic({}, a));
  CHECK(ks_two_sample_critical(100, 100, 0.01) ==
        doctest::Approx(1.628 * std::sqrt(0.02)));
  Rng rng(23, 0);
  std::vector<double> z;
  for (int i = 0; i < 5000; ++i) z.push_back(rng.normal());
  CHECK(anderson_darling(z, 0.0, 1.0) < ad_critical_1pct());
  CHECK(chi_square_stat({10, 10}, {10, 10}) == doctest::Approx(0.0));
  CHECK_THROWS(chi_square_stat({1}, {0}));
}

TEST_CASE("harness: ladder identity and config plumbing") {
  auto bin = OffspringLaw::critical_binary();
  CHECK(std::abs(ladder_gf_dp(bin, 0.5, 0.8, 40) - ladder_gf_closed(bin, 0.5, 0.8)) < 1e-6);
  CHECK(ladder_gf_dp(bin, 1e-9, 0.5, 40) == doctest::Approx(0.0).epsilon(1e-6));
  // s = 1 row: 1 - E[r^L] = (1-r)/(1-phi(r))
  for (double r : {0.3, 0.6, 0.9}) {
    double lhs = 1.0 - ladder_gf_dp(bin, r, 1.0, 60);
    double rhs = (1.0 - r) / (1.0 - bin.tree_size_pgf(r));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
  }

  ExperimentConfig cfg;
  cfg.experiment = "ladder";
  cfg.seed = 5;
  auto round = config_from_json(config_to_json(cfg));
  CHECK(round.experiment == cfg.experiment);
  CHECK(round.seed == cfg.seed);
  auto rep = exp_ladder_identity(cfg);
  CHECK(rep.exit_code() == 0);
  CHECK(!rep.summary_json().empty());
}

TEST_CASE("harness: worker count does not change bytes") {
  ExperimentConfig cfg;
  cfg.experiment = "height";
  cfg.mu.family = "binary";
  cfg.sizes = {501};
  cfg.replicas = 60;
  cfg.grid = 128;
  cfg.seed = 99;
  cfg.workers = 1;
  auto r1 = exp_height_convergence(cfg);
  cfg.workers = 4;
  auto r4 = exp_height_convergence(cfg);
  CHECK(r1.summary_json() == r4.summary_json());
  REQUIRE(r1.tables.size() == r4.tables.size());
  for (size_t i = 0; i < r1.tables.size(); ++i) {
    CHECK(r1.tables[i].first == r4.tables[i].first);
    CHECK(r1.tables[i].second == r4.tables[i].second);
  }
}
