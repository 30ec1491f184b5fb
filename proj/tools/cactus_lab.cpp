// cactus-lab CLI: samplers for trees, environments, walks, branching walks,
// snakes, pseudometric grids and continuum limits, plus the experiment
// harness. Exit codes: 0 pass, 1 usage/runtime error, 2 statistical fail,
// 3 contamination fail.
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cactus/coding.hpp"
#include "cactus/harmonic.hpp"
#include "cactus/harness.hpp"
#include "cactus/limits.hpp"
#include "cactus/metric.hpp"
#include "cactus/snake.hpp"
#include "cactus/tree.hpp"
#include "cactus/walk.hpp"

using namespace cactus;

namespace {

// law strings: "binary", "geometric:0.5", "stable:1.5:2", "finite:0.5,0,0.5"
LawSpec parse_law(const std::string& text) {
  LawSpec s;
  std::stringstream ss(text);
  std::getline(ss, s.family, ':');
  std::string rest;
  std::getline(ss, rest);
  if (s.family == "geometric" && !rest.empty()) s.p = std::stod(rest);
  if (s.family == "stable" && !rest.empty()) {
    std::stringstream rs(rest);
    std::string a, k;
    std::getline(rs, a, ':');
    std::getline(rs, k);
    s.alpha = std::stod(a);
    if (!k.empty()) s.k0 = std::stoi(k);
  }
  if (s.family == "finite") {
    std::stringstream rs(rest);
    std::string tok;
    while (std::getline(rs, tok, ',')) s.pmf.push_back(std::stod(tok));
  }
  return s;
}

struct Sink {
  std::ofstream file;
  std::ostream& out() { return file.is_open() ? file : std::cout; }
  void open(const std::string& path) {
    if (!path.empty()) file.open(path, std::ios::binary);
  }
};

void emit_series(Sink& sink, const std::string& fmt, const std::string& name,
                 const std::vector<double>& v) {
  auto& o = sink.out();
  if (fmt == "json") {
    o << "{\"" << name << "\":[";
    for (size_t i = 0; i < v.size(); ++i) o << (i ? "," : "") << v[i];
    o << "]}\n";
  } else {
    o << "index," << name << "\n";
    char buf[40];
    for (size_t i = 0; i < v.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", v[i]);
      o << i << "," << buf << "\n";
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cactus-lab: critical trees, biased walks, snakes, cacti"};
  app.require_subcommand(1);

  std::string mu_s = "binary", nu_s = "finite:0,0.5,0.5", out_path, fmt = "csv";
  std::string experiment_name, config_path;
  int64_t n = 1000, replicas = 1, grid = 512;
  uint64_t seed = 1;
  double lambda = 0.0, alpha = 0.0;
  int32_t spine_depth = 60, height_cap = 120;
  int workers = 1;

  auto add_common = [&](CLI::App* c) {
    c->add_option("--mu", mu_s, "genealogy offspring law");
    c->add_option("--nu", nu_s, "environment offspring law");
    c->add_option("--alpha", alpha, "stable tail index override for --mu");
    c->add_option("--n", n, "size / steps");
    c->add_option("--replicas", replicas, "replica count");
    c->add_option("--grid", grid, "grid resolution");
    c->add_option("--seed", seed, "master seed");
    c->add_option("--workers", workers, "worker threads");
    c->add_option("--out", out_path, "output file or directory");
    c->add_option("--lambda", lambda, "walk bias (0 = critical)");
    c->add_option("--spine-depth", spine_depth, "environment spine depth q");
    c->add_option("--height-cap", height_cap, "environment growth cap");
    c->add_option("--format", fmt, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
  };

  auto* c_tree = app.add_subcommand("sample-tree", "conditioned Galton-Watson trees");
  auto* c_env = app.add_subcommand("sample-env", "pointed environment summary");
  auto* c_walk = app.add_subcommand("walk", "biased walk heights");
  auto* c_brw = app.add_subcommand("brw", "branching walk positions");
  auto* c_snake = app.add_subcommand("snake", "snake endpoint process");
  auto* c_metric = app.add_subcommand("metric", "snake pseudometric grid");
  auto* c_limit = app.add_subcommand("limit", "continuum limit samples");
  auto* c_exp = app.add_subcommand("experiment", "named experiment run");
  for (auto* c : {c_tree, c_env, c_walk, c_brw, c_snake, c_metric, c_limit, c_exp})
    add_common(c);
  c_exp->add_option("name", experiment_name, "height|snake|ghp|ladder|clt");
  c_exp->add_option("--config", config_path, "JSON config file");

  CLI11_PARSE(app, argc, argv);

  try {
    auto law_of = [&](const std::string& text) {
      LawSpec s = parse_law(text);
      if (alpha > 0 && s.family == "stable") s.alpha = alpha;
      return s;
    };
    Sink sink;
    sink.open(out_path);

    if (c_tree->parsed()) {
      OffspringLaw mu = make_law(law_of(mu_s));
      for (int64_t i = 0; i < replicas; ++i) {
        Rng rng(seed, (uint64_t)i);
        sink.out() << sample_gw_conditioned_size(mu, n, rng).serialize() << "\n";
      }
      return 0;
    }
    if (c_env->parsed()) {
      OffspringLaw nu = make_law(law_of(nu_s));
      PointedEnvironment env(nu, spine_depth, height_cap, EnvMode::invariant, seed);
      auto below = env.subtree(env.origin(), (int32_t)std::min<int64_t>(n, 8));
      std::vector<int32_t> kids;
      for (int32_t v : below) kids.push_back(env.kid_count(v));
      auto& o = sink.out();
      o << "spine_depth," << env.spine_depth() << "\n";
      o << "origin_kids," << env.kid_count(env.origin()) << "\n";
      o << "materialized," << env.materialized() << "\n";
      return 0;
    }
    if (c_walk->parsed()) {
      OffspringLaw nu = make_law(law_of(nu_s));
      PointedEnvironment env(nu, spine_depth, height_cap, EnvMode::invariant, seed);
      double lam = lambda > 0 ? lambda : nu.mean();
      Rng rng(seed, 0xE1u);
      WalkPath p = run_walk(env, env.origin(), lam, n, rng);
      std::vector<double> hs;
      for (int32_t v : p.vertices) hs.push_back((double)env.rel_height(v));
      emit_series(sink, fmt, "height", hs);
      return (p.touched_top || p.touched_cap) ? 3 : 0;
    }
    if (c_brw->parsed() || c_snake->parsed() || c_metric->parsed()) {
      OffspringLaw mu = make_law(law_of(mu_s));
      OffspringLaw nu = make_law(law_of(nu_s));
      PointedEnvironment env(nu, spine_depth, height_cap, EnvMode::invariant, seed);
      double lam = lambda > 0 ? lambda : nu.mean();
      Rng rng(seed, 0xE2u);
      OrderedTree t = sample_gw_conditioned_size(mu, n, rng);
      BranchingWalk brw = sample_brw(env, t, lam, rng);
      if (c_brw->parsed()) {
        emit_series(sink, fmt, "position_height", relative_height_labels(env, brw));
      } else if (c_snake->parsed()) {
        DiscreteSnake s(t, relative_height_labels(env, brw));
        std::vector<double> w;
        for (int64_t g = 0; g <= grid; ++g)
          w.push_back(s.endpoint_height((double)n * (double)g / (double)grid));
        emit_series(sink, fmt, "endpoint", w);
      } else {
        std::vector<int64_t> steps;
        int64_t span = 2 * (n - 1);
        int64_t g = std::min<int64_t>(grid, span);
        for (int64_t i = 0; i <= g; ++i) steps.push_back(span * i / g);
        DiscreteSnake s(t, relative_height_labels(env, brw));
        PseudometricGrid pm = snake_pseudometric(s, steps);
        auto& o = sink.out();
        char buf[40];
        for (size_t i = 0; i < pm.n(); ++i)
          for (size_t j = 0; j < pm.n(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", pm.at(i, j));
            o << buf << (j + 1 < pm.n() ? "," : "\n");
          }
      }
      return brw.contaminated ? 3 : 0;
    }
    if (c_limit->parsed()) {
      Rng rng(seed, 0xE3u);
      auto h = sample_limit_height((size_t)grid, rng);
      auto w = sample_snake_endpoint(h, rng);
      auto& o = sink.out();
      char b1[40], b2[40];
      o << "t,height,snake\n";
      for (size_t i = 0; i < h.size(); ++i) {
        std::snprintf(b1, sizeof b1, "%.17g", h[i]);
        std::snprintf(b2, sizeof b2, "%.17g", w[i]);
        o << ((double)i / (double)grid) << "," << b1 << "," << b2 << "\n";
      }
      return 0;
    }
    if (c_exp->parsed()) {
      ExperimentConfig cfg;
      if (!config_path.empty()) {
        std::ifstream f(config_path);
        if (!f) throw std::runtime_error("cannot read config: " + config_path);
        std::stringstream ss;
        ss << f.rdbuf();
        cfg = config_from_json(ss.str());
      }
      if (!experiment_name.empty()) cfg.experiment = experiment_name;
      // flags override the config file when explicitly given
      if (c_exp->count("--mu")) cfg.mu = law_of(mu_s);
      if (c_exp->count("--nu")) cfg.nu = law_of(nu_s);
      if (c_exp->count("--n")) cfg.sizes = {n};
      if (c_exp->count("--replicas")) cfg.replicas = replicas;
      if (c_exp->count("--grid")) cfg.grid = grid;
      if (c_exp->count("--seed")) cfg.seed = seed;
      if (c_exp->count("--lambda")) cfg.lambda = lambda;
      if (c_exp->count("--spine-depth")) cfg.spine_depth = spine_depth;
      if (c_exp->count("--height-cap")) cfg.height_cap = height_cap;
      if (c_exp->count("--workers")) cfg.workers = workers;
      if (c_exp->count("--out")) cfg.out_dir = out_path;
      if (c_exp->count("--format")) cfg.format = fmt;
      auto t0 = std::chrono::steady_clock::now();
      ExperimentReport rep = run_experiment(cfg);
      auto t1 = std::chrono::steady_clock::now();
      // wall-clock stays out of the report so reruns are byte-identical
      std::cerr << "elapsed_ms="
                << std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count()
                << "\n";
      if (!cfg.out_dir.empty()) rep.write(cfg.out_dir);
      std::cout << rep.summary_json();
      return rep.exit_code();
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
