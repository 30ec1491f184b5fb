#pragma once
// Experiment harness: JSON-configurable, replica-parallel, deterministic.
// Reports are byte-identical for a fixed config+seed at any worker count:
// every replica owns an RNG stream keyed by its index and results are
// reduced in replica order. Wall-clock goes to stderr, never into reports.
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "cactus/offspring.hpp"

namespace cactus {

struct LawSpec {
  std::string family = "binary";  // binary | geometric | stable | finite
  double p = 0.5;                 // geometric parameter
  double alpha = 1.5;             // stable tail index
  int k0 = 2;                     // stable tail start
  std::vector<double> pmf;        // finite family
};
OffspringLaw make_law(const LawSpec& spec);

struct ExperimentConfig {
  std::string experiment;
  LawSpec mu;                       // genealogy offspring law
  LawSpec nu;                       // environment offspring law
  std::vector<int64_t> sizes{10000};
  int64_t replicas = 1000;
  int64_t grid = 512;               // limit-sampler grid resolution
  uint64_t seed = 1;
  double lambda = 0.0;              // 0 = critical bias m_nu
  int32_t spine_depth = 0;          // 0 = per-experiment default
  int32_t height_cap = 0;           // 0 = per-experiment default
  int n_envs = 5;
  int workers = 1;
  std::string out_dir;
  std::string format = "csv";
};
ExperimentConfig config_from_json(const std::string& text);
std::string config_to_json(const ExperimentConfig& cfg);

struct Verdict {
  std::string name;
  double statistic = 0.0;
  double threshold = 0.0;
  int64_t sample_size = 0;
  std::string result;  // pass | fail | underpowered
};

struct ExperimentReport {
  std::string experiment;
  std::vector<Verdict> verdicts;
  std::vector<std::pair<std::string, std::string>> tables;  // name -> CSV text
  int64_t contaminated = 0;
  int64_t total_replicas = 0;

  bool statistical_pass() const;
  bool contamination_pass() const;  // contaminated replicas <= 1%
  int exit_code() const;            // 0 pass, 2 statistical fail, 3 contamination
  std::string summary_json() const;
  void write(const std::string& dir) const;  // tables as CSV + verdicts.json
};

ExperimentReport exp_height_convergence(const ExperimentConfig& cfg);
ExperimentReport exp_snake_convergence(const ExperimentConfig& cfg);
ExperimentReport exp_ghp_convergence(const ExperimentConfig& cfg);
ExperimentReport exp_ladder_identity(const ExperimentConfig& cfg);
ExperimentReport exp_clt_harmonic(const ExperimentConfig& cfg);
ExperimentReport run_experiment(const ExperimentConfig& cfg);  // dispatch by name

// E[r^L s^V] of the first weak ascending ladder (time L, value V) of the
// Lukasiewicz walk: exact time-resummed linear solve truncated at walk
// depth level_cap (error decays geometrically in level_cap), and the
// closed form 1 - (s - r g(s))/(s - phi(r))
double ladder_gf_dp(const OffspringLaw& mu, double r, double s, int level_cap);
double ladder_gf_closed(const OffspringLaw& mu, double r, double s);

// deterministic replica-parallel map: calls f(i) once for each i in [0, n);
// f must write only to its own slot i
void parallel_for_replicas(int64_t n, int workers, const std::function<void(int64_t)>& f);

}  // namespace cactus
