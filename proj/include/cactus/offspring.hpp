#pragma once
// Offspring distributions on {0,1,2,...} with generating-function services
// and the normalizing sequences (a_n, b_n) used by the scaling experiments.
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "cactus/rng.hpp"

namespace cactus {

enum class LawFamily { finite_support, geometric, stable_tail };

struct ScalingPair {
  int64_t n;
  double a;  // a_n = n / b_n
  double b;
};

class OffspringLaw {
 public:
  // critical families
  static OffspringLaw critical_binary();                       // pmf(0)=pmf(2)=1/2
  static OffspringLaw critical_geometric(double p);            // (1-p)p^k, needs p=1/2
  static OffspringLaw critical_stable_tail(double alpha, int k0);
  // supercritical (or any finite-support) law from an explicit pmf
  static OffspringLaw finite(std::vector<double> pmf);
  static OffspringLaw supercritical(std::vector<double> pmf);  // validates mean > 1

  LawFamily family() const { return family_; }
  const std::string& name() const { return name_; }
  double pmf(int64_t k) const;
  int64_t max_support() const { return max_support_; }  // -1 if unbounded
  double mean() const { return mean_; }
  double second_moment() const { return m2_; }  // sum k^2 pmf(k); +inf for heavy tails
  double variance() const { return m2_ - mean_ * mean_; }
  double alpha() const { return alpha_; }       // tail index; 2 for finite variance
  bool critical() const { return critical_; }

  double pgf(double s) const;                    // g(s) = sum s^k pmf(k)
  double psi(double s) const;                    // g(1-s) - (1-s)
  double tree_size_pgf(double r) const;          // unique fixpoint of x = r g(x) in [0,1)
  ScalingPair scaling(int64_t n) const;          // a_n, b_n for the built-in families
  double sigma_sq_ratio() const;                 // (m2 - m)/(m^2 - m), supercritical only

  int64_t sample(Rng& rng) const;                // plain draw
  int64_t sample_size_biased(Rng& rng) const;    // k w.p. k pmf(k)/mean
  int64_t sample_degree_biased(Rng& rng) const;  // k w.p. (mean+k) pmf(k)/(2 mean)

 private:
  OffspringLaw() = default;
  void finish_finite();

  LawFamily family_ = LawFamily::finite_support;
  std::string name_;
  std::vector<double> pmf_;        // explicit head; for stable_tail: below k0 only
  std::vector<double> cdf_;        // sampling table
  std::vector<double> cdf_sb_;     // size-biased sampling table
  std::vector<double> cdf_db_;     // degree-biased sampling table
  int64_t max_support_ = -1;
  double mean_ = 0, m2_ = 0, alpha_ = 2, critical_ = false;
  // stable tail parameters: pmf(k) = tail_c * k^{-1-alpha} for k >= k0
  double tail_c_ = 0;
  int k0_ = 0;
  int64_t tab_max_ = 0;  // sampling table covers k <= tab_max_
};

// sum_{k>=k0} k^{-s} via Riemann zeta minus head
double zeta_tail(double s, int k0);

}  // namespace cactus
