#include "cactus/offspring.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/zeta.hpp>
#include <algorithm>
#include <cmath>
#include <limits>

namespace cactus {

double zeta_tail(double s, int k0) {
  double z = boost::math::zeta(s);
  for (int k = 1; k < k0; ++k) z -= std::pow((double)k, -s);
  return z;
}

// Euler-Maclaurin tail sum_{j>=k} j^{-s}, good to ~1e-13 rel for k >= 50
static double em_tail(double s, double k) {
  double ks = std::pow(k, -s);
  return ks * (k / (s - 1.0) + 0.5 + s / (12.0 * k));
}

void OffspringLaw::finish_finite() {
  double tot = 0;
  mean_ = 0;
  m2_ = 0;
  for (size_t k = 0; k < pmf_.size(); ++k) {
    if (pmf_[k] < 0) throw std::invalid_argument("negative pmf entry");
    tot += pmf_[k];
    mean_ += (double)k * pmf_[k];
    m2_ += (double)k * (double)k * pmf_[k];
  }
  if (std::abs(tot - 1.0) > 1e-12) throw std::invalid_argument("pmf does not sum to 1");
  max_support_ = (int64_t)pmf_.size() - 1;
  critical_ = std::abs(mean_ - 1.0) < 1e-12;
  alpha_ = 2;
  cdf_.resize(pmf_.size());
  cdf_sb_.resize(pmf_.size());
  cdf_db_.resize(pmf_.size());
  double c = 0, csb = 0, cdb = 0;
  for (size_t k = 0; k < pmf_.size(); ++k) {
    c += pmf_[k];
    csb += (double)k * pmf_[k] / mean_;
    cdb += (mean_ + (double)k) * pmf_[k] / (2.0 * mean_);
    cdf_[k] = c;
    cdf_sb_[k] = csb;
    cdf_db_[k] = cdb;
  }
  tab_max_ = max_support_;
}

OffspringLaw OffspringLaw::critical_binary() {
  OffspringLaw law;
  law.family_ = LawFamily::finite_support;
  law.name_ = "binary";
  law.pmf_ = {0.5, 0.0, 0.5};
  law.finish_finite();
  return law;
}

OffspringLaw OffspringLaw::critical_geometric(double p) {
  if (std::abs(p - 0.5) > 1e-12)
    throw std::invalid_argument("geometric(p) is critical only at p = 1/2");
  OffspringLaw law;
  law.family_ = LawFamily::geometric;
  law.name_ = "geometric(1/2)";
  // materialize to double underflow; mass beyond is ~1e-16 and unreachable in doubles
  std::vector<double> pmf;
  double q = 0.5;
  for (int k = 0; k < 64; ++k) {
    pmf.push_back(q);
    q *= 0.5;
  }
  // tweak last entry so the table sums to 1 exactly in binary
  double s = 0;
  for (size_t i = 0; i + 1 < pmf.size(); ++i) s += pmf[i];
  pmf.back() = 1.0 - s;
  law.pmf_ = std::move(pmf);
  law.finish_finite();
  law.family_ = LawFamily::geometric;
  law.mean_ = 1.0;  // exact analytic values, not the truncated sums
  law.m2_ = 3.0;    // sum k^2 2^{-k-1} = 3
  law.critical_ = true;
  return law;
}

OffspringLaw OffspringLaw::critical_stable_tail(double alpha, int k0) {
  if (!(alpha > 1.0 && alpha < 2.0))
    throw std::invalid_argument("stable-tail supports alpha in (1,2) only");
  if (k0 < 2) throw std::invalid_argument("stable-tail needs k0 >= 2");
  OffspringLaw law;
  law.family_ = LawFamily::stable_tail;
  law.alpha_ = alpha;
  law.k0_ = k0;
  law.name_ = "stable-tail(" + std::to_string(alpha) + "," + std::to_string(k0) + ")";
  // pmf(k) = C k^{-1-alpha} for k >= k0; atoms at 0 and 1 fixed so that the
  // law is a probability with mean exactly 1:
  //   T1 = C sum_{k>=k0} k^{-alpha}   (tail mean mass)
  //   T0 = C sum_{k>=k0} k^{-1-alpha} (tail mass)
  //   pmf(1) = 1 - T1, pmf(0) = T1 - T0.
  // C is pinned by T1 = 3/4 (keeps both atoms strictly positive).
  double s1 = zeta_tail(alpha, k0);        // sum k^{-alpha}
  double s0 = zeta_tail(alpha + 1.0, k0);  // sum k^{-1-alpha}
  law.tail_c_ = 0.75 / s1;
  double t1 = 0.75;
  double t0 = law.tail_c_ * s0;
  law.pmf_.assign((size_t)k0, 0.0);
  law.pmf_[0] = t1 - t0;
  law.pmf_[1] = 1.0 - t1;
  law.mean_ = 1.0;
  law.m2_ = std::numeric_limits<double>::infinity();
  law.critical_ = true;
  law.max_support_ = -1;
  // sampling tables up to tab_max_; the remaining tail is inverted analytically
  law.tab_max_ = 1 << 16;
  law.cdf_.resize((size_t)law.tab_max_ + 1);
  law.cdf_sb_.resize((size_t)law.tab_max_ + 1);
  double c = 0, csb = 0;
  for (int64_t k = 0; k <= law.tab_max_; ++k) {
    double p = law.pmf(k);
    c += p;
    csb += (double)k * p;  // mean is 1
    law.cdf_[(size_t)k] = c;
    law.cdf_sb_[(size_t)k] = csb;
  }
  return law;
}

OffspringLaw OffspringLaw::finite(std::vector<double> pmf) {
  OffspringLaw law;
  law.family_ = LawFamily::finite_support;
  law.name_ = "finite";
  law.pmf_ = std::move(pmf);
  law.finish_finite();
  return law;
}

OffspringLaw OffspringLaw::supercritical(std::vector<double> pmf) {
  OffspringLaw law = finite(std::move(pmf));
  if (law.mean_ <= 1.0) throw std::invalid_argument("law is not supercritical");
  return law;
}

double OffspringLaw::pmf(int64_t k) const {
  if (k < 0) return 0;
  if (family_ == LawFamily::stable_tail) {
    if (k < k0_) return pmf_[(size_t)k];
    return tail_c_ * std::pow((double)k, -1.0 - alpha_);
  }
  if (k >= (int64_t)pmf_.size()) return 0;
  return pmf_[(size_t)k];
}

double OffspringLaw::pgf(double s) const {
  if (s < 0 || s > 1) throw std::domain_error("pgf needs s in [0,1]");
  if (family_ != LawFamily::stable_tail) {
    // Horner over the finite table
    double g = 0;
    for (size_t k = pmf_.size(); k-- > 0;) g = g * s + pmf_[k];
    return g;
  }
  // head atoms + truncated power-law series with certified tail bound < 1e-12
  double g = pmf_[0] + pmf_[1] * s;
  double sk = std::pow(s, (double)k0_);
  for (int64_t k = k0_;; ++k) {
    double term = tail_c_ * std::pow((double)k, -1.0 - alpha_) * sk;
    g += term;
    // remaining mass <= tail(k+1) * s^{k+1}
    double rem = tail_c_ * em_tail(alpha_ + 1.0, (double)k + 1.0) * sk * s;
    if (rem < 1e-12 || k > 50'000'000) break;
    sk *= s;
  }
  return g;
}

double OffspringLaw::psi(double s) const { return pgf(1.0 - s) - (1.0 - s); }

double OffspringLaw::tree_size_pgf(double r) const {
  if (r < 0 || r >= 1) throw std::domain_error("tree_size_pgf needs r in [0,1)");
  if (!critical_) throw std::domain_error("tree_size_pgf needs a critical law");
  double x = 0;
  for (int it = 0; it < 1'000'000; ++it) {
    double nx = r * pgf(x);
    if (std::abs(nx - x) < 1e-14) return nx;
    x = nx;
  }
  throw std::runtime_error("tree_size_pgf: fixed point iteration did not converge");
}

ScalingPair OffspringLaw::scaling(int64_t n) const {
  if (!critical_) throw std::domain_error("scaling sequences need a critical law");
  double b;
  if (family_ == LawFamily::stable_tail) {
    // b_n = (C |Gamma(-alpha)|)^{1/alpha} n^{1/alpha}; validated empirically
    // in the tests rather than trusted (see README).
    double gma = boost::math::tgamma(2.0 - alpha_) / (alpha_ * (alpha_ - 1.0));
    b = std::pow(tail_c_ * gma, 1.0 / alpha_) * std::pow((double)n, 1.0 / alpha_);
  } else {
    b = std::sqrt(variance() * (double)n / 2.0);
  }
  return ScalingPair{n, (double)n / b, b};
}

double OffspringLaw::sigma_sq_ratio() const {
  if (mean_ <= 1.0) throw std::domain_error("sigma_sq_ratio needs mean > 1");
  return (m2_ - mean_) / (mean_ * mean_ - mean_);
}

static int64_t table_draw(const std::vector<double>& cdf, double u) {
  auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
  if (it == cdf.end()) return (int64_t)cdf.size();  // signals "past table"
  return (int64_t)(it - cdf.begin());
}

int64_t OffspringLaw::sample(Rng& rng) const {
  double u = rng.u01();
  int64_t k = table_draw(cdf_, u);
  if (family_ != LawFamily::stable_tail) return std::min(k, max_support_);
  if (k <= tab_max_) return k;
  // analytic tail inversion: find k with P(X >= k) >= 1-u > P(X >= k+1)
  double target = 1.0 - u;
  int64_t lo = tab_max_ + 1, hi = lo;
  while (tail_c_ * em_tail(alpha_ + 1.0, (double)(hi + 1)) >= target && hi < (1LL << 42))
    hi *= 2;
  while (lo < hi) {
    int64_t mid = lo + (hi - lo + 1) / 2;
    if (tail_c_ * em_tail(alpha_ + 1.0, (double)mid) >= target) lo = mid;
    else hi = mid - 1;
  }
  return lo;
}

int64_t OffspringLaw::sample_size_biased(Rng& rng) const {
  double u = rng.u01() * (family_ == LawFamily::stable_tail ? 1.0 : cdf_sb_.back());
  int64_t k = table_draw(cdf_sb_, u);
  if (family_ != LawFamily::stable_tail) return std::min(k, max_support_);
  if (k <= tab_max_) return k;
  // k pmf(k) tail ~ C k^{-alpha}
  double target = 1.0 - u;
  int64_t lo = tab_max_ + 1, hi = lo;
  while (tail_c_ * em_tail(alpha_, (double)(hi + 1)) >= target && hi < (1LL << 42)) hi *= 2;
  while (lo < hi) {
    int64_t mid = lo + (hi - lo + 1) / 2;
    if (tail_c_ * em_tail(alpha_, (double)mid) >= target) lo = mid;
    else hi = mid - 1;
  }
  return lo;
}

int64_t OffspringLaw::sample_degree_biased(Rng& rng) const {
  if (cdf_db_.empty()) throw std::domain_error("degree-biased draw needs finite support");
  double u = rng.u01() * cdf_db_.back();
  return std::min(table_draw(cdf_db_, u), max_support_);
}

}  // namespace cactus
