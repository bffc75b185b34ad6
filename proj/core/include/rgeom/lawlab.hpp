#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "rgeom/spectrum.hpp"

namespace rgeom::lawlab {

// Law of Omega_2^2 = sum_j beta_j^2 V_j, V_j ~ chi^2_{n-1} i.i.d., evaluated over
// the same truncated mode list the field sampler uses.

struct LawConstants {
  int n = 0;
  std::vector<double> betas;  // non-increasing
  double A_sq = 0.0;          // (n-1) sum beta^2
  double B4 = 0.0;            // (n-1) sum beta^4
  double a_inf = 0.0;         // beta_1^2

  [[nodiscard]] double beta1() const { return betas.front(); }
};

/// Throws EmptySchedule if betas is empty (or all zero), DimensionTooSmall if n < 2.
[[nodiscard]] LawConstants law_constants(std::span<const double> betas, int n);
[[nodiscard]] LawConstants law_constants(const spectrum::DecaySchedule& schedule,
                                         const spectrum::SpectralBasis& basis);

/// E exp(t Omega_2^2) = prod_j (1 - 2 t beta_j^2)^{-(n-1)/2}; DomainError for t >= 1/(2 beta_1^2).
[[nodiscard]] double mgf(const LawConstants& c, double t);

/// prod_j (1 - 2 i t beta_j^2)^{-(n-1)/2}, principal branch per factor.
[[nodiscard]] std::complex<double> charfn(const LawConstants& c, double t);

/// Positive root of 2 a_inf x^2 + 2 B^2 x + A^2 = R^2 with B^2 = sqrt(B4).
/// DomainError for R < A.
[[nodiscard]] double x_of_R(const LawConstants& c, double R);

/// exp(-x(R)^2) >= Prob{Omega_2 >= R} for R >= A.
[[nodiscard]] double tail_upper_lm(const LawConstants& c, double R);

/// 2 Phi_bar(R / beta_1) = Prob{beta_1^2 Z^2 >= R^2} <= Prob{Omega_2 >= R}.
[[nodiscard]] double tail_lower_exact(const LawConstants& c, double R);

/// One draw of sum_j beta_j^2 (Z_{j,1}^2 + ... + Z_{j,n-1}^2), deterministic in seed.
[[nodiscard]] double oracle_sample_law(const LawConstants& c, std::uint64_t seed);

/// CDF of Omega_2^2 at x by Gil-Pelaez inversion of charfn.
[[nodiscard]] double cdf(const LawConstants& c, double x);

/// min(1, 2n exp(alpha R / 2 - R^2 / (8 sigma^2))).
[[nodiscard]] double rho_tail_upper(double sigma_sq, double alpha, int n, double R);

/// Smallest alpha >= 0 for which rho_tail_upper passes through probability p at R.
[[nodiscard]] double fit_alpha(double sigma_sq, int n, double R, double p);

}  // namespace rgeom::lawlab
