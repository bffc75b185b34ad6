#include "rgeom/lawlab.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>

#include "rgeom/errors.hpp"
#include "rgeom/rng.hpp"
#include "rgeom/stats.hpp"

namespace rgeom::lawlab {

LawConstants law_constants(std::span<const double> betas, int n) {
  if (n < 2) throw Error(ErrorCode::DimensionTooSmall, "law needs n >= 2");
  if (betas.empty()) throw Error(ErrorCode::EmptySchedule, "no decay coefficients");
  LawConstants c;
  c.n = n;
  c.betas.assign(betas.begin(), betas.end());
  for (double& b : c.betas) b = std::abs(b);
  std::sort(c.betas.begin(), c.betas.end(), std::greater<>());
  if (c.betas.front() == 0.0) throw Error(ErrorCode::EmptySchedule, "all decay coefficients vanish");
  double s2 = 0.0;
  double s4 = 0.0;
  for (double b : c.betas) {
    s2 += b * b;
    s4 += b * b * b * b;
  }
  c.A_sq = (n - 1) * s2;
  c.B4 = (n - 1) * s4;
  c.a_inf = c.betas.front() * c.betas.front();
  return c;
}

LawConstants law_constants(const spectrum::DecaySchedule& schedule, const spectrum::SpectralBasis& basis) {
  const auto betas = spectrum::decay_eval(schedule, basis);
  return law_constants(betas, basis.dim());
}

double mgf(const LawConstants& c, double t) {
  if (t >= 1.0 / (2.0 * c.a_inf)) {
    throw Error(ErrorCode::DomainError, "mgf diverges for t >= 1 / (2 beta_1^2)");
  }
  const double p = -0.5 * (c.n - 1);
  double log_m = 0.0;
  for (double b : c.betas) log_m += p * std::log1p(-2.0 * t * b * b);
  return std::exp(log_m);
}

std::complex<double> charfn(const LawConstants& c, double t) {
  const double p = -0.5 * (c.n - 1);
  std::complex<double> phi{1.0, 0.0};
  for (double b : c.betas) phi *= std::pow(std::complex<double>(1.0, -2.0 * t * b * b), p);
  return phi;
}

double x_of_R(const LawConstants& c, double R) {
  const double r2 = R * R;
  if (r2 < c.A_sq) throw Error(ErrorCode::DomainError, "x(R) needs R >= A = sqrt(A^2)");
  const double b2 = std::sqrt(c.B4);
  // Rationalized form of (-B^2 + sqrt(B^4 + 2 a (R^2 - A^2))) / (2 a); no cancellation near R = A.
  const double gap = 2.0 * c.a_inf * (r2 - c.A_sq);
  return gap / (2.0 * c.a_inf * (b2 + std::sqrt(c.B4 + gap)));
}

double tail_upper_lm(const LawConstants& c, double R) {
  const double x = x_of_R(c, R);
  return std::exp(-x * x);
}

double tail_lower_exact(const LawConstants& c, double R) {
  if (R < 0.0) throw Error(ErrorCode::DomainError, "tail bound needs R >= 0");
  return 2.0 * stats::gaussian_upper_tail(R / c.beta1());
}

double oracle_sample_law(const LawConstants& c, std::uint64_t seed) {
  double total = 0.0;
  for (std::size_t j = 0; j < c.betas.size(); ++j) {
    double v = 0.0;
    for (int i = 0; i < c.n - 1; ++i) {
      const double z = rng::normal(seed, rng::Stream::Oracle, j, static_cast<std::uint64_t>(i));
      v += z * z;
    }
    total += c.betas[j] * c.betas[j] * v;
  }
  return total;
}

double cdf(const LawConstants& c, double x) {
  if (x <= 0.0) return 0.0;
  // Midpoint-rule Gil-Pelaez sum
  //   F(x) ~ 1/2 - sum_k Im(exp(-i t_k x) phi(t_k)) / (pi (k + 1/2)),  t_k = (k + 1/2) h.
  // Its aliasing error is bounded by Prob{X >= 2 pi / h - x} (X >= 0). A Chernoff bound
  // at t = 1/(4 a_inf) picks 2 pi / h so that this is below 1e-6; the series is cut once
  // |phi(t_k)| / (pi (k + 1/2)) < 1e-13, with |phi| decaying like a high power of t.
  const double t0 = 1.0 / (4.0 * c.a_inf);
  const double log_m = std::log(mgf(c, t0));
  const double tail_point = (log_m + std::log(1e6)) / t0;
  const double h = 2.0 * std::numbers::pi / (x + tail_point);
  double sum = 0.0;
  for (long k = 0; k < 10'000'000; ++k) {
    const double kk = static_cast<double>(k) + 0.5;
    const double t = kk * h;
    const std::complex<double> phi = charfn(c, t);
    const std::complex<double> term = std::polar(1.0, -t * x) * phi;
    sum += term.imag() / (std::numbers::pi * kk);
    if (std::abs(phi) / (std::numbers::pi * kk) < 1e-13) break;
  }
  return std::clamp(0.5 - sum, 0.0, 1.0);
}

double rho_tail_upper(double sigma_sq, double alpha, int n, double R) {
  if (!(sigma_sq > 0.0)) throw Error(ErrorCode::BadParameter, "sigma^2 must be positive");
  if (alpha < 0.0) throw Error(ErrorCode::BadParameter, "alpha must be non-negative");
  if (!(R > 0.0)) throw Error(ErrorCode::BadParameter, "R must be positive");
  const double log_bound = std::log(2.0 * n) + 0.5 * alpha * R - R * R / (8.0 * sigma_sq);
  return std::min(1.0, std::exp(log_bound));
}

double fit_alpha(double sigma_sq, int n, double R, double p) {
  if (!(sigma_sq > 0.0) || !(R > 0.0) || !(p > 0.0 && p <= 1.0)) {
    throw Error(ErrorCode::BadParameter, "fit_alpha needs sigma^2 > 0, R > 0, p in (0, 1]");
  }
  const double alpha = 2.0 * (std::log(p / (2.0 * n)) + R * R / (8.0 * sigma_sq)) / R;
  return std::max(0.0, alpha);
}

}  // namespace rgeom::lawlab
