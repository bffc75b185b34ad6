#include <gtest/gtest.h>

#include <cmath>
#include <complex>

#include "rgeom/errors.hpp"
#include "rgeom/lawlab.hpp"
#include "rgeom/rng.hpp"
#include "rgeom/stats.hpp"

using namespace rgeom;
using namespace rgeom::lawlab;

namespace {

const std::vector<double> kOne = {1.0};

LawConstants default_law() {
  return law_constants(spectrum::DecaySchedule::power_law(2.0), spectrum::torus_basis_through(3, 16));
}

}  // namespace

TEST(LawConstants, Examples) {
  const auto one = law_constants(std::vector<double>{0.7}, 3);
  EXPECT_DOUBLE_EQ(one.A_sq, 2 * 0.49);
  EXPECT_DOUBLE_EQ(one.B4, 2 * 0.49 * 0.49);
  EXPECT_DOUBLE_EQ(one.a_inf, 0.49);

  const auto two = law_constants(std::vector<double>{0.5, 1.0}, 3);
  EXPECT_DOUBLE_EQ(two.A_sq, 2.5);
  EXPECT_DOUBLE_EQ(two.B4, 2.125);
  EXPECT_DOUBLE_EQ(two.a_inf, 1.0);
  EXPECT_EQ(two.betas, (std::vector<double>{1.0, 0.5}));

  const auto law = default_law();
  EXPECT_GE(law.A_sq, (law.n - 1) * law.a_inf);
  EXPECT_LE(law.B4, law.A_sq * law.a_inf);
}

TEST(LawConstants, Errors) {
  try {
    (void)law_constants(std::vector<double>{}, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptySchedule);
  }
  EXPECT_THROW((void)law_constants(std::vector<double>{0.0, 0.0}, 3), Error);
}

TEST(Mgf, Examples) {
  const auto c = law_constants(kOne, 3);
  EXPECT_DOUBLE_EQ(mgf(c, 0.0), 1.0);
  EXPECT_NEAR(mgf(c, 0.25), 2.0, 1e-15);
  try {
    (void)mgf(c, 0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DomainError);
  }
}

TEST(Mgf, MonteCarloOracle) {
  const auto c = default_law();
  const double t = 0.1 / c.a_inf;
  std::vector<double> v(100000);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::exp(t * oracle_sample_law(c, rng::sample_seed(8, i)));
  const auto est = stats::mean_estimate(v);
  EXPECT_NEAR(est.mean, mgf(c, t), 3.0 * est.std_error);
}

TEST(Charfn, Examples) {
  const auto c = law_constants(kOne, 3);
  EXPECT_EQ(charfn(c, 0.0), std::complex<double>(1.0, 0.0));
  const auto v = charfn(c, 0.5);
  EXPECT_NEAR(v.real(), 0.5, 1e-15);
  EXPECT_NEAR(v.imag(), 0.5, 1e-15);
  const auto law = default_law();
  for (double t : {0.1, 0.7, 3.0, 40.0}) {
    EXPECT_LE(std::abs(charfn(law, t)), 1.0);
    EXPECT_LE(std::abs(charfn(law, -t) - std::conj(charfn(law, t))), 1e-15);
  }
}

TEST(Charfn, HalfIntegerPowersUsePrincipalBranch) {
  // n = 4: each factor is (1 - 2 i t b^2)^{-3/2}.
  const auto c = law_constants(std::vector<double>{1.0, 0.8}, 4);
  const double t = 7.0;
  std::complex<double> expect = 1.0;
  for (double b : {1.0, 0.8}) expect *= std::exp(-1.5 * std::log(std::complex<double>(1.0, -2.0 * t * b * b)));
  EXPECT_LE(std::abs(charfn(c, t) - expect), 1e-15);
}

TEST(Charfn, MonteCarloOracle) {
  const auto c = default_law();
  std::vector<double> x(100000);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = oracle_sample_law(c, rng::sample_seed(9, i));
  std::vector<double> re(x.size()), im(x.size());
  for (double t : {0.1, 1.0, 5.0}) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      re[i] = std::cos(t * x[i]);
      im[i] = std::sin(t * x[i]);
    }
    const auto er = stats::mean_estimate(re);
    const auto ei = stats::mean_estimate(im);
    const auto phi = charfn(c, t);
    EXPECT_NEAR(er.mean, phi.real(), 3.0 * er.std_error) << t;
    EXPECT_NEAR(ei.mean, phi.imag(), 3.0 * ei.std_error) << t;
  }
}

TEST(XofR, Examples) {
  const auto c = law_constants(kOne, 3);
  EXPECT_NEAR(x_of_R(c, std::sqrt(c.A_sq)), 0.0, 1e-12);
  EXPECT_NEAR(x_of_R(c, 2.0), (-std::sqrt(2.0) + std::sqrt(6.0)) / 2.0, 1e-12);
  EXPECT_NEAR(x_of_R(c, 2.0), 0.51763809, 1e-8);
  try {
    (void)x_of_R(c, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DomainError);
  }
}

TEST(XofR, RootResidualAndMonotone) {
  for (const auto& c : {default_law(), law_constants(std::vector<double>{0.3, 0.2, 0.2, 0.05}, 5)}) {
    const double A = std::sqrt(c.A_sq);
    double prev = -1.0;
    for (double R = A; R < 20.0 * A; R *= 1.07) {
      const double x = x_of_R(c, R);
      const double lhs = 2.0 * c.a_inf * x * x + 2.0 * std::sqrt(c.B4) * x + c.A_sq;
      EXPECT_NEAR(lhs, R * R, 1e-9 * R * R);
      EXPECT_GT(x, prev);
      prev = x;
    }
  }
}

TEST(TailUpper, BoundaryMonotoneAndExponent) {
  const auto c = law_constants(std::vector<double>{0.6, 0.5, 0.3}, 3);
  const double A = std::sqrt(c.A_sq);
  EXPECT_EQ(tail_upper_lm(c, A), 1.0);
  double prev = 1.0;
  for (double R = A; R < 6.0 * A; R += 0.05) {
    const double u = tail_upper_lm(c, R);
    EXPECT_LE(u, prev);
    prev = u;
  }
  // -log bound / R^2 -> 1 / (2 beta_1^2)
  const double R = 1e4;
  EXPECT_NEAR(x_of_R(c, R) * x_of_R(c, R) / (R * R), 1.0 / (2.0 * c.a_inf), 1e-3);
}

TEST(TailLower, Examples) {
  const auto c = law_constants(kOne, 3);
  EXPECT_DOUBLE_EQ(tail_lower_exact(c, 0.0), 1.0);
  EXPECT_NEAR(tail_lower_exact(c, 1.959964), 0.05, 1e-6);
}

TEST(Tails, BracketOracleFrequencies) {
  const auto c = default_law();
  std::vector<double> w(1000000);
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::sqrt(oracle_sample_law(c, rng::sample_seed(10, i)));
  std::sort(w.begin(), w.end());
  const double A = std::sqrt(c.A_sq);
  for (double q : {0.5, 0.9, 0.99, 0.999}) {
    const double R = std::max(A, stats::quantile_sorted(w, q));
    const auto cnt = stats::count_at_least_sorted(w, R);
    const double emp = static_cast<double>(cnt) / static_cast<double>(w.size());
    const double hw = stats::wilson_half_width(cnt, w.size());
    EXPECT_LE(emp, tail_upper_lm(c, R) + 3.0 * hw) << q;
    EXPECT_GE(emp, tail_lower_exact(c, R) - 3.0 * hw) << q;
  }
}

TEST(Oracle, ZeroAndMoments) {
  const LawConstants zero{3, {0.0, 0.0}, 0.0, 0.0, 0.0};
  EXPECT_EQ(oracle_sample_law(zero, 1), 0.0);

  const auto c = default_law();
  EXPECT_EQ(oracle_sample_law(c, 5), oracle_sample_law(c, 5));
  std::vector<double> v(1000000);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = oracle_sample_law(c, rng::sample_seed(11, i));
  const auto m = stats::moments(v);
  EXPECT_NEAR(m.mean, c.A_sq, 3.0 * std::sqrt(m.variance / static_cast<double>(v.size())));
  EXPECT_NEAR(m.variance, 2.0 * c.B4, 3.0 * m.variance_se);
}

TEST(Cdf, ChiSquareClosedForm) {
  // beta = 1, n = 3: Omega^2 ~ chi^2_2, F(x) = 1 - exp(-x / 2).
  const auto c = law_constants(kOne, 3);
  for (double x : {0.1, 0.5, 1.0, 2.0, 5.0, 12.0}) EXPECT_NEAR(cdf(c, x), 1.0 - std::exp(-x / 2.0), 2e-6) << x;
  EXPECT_EQ(cdf(c, 0.0), 0.0);
  // n = 5: chi^2_4 scaled by 0.25, F(x) = 1 - (1 + y/2) exp(-y/2), y = 4x.
  const auto d = law_constants(std::vector<double>{0.5}, 5);
  for (double x : {0.2, 1.0, 3.0}) {
    const double y = 4.0 * x;
    EXPECT_NEAR(cdf(d, x), 1.0 - (1.0 + y / 2.0) * std::exp(-y / 2.0), 2e-6) << x;
  }
}

TEST(Cdf, MatchesOracleEcdf) {
  const auto c = default_law();
  std::vector<double> v(200000);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = oracle_sample_law(c, rng::sample_seed(12, i));
  EXPECT_LE(stats::ks_one_sample(v, [&](double x) { return cdf(c, x); }), 0.01);
}

TEST(RhoTail, Examples) {
  EXPECT_NEAR(rho_tail_upper(1.0, 0.0, 3, 4.0), 6.0 * std::exp(-2.0), 1e-12);
  EXPECT_NEAR(rho_tail_upper(1.0, 0.0, 3, 4.0), 0.81201, 1e-5);
  EXPECT_EQ(rho_tail_upper(1.0, 0.0, 3, 0.1), 1.0);
  // log bound / R^2 -> -1 / (8 sigma^2), with error alpha / (2R) + ln(2n) / R^2.
  double prev = 1.0;
  for (double R : {10.0, 20.0, 30.0}) {
    const double err = std::abs(std::log(rho_tail_upper(0.3, 2.0, 3, R)) / (R * R) + 1.0 / (8.0 * 0.3));
    EXPECT_LE(err, 1.0 / R + std::log(6.0) / (R * R) + 1e-12);
    EXPECT_LT(err, prev);
    prev = err;
  }
  try {
    (void)rho_tail_upper(0.0, 1.0, 3, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BadParameter);
  }
}

TEST(RhoTail, FitAlphaPassesThroughPoint) {
  const double s = 0.05;
  const double R = 2.5;
  const double p = 1e-3;
  const double a = fit_alpha(s, 3, R, p);
  EXPECT_GT(a, 0.0);
  EXPECT_NEAR(rho_tail_upper(s, a, 3, R), p, 1e-12);
  // Clamped at zero when the alpha = 0 bound already exceeds p.
  EXPECT_EQ(fit_alpha(1.0, 3, 0.5, 1e-6), 0.0);
}
