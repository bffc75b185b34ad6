#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "rgeom/errors.hpp"
#include "rgeom/fields.hpp"
#include "rgeom/rng.hpp"
#include "rgeom/stats.hpp"
#include "rgeom/symspace.hpp"

using namespace rgeom;
using namespace rgeom::fields;

namespace {

Vector mode_values(const spectrum::SpectralBasis& basis, std::span<const double> x) {
  Vector v(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t j = 0; j < basis.size(); ++j) v(static_cast<Eigen::Index>(j)) = basis.mode(j).eval(x);
  return v;
}

}  // namespace

TEST(ProjectTraceless, Examples) {
  Vector v(3);
  v << 1, 1, 1;
  EXPECT_LE(project_traceless(v).values().norm(), 1e-15);
  v << 1, 0, 0;
  const Vector p = project_traceless(v).values();
  EXPECT_NEAR(p(0), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(p(1), -1.0 / 3.0, 1e-15);
  EXPECT_NEAR(p(2), -1.0 / 3.0, 1e-15);
  EXPECT_LE((project_traceless(p).values() - p).norm(), 1e-15);
  EXPECT_LE(p.norm(), v.norm());
}

TEST(GridSpec, Geometry) {
  const GridSpec g(3, 16);
  EXPECT_EQ(g.node_count(), 4096u);
  EXPECT_NEAR(g.weight() * static_cast<double>(g.node_count()), g.volume(), 1e-9);
  const std::vector<int> idx = {1, 2, 3};
  const auto node = g.node_of(idx);
  EXPECT_EQ(g.multi_index(node), idx);
  const std::vector<int> wrapped = {17, -14, 3};
  EXPECT_EQ(g.node_of(wrapped), node);
  EXPECT_EQ(g.node_of(std::vector<int>{0, 0, 1}), 1u);
}

TEST(GridSpec, TooCoarse) {
  const auto basis = spectrum::torus_basis_through(3, 16);
  try {
    GridSpec(3, 8).require_resolves(basis);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::GridTooCoarse);
  }
  EXPECT_NO_THROW(GridSpec(3, 9).require_resolves(basis));
  EXPECT_THROW((void)sample_radial(basis, spectrum::DecaySchedule::power_law(2.0), GridSpec(3, 8), 1), Error);
}

TEST(SampleRadial, ZeroScheduleAndDeterminism) {
  const auto basis = spectrum::torus_basis_through(3, 4);
  const GridSpec grid(3, 8);
  const std::vector<double> zero(basis.size(), 0.0);
  EXPECT_EQ(sample_radial(basis, zero, grid, 7).b.cwiseAbs().maxCoeff(), 0.0);

  const auto sched = spectrum::DecaySchedule::power_law(2.0);
  const auto a = sample_radial(basis, sched, grid, 42);
  const auto b = sample_radial(basis, sched, grid, 42);
  EXPECT_TRUE(a.b == b.b);
  EXPECT_FALSE(a.b == sample_radial(basis, sched, grid, 43).b);
  EXPECT_LE(a.b.rowwise().sum().cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(a.seed, 42u);
  EXPECT_EQ(a.basis_id, basis.id());
}

TEST(SampleRadial, EarlierModesStableUnderTruncation) {
  const auto small = spectrum::torus_basis_through(3, 2);
  const auto large = spectrum::torus_basis_through(3, 6);
  const auto cs = radial_coefficients(spectrum::decay_eval(spectrum::DecaySchedule::power_law(1.0), small), 3, 5);
  const auto cl = radial_coefficients(spectrum::decay_eval(spectrum::DecaySchedule::power_law(1.0), large), 3, 5);
  EXPECT_TRUE(cs == cl.topRows(cs.rows()));
}

TEST(SampleRadial, SingleForcedMode) {
  const auto basis = spectrum::torus_basis_through(3, 4);
  const GridSpec grid(3, 8);
  const Synthesizer s(basis, grid);
  const std::size_t j = 7;
  const double beta = 0.37;
  Matrix c = Matrix::Zero(static_cast<Eigen::Index>(basis.size()), 3);
  Vector e1 = Vector::Zero(3);
  e1(0) = 1.0;
  c.row(static_cast<Eigen::Index>(j)) = beta * project_traceless(e1).values().transpose();
  const auto f = s.radial_from_coefficients(c);
  for (std::size_t p = 0; p < grid.node_count(); p += 37) {
    const double psi = basis.mode(j).eval(grid.coords(p));
    EXPECT_NEAR(f.b(static_cast<Eigen::Index>(p), 0), 2.0 / 3.0 * beta * psi, 1e-14);
    EXPECT_NEAR(f.b(static_cast<Eigen::Index>(p), 1), -1.0 / 3.0 * beta * psi, 1e-14);
  }
}

TEST(SampleRadial, PointwiseMomentsMatchCovariance) {
  const auto basis = spectrum::torus_basis_through(3, 4);
  const auto betas = spectrum::decay_eval(spectrum::DecaySchedule::power_law(1.0), basis);
  const std::vector<double> x = {0.3, 1.7, 4.1};
  const std::vector<double> y = {2.0, 0.1, 5.5};
  const Vector px = mode_values(basis, x);
  const Vector py = mode_values(basis, y);
  const std::size_t N = 100000;
  std::vector<double> b1(N), prod01(N), cross(N);
  for (std::size_t s = 0; s < N; ++s) {
    const Matrix c = radial_coefficients(betas, 3, rng::sample_seed(99, s));
    const Vector bx = c.transpose() * px;
    const Vector by = c.transpose() * py;
    b1[s] = bx(0);
    prod01[s] = bx(0) * bx(1);
    cross[s] = bx(0) * by(0);
  }
  const Matrix cov = covariance_radial(basis, betas, x, x);
  const Matrix covxy = covariance_radial(basis, betas, x, y);
  const double r = scalar_covariance(betas, basis, x, x);
  EXPECT_NEAR(cov(0, 0), 2.0 / 3.0 * r, 1e-14);
  EXPECT_NEAR(cov(0, 1), -1.0 / 3.0 * r, 1e-14);

  std::vector<double> sq(N);
  for (std::size_t s = 0; s < N; ++s) sq[s] = b1[s] * b1[s];
  const auto var = stats::mean_estimate(sq);
  EXPECT_NEAR(var.mean, cov(0, 0), 3.0 * var.std_error);
  const auto c01 = stats::mean_estimate(prod01);
  EXPECT_NEAR(c01.mean, cov(0, 1), 3.0 * c01.std_error);
  const auto cxy = stats::mean_estimate(cross);
  EXPECT_NEAR(cxy.mean, covxy(0, 0), 3.0 * cxy.std_error);

  const auto m = stats::moments(b1);
  EXPECT_NEAR(m.skewness, 0.0, 3.0 * m.skewness_se);
  EXPECT_NEAR(m.kurtosis, 3.0, 3.0 * m.kurtosis_se);
}

TEST(SampleAngular, PointwiseVariance) {
  const auto basis = spectrum::torus_basis_through(3, 4);
  const auto deltas = spectrum::decay_eval(spectrum::DecaySchedule::heat_kernel(0.5), basis);
  const std::vector<double> x = {1.0, 2.0, 3.0};
  const Vector px = mode_values(basis, x);
  const std::size_t N = 100000;
  std::vector<double> sq(N);
  for (std::size_t s = 0; s < N; ++s) {
    const Matrix c = angular_coefficients(deltas, 3, rng::sample_seed(3, s));
    const double u12 = c.col(0).dot(px);
    sq[s] = u12 * u12;
  }
  const auto est = stats::mean_estimate(sq);
  EXPECT_NEAR(est.mean, scalar_covariance(deltas, basis, x, x), 3.0 * est.std_error);
}

TEST(SampleAngular, ZeroAndForcedMode) {
  const auto basis = spectrum::torus_basis_through(3, 2);
  const GridSpec grid(3, 8);
  const Synthesizer s(basis, grid);
  const auto radial = s.radial(spectrum::decay_eval(spectrum::DecaySchedule::power_law(2.0), basis), 1);
  const auto none = s.angular(std::vector<double>(basis.size(), 0.0), 1);
  const auto m0 = assemble_metric(radial, &none);
  for (const auto& k : m0.rotation) EXPECT_TRUE(k.isIdentity(0.0));

  Matrix c = Matrix::Zero(static_cast<Eigen::Index>(basis.size()), 3);
  c(2, 0) = 0.8;  // only u_12
  const auto one = s.angular_from_coefficients(c);
  const auto m1 = assemble_metric(radial, &one);
  for (const auto& k : m1.rotation) {
    EXPECT_NEAR(k(2, 2), 1.0, 1e-14);
    EXPECT_NEAR(k(0, 2), 0.0, 1e-14);
    EXPECT_NEAR(k(1, 2), 0.0, 1e-14);
  }
}

TEST(AssembleMetric, Examples) {
  const auto basis = spectrum::torus_basis_through(3, 2);
  const GridSpec grid(3, 8);
  const Synthesizer s(basis, grid);
  const auto flat = assemble_metric(s.radial_from_coefficients(Matrix::Zero(static_cast<Eigen::Index>(basis.size()), 3)));
  for (const auto& g : flat.g1) EXPECT_TRUE(g.matrix().isIdentity(1e-15));

  RadialField r = s.radial_from_coefficients(Matrix::Zero(static_cast<Eigen::Index>(basis.size()), 3));
  r.b.row(5) << 1.0, -1.0, 0.0;
  const auto m = assemble_metric(r);
  EXPECT_NEAR(m.g1[5].matrix()(0, 0), std::exp(2.0), 1e-12);
  EXPECT_NEAR(m.g1[5].matrix()(1, 1), std::exp(-2.0), 1e-12);
  EXPECT_NEAR(m.g1[5].matrix()(2, 2), 1.0, 1e-12);
}

TEST(AssembleMetric, VolumeFormAndSpectrum) {
  const auto basis = spectrum::torus_basis_through(3, 16);
  const GridSpec grid(3, 16);
  const auto sched = spectrum::DecaySchedule::power_law(2.0);
  const auto r = sample_radial(basis, sched, grid, 11);
  const auto a = sample_angular(basis, sched, grid, 11);
  const auto m = assemble_metric(r, &a);
  EXPECT_EQ(m.provenance.radial_seed, 11u);
  ASSERT_TRUE(m.provenance.angular_seed.has_value());
  for (std::size_t p = 0; p < grid.node_count(); ++p) {
    const Matrix& g = m.g1[p].matrix();
    EXPECT_LE(std::abs(g.determinant() - 1.0), 1e-9);
    Vector ev = symspace::sym_eigen(g).values;
    Vector expect = (2.0 * r.b.row(static_cast<Eigen::Index>(p)).transpose()).array().exp();
    std::sort(expect.data(), expect.data() + 3);
    EXPECT_LE((ev - expect).cwiseAbs().maxCoeff(), 1e-9);
    const Matrix& k = m.rotation[p];
    const Vector a2 = (2.0 * r.b.row(static_cast<Eigen::Index>(p)).transpose()).array().exp();
    const Matrix rebuilt = k * a2.asDiagonal() * k.transpose();
    EXPECT_LE((rebuilt - g).norm(), 1e-9);
  }
}

TEST(AssembleMetric, ShapeMismatch) {
  const auto basis = spectrum::torus_basis_through(3, 2);
  const auto sched = spectrum::DecaySchedule::power_law(2.0);
  const auto r = sample_radial(basis, sched, GridSpec(3, 8), 1);
  const auto a = sample_angular(basis, sched, GridSpec(3, 10), 1);
  try {
    (void)assemble_metric(r, &a);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ShapeMismatch);
  }
}

TEST(Covariance, ScalarExamples) {
  const auto basis = spectrum::torus_basis(3, 1);
  const double t = 0.7;
  const auto betas = spectrum::decay_eval(spectrum::DecaySchedule::heat_kernel(t), basis);
  const std::vector<double> x = {0.4, 2.2, 5.0};
  // Three cos/sin pairs, each contributing beta^2 * 2 / (2 pi)^3 since cos^2 + sin^2 = 1.
  const double expect = 6.0 * std::exp(-2.0 * t) / std::pow(2.0 * std::numbers::pi, 3);
  EXPECT_NEAR(scalar_covariance(betas, basis, x, x), expect, 1e-15);
  EXPECT_LE(covariance_radial(basis, std::vector<double>(basis.size(), 0.0), x, x).norm(), 0.0);
}

TEST(Covariance, PartialSumsIncrease) {
  const std::vector<double> x = {0.0, 0.0, 0.0};
  double prev = 0.0;
  for (int lmax : {1, 2, 4, 8, 16}) {
    const auto basis = spectrum::torus_basis_through(3, lmax);
    const double r = scalar_covariance(spectrum::decay_eval(spectrum::DecaySchedule::power_law(1.0), basis), basis, x, x);
    EXPECT_GT(r, prev);
    prev = r;
  }
}

TEST(SigmaSup, HomogeneousClosedForm) {
  const auto basis = spectrum::torus_basis_through(3, 16);
  const GridSpec grid(3, 16);
  const auto betas = spectrum::decay_eval(spectrum::DecaySchedule::power_law(2.0), basis);
  const double s = sigma_sup(betas, basis, grid);
  EXPECT_NEAR(s, sigma_sq_torus(betas, 3), 1e-10);
  EXPECT_NEAR(s, scalar_covariance(betas, basis, grid.coords(123), grid.coords(123)), 1e-12);
  EXPECT_EQ(sigma_sup(std::vector<double>(basis.size(), 0.0), basis, grid), 0.0);
}
