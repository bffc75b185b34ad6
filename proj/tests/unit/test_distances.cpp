#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "rgeom/distances.hpp"
#include "rgeom/rng.hpp"

using namespace rgeom;
using namespace rgeom::fields;

namespace {

struct Fixture {
  spectrum::SpectralBasis basis = spectrum::torus_basis_through(3, 16);
  GridSpec grid{3, 16};
  std::vector<double> betas = spectrum::decay_eval(spectrum::DecaySchedule::power_law(2.0), basis);
  Synthesizer synth{basis, grid};
};

const Fixture& fx() {
  static const Fixture f;
  return f;
}

}  // namespace

TEST(Omega2, ZeroField) {
  const auto r = fx().synth.radial_from_coefficients(Matrix::Zero(256, 3));
  EXPECT_EQ(distances::omega2_sq(r, fx().grid), 0.0);
  EXPECT_EQ(distances::lipschitz_rho(r, fx().grid), 0.0);
}

TEST(Omega2, SingleMode) {
  Matrix c = Matrix::Zero(256, 3);
  c.row(40) << 0.3, -0.1, -0.2;
  const auto r = fx().synth.radial_from_coefficients(c);
  EXPECT_NEAR(distances::omega2_sq(r, fx().grid), c.squaredNorm(), 1e-10);
}

TEST(Omega2, MatchesCoefficientSpace) {
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const auto r = fx().synth.radial(fx().betas, rng::sample_seed(1, i));
    const double coeff = distances::omega2_sq_coefficients(r.coefficients);
    EXPECT_NEAR(distances::omega2_sq(r, fx().grid), coeff, 1e-9 * coeff);
  }
}

TEST(Rho, ConstantField) {
  auto r = fx().synth.radial_from_coefficients(Matrix::Zero(256, 3));
  r.b.rowwise() = Eigen::RowVector3d(0.4, -0.4, 0.0);
  EXPECT_DOUBLE_EQ(distances::lipschitz_rho(r, fx().grid), 0.8);
}

TEST(Rho, RayleighQuotientBound) {
  const auto r = fx().synth.radial(fx().betas, 77);
  const auto a = fx().synth.angular(fx().betas, 77);
  const auto m = assemble_metric(r, &a);
  const double rho = distances::lipschitz_rho(r, fx().grid);
  std::mt19937_64 gen(1);
  std::uniform_int_distribution<std::size_t> node(0, fx().grid.node_count() - 1);
  std::normal_distribution<double> z;
  double best = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Matrix& g = m.g1[node(gen)].matrix();
    for (int d = 0; d < 1000; ++d) {
      const Eigen::Vector3d xi(z(gen), z(gen), z(gen));
      const double q = std::abs(std::log(xi.dot(g * xi) / xi.squaredNorm()));
      EXPECT_LE(q, rho + 1e-9);
    }
  }
  // The supremum is attained at the eigenvector of the extreme node.
  for (const auto& g : m.g1) {
    const auto ev = symspace::sym_eigen(g.matrix()).values;
    best = std::max({best, std::abs(std::log(ev(0))), std::abs(std::log(ev(2)))});
  }
  EXPECT_NEAR(best, rho, 1e-6);
}

TEST(Rho, AngularInvariance) {
  const auto r = fx().synth.radial(fx().betas, 5);
  const double rho = distances::lipschitz_rho(r, fx().grid);
  for (std::uint64_t s : {1u, 2u, 3u}) {
    const auto a = fx().synth.angular(fx().betas, s);
    const auto m = assemble_metric(r, &a);
    EXPECT_EQ(distances::lipschitz_rho_values(m.b), rho);
  }
}

TEST(Distances, LinearInBeta) {
  std::vector<double> scaled = fx().betas;
  for (double& b : scaled) b *= 2.5;
  const auto r1 = fx().synth.radial(fx().betas, 9);
  const auto r2 = fx().synth.radial(scaled, 9);
  EXPECT_NEAR(std::sqrt(distances::omega2_sq(r2, fx().grid)), 2.5 * std::sqrt(distances::omega2_sq(r1, fx().grid)), 1e-12);
  EXPECT_NEAR(distances::lipschitz_rho(r2, fx().grid), 2.5 * distances::lipschitz_rho(r1, fx().grid), 1e-12);
}

TEST(FiberwiseField, MatchesRadialNorm) {
  const auto r = fx().synth.radial(fx().betas, 12);
  const auto a = fx().synth.angular(fx().betas, 12);
  const auto m = assemble_metric(r, &a);
  const auto d = distances::fiberwise_distance_field(m, fx().grid);
  double total = 0.0;
  for (std::size_t p = 0; p < d.size(); ++p) {
    EXPECT_NEAR(d[p], r.b.row(static_cast<Eigen::Index>(p)).norm(), 1e-9);
    total += d[p] * d[p];
  }
  EXPECT_NEAR(total * fx().grid.weight(), distances::omega2_sq(r, fx().grid), 1e-9);

  const auto flat = assemble_metric(fx().synth.radial_from_coefficients(Matrix::Zero(256, 3)));
  for (double v : distances::fiberwise_distance_field(flat, fx().grid)) EXPECT_EQ(v, 0.0);
}

TEST(FiberwiseField, KnownNode) {
  auto r = fx().synth.radial_from_coefficients(Matrix::Zero(256, 3));
  r.b.row(0) << 1.0, -1.0, 0.0;
  const auto a = fx().synth.angular(fx().betas, 4);
  const auto m = assemble_metric(r, &a);
  EXPECT_NEAR(distances::fiberwise_distance_field(m, fx().grid)[0], std::sqrt(2.0), 1e-12);
}

TEST(DistanceCsv, Format) {
  std::ostringstream out;
  distances::write_csv(out, {{7, 1.5, 0.25, "power:s=2", "torus3:m=16"}});
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, distances::kDistanceCsvSchema);
  std::getline(in, line);
  EXPECT_EQ(line, "# schedule=power:s=2 grid=torus3:m=16");
  std::getline(in, line);
  EXPECT_EQ(line.rfind("seed,omega2_sq,rho", 0), 0u);
  std::getline(in, line);
  EXPECT_EQ(line.rfind("7,1.5,0.25", 0), 0u);
}
