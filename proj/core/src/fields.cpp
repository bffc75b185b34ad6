#include "rgeom/fields.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rgeom/errors.hpp"
#include "rgeom/rng.hpp"

namespace rgeom::fields {

using spectrum::SpectralBasis;

GridSpec::GridSpec(int n, int m) : n_(n), m_(m), count_(1) {
  if (n < 1 || m < 1) throw Error(ErrorCode::BadParameter, "grid needs n >= 1 and m >= 1");
  for (int d = 0; d < n; ++d) count_ *= static_cast<std::size_t>(m);
}

double GridSpec::spacing() const noexcept { return 2.0 * std::numbers::pi / m_; }

double GridSpec::weight() const noexcept { return std::pow(spacing(), n_); }

double GridSpec::volume() const noexcept { return std::pow(2.0 * std::numbers::pi, n_); }

std::vector<int> GridSpec::multi_index(std::size_t node) const {
  std::vector<int> idx(static_cast<std::size_t>(n_));
  for (int d = n_ - 1; d >= 0; --d) {
    idx[static_cast<std::size_t>(d)] = static_cast<int>(node % static_cast<std::size_t>(m_));
    node /= static_cast<std::size_t>(m_);
  }
  return idx;
}

std::size_t GridSpec::node_of(std::span<const int> multi) const {
  std::size_t node = 0;
  for (int d = 0; d < n_; ++d) {
    const int w = ((multi[static_cast<std::size_t>(d)] % m_) + m_) % m_;
    node = node * static_cast<std::size_t>(m_) + static_cast<std::size_t>(w);
  }
  return node;
}

std::vector<double> GridSpec::coords(std::size_t node) const {
  const auto idx = multi_index(node);
  std::vector<double> x(idx.size());
  for (std::size_t d = 0; d < idx.size(); ++d) x[d] = spacing() * idx[d];
  return x;
}

void GridSpec::require_resolves(const SpectralBasis& basis) const {
  if (basis.dim() != n_) throw Error(ErrorCode::ShapeMismatch, "grid and basis dimensions differ");
  if (m_ <= 2 * basis.max_abs_component()) {
    throw Error(ErrorCode::GridTooCoarse, "grid with m = " + std::to_string(m_) +
                                              " does not resolve max |k|_inf = " +
                                              std::to_string(basis.max_abs_component()));
  }
}

std::string GridSpec::id() const { return "grid" + std::to_string(n_) + "d:m=" + std::to_string(m_); }

std::vector<Matrix> MetricField::metric_matrices() const {
  std::vector<Matrix> out;
  out.reserve(g1.size());
  for (const auto& g : g1) out.push_back(g.matrix());
  return out;
}

symspace::TracelessDiag project_traceless(const Vector& v) {
  Vector out = v;
  out.array() -= v.mean();
  return symspace::TracelessDiag(std::move(out));
}

Synthesizer::Synthesizer(const SpectralBasis& basis, const GridSpec& grid)
    : basis_(basis), grid_(grid) {
  grid_.require_resolves(basis_);
  const auto nodes = static_cast<Eigen::Index>(grid_.node_count());
  const auto modes = static_cast<Eigen::Index>(basis_.size());
  psi_.resize(nodes, modes);
  for (Eigen::Index p = 0; p < nodes; ++p) {
    const auto x = grid_.coords(static_cast<std::size_t>(p));
    for (Eigen::Index j = 0; j < modes; ++j) psi_(p, j) = basis_.mode(static_cast<std::size_t>(j)).eval(x);
  }
}

Matrix Synthesizer::synthesize(const Matrix& coefficients) const {
  if (coefficients.rows() != psi_.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "coefficient rows must equal the basis size");
  }
  return psi_ * coefficients;
}

RadialField Synthesizer::radial(std::span<const double> betas, std::uint64_t seed,
                                const std::string& schedule_id) const {
  return radial_from_coefficients(radial_coefficients(betas, basis_.dim(), seed), seed, schedule_id);
}

RadialField Synthesizer::radial_from_coefficients(Matrix coefficients, std::uint64_t seed,
                                                  const std::string& schedule_id) const {
  if (coefficients.cols() != basis_.dim()) {
    throw Error(ErrorCode::ShapeMismatch, "radial coefficients need n columns");
  }
  RadialField f{grid_, synthesize(coefficients), std::move(coefficients), seed, basis_.id(), schedule_id};
  return f;
}

AngularField Synthesizer::angular(std::span<const double> deltas, std::uint64_t seed,
                                  const std::string& schedule_id) const {
  return angular_from_coefficients(angular_coefficients(deltas, basis_.dim(), seed), seed, schedule_id);
}

AngularField Synthesizer::angular_from_coefficients(Matrix coefficients, std::uint64_t seed,
                                                    const std::string& schedule_id) const {
  if (coefficients.cols() != symspace::skew_size(basis_.dim())) {
    throw Error(ErrorCode::ShapeMismatch, "angular coefficients need n(n-1)/2 columns");
  }
  AngularField f{grid_, synthesize(coefficients), std::move(coefficients), seed, basis_.id(), schedule_id};
  return f;
}

Matrix radial_coefficients(std::span<const double> betas, int n, std::uint64_t seed) {
  const auto modes = static_cast<Eigen::Index>(betas.size());
  Matrix c(modes, n);
  Vector xi(n);
  for (Eigen::Index j = 0; j < modes; ++j) {
    for (int i = 0; i < n; ++i) {
      xi(i) = rng::normal(seed, rng::Stream::Radial, static_cast<std::uint64_t>(j), static_cast<std::uint64_t>(i));
    }
    xi.array() -= xi.mean();
    c.row(j) = betas[static_cast<std::size_t>(j)] * xi.transpose();
  }
  return c;
}

Matrix angular_coefficients(std::span<const double> deltas, int n, std::uint64_t seed) {
  const auto modes = static_cast<Eigen::Index>(deltas.size());
  const Eigen::Index d = symspace::skew_size(n);
  Matrix c(modes, d);
  for (Eigen::Index j = 0; j < modes; ++j) {
    for (Eigen::Index i = 0; i < d; ++i) {
      c(j, i) = deltas[static_cast<std::size_t>(j)] *
                rng::normal(seed, rng::Stream::Angular, static_cast<std::uint64_t>(j), static_cast<std::uint64_t>(i));
    }
  }
  return c;
}

RadialField sample_radial(const SpectralBasis& basis, const spectrum::DecaySchedule& schedule,
                          const GridSpec& grid, std::uint64_t seed) {
  const auto betas = spectrum::decay_eval(schedule, basis);
  return Synthesizer(basis, grid).radial(betas, seed, schedule.descriptor());
}

RadialField sample_radial(const SpectralBasis& basis, std::span<const double> betas, const GridSpec& grid,
                          std::uint64_t seed) {
  if (betas.size() != basis.size()) throw Error(ErrorCode::ShapeMismatch, "one beta per basis mode");
  return Synthesizer(basis, grid).radial(betas, seed);
}

AngularField sample_angular(const SpectralBasis& basis, const spectrum::DecaySchedule& schedule2,
                            const GridSpec& grid, std::uint64_t seed) {
  const auto deltas = spectrum::decay_eval(schedule2, basis);
  return Synthesizer(basis, grid).angular(deltas, seed, schedule2.descriptor());
}

AngularField sample_angular(const SpectralBasis& basis, std::span<const double> deltas, const GridSpec& grid,
                            std::uint64_t seed) {
  if (deltas.size() != basis.size()) throw Error(ErrorCode::ShapeMismatch, "one delta per basis mode");
  return Synthesizer(basis, grid).angular(deltas, seed);
}

MetricField assemble_metric(const RadialField& radial, const AngularField* angular) {
  const GridSpec& grid = radial.grid;
  const int n = grid.dim();
  if (radial.b.cols() != n || static_cast<std::size_t>(radial.b.rows()) != grid.node_count()) {
    throw Error(ErrorCode::ShapeMismatch, "radial field does not match its grid");
  }
  if (angular != nullptr) {
    if (!(angular->grid == grid) || angular->u.rows() != radial.b.rows() ||
        angular->u.cols() != symspace::skew_size(n)) {
      throw Error(ErrorCode::ShapeMismatch, "angular and radial fields live on different grids");
    }
  }

  MetricField out{grid, radial.b, {}, {}, {}};
  out.rotation.reserve(grid.node_count());
  out.g1.reserve(grid.node_count());
  for (Eigen::Index p = 0; p < radial.b.rows(); ++p) {
    const Vector a2 = (2.0 * radial.b.row(p).transpose()).array().exp().matrix();
    Matrix k = Matrix::Identity(n, n);
    if (angular != nullptr) {
      k = symspace::skew_exp(symspace::SkewMatrix(n, angular->u.row(p).transpose()).matrix());
    }
    out.g1.push_back(symspace::SpdDetOne::normalized(k * a2.asDiagonal() * k.transpose()));
    out.rotation.push_back(std::move(k));
  }
  out.provenance.radial_seed = radial.seed;
  out.provenance.radial_schedule = radial.schedule_id;
  out.provenance.basis_id = radial.basis_id;
  out.provenance.grid_id = grid.id();
  if (angular != nullptr) {
    out.provenance.angular_seed = angular->seed;
    out.provenance.angular_schedule = angular->schedule_id;
  }
  return out;
}

double scalar_covariance(std::span<const double> betas, const SpectralBasis& basis, std::span<const double> x,
                         std::span<const double> y) {
  if (betas.size() != basis.size()) throw Error(ErrorCode::ShapeMismatch, "one beta per basis mode");
  double r = 0.0;
  for (std::size_t j = 0; j < betas.size(); ++j) {
    const auto& mode = basis.mode(j);
    r += betas[j] * betas[j] * mode.eval(x) * mode.eval(y);
  }
  return r;
}

Matrix covariance_radial(const SpectralBasis& basis, std::span<const double> betas, std::span<const double> x,
                         std::span<const double> y) {
  const int n = basis.dim();
  const Matrix proj = Matrix::Identity(n, n) - Matrix::Constant(n, n, 1.0 / n);
  return proj * scalar_covariance(betas, basis, x, y);
}

double sigma_sup(std::span<const double> betas, const SpectralBasis& basis, const GridSpec& grid) {
  double best = 0.0;
  for (std::size_t p = 0; p < grid.node_count(); ++p) {
    const auto x = grid.coords(p);
    best = std::max(best, scalar_covariance(betas, basis, x, x));
  }
  return best;
}

double sigma_sq_torus(std::span<const double> betas, int n) {
  double sum = 0.0;
  for (double b : betas) sum += b * b;
  // cos and sin share beta, so each lattice pair contributes beta^2 * 2 / (2 pi)^n once.
  return sum / std::pow(2.0 * std::numbers::pi, n);
}

}  // namespace rgeom::fields
