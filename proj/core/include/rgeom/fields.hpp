#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rgeom/spectrum.hpp"
#include "rgeom/symspace.hpp"

namespace rgeom::fields {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Periodic grid with m nodes per axis on [0, 2 pi)^n. Nodes are numbered
/// row-major, the last axis varying fastest.
class GridSpec {
 public:
  GridSpec(int n, int m);

  [[nodiscard]] int dim() const noexcept { return n_; }
  [[nodiscard]] int per_axis() const noexcept { return m_; }
  [[nodiscard]] std::size_t node_count() const noexcept { return count_; }
  [[nodiscard]] double spacing() const noexcept;
  /// Quadrature weight (2 pi / m)^n.
  [[nodiscard]] double weight() const noexcept;
  [[nodiscard]] double volume() const noexcept;

  [[nodiscard]] std::vector<int> multi_index(std::size_t node) const;
  [[nodiscard]] std::size_t node_of(std::span<const int> multi) const;  // wraps periodically
  [[nodiscard]] std::vector<double> coords(std::size_t node) const;

  /// Exact trigonometric quadrature needs m > 2 max |k|_inf; throws GridTooCoarse otherwise.
  void require_resolves(const spectrum::SpectralBasis& basis) const;

  [[nodiscard]] std::string id() const;
  friend bool operator==(const GridSpec&, const GridSpec&) = default;

 private:
  int n_;
  int m_;
  std::size_t count_;
};

struct RadialField {
  GridSpec grid;
  Matrix b;             // node_count x n, log-scale radial part, rows trace-free
  Matrix coefficients;  // J x n, row j = beta_j * pi_n(xi_j)
  std::uint64_t seed = 0;
  std::string basis_id;
  std::string schedule_id;
};

struct AngularField {
  GridSpec grid;
  Matrix u;             // node_count x n(n-1)/2, strict upper triangles
  Matrix coefficients;  // J x n(n-1)/2, row j = delta_j * eta_j
  std::uint64_t seed = 0;
  std::string basis_id;
  std::string schedule_id;
};

struct MetricProvenance {
  std::uint64_t radial_seed = 0;
  std::optional<std::uint64_t> angular_seed;
  std::string radial_schedule;
  std::string angular_schedule;
  std::string basis_id;
  std::string grid_id;
};

struct MetricField {
  GridSpec grid;
  Matrix b;                               // node_count x n
  std::vector<Matrix> rotation;           // k(x) = exp(u(x))
  std::vector<symspace::SpdDetOne> g1;    // k exp(2b) k^T
  MetricProvenance provenance;

  [[nodiscard]] std::vector<Matrix> metric_matrices() const;
};

[[nodiscard]] symspace::TracelessDiag project_traceless(const Vector& v);

/// Evaluation table Psi(node, j) = psi_j(x_node) for one (basis, grid) pair.
class Synthesizer {
 public:
  Synthesizer(const spectrum::SpectralBasis& basis, const GridSpec& grid);

  [[nodiscard]] const Matrix& table() const noexcept { return psi_; }
  [[nodiscard]] const GridSpec& grid() const noexcept { return grid_; }
  [[nodiscard]] const spectrum::SpectralBasis& basis() const noexcept { return basis_; }

  /// Node values Psi * coefficients.
  [[nodiscard]] Matrix synthesize(const Matrix& coefficients) const;

  [[nodiscard]] RadialField radial(std::span<const double> betas, std::uint64_t seed,
                                   const std::string& schedule_id = "custom") const;
  [[nodiscard]] RadialField radial_from_coefficients(Matrix coefficients, std::uint64_t seed = 0,
                                                     const std::string& schedule_id = "custom") const;
  [[nodiscard]] AngularField angular(std::span<const double> deltas, std::uint64_t seed,
                                     const std::string& schedule_id = "custom") const;
  [[nodiscard]] AngularField angular_from_coefficients(Matrix coefficients, std::uint64_t seed = 0,
                                                       const std::string& schedule_id = "custom") const;

 private:
  spectrum::SpectralBasis basis_;
  GridSpec grid_;
  Matrix psi_;
};

/// Coefficient rows beta_j * pi_n(xi_j), xi_j ~ N(0, I_n) from the radial substream of `seed`.
[[nodiscard]] Matrix radial_coefficients(std::span<const double> betas, int n, std::uint64_t seed);
/// Coefficient rows delta_j * eta_j with eta_j's upper triangle i.i.d. N(0, 1).
[[nodiscard]] Matrix angular_coefficients(std::span<const double> deltas, int n, std::uint64_t seed);

[[nodiscard]] RadialField sample_radial(const spectrum::SpectralBasis& basis,
                                        const spectrum::DecaySchedule& schedule, const GridSpec& grid,
                                        std::uint64_t seed);
[[nodiscard]] RadialField sample_radial(const spectrum::SpectralBasis& basis, std::span<const double> betas,
                                        const GridSpec& grid, std::uint64_t seed);
[[nodiscard]] AngularField sample_angular(const spectrum::SpectralBasis& basis,
                                          const spectrum::DecaySchedule& schedule2, const GridSpec& grid,
                                          std::uint64_t seed);
[[nodiscard]] AngularField sample_angular(const spectrum::SpectralBasis& basis,
                                          std::span<const double> deltas, const GridSpec& grid,
                                          std::uint64_t seed);

/// g1(x) = k(x) exp(2 b(x)) k(x)^T with k = exp(u), or exp(2b) without an angular part.
[[nodiscard]] MetricField assemble_metric(const RadialField& radial, const AngularField* angular = nullptr);

/// Cov(b(x), b(y)) = (I - 11^T / n) r(x, y).
[[nodiscard]] Matrix covariance_radial(const spectrum::SpectralBasis& basis, std::span<const double> betas,
                                       std::span<const double> x, std::span<const double> y);

/// r(x, y) = sum_j beta_j^2 psi_j(x) psi_j(y): the truncated zeta / heat-kernel sum
/// without the constant mode.
[[nodiscard]] double scalar_covariance(std::span<const double> betas, const spectrum::SpectralBasis& basis,
                                       std::span<const double> x, std::span<const double> y);

/// sigma^2 = max over grid nodes of r(x, x).
[[nodiscard]] double sigma_sup(std::span<const double> betas, const spectrum::SpectralBasis& basis,
                               const GridSpec& grid);

/// Homogeneous torus value: beta^2 * 2 / (2 pi)^n summed once per +-k lattice pair,
/// i.e. sum over modes of beta_j^2 / (2 pi)^n.
[[nodiscard]] double sigma_sq_torus(std::span<const double> betas, int n);

}  // namespace rgeom::fields
