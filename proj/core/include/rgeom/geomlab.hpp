#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rgeom/fields.hpp"

namespace rgeom::geomlab {

using Matrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Grid graph with every node joined to its 3^n - 1 neighbours (offsets in
/// {-1, 0, 1}^n, periodic). An edge p -- q has length h * sqrt(o^T g o) where
/// g is the metric at the endpoint with the smaller node index, so weights are
/// symmetric and every evaluation point is a grid node.
class GridGraph {
 public:
  GridGraph(const fields::GridSpec& grid, std::span<const Matrix> metric);

  [[nodiscard]] std::size_t node_count() const noexcept { return nodes_; }
  [[nodiscard]] std::size_t degree() const noexcept { return degree_; }
  [[nodiscard]] std::uint32_t neighbor(std::size_t node, std::size_t e) const { return adj_[node * degree_ + e]; }
  [[nodiscard]] double weight(std::size_t node, std::size_t e) const { return w_[node * degree_ + e]; }

  /// Single-source Dijkstra distances.
  [[nodiscard]] std::vector<double> shortest_paths(std::size_t source) const;

 private:
  std::size_t nodes_;
  std::size_t degree_;
  std::vector<std::uint32_t> adj_;
  std::vector<double> w_;
};

inline constexpr std::size_t kExactDiameterNodeLimit = 5000;
inline constexpr std::size_t kSampledDiameterSources = 64;

struct DiameterReport {
  double value = 0.0;
  bool exact = true;  // false: maximum over a fixed source sample, a lower bound
  std::size_t sources = 0;
};

[[nodiscard]] DiameterReport discrete_diameter(std::span<const Matrix> metric, const fields::GridSpec& grid);
[[nodiscard]] DiameterReport discrete_diameter(const fields::MetricField& m, const fields::GridSpec& grid);

/// Q_g(f) = sum_cells (Df)^T G (Df) w with forward differences from each cell's
/// base node and G the average of g^{-1} over the cell's 2^n corners.
[[nodiscard]] SparseMatrix stiffness_matrix(std::span<const Matrix> metric, const fields::GridSpec& grid);

struct SpectrumOptions {
  int max_iterations = 2000;
  double residual_tol = 1e-10;  // relative to the Ritz value
  double shift = 1e-2;
  std::size_t extra_vectors = 8;
};

struct DiscreteSpectrumReport {
  std::vector<double> eigenvalues;  // k smallest nonzero, ascending
  std::string grid;
  std::string provenance;
  int iterations = 0;
};

/// k smallest nonzero eigenvalues of Q_g against the metric-independent mass
/// form sum f^2 w. Throws ConvergenceFailure past the iteration budget.
[[nodiscard]] DiscreteSpectrumReport discrete_spectrum(std::span<const Matrix> metric,
                                                       const fields::GridSpec& grid, std::size_t k,
                                                       const SpectrumOptions& options = {});
[[nodiscard]] DiscreteSpectrumReport discrete_spectrum(const fields::MetricField& m,
                                                       const fields::GridSpec& grid, std::size_t k,
                                                       const SpectrumOptions& options = {});

/// Eigenvalue of the flat stencil for lattice vector k: sum_i (m/pi sin(pi k_i/m))^2.
[[nodiscard]] double flat_symbol(std::span<const int> k, int m);

struct SandwichResult {
  bool pass = true;
  double rho_hat = 0.0;
  std::vector<double> ratios;
  double lower = 1.0;
  double upper = 1.0;
};

inline constexpr double kSandwichSlack = 1e-9;

/// e^{-rho} <= diam(g1) / diam(g0) <= e^{rho} with g0 = identity on the same grid.
[[nodiscard]] SandwichResult sandwich_check_diam(const fields::MetricField& m, const fields::GridSpec& grid,
                                                 std::optional<double> reference_diameter = std::nullopt);

/// e^{-2 rho} <= lambda_j(g1) / lambda_j(g0) <= e^{2 rho} for j = 1..k.
[[nodiscard]] SandwichResult sandwich_check_eig(const fields::MetricField& m, const fields::GridSpec& grid,
                                                std::size_t k,
                                                std::optional<std::vector<double>> reference = std::nullopt);

/// Identity metric on every node.
[[nodiscard]] std::vector<Matrix> flat_metric(const fields::GridSpec& grid);

/// Monte Carlo E_t = int int dist^t: vol(M) times the mean over sources of sum_y dist(x, y)^t w.
[[nodiscard]] double distance_average(std::span<const Matrix> metric, const fields::GridSpec& grid, double t,
                                      std::span<const std::size_t> sources);
[[nodiscard]] double distance_average(const fields::MetricField& m, const fields::GridSpec& grid, double t,
                                      std::size_t sources, std::uint64_t seed);

/// `count` distinct node indices chosen deterministically from `seed`.
[[nodiscard]] std::vector<std::size_t> choose_sources(const fields::GridSpec& grid, std::size_t count,
                                                      std::uint64_t seed);

enum class CertificateKind { Diameter, Eigenvalue };

struct IntegrabilityCertificate {
  bool converges = false;
  double tail_bound = 0.0;  // sum over k >= N plus majorant, when converges; inf if it overflows
  double log_tail_bound = -std::numeric_limits<double>::infinity();  // ln(tail_bound), always finite when converging
  double remainder = 0.0;   // geometric majorant of the unsummed tail
  long last_index = 0;      // last summed index K
  long divergence_witness = -1;  // first k >= N with term_k >= 1 when not converging
  double threshold = 0.0;   // 1 / (8 sigma^2)
};

/// Series certificate for E h(diam) (h(e^y) = e^{c y^2}) or E h(lambda_k)
/// (h(e^{2y}) = e^{c y^2}, shifted by beta = ln(lambda_k(g0)) / 2):
///   term_k = 2n exp(c y_k^2) exp(alpha (k-1)/2 - (k-1)^2 / (8 sigma^2)),
/// y_k = k or k + beta. Converges iff c < 1/(8 sigma^2).
[[nodiscard]] IntegrabilityCertificate integrability_certificate(double c, double sigma_sq, double alpha, int n,
                                                                 CertificateKind kind, long N,
                                                                 double beta = 0.0);

}  // namespace rgeom::geomlab
