#include "rgeom/geomlab.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <queue>

#include "rgeom/distances.hpp"
#include "rgeom/errors.hpp"
#include "rgeom/rng.hpp"

namespace rgeom::geomlab {
namespace {

std::vector<std::vector<int>> neighbor_offsets(int n) {
  std::vector<std::vector<int>> out;
  std::vector<int> o(static_cast<std::size_t>(n), -1);
  while (true) {
    if (std::any_of(o.begin(), o.end(), [](int c) { return c != 0; })) out.push_back(o);
    int d = n - 1;
    while (d >= 0 && o[static_cast<std::size_t>(d)] == 1) o[static_cast<std::size_t>(d--)] = -1;
    if (d < 0) break;
    ++o[static_cast<std::size_t>(d)];
  }
  return out;
}

void require_metric(std::span<const Matrix> metric, const fields::GridSpec& grid) {
  if (metric.size() != grid.node_count()) {
    throw Error(ErrorCode::ShapeMismatch, "metric has " + std::to_string(metric.size()) +
                                              " nodes, grid has " + std::to_string(grid.node_count()));
  }
  for (const auto& g : metric) {
    if (g.rows() != grid.dim() || g.cols() != grid.dim()) {
      throw Error(ErrorCode::ShapeMismatch, "metric matrices must be n x n");
    }
  }
}

std::string describe(const fields::MetricField& m) {
  std::string s = "radial_seed=" + std::to_string(m.provenance.radial_seed) + ";" + m.provenance.radial_schedule;
  if (m.provenance.angular_seed) s += ";angular_seed=" + std::to_string(*m.provenance.angular_seed);
  return s;
}

}  // namespace

GridGraph::GridGraph(const fields::GridSpec& grid, std::span<const Matrix> metric)
    : nodes_(grid.node_count()) {
  require_metric(metric, grid);
  if (nodes_ > std::numeric_limits<std::uint32_t>::max()) {
    throw Error(ErrorCode::BadParameter, "grid too large for the graph index type");
  }
  const auto offsets = neighbor_offsets(grid.dim());
  degree_ = offsets.size();
  adj_.resize(nodes_ * degree_);
  w_.resize(nodes_ * degree_);
  const double h = grid.spacing();
  std::vector<int> target(static_cast<std::size_t>(grid.dim()));
  Eigen::VectorXd v(grid.dim());
  for (std::size_t p = 0; p < nodes_; ++p) {
    const auto base = grid.multi_index(p);
    for (std::size_t e = 0; e < degree_; ++e) {
      for (std::size_t d = 0; d < target.size(); ++d) {
        target[d] = base[d] + offsets[e][d];
        v(static_cast<Eigen::Index>(d)) = offsets[e][d];
      }
      const std::size_t q = grid.node_of(target);
      const Matrix& g = metric[std::min(p, q)];
      adj_[p * degree_ + e] = static_cast<std::uint32_t>(q);
      w_[p * degree_ + e] = h * std::sqrt(v.dot(g * v));
    }
  }
}

std::vector<double> GridGraph::shortest_paths(std::size_t source) const {
  std::vector<double> dist(nodes_, std::numeric_limits<double>::infinity());
  using Item = std::pair<double, std::uint32_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[source] = 0.0;
  heap.emplace(0.0, static_cast<std::uint32_t>(source));
  while (!heap.empty()) {
    const auto [d, p] = heap.top();
    heap.pop();
    if (d > dist[p]) continue;
    const std::size_t row = static_cast<std::size_t>(p) * degree_;
    for (std::size_t e = 0; e < degree_; ++e) {
      const std::uint32_t q = adj_[row + e];
      const double nd = d + w_[row + e];
      if (nd < dist[q]) {
        dist[q] = nd;
        heap.emplace(nd, q);
      }
    }
  }
  return dist;
}

DiameterReport discrete_diameter(std::span<const Matrix> metric, const fields::GridSpec& grid) {
  const GridGraph graph(grid, metric);
  DiameterReport report;
  std::vector<std::size_t> sources;
  if (graph.node_count() <= kExactDiameterNodeLimit) {
    sources.resize(graph.node_count());
    for (std::size_t i = 0; i < sources.size(); ++i) sources[i] = i;
  } else {
    report.exact = false;
    const std::size_t stride = graph.node_count() / kSampledDiameterSources;
    for (std::size_t i = 0; i < kSampledDiameterSources; ++i) sources.push_back(i * stride);
  }
  for (std::size_t s : sources) {
    const auto dist = graph.shortest_paths(s);
    report.value = std::max(report.value, *std::max_element(dist.begin(), dist.end()));
  }
  report.sources = sources.size();
  return report;
}

DiameterReport discrete_diameter(const fields::MetricField& m, const fields::GridSpec& grid) {
  const auto metric = m.metric_matrices();
  return discrete_diameter(metric, grid);
}

SparseMatrix stiffness_matrix(std::span<const Matrix> metric, const fields::GridSpec& grid) {
  require_metric(metric, grid);
  const int n = grid.dim();
  const std::size_t nodes = grid.node_count();
  std::vector<Matrix> inverse;
  inverse.reserve(nodes);
  for (const auto& g : metric) inverse.push_back(g.inverse());

  // E maps nodal values (base, base + e_1, ..., base + e_n) to forward differences.
  Matrix E = Matrix::Zero(n, n + 1);
  E.col(0).setConstant(-1.0);
  E.rightCols(n).setIdentity();
  const double scale = grid.weight() / (grid.spacing() * grid.spacing());

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(nodes * static_cast<std::size_t>((n + 1) * (n + 1)));
  std::vector<std::size_t> local(static_cast<std::size_t>(n + 1));
  std::vector<int> idx(static_cast<std::size_t>(n));
  const std::size_t corners = std::size_t{1} << n;
  for (std::size_t p = 0; p < nodes; ++p) {
    const auto base = grid.multi_index(p);
    Matrix G = Matrix::Zero(n, n);
    for (std::size_t c = 0; c < corners; ++c) {
      for (int d = 0; d < n; ++d) idx[static_cast<std::size_t>(d)] = base[static_cast<std::size_t>(d)] + static_cast<int>((c >> d) & 1U);
      G += inverse[grid.node_of(idx)];
    }
    G /= static_cast<double>(corners);
    local[0] = p;
    for (int d = 0; d < n; ++d) {
      idx = base;
      ++idx[static_cast<std::size_t>(d)];
      local[static_cast<std::size_t>(d + 1)] = grid.node_of(idx);
    }
    const Matrix K = scale * E.transpose() * G * E;
    for (int a = 0; a <= n; ++a) {
      for (int b = 0; b <= n; ++b) {
        triplets.emplace_back(static_cast<Eigen::Index>(local[static_cast<std::size_t>(a)]),
                              static_cast<Eigen::Index>(local[static_cast<std::size_t>(b)]), K(a, b));
      }
    }
  }
  SparseMatrix K(static_cast<Eigen::Index>(nodes), static_cast<Eigen::Index>(nodes));
  K.setFromTriplets(triplets.begin(), triplets.end());
  return K;
}

DiscreteSpectrumReport discrete_spectrum(std::span<const Matrix> metric, const fields::GridSpec& grid,
                                         std::size_t k, const SpectrumOptions& options) {
  if (k < 1) throw Error(ErrorCode::BadParameter, "need at least one eigenvalue");
  if (grid.per_axis() < 8) throw Error(ErrorCode::BadParameter, "discrete spectrum needs m >= 8");
  const auto nodes = static_cast<Eigen::Index>(grid.node_count());
  const auto block = static_cast<Eigen::Index>(k + std::max(k, options.extra_vectors));
  if (block >= nodes) throw Error(ErrorCode::BadParameter, "too many eigenvalues requested for this grid");

  // Mass form is w * I, so the generalized problem reduces to A = K / w.
  const SparseMatrix A = stiffness_matrix(metric, grid) / grid.weight();
  SparseMatrix shifted = A;
  for (Eigen::Index i = 0; i < nodes; ++i) shifted.coeffRef(i, i) += options.shift;
  Eigen::SimplicialLDLT<SparseMatrix> solver(shifted);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::ConvergenceFailure, "factorization of the shifted stiffness matrix failed");
  }

  auto deflate = [](Matrix& X) { X.rowwise() -= X.colwise().mean(); };
  Matrix X(nodes, block);
  for (Eigen::Index i = 0; i < nodes; ++i) {
    for (Eigen::Index j = 0; j < block; ++j) {
      X(i, j) = rng::normal(0x5eed, rng::Stream::TestHook, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j));
    }
  }
  deflate(X);

  DiscreteSpectrumReport report;
  report.grid = grid.id();
  for (int it = 1; it <= options.max_iterations; ++it) {
    Matrix Y = solver.solve(X);
    deflate(Y);
    Eigen::HouseholderQR<Matrix> qr(Y);
    const Matrix Q = qr.householderQ() * Matrix::Identity(nodes, block);
    const Matrix AQ = A * Q;
    Matrix H = Q.transpose() * AQ;
    H = 0.5 * (H + H.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> ritz(H);
    X = Q * ritz.eigenvectors();
    const Matrix AX = AQ * ritz.eigenvectors();
    bool converged = true;
    for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(k); ++j) {
      const double theta = ritz.eigenvalues()(j);
      const double res = (AX.col(j) - theta * X.col(j)).norm();
      if (!(res <= options.residual_tol * std::abs(theta))) {
        converged = false;
        break;
      }
    }
    if (converged) {
      report.iterations = it;
      for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(k); ++j) report.eigenvalues.push_back(ritz.eigenvalues()(j));
      return report;
    }
  }
  throw Error(ErrorCode::ConvergenceFailure,
              "subspace iteration did not converge in " + std::to_string(options.max_iterations) + " iterations");
}

DiscreteSpectrumReport discrete_spectrum(const fields::MetricField& m, const fields::GridSpec& grid,
                                         std::size_t k, const SpectrumOptions& options) {
  const auto metric = m.metric_matrices();
  auto report = discrete_spectrum(metric, grid, k, options);
  report.provenance = describe(m);
  return report;
}

double flat_symbol(std::span<const int> k, int m) {
  double sum = 0.0;
  for (int c : k) {
    const double s = static_cast<double>(m) / std::numbers::pi * std::sin(std::numbers::pi * c / m);
    sum += s * s;
  }
  return sum;
}

std::vector<Matrix> flat_metric(const fields::GridSpec& grid) {
  return std::vector<Matrix>(grid.node_count(), Matrix::Identity(grid.dim(), grid.dim()));
}

SandwichResult sandwich_check_diam(const fields::MetricField& m, const fields::GridSpec& grid,
                                   std::optional<double> reference_diameter) {
  SandwichResult r;
  r.rho_hat = distances::lipschitz_rho_values(m.b);
  const double d0 = reference_diameter ? *reference_diameter : discrete_diameter(flat_metric(grid), grid).value;
  const double d1 = discrete_diameter(m, grid).value;
  const double ratio = d1 / d0;
  r.ratios = {ratio};
  r.lower = std::exp(-r.rho_hat);
  r.upper = std::exp(r.rho_hat);
  r.pass = ratio >= r.lower - kSandwichSlack && ratio <= r.upper + kSandwichSlack;
  return r;
}

SandwichResult sandwich_check_eig(const fields::MetricField& m, const fields::GridSpec& grid, std::size_t k,
                                  std::optional<std::vector<double>> reference) {
  SandwichResult r;
  r.rho_hat = distances::lipschitz_rho_values(m.b);
  const std::vector<double> l0 =
      reference ? *reference : discrete_spectrum(flat_metric(grid), grid, k).eigenvalues;
  if (l0.size() < k) throw Error(ErrorCode::ShapeMismatch, "reference spectrum has fewer than k eigenvalues");
  const auto l1 = discrete_spectrum(m, grid, k).eigenvalues;
  r.lower = std::exp(-2.0 * r.rho_hat);
  r.upper = std::exp(2.0 * r.rho_hat);
  for (std::size_t j = 0; j < k; ++j) {
    const double ratio = l1[j] / l0[j];
    r.ratios.push_back(ratio);
    if (ratio < r.lower - kSandwichSlack || ratio > r.upper + kSandwichSlack) r.pass = false;
  }
  return r;
}

std::vector<std::size_t> choose_sources(const fields::GridSpec& grid, std::size_t count, std::uint64_t seed) {
  const std::size_t nodes = grid.node_count();
  if (count < 1 || count > nodes) throw Error(ErrorCode::BadParameter, "source count must be in [1, node count]");
  std::vector<std::pair<std::uint64_t, std::size_t>> keyed;
  keyed.reserve(nodes);
  for (std::size_t p = 0; p < nodes; ++p) keyed.emplace_back(rng::key(seed, rng::Stream::Sources, p, 0), p);
  std::partial_sort(keyed.begin(), keyed.begin() + static_cast<std::ptrdiff_t>(count), keyed.end());
  std::vector<std::size_t> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(keyed[i].second);
  std::sort(out.begin(), out.end());
  return out;
}

double distance_average(std::span<const Matrix> metric, const fields::GridSpec& grid, double t,
                        std::span<const std::size_t> sources) {
  if (t < 0.0) throw Error(ErrorCode::BadParameter, "distance exponent t must be non-negative");
  if (sources.empty()) throw Error(ErrorCode::BadParameter, "need at least one source");
  const GridGraph graph(grid, metric);
  const double w = grid.weight();
  double total = 0.0;
  for (std::size_t s : sources) {
    const auto dist = graph.shortest_paths(s);
    double row = 0.0;
    for (double d : dist) row += (t == 0.0 ? 1.0 : std::pow(d, t)) * w;
    total += row;
  }
  return grid.volume() * total / static_cast<double>(sources.size());
}

double distance_average(const fields::MetricField& m, const fields::GridSpec& grid, double t, std::size_t sources,
                        std::uint64_t seed) {
  const auto chosen = choose_sources(grid, sources, seed);
  const auto metric = m.metric_matrices();
  return distance_average(metric, grid, t, chosen);
}

IntegrabilityCertificate integrability_certificate(double c, double sigma_sq, double alpha, int n,
                                                   CertificateKind kind, long N, double beta) {
  if (c < 0.0 || !(sigma_sq > 0.0) || alpha < 0.0 || n < 1 || N < 1) {
    throw Error(ErrorCode::BadParameter, "certificate needs c >= 0, sigma^2 > 0, alpha >= 0, n >= 1, N >= 1");
  }
  IntegrabilityCertificate cert;
  cert.threshold = 1.0 / (8.0 * sigma_sq);
  cert.converges = c < cert.threshold;
  const double shift = kind == CertificateKind::Eigenvalue ? beta : 0.0;
  auto log_term = [&](long k) {
    const double y = static_cast<double>(k) + shift;
    const double km1 = static_cast<double>(k - 1);
    return std::log(2.0 * n) + c * y * y + 0.5 * alpha * km1 - km1 * km1 / (8.0 * sigma_sq);
  };

  constexpr long kMaxTerms = 100'000'000;
  if (!cert.converges) {
    for (long k = N; k < N + kMaxTerms; ++k) {
      if (log_term(k) >= 0.0) {
        cert.divergence_witness = k;
        break;
      }
    }
    cert.tail_bound = std::numeric_limits<double>::infinity();
    return cert;
  }

  // log_term is concave, so successive ratios term_{k+1}/term_k decrease and
  // the tail past K is majorized by the geometric series with ratio r_{K+1}.
  // Near the threshold the peak term is around e^{1/(64 sigma^4 gap)}, past
  // binary64 range, so the sum is carried as a logarithm.
  const double log_target = std::log(1e-12);
  double log_sum = -std::numeric_limits<double>::infinity();
  for (long k = N; k < N + kMaxTerms; ++k) {
    const double lt = log_term(k);
    const double hi = std::max(log_sum, lt);
    log_sum = hi + std::log(std::exp(log_sum - hi) + std::exp(lt - hi));
    const double log_ratio = log_term(k + 2) - log_term(k + 1);
    if (log_ratio < 0.0) {
      const double log_majorant = log_term(k + 1) - std::log(-std::expm1(log_ratio));
      if (log_majorant < log_target) {
        cert.last_index = k;
        cert.remainder = std::exp(log_majorant);
        cert.log_tail_bound = log_sum + std::log1p(std::exp(log_majorant - log_sum));
        cert.tail_bound = std::exp(cert.log_tail_bound);
        return cert;
      }
    }
  }
  throw Error(ErrorCode::ConvergenceFailure, "certificate series did not reach its remainder target");
}

}  // namespace rgeom::geomlab
