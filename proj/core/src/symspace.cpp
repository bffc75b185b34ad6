#include "rgeom/symspace.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rgeom/errors.hpp"

namespace rgeom::symspace {
namespace {

Matrix mirror_upper(const Matrix& m) {
  Matrix out = m;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < i; ++j) out(i, j) = m(j, i);
  }
  return out;
}

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw Error(ErrorCode::ShapeMismatch, std::string(what) + " must be a non-empty square matrix");
  }
}

// Determinant of an SPD matrix from its Cholesky factor; throws if not PD.
double spd_determinant(const Matrix& sym) {
  // extended precision: at condition numbers near 1e7 the binary64 factorization alone is off by ~1e-10
  using Wide = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  Eigen::LLT<Wide> llt(sym.cast<long double>());
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::NotPositiveDefinite, "matrix is not positive definite");
  }
  long double det = 1.0L;
  for (Eigen::Index i = 0; i < sym.rows(); ++i) det *= llt.matrixL()(i, i) * llt.matrixL()(i, i);
  return static_cast<double>(det);
}

}  // namespace

SymMatrix::SymMatrix(const Matrix& m) {
  require_square(m, "SymMatrix");
  m_ = mirror_upper(m);
}

SpdDetOne SpdDetOne::from_matrix(const Matrix& m) {
  require_square(m, "SpdDetOne");
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff())) {
    throw Error(ErrorCode::ShapeMismatch, "SpdDetOne input is not symmetric");
  }
  Matrix sym = mirror_upper(m);
  const double det = spd_determinant(sym);
  if (std::abs(det - 1.0) > kDetTol) {
    throw Error(ErrorCode::NotUnimodular, "determinant " + std::to_string(det) + " is not 1");
  }
  return SpdDetOne(std::move(sym));
}

SpdDetOne SpdDetOne::normalized(const Matrix& m) {
  require_square(m, "SpdDetOne");
  Matrix sym = mirror_upper(0.5 * (m + m.transpose()));
  sym *= std::pow(spd_determinant(sym), -1.0 / static_cast<double>(sym.rows()));
  return SpdDetOne(mirror_upper(sym));
}

SpdDetOne SpdDetOne::identity(Eigen::Index n) { return SpdDetOne(Matrix::Identity(n, n)); }

TracelessDiag::TracelessDiag(Vector b) : b_(std::move(b)) {
  if (std::abs(b_.sum()) > kTraceTol) {
    throw Error(ErrorCode::NonZeroTrace, "diagonal entries must sum to zero");
  }
}

SkewMatrix::SkewMatrix(Eigen::Index n, Vector upper) : n_(n), upper_(std::move(upper)) {
  if (upper_.size() != skew_size(n)) {
    throw Error(ErrorCode::ShapeMismatch, "skew matrix needs n(n-1)/2 upper entries");
  }
}

SkewMatrix SkewMatrix::from_matrix(const Matrix& m) {
  require_square(m, "SkewMatrix");
  const Eigen::Index n = m.rows();
  Vector upper(skew_size(n));
  Eigen::Index c = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) upper(c++) = m(i, j);
  }
  return SkewMatrix(n, std::move(upper));
}

Matrix SkewMatrix::matrix() const {
  Matrix m = Matrix::Zero(n_, n_);
  Eigen::Index c = 0;
  for (Eigen::Index i = 0; i < n_; ++i) {
    for (Eigen::Index j = i + 1; j < n_; ++j) {
      m(i, j) = upper_(c);
      m(j, i) = -upper_(c);
      ++c;
    }
  }
  return m;
}

SymEigen sym_eigen(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::ConvergenceFailure, "symmetric eigensolver failed");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

SpdDetOne spd_exp(const SymMatrix& x) {
  const double tr = x.trace();
  if (std::abs(tr) > kTraceTol) {
    throw Error(ErrorCode::NonZeroTrace, "spd_exp needs a trace-free argument, trace = " + std::to_string(tr));
  }
  const SymEigen eig = sym_eigen(x.matrix());
  const double shift = eig.values.mean();
  const Vector e = (eig.values.array() - shift).exp().matrix();
  return SpdDetOne::normalized(eig.vectors * e.asDiagonal() * eig.vectors.transpose());
}

SymMatrix spd_log(const SpdDetOne& p) {
  const SymEigen eig = sym_eigen(p.matrix());
  if (eig.values.minCoeff() <= 0.0) {
    throw Error(ErrorCode::NotPositiveDefinite, "spd_log of a matrix with non-positive eigenvalue");
  }
  const Vector l = eig.values.array().log().matrix();
  return SymMatrix(eig.vectors * l.asDiagonal() * eig.vectors.transpose());
}

CartanFactors cartan_decompose(const SpdDetOne& p) {
  const SymEigen eig = sym_eigen(p.matrix());
  const Eigen::Index n = p.dim();
  Matrix k(n, n);
  Vector b(n);
  // Eigen returns ascending eigenvalues; reverse into the Weyl chamber b_1 >= ... >= b_n.
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index src = n - 1 - i;
    k.col(i) = eig.vectors.col(src);
    b(i) = 0.5 * std::log(eig.values(src));
  }
  b.array() -= b.mean();
  if (k.determinant() < 0.0) k.col(n - 1) = -k.col(n - 1);
  return {std::move(k), TracelessDiag(std::move(b))};
}

Vector pencil_eigenvalues(const Matrix& p, const Matrix& q) {
  Eigen::LLT<Matrix> llt(p);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::NotPositiveDefinite, "fiber distance: first argument is not positive definite");
  }
  const auto l = llt.matrixL();
  Matrix c = l.solve(q);
  c = l.solve(c.transpose()).transpose();
  c = 0.5 * (c + c.transpose());
  Vector mu = sym_eigen(c).values;
  if (mu.minCoeff() <= 0.0) {
    throw Error(ErrorCode::NotPositiveDefinite, "fiber distance: second argument is not positive definite");
  }
  return mu;
}

double fiber_distance(const SpdDetOne& p, const SpdDetOne& q) {
  if (p.dim() != q.dim()) throw Error(ErrorCode::ShapeMismatch, "fiber distance of different dimensions");
  if (p.matrix() == q.matrix()) return 0.0;
  // Fixed argument order makes the result bit-symmetric.
  const auto& a = p.matrix();
  const auto& b = q.matrix();
  const bool swap = std::lexicographical_compare(b.data(), b.data() + b.size(), a.data(), a.data() + a.size());
  const Vector mu = swap ? pencil_eigenvalues(b, a) : pencil_eigenvalues(a, b);
  return std::sqrt(0.25 * mu.array().log().square().sum());
}

SpdDetOne congruence_act(const Matrix& h, const SpdDetOne& p) {
  require_square(h, "congruence_act");
  if (h.rows() != p.dim()) throw Error(ErrorCode::ShapeMismatch, "congruence_act dimension mismatch");
  const double det = h.determinant();
  if (std::abs(det - 1.0) > kDetTol) {
    throw Error(ErrorCode::NotUnimodular, "congruence_act needs det h = 1, got " + std::to_string(det));
  }
  return SpdDetOne::normalized(h.transpose() * p.matrix() * h);
}

Matrix skew_exp(const Matrix& u) {
  require_square(u, "skew_exp");
  const Eigen::Index n = u.rows();
  const double norm = u.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.25) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.25)));
  const Matrix a = u / std::ldexp(1.0, squarings);

  Matrix result = Matrix::Identity(n, n);
  Matrix term = Matrix::Identity(n, n);
  for (int m = 1; m <= 30; ++m) {
    term = term * a / static_cast<double>(m);
    result += term;
    if (term.cwiseAbs().maxCoeff() < 1e-18) break;
  }
  for (int s = 0; s < squarings; ++s) result = result * result;

  const double drift = (result.transpose() * result - Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
  if (drift > 1e-12) {
    result = 0.5 * (result + result.inverse().transpose());
  }
  return result;
}

}  // namespace rgeom::symspace
