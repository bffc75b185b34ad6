#pragma once

#include <Eigen/Dense>

#include <vector>

namespace rgeom::symspace {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kTraceTol = 1e-12;
inline constexpr double kDetTol = 1e-10;
inline constexpr double kOrthoTol = 1e-10;

/// Real symmetric matrix. The upper triangle is authoritative; the lower
/// triangle is mirrored from it so entries(i,j) == entries(j,i) bit-for-bit.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(const Matrix& m);

  [[nodiscard]] const Matrix& matrix() const noexcept { return m_; }
  [[nodiscard]] Eigen::Index dim() const noexcept { return m_.rows(); }
  [[nodiscard]] double trace() const { return m_.trace(); }

 private:
  Matrix m_;
};

/// Symmetric positive-definite matrix of determinant one.
class SpdDetOne {
 public:
  SpdDetOne() = default;

  /// Validates symmetry, positivity and |det - 1| <= 1e-10.
  static SpdDetOne from_matrix(const Matrix& m);
  /// Symmetrizes and rescales a positive-definite matrix onto det = 1.
  static SpdDetOne normalized(const Matrix& m);
  static SpdDetOne identity(Eigen::Index n);

  [[nodiscard]] const Matrix& matrix() const noexcept { return m_; }
  [[nodiscard]] Eigen::Index dim() const noexcept { return m_.rows(); }

 private:
  explicit SpdDetOne(Matrix m) : m_(std::move(m)) {}
  Matrix m_;
};

/// Trace-free diagonal, i.e. an element of the Cartan subalgebra.
class TracelessDiag {
 public:
  TracelessDiag() = default;
  /// Throws NonZeroTrace if |sum b| > 1e-12.
  explicit TracelessDiag(Vector b);

  [[nodiscard]] const Vector& values() const noexcept { return b_; }
  [[nodiscard]] Eigen::Index dim() const noexcept { return b_.size(); }

 private:
  Vector b_;
};

/// Antisymmetric matrix stored as its n(n-1)/2 strict upper-triangle entries,
/// row-major: (0,1), (0,2), ..., (0,n-1), (1,2), ...
class SkewMatrix {
 public:
  SkewMatrix() = default;
  SkewMatrix(Eigen::Index n, Vector upper);
  static SkewMatrix from_matrix(const Matrix& m);

  [[nodiscard]] Matrix matrix() const;
  [[nodiscard]] const Vector& upper() const noexcept { return upper_; }
  [[nodiscard]] Eigen::Index dim() const noexcept { return n_; }

 private:
  Eigen::Index n_ = 0;
  Vector upper_;
};

[[nodiscard]] constexpr Eigen::Index skew_size(Eigen::Index n) noexcept { return n * (n - 1) / 2; }

struct CartanFactors {
  Matrix k;          // orthogonal, det +1
  TracelessDiag b;   // sorted non-increasing
};

[[nodiscard]] SpdDetOne spd_exp(const SymMatrix& x);
[[nodiscard]] SymMatrix spd_log(const SpdDetOne& p);

/// P = k exp(2b) k^T with b in the closed Weyl chamber b_1 >= ... >= b_n.
[[nodiscard]] CartanFactors cartan_decompose(const SpdDetOne& p);

/// Fiber distance normalized so that d(I, k e^{2b} k^T) = |b|_2, i.e.
/// (1/4 sum_i log^2 mu_i)^{1/2} over the eigenvalues mu of P^{-1} Q.
[[nodiscard]] double fiber_distance(const SpdDetOne& p, const SpdDetOne& q);

/// Eigenvalues of P^{-1} Q computed via the symmetric pencil, ascending.
[[nodiscard]] Vector pencil_eigenvalues(const Matrix& p, const Matrix& q);

/// h^T P h, renormalized onto det = 1. Throws NotUnimodular if |det h - 1| > 1e-10.
[[nodiscard]] SpdDetOne congruence_act(const Matrix& h, const SpdDetOne& p);

/// Rotation exp(u) of a skew matrix by scaling and squaring, re-orthogonalized
/// with one polar step when drift exceeds 1e-12.
[[nodiscard]] Matrix skew_exp(const Matrix& u);

/// Symmetric eigendecomposition with ascending eigenvalues (tridiagonal QL).
struct SymEigen {
  Vector values;
  Matrix vectors;
};
[[nodiscard]] SymEigen sym_eigen(const Matrix& m);

}  // namespace rgeom::symspace
