#pragma once

#include <nlohmann/json.hpp>

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace rgeom::spectrum {

// Reference manifold: the flat torus R^n / (2 pi Z)^n with the identity metric
// in coordinates. Its real Laplace eigenfunctions are
//   sqrt(2 / (2 pi)^n) cos(k.x),  sqrt(2 / (2 pi)^n) sin(k.x),
// one pair per canonical lattice vector k != 0, with eigenvalue |k|^2.

enum class Branch { Cos = 0, Sin = 1 };

struct EigenMode {
  std::size_t index = 0;        // 1-based position in the ordered basis
  std::vector<int> lattice;     // canonical: first nonzero component positive
  Branch branch = Branch::Cos;
  int lambda = 0;               // |k|^2
  double norm_const = 0.0;      // sqrt(2 / (2 pi)^n)

  [[nodiscard]] double eval(std::span<const double> x) const;
};

class SpectralBasis {
 public:
  SpectralBasis(int dim, std::vector<EigenMode> modes);

  [[nodiscard]] int dim() const noexcept { return dim_; }
  [[nodiscard]] std::size_t size() const noexcept { return modes_.size(); }
  [[nodiscard]] const std::vector<EigenMode>& modes() const noexcept { return modes_; }
  [[nodiscard]] const EigenMode& mode(std::size_t j) const { return modes_.at(j); }
  [[nodiscard]] int max_abs_component() const noexcept { return max_abs_component_; }
  [[nodiscard]] int max_lambda() const noexcept;

  /// Short provenance id, e.g. "torus3:J=256:lmax=16".
  [[nodiscard]] std::string id() const;

 private:
  int dim_;
  std::vector<EigenMode> modes_;
  int max_abs_component_ = 0;
};

/// Smallest eigenspace-complete basis with at least j_min modes.
[[nodiscard]] SpectralBasis torus_basis(int n, std::size_t j_min);

/// All modes with lambda <= lambda_max (complete eigenspaces by construction).
[[nodiscard]] SpectralBasis torus_basis_through(int n, int lambda_max);

/// Canonical lattice vectors with |k|^2 == lambda, ascending lexicographic.
[[nodiscard]] std::vector<std::vector<int>> canonical_vectors(int n, int lambda);

[[nodiscard]] nlohmann::json to_json(const SpectralBasis& basis);

class DecaySchedule {
 public:
  enum class Kind { PowerLaw, HeatKernel };

  /// beta = lambda^{-s}; throws BadParameter unless s > 0.
  static DecaySchedule power_law(double s);
  /// beta = exp(-t lambda); throws BadParameter unless t > 0.
  static DecaySchedule heat_kernel(double t);
  /// Parses "power:s=2" or "heat:t=0.5".
  static DecaySchedule parse(const std::string& descriptor);

  [[nodiscard]] Kind kind() const noexcept { return kind_; }
  [[nodiscard]] double parameter() const noexcept { return param_; }
  [[nodiscard]] double operator()(double lambda) const;
  [[nodiscard]] std::string descriptor() const;

 private:
  DecaySchedule(Kind kind, double param) : kind_(kind), param_(param) {}
  Kind kind_;
  double param_;
};

[[nodiscard]] std::vector<double> decay_eval(const DecaySchedule& schedule, const SpectralBasis& basis);

/// Smallest power-law exponent for which the radial series is a.s. C^q.
/// Admissible schedules need s strictly above this value.
[[nodiscard]] double regularity_floor(int q, int n);

}  // namespace rgeom::spectrum
