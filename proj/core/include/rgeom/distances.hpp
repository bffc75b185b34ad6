#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "rgeom/fields.hpp"

namespace rgeom::distances {

struct DistanceRecord {
  std::uint64_t seed = 0;
  double omega2_sq = 0.0;
  double rho = 0.0;
  std::string schedule;
  std::string grid;
};

/// Grid quadrature of sum_i b_i(x)^2 against the flat volume form.
[[nodiscard]] double omega2_sq(const fields::RadialField& r, const fields::GridSpec& grid);

/// Coefficient-space value sum_j |beta_j pi_n xi_j|^2 (equal to the quadrature
/// whenever the grid resolves the basis).
[[nodiscard]] double omega2_sq_coefficients(const fields::Matrix& coefficients);

/// 2 * max over nodes and components of |b_i(x)|.
[[nodiscard]] double lipschitz_rho(const fields::RadialField& r, const fields::GridSpec& grid);

/// rho of raw node values (node_count x n).
[[nodiscard]] double lipschitz_rho_values(const fields::Matrix& b);

/// Per node fiber_distance(I, g1(x)).
[[nodiscard]] std::vector<double> fiberwise_distance_field(const fields::MetricField& m,
                                                           const fields::GridSpec& grid);

inline constexpr const char* kDistanceCsvSchema = "# rgeom-distances v1";

/// Writes the schema comment, a descriptor comment (schedule and grid of the
/// first record), a header row and one row per record.
void write_csv(std::ostream& out, const std::vector<DistanceRecord>& records);

}  // namespace rgeom::distances
