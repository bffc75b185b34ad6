#include "rgeom/distances.hpp"

#include <fmt/format.h>

#include "rgeom/errors.hpp"

namespace rgeom::distances {
namespace {

void require_on_grid(const fields::RadialField& r, const fields::GridSpec& grid) {
  if (!(r.grid == grid) || static_cast<std::size_t>(r.b.rows()) != grid.node_count()) {
    throw Error(ErrorCode::ShapeMismatch, "radial field is not defined on this grid");
  }
}

}  // namespace

double omega2_sq(const fields::RadialField& r, const fields::GridSpec& grid) {
  require_on_grid(r, grid);
  return r.b.squaredNorm() * grid.weight();
}

double omega2_sq_coefficients(const fields::Matrix& coefficients) { return coefficients.squaredNorm(); }

double lipschitz_rho_values(const fields::Matrix& b) {
  return b.size() == 0 ? 0.0 : 2.0 * b.cwiseAbs().maxCoeff();
}

double lipschitz_rho(const fields::RadialField& r, const fields::GridSpec& grid) {
  require_on_grid(r, grid);
  return lipschitz_rho_values(r.b);
}

std::vector<double> fiberwise_distance_field(const fields::MetricField& m, const fields::GridSpec& grid) {
  if (!(m.grid == grid)) throw Error(ErrorCode::ShapeMismatch, "metric field is not defined on this grid");
  const auto identity = symspace::SpdDetOne::identity(grid.dim());
  std::vector<double> out;
  out.reserve(m.g1.size());
  for (const auto& g : m.g1) out.push_back(symspace::fiber_distance(identity, g));
  return out;
}

void write_csv(std::ostream& out, const std::vector<DistanceRecord>& records) {
  out << kDistanceCsvSchema << '\n';
  if (!records.empty()) out << "# schedule=" << records.front().schedule << " grid=" << records.front().grid << '\n';
  out << "seed,omega2_sq,rho\n";
  for (const auto& r : records) out << fmt::format("{},{:.17g},{:.17g}\n", r.seed, r.omega2_sq, r.rho);
}

}  // namespace rgeom::distances
