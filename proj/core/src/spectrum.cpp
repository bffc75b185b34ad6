#include "rgeom/spectrum.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>

#include "rgeom/errors.hpp"

namespace rgeom::spectrum {
namespace {

double torus_norm_const(int n) {
  return std::sqrt(2.0 / std::pow(2.0 * std::numbers::pi, n));
}

bool is_canonical(const std::vector<int>& k) {
  for (int c : k) {
    if (c != 0) return c > 0;
  }
  return false;
}

void enumerate(int n, int lambda, int bound, std::vector<int>& current, int partial,
               std::vector<std::vector<int>>& out) {
  if (static_cast<int>(current.size()) == n) {
    if (partial == lambda && is_canonical(current)) out.push_back(current);
    return;
  }
  for (int c = -bound; c <= bound; ++c) {
    const int next = partial + c * c;
    if (next > lambda) continue;
    current.push_back(c);
    enumerate(n, lambda, bound, current, next, out);
    current.pop_back();
  }
}

void append_eigenspace(int n, int lambda, std::vector<EigenMode>& modes) {
  const double norm = torus_norm_const(n);
  for (auto& k : canonical_vectors(n, lambda)) {
    for (Branch br : {Branch::Cos, Branch::Sin}) {
      EigenMode m;
      m.index = modes.size() + 1;
      m.lattice = k;
      m.branch = br;
      m.lambda = lambda;
      m.norm_const = norm;
      modes.push_back(std::move(m));
    }
  }
}

void require_dim(int n) {
  if (n < 3) throw Error(ErrorCode::DimensionTooSmall, "torus dimension must be at least 3");
}

}  // namespace

double EigenMode::eval(std::span<const double> x) const {
  double phase = 0.0;
  for (std::size_t i = 0; i < lattice.size(); ++i) phase += lattice[i] * x[i];
  return norm_const * (branch == Branch::Cos ? std::cos(phase) : std::sin(phase));
}

SpectralBasis::SpectralBasis(int dim, std::vector<EigenMode> modes) : dim_(dim), modes_(std::move(modes)) {
  for (const auto& m : modes_) {
    for (int c : m.lattice) max_abs_component_ = std::max(max_abs_component_, std::abs(c));
  }
}

int SpectralBasis::max_lambda() const noexcept { return modes_.empty() ? 0 : modes_.back().lambda; }

std::string SpectralBasis::id() const {
  return "torus" + std::to_string(dim_) + ":J=" + std::to_string(modes_.size()) +
         ":lmax=" + std::to_string(max_lambda());
}

std::vector<std::vector<int>> canonical_vectors(int n, int lambda) {
  std::vector<std::vector<int>> out;
  if (lambda <= 0) return out;
  const int bound = static_cast<int>(std::floor(std::sqrt(static_cast<double>(lambda))));
  std::vector<int> current;
  enumerate(n, lambda, bound, current, 0, out);
  std::sort(out.begin(), out.end());
  return out;
}

SpectralBasis torus_basis(int n, std::size_t j_min) {
  require_dim(n);
  if (j_min < 1) throw Error(ErrorCode::BadParameter, "basis needs at least one mode");
  std::vector<EigenMode> modes;
  for (int lambda = 1; modes.size() < j_min; ++lambda) append_eigenspace(n, lambda, modes);
  return SpectralBasis(n, std::move(modes));
}

SpectralBasis torus_basis_through(int n, int lambda_max) {
  require_dim(n);
  if (lambda_max < 1) throw Error(ErrorCode::BadParameter, "lambda_max must be at least 1");
  std::vector<EigenMode> modes;
  for (int lambda = 1; lambda <= lambda_max; ++lambda) append_eigenspace(n, lambda, modes);
  return SpectralBasis(n, std::move(modes));
}

nlohmann::json to_json(const SpectralBasis& basis) {
  nlohmann::json modes = nlohmann::json::array();
  for (const auto& m : basis.modes()) {
    modes.push_back({{"j", m.index},
                     {"k", m.lattice},
                     {"branch", m.branch == Branch::Cos ? "cos" : "sin"},
                     {"lambda", m.lambda}});
  }
  return {{"manifold", "flat_torus"},
          {"n", basis.dim()},
          {"J", basis.size()},
          {"norm_const", basis.size() ? basis.mode(0).norm_const : 0.0},
          {"modes", std::move(modes)}};
}

DecaySchedule DecaySchedule::power_law(double s) {
  if (!(s > 0.0)) throw Error(ErrorCode::BadParameter, "power-law exponent s must be positive");
  return DecaySchedule(Kind::PowerLaw, s);
}

DecaySchedule DecaySchedule::heat_kernel(double t) {
  if (!(t > 0.0)) throw Error(ErrorCode::BadParameter, "heat-kernel time t must be positive");
  return DecaySchedule(Kind::HeatKernel, t);
}

DecaySchedule DecaySchedule::parse(const std::string& descriptor) {
  const auto colon = descriptor.find(':');
  const auto eq = descriptor.find('=');
  if (colon == std::string::npos || eq == std::string::npos || eq < colon) {
    throw Error(ErrorCode::ConfigError, "schedule must look like power:s=2 or heat:t=0.5, got '" + descriptor + "'");
  }
  const std::string kind = descriptor.substr(0, colon);
  const std::string key = descriptor.substr(colon + 1, eq - colon - 1);
  const std::string value = descriptor.substr(eq + 1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw Error(ErrorCode::ConfigError, "bad schedule parameter '" + value + "'");
  }
  if (kind == "power" && key == "s") return power_law(v);
  if (kind == "heat" && key == "t") return heat_kernel(v);
  throw Error(ErrorCode::ConfigError, "unknown schedule '" + descriptor + "'");
}

double DecaySchedule::operator()(double lambda) const {
  return kind_ == Kind::PowerLaw ? std::pow(lambda, -param_) : std::exp(-param_ * lambda);
}

std::string DecaySchedule::descriptor() const {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, param_);
  return (kind_ == Kind::PowerLaw ? "power:s=" : "heat:t=") + std::string(buf, res.ptr);
}

std::vector<double> decay_eval(const DecaySchedule& schedule, const SpectralBasis& basis) {
  std::vector<double> beta;
  beta.reserve(basis.size());
  for (const auto& m : basis.modes()) beta.push_back(schedule(static_cast<double>(m.lambda)));
  return beta;
}

double regularity_floor(int q, int n) { return 0.5 * q + 0.25 * n; }

}  // namespace rgeom::spectrum
