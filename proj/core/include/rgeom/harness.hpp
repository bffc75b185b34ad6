#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rgeom/fields.hpp"
#include "rgeom/geomlab.hpp"
#include "rgeom/spectrum.hpp"

namespace rgeom::harness {

inline constexpr int kConfigSchemaVersion = 1;

struct ExperimentConfig {
  std::string experiment = "law-match";
  int n = 3;
  int m = 16;
  std::optional<std::size_t> j_min;  // basis size floor; overrides lambda_max when set
  int lambda_max = 16;
  std::string schedule = "power:s=2";
  std::optional<std::string> schedule2;  // angular decay; defaults to schedule where used
  std::size_t samples = 100000;
  std::uint64_t seed = 20240601;
  std::filesystem::path out = "rgeom-out";
  int q = 0;                 // required a.s. continuity order
  std::size_t k = 6;         // eigenvalues for sandwich runs
  std::size_t r_points = 40;
  std::vector<double> r_grid;  // explicit R grid; empty means automatic
  bool angular = false;      // include the angular part in statistics runs
  unsigned threads = 0;      // 0: hardware concurrency

  /// Throws ConfigError on invalid fields or a schedule below the regularity floor.
  void validate() const;

  [[nodiscard]] nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& doc);
  static ExperimentConfig load(const std::filesystem::path& path);
};

/// Resolved objects shared by the experiments.
struct Setup {
  spectrum::SpectralBasis basis;
  fields::GridSpec grid;
  std::vector<double> betas;
  std::vector<double> deltas;
  std::string schedule_id;
  std::string schedule2_id;
};

[[nodiscard]] Setup make_setup(const ExperimentConfig& cfg);

enum class Verdict { Pass, Fail, None };
[[nodiscard]] std::string to_string(Verdict v);

struct EmittedFile {
  std::string path;  // relative to the output directory
  std::string sha256;
  std::uintmax_t bytes = 0;
};

struct RunManifest {
  nlohmann::json config;
  std::string code_version;
  double wall_clock_seconds = 0.0;
  nlohmann::json summary;
  Verdict verdict = Verdict::None;
  std::vector<EmittedFile> files;

  [[nodiscard]] nlohmann::json to_json() const;
};

[[nodiscard]] std::string code_version();

/// Field-based Omega_2^2 against the chi-square oracle law: KS, MGF, charfn, CDF inversion.
RunManifest run_law_match(const ExperimentConfig& cfg);
RunManifest run_law_match(const ExperimentConfig& cfg, const Setup& setup);

/// Empirical tail of Omega_2 against exp(-x(R)^2) and 2 Phi_bar(R / beta_1).
RunManifest run_tail_sweep(const ExperimentConfig& cfg);
RunManifest run_tail_sweep(const ExperimentConfig& cfg, const Setup& setup);

/// Empirical tail of rho_hat against the alpha-fitted bound and the -1/(8 sigma^2) exponent.
RunManifest run_lipschitz_tail(const ExperimentConfig& cfg);
RunManifest run_lipschitz_tail(const ExperimentConfig& cfg, const Setup& setup);

/// Diameter and eigenvalue sandwich checks on cfg.samples random metrics.
RunManifest run_sandwich(const ExperimentConfig& cfg);
RunManifest run_sandwich(const ExperimentConfig& cfg, const Setup& setup);

/// Samples one MetricField (radial + angular) and writes the binary dump and JSON summary.
RunManifest run_sample(const ExperimentConfig& cfg);

struct CertifyRequest {
  double c = 0.0;
  std::optional<double> sigma_sq;  // defaults to sigma_sup of the configured schedule
  double alpha = 1.0;
  geomlab::CertificateKind kind = geomlab::CertificateKind::Diameter;
  long N = 1;
  double beta = 0.0;
};

RunManifest run_certify(const ExperimentConfig& cfg, const CertifyRequest& request);

/// Per-sample Omega_2^2 in coefficient space and rho_hat from the synthesized
/// grid field, for the sample seeds of `root`. Deterministic for any thread count.
struct SampleBatch {
  std::vector<std::uint64_t> seeds;
  std::vector<double> omega2_sq;
  std::vector<double> omega2_sq_grid;  // filled when grid synthesis ran
  std::vector<double> rho;             // filled when grid synthesis ran
};
[[nodiscard]] SampleBatch sample_distances(const Setup& setup, std::uint64_t root, std::size_t count,
                                           bool synthesize_grid, unsigned threads = 0);

}  // namespace rgeom::harness
