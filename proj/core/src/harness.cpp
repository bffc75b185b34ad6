#include "rgeom/harness.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <fstream>
#include <set>
#include <sstream>

#include "rgeom/distances.hpp"
#include "rgeom/errors.hpp"
#include "rgeom/io.hpp"
#include "rgeom/lawlab.hpp"
#include "rgeom/rng.hpp"
#include "rgeom/stats.hpp"

#ifndef RGEOM_VERSION
#define RGEOM_VERSION "0.0.0"
#endif

namespace rgeom::harness {
namespace {

using Clock = std::chrono::steady_clock;
namespace fs = std::filesystem;

constexpr std::size_t kBatch = 32;
constexpr double kKsAlpha = 0.01;
constexpr double kSigmaTol = 1e-10;
constexpr double kIdentityTol = 1e-9;
constexpr double kCdfTol = 0.01;
constexpr double kTailSlopeLo = 0.8;
constexpr double kTailSlopeHi = 1.2;
constexpr double kRhoExponentFraction = 0.75;
constexpr std::size_t kMinExceedances = 100;

const std::set<std::string> kExperiments = {"law-match", "tail-sweep", "lipschitz-tail", "sandwich",
                                            "certify-integrability", "sample"};

void check_schedule(const std::string& descriptor, int q, int n) {
  const auto sched = spectrum::DecaySchedule::parse(descriptor);
  if (sched.kind() == spectrum::DecaySchedule::Kind::PowerLaw) {
    const double floor = spectrum::regularity_floor(q, n);
    if (!(sched.parameter() > floor)) {
      throw Error(ErrorCode::ConfigError,
                  fmt::format("schedule {} is not a.s. C^{} in dimension {}: need s > {}", descriptor, q, n, floor));
    }
  }
}

/// Tracks emitted files and the wall clock for one experiment.
class Run {
 public:
  Run(const ExperimentConfig& cfg) : cfg_(cfg), start_(Clock::now()) {
    std::error_code ec;
    fs::create_directories(cfg.out, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create output directory " + cfg.out.string());
  }

  fs::path path(const std::string& name) const { return cfg_.out / name; }

  void text(const std::string& name, const std::string& body) {
    io::write_text(path(name), body);
    files_.push_back(name);
  }
  void json(const std::string& name, const nlohmann::json& doc) {
    io::write_json(path(name), doc);
    files_.push_back(name);
  }
  void adopt(const std::string& name) { files_.push_back(name); }

  RunManifest finish(nlohmann::json summary, Verdict verdict) {
    RunManifest m;
    m.config = cfg_.to_json();
    m.code_version = code_version();
    m.summary = std::move(summary);
    m.verdict = verdict;
    for (const auto& f : files_) {
      m.files.push_back({f, io::sha256_file(path(f)), fs::file_size(path(f))});
    }
    m.wall_clock_seconds = std::chrono::duration<double>(Clock::now() - start_).count();
    io::write_json(path(cfg_.experiment + "_manifest.json"), m.to_json());
    return m;
  }

 private:
  const ExperimentConfig& cfg_;
  Clock::time_point start_;
  std::vector<std::string> files_;
};

std::string g17(double v) { return fmt::format("{:.17g}", v); }

std::vector<double> sorted_copy(const std::vector<double>& v) {
  std::vector<double> s = v;
  std::sort(s.begin(), s.end());
  return s;
}

std::vector<double> linspace(double a, double b, std::size_t count) {
  std::vector<double> out;
  if (count == 1) return {a};
  for (std::size_t i = 0; i < count; ++i) out.push_back(a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
  return out;
}

}  // namespace

// ---------------------------------------------------------------- config

void ExperimentConfig::validate() const {
  if (!kExperiments.contains(experiment)) throw Error(ErrorCode::ConfigError, "unknown experiment '" + experiment + "'");
  if (n < 3) throw Error(ErrorCode::ConfigError, "n must be at least 3");
  if (m < 1) throw Error(ErrorCode::ConfigError, "grid size m must be positive");
  if (j_min && *j_min < 1) throw Error(ErrorCode::ConfigError, "j_min must be positive");
  if (!j_min && lambda_max < 1) throw Error(ErrorCode::ConfigError, "lambda_max must be positive");
  if (q < 0) throw Error(ErrorCode::ConfigError, "continuity order q must be non-negative");
  if (k < 1) throw Error(ErrorCode::ConfigError, "k must be positive");
  if (r_points < 2) throw Error(ErrorCode::ConfigError, "r_points must be at least 2");
  check_schedule(schedule, q, n);
  if (schedule2) check_schedule(*schedule2, q, n);
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j = {{"schema_version", kConfigSchemaVersion},
                      {"experiment", experiment},
                      {"n", n},
                      {"m", m},
                      {"lambda_max", lambda_max},
                      {"schedule", schedule},
                      {"samples", samples},
                      {"seed", seed},
                      {"out", out.string()},
                      {"q", q},
                      {"k", k},
                      {"r_points", r_points},
                      {"r_grid", r_grid},
                      {"angular", angular}};
  j["j_min"] = j_min ? nlohmann::json(*j_min) : nlohmann::json(nullptr);
  j["schedule2"] = schedule2 ? nlohmann::json(*schedule2) : nlohmann::json(nullptr);
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& doc) {
  ExperimentConfig c;
  try {
    const int version = doc.value("schema_version", kConfigSchemaVersion);
    if (version != kConfigSchemaVersion) {
      throw Error(ErrorCode::ConfigError, "unsupported config schema_version " + std::to_string(version));
    }
    c.experiment = doc.value("experiment", c.experiment);
    c.n = doc.value("n", c.n);
    c.m = doc.value("m", c.m);
    c.lambda_max = doc.value("lambda_max", c.lambda_max);
    if (doc.contains("j_min") && !doc["j_min"].is_null()) c.j_min = doc["j_min"].get<std::size_t>();
    c.schedule = doc.value("schedule", c.schedule);
    if (doc.contains("schedule2") && !doc["schedule2"].is_null()) c.schedule2 = doc["schedule2"].get<std::string>();
    c.samples = doc.value("samples", c.samples);
    c.seed = doc.value("seed", c.seed);
    c.out = doc.value("out", c.out.string());
    c.q = doc.value("q", c.q);
    c.k = doc.value("k", c.k);
    c.r_points = doc.value("r_points", c.r_points);
    c.r_grid = doc.value("r_grid", c.r_grid);
    c.angular = doc.value("angular", c.angular);
    c.threads = doc.value("threads", c.threads);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("malformed config: ") + e.what());
  }
  return c;
}

ExperimentConfig ExperimentConfig::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot read config " + path.string());
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ConfigError, std::string("config is not valid JSON: ") + e.what());
  }
}

Setup make_setup(const ExperimentConfig& cfg) {
  cfg.validate();
  auto basis = cfg.j_min ? spectrum::torus_basis(cfg.n, *cfg.j_min) : spectrum::torus_basis_through(cfg.n, cfg.lambda_max);
  fields::GridSpec grid(cfg.n, cfg.m);
  grid.require_resolves(basis);
  const auto sched = spectrum::DecaySchedule::parse(cfg.schedule);
  const auto sched2 = spectrum::DecaySchedule::parse(cfg.schedule2.value_or(cfg.schedule));
  auto betas = spectrum::decay_eval(sched, basis);
  auto deltas = spectrum::decay_eval(sched2, basis);
  return Setup{std::move(basis), grid, std::move(betas), std::move(deltas), sched.descriptor(), sched2.descriptor()};
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::None: return "none";
  }
  return "none";
}

nlohmann::json RunManifest::to_json() const {
  nlohmann::json files_json = nlohmann::json::array();
  for (const auto& f : files) files_json.push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});
  return {{"config", config},
          {"code_version", code_version},
          {"wall_clock_seconds", wall_clock_seconds},
          {"summary", summary},
          {"verdict", harness::to_string(verdict)},
          {"files", files_json}};
}

std::string code_version() { return RGEOM_VERSION; }

// ---------------------------------------------------------------- sampling

SampleBatch sample_distances(const Setup& setup, std::uint64_t root, std::size_t count, bool synthesize_grid,
                             unsigned threads) {
  SampleBatch out;
  out.seeds.resize(count);
  out.omega2_sq.resize(count);
  if (synthesize_grid) {
    out.omega2_sq_grid.resize(count);
    out.rho.resize(count);
  }
  for (std::size_t i = 0; i < count; ++i) out.seeds[i] = rng::sample_seed(root, i);

  const int n = setup.basis.dim();
  std::optional<fields::Synthesizer> synth;
  if (synthesize_grid) synth.emplace(setup.basis, setup.grid);
  const double w = setup.grid.weight();
  const auto J = static_cast<Eigen::Index>(setup.basis.size());
  const std::size_t batches = (count + kBatch - 1) / kBatch;

  stats::parallel_for(
      batches,
      [&](std::size_t b) {
        const std::size_t begin = b * kBatch;
        const std::size_t end = std::min(count, begin + kBatch);
        fields::Matrix coeffs(J, static_cast<Eigen::Index>((end - begin) * static_cast<std::size_t>(n)));
        for (std::size_t i = begin; i < end; ++i) {
          const fields::Matrix c = fields::radial_coefficients(setup.betas, n, out.seeds[i]);
          out.omega2_sq[i] = distances::omega2_sq_coefficients(c);
          coeffs.middleCols(static_cast<Eigen::Index>((i - begin) * static_cast<std::size_t>(n)), n) = c;
        }
        if (!synthesize_grid) return;
        const fields::Matrix values = synth->synthesize(coeffs);
        for (std::size_t i = begin; i < end; ++i) {
          const auto block = values.middleCols(static_cast<Eigen::Index>((i - begin) * static_cast<std::size_t>(n)), n);
          out.omega2_sq_grid[i] = block.squaredNorm() * w;
          out.rho[i] = 2.0 * block.cwiseAbs().maxCoeff();
        }
      },
      threads);
  return out;
}

// ---------------------------------------------------------------- law-match

RunManifest run_law_match(const ExperimentConfig& cfg) { return run_law_match(cfg, make_setup(cfg)); }

RunManifest run_law_match(const ExperimentConfig& cfg, const Setup& setup) {
  Run run(cfg);
  const auto law = lawlab::law_constants(setup.betas, setup.basis.dim());
  const std::size_t N = cfg.samples;
  const SampleBatch batch = sample_distances(setup, cfg.seed, N, true, cfg.threads);
  std::vector<double> oracle(N);
  for (std::size_t i = 0; i < N; ++i) oracle[i] = lawlab::oracle_sample_law(law, batch.seeds[i]);

  std::ostringstream csv;
  csv << "# rgeom-law-match v1\nindex,seed,omega2_sq_grid,omega2_sq_coeff,oracle\n";
  for (std::size_t i = 0; i < N; ++i) {
    csv << i << ',' << batch.seeds[i] << ',' << g17(batch.omega2_sq_grid[i]) << ',' << g17(batch.omega2_sq[i]) << ','
        << g17(oracle[i]) << '\n';
  }
  run.text("law_match_samples.csv", csv.str());

  nlohmann::json summary = {{"A_sq", law.A_sq}, {"B4", law.B4}, {"a_inf", law.a_inf}, {"J", setup.basis.size()},
                            {"samples", N}};
  if (N < 2) {
    summary["insufficient"] = true;
    return run.finish(summary, Verdict::None);
  }

  double max_rel = 0.0;
  for (std::size_t i = 0; i < std::min<std::size_t>(N, 1000); ++i) {
    max_rel = std::max(max_rel, std::abs(batch.omega2_sq_grid[i] - batch.omega2_sq[i]) / std::max(batch.omega2_sq[i], 1e-300));
  }
  bool identity_ok = max_rel <= kIdentityTol;
  if (cfg.angular) {
    // Full metric with the angular part: the fiberwise distance to the flat metric
    // only sees b, so the quadrature must still match the coefficient value.
    const fields::Synthesizer synth(setup.basis, setup.grid);
    const std::size_t count = std::min<std::size_t>(N, 1000);
    std::vector<double> rel(count);
    stats::parallel_for(
        count,
        [&](std::size_t i) {
          const auto radial = synth.radial(setup.betas, batch.seeds[i], setup.schedule_id);
          const auto angular = synth.angular(setup.deltas, batch.seeds[i], setup.schedule2_id);
          const auto metric = fields::assemble_metric(radial, &angular);
          double total = 0.0;
          for (double d : distances::fiberwise_distance_field(metric, setup.grid)) total += d * d;
          total *= setup.grid.weight();
          rel[i] = std::abs(total - batch.omega2_sq[i]) / std::max(batch.omega2_sq[i], 1e-300);
        },
        cfg.threads);
    const double angular_rel = rel.empty() ? 0.0 : *std::max_element(rel.begin(), rel.end());
    summary["angular_identity_max_relative_error"] = angular_rel;
    identity_ok = identity_ok && angular_rel <= kIdentityTol;
  }

  const double ks = stats::ks_two_sample(batch.omega2_sq_grid, oracle);
  const double ks_crit = stats::ks_critical(kKsAlpha, N, N);
  const bool ks_ok = ks < ks_crit;

  std::ostringstream mcsv;
  mcsv << "# rgeom-law-match-transforms v1\nkind,t,analytic_re,analytic_im,mc_re,mc_im,se_re,se_im,pass\n";
  bool mgf_ok = true;
  nlohmann::json mgf_json = nlohmann::json::array();
  std::vector<double> tmp(N);
  for (double f : {0.05, 0.1, 0.2}) {
    const double t = f / law.a_inf;
    for (std::size_t i = 0; i < N; ++i) tmp[i] = std::exp(t * batch.omega2_sq_grid[i]);
    const auto est = stats::mean_estimate(tmp);
    const double exact = lawlab::mgf(law, t);
    const bool ok = std::abs(est.mean - exact) <= 3.0 * est.std_error;
    mgf_ok = mgf_ok && ok;
    mgf_json.push_back({{"t", t}, {"analytic", exact}, {"mc", est.mean}, {"se", est.std_error}, {"pass", ok}});
    mcsv << "mgf," << g17(t) << ',' << g17(exact) << ",0," << g17(est.mean) << ",0," << g17(est.std_error) << ",0,"
         << ok << '\n';
  }
  bool cf_ok = true;
  nlohmann::json cf_json = nlohmann::json::array();
  std::vector<double> tmp2(N);
  for (double t : {0.1, 1.0, 5.0}) {
    for (std::size_t i = 0; i < N; ++i) {
      tmp[i] = std::cos(t * batch.omega2_sq_grid[i]);
      tmp2[i] = std::sin(t * batch.omega2_sq_grid[i]);
    }
    const auto re = stats::mean_estimate(tmp);
    const auto im = stats::mean_estimate(tmp2);
    const auto exact = lawlab::charfn(law, t);
    const bool ok = std::abs(re.mean - exact.real()) <= 3.0 * re.std_error &&
                    std::abs(im.mean - exact.imag()) <= 3.0 * im.std_error;
    cf_ok = cf_ok && ok;
    cf_json.push_back({{"t", t},
                       {"analytic", {exact.real(), exact.imag()}},
                       {"mc", {re.mean, im.mean}},
                       {"se", {re.std_error, im.std_error}},
                       {"pass", ok}});
    mcsv << "charfn," << g17(t) << ',' << g17(exact.real()) << ',' << g17(exact.imag()) << ',' << g17(re.mean) << ','
         << g17(im.mean) << ',' << g17(re.std_error) << ',' << g17(im.std_error) << ',' << ok << '\n';
  }
  run.text("law_match_transforms.csv", mcsv.str());

  const auto sorted = sorted_copy(batch.omega2_sq_grid);
  double cdf_sup = 0.0;
  for (double q = 0.005; q < 1.0; q += 0.01) {
    const double x = stats::quantile_sorted(sorted, q);
    const double ecdf = static_cast<double>(N - stats::count_above_sorted(sorted, x)) / static_cast<double>(N);
    cdf_sup = std::max(cdf_sup, std::abs(ecdf - lawlab::cdf(law, x)));
  }
  const bool cdf_ok = cdf_sup <= kCdfTol;

  summary["identity_max_relative_error"] = max_rel;
  summary["identity_pass"] = identity_ok;
  summary["ks_statistic"] = ks;
  summary["ks_critical"] = ks_crit;
  summary["ks_alpha"] = kKsAlpha;
  summary["ks_pass"] = ks_ok;
  summary["mgf"] = mgf_json;
  summary["charfn"] = cf_json;
  summary["cdf_inversion_sup"] = cdf_sup;
  summary["cdf_inversion_pass"] = cdf_ok;
  run.json("law_match.json", summary);
  const bool pass = identity_ok && ks_ok && mgf_ok && cf_ok && cdf_ok;
  return run.finish(summary, pass ? Verdict::Pass : Verdict::Fail);
}

// ---------------------------------------------------------------- tail-sweep

RunManifest run_tail_sweep(const ExperimentConfig& cfg) { return run_tail_sweep(cfg, make_setup(cfg)); }

RunManifest run_tail_sweep(const ExperimentConfig& cfg, const Setup& setup) {
  Run run(cfg);
  const auto law = lawlab::law_constants(setup.betas, setup.basis.dim());
  const std::size_t N = cfg.samples;
  // Omega_2^2 in coefficient space; identical to the grid quadrature when the grid resolves the basis.
  const SampleBatch batch = sample_distances(setup, cfg.seed, N, false, cfg.threads);
  std::vector<double> omega(N);
  for (std::size_t i = 0; i < N; ++i) omega[i] = std::sqrt(batch.omega2_sq[i]);
  const auto sorted = sorted_copy(omega);
  const double A = std::sqrt(law.A_sq);

  nlohmann::json summary = {{"A", A}, {"beta1", law.beta1()}, {"samples", N}};
  if (N < 2) {
    summary["insufficient"] = true;
    run.text("tail_sweep.csv", "# rgeom-tail-sweep v1\nR,count,empirical,wilson_half_width,upper_lm,lower_exact,pass\n");
    return run.finish(summary, Verdict::None);
  }

  std::vector<double> grid = cfg.r_grid;
  if (grid.empty()) grid = linspace(A, std::max(A, stats::quantile_sorted(sorted, 0.9999)), cfg.r_points);

  std::ostringstream csv;
  csv << "# rgeom-tail-sweep v1\nR,count,empirical,wilson_half_width,upper_lm,lower_exact,pass\n";
  bool bounds_ok = true;
  std::size_t failures = 0;
  for (double R : grid) {
    const std::size_t cnt = stats::count_at_least_sorted(sorted, R);
    const double emp = static_cast<double>(cnt) / static_cast<double>(N);
    const double hw = stats::wilson_half_width(cnt, N);
    const double upper = lawlab::tail_upper_lm(law, R);
    const double lower = lawlab::tail_lower_exact(law, R);
    const bool ok = lower - 3.0 * hw <= emp && emp <= upper + 3.0 * hw;
    if (!ok) ++failures;
    bounds_ok = bounds_ok && ok;
    csv << g17(R) << ',' << cnt << ',' << g17(emp) << ',' << g17(hw) << ',' << g17(upper) << ',' << g17(lower) << ','
        << ok << '\n';
  }
  run.text("tail_sweep.csv", csv.str());

  // Far-tail exponent: slope of -log(tail) against R^2 / (2 beta_1^2) between the
  // empirical 99th and 99.99th percentiles.
  std::vector<double> u;
  std::vector<double> y;
  std::ostringstream ecsv;
  ecsv << "# rgeom-tail-exponent v1\nR,u,neg_log_tail\n";
  for (double R : linspace(stats::quantile_sorted(sorted, 0.99), stats::quantile_sorted(sorted, 0.9999), 20)) {
    const std::size_t cnt = stats::count_at_least_sorted(sorted, R);
    if (cnt == 0) continue;
    u.push_back(R * R / (2.0 * law.a_inf));
    y.push_back(-std::log(static_cast<double>(cnt) / static_cast<double>(N)));
    ecsv << g17(R) << ',' << g17(u.back()) << ',' << g17(y.back()) << '\n';
  }
  run.text("tail_sweep_exponent.csv", ecsv.str());
  double slope = std::nan("");
  if (u.size() >= 2 && u.front() != u.back()) slope = stats::least_squares(u, y).slope;
  const bool slope_ok = slope >= kTailSlopeLo && slope <= kTailSlopeHi;

  summary["r_points"] = grid.size();
  summary["bound_failures"] = failures;
  summary["bounds_pass"] = bounds_ok;
  summary["exponent_slope"] = slope;
  summary["exponent_window"] = {kTailSlopeLo, kTailSlopeHi};
  summary["exponent_pass"] = slope_ok;
  summary["quantile_9999"] = stats::quantile_sorted(sorted, 0.9999);
  run.json("tail_sweep.json", summary);
  return run.finish(summary, bounds_ok ? Verdict::Pass : Verdict::Fail);
}

// ---------------------------------------------------------------- lipschitz-tail

RunManifest run_lipschitz_tail(const ExperimentConfig& cfg) { return run_lipschitz_tail(cfg, make_setup(cfg)); }

RunManifest run_lipschitz_tail(const ExperimentConfig& cfg, const Setup& setup) {
  Run run(cfg);
  const int n = setup.basis.dim();
  const std::size_t N = cfg.samples;
  const double sigma_sq = fields::sigma_sup(setup.betas, setup.basis, setup.grid);
  const double sigma_closed = fields::sigma_sq_torus(setup.betas, n);
  const bool sigma_ok = std::abs(sigma_sq - sigma_closed) <= kSigmaTol;

  const SampleBatch batch = sample_distances(setup, cfg.seed, N, true, cfg.threads);
  {
    std::vector<distances::DistanceRecord> records;
    records.reserve(N);
    for (std::size_t i = 0; i < N; ++i) {
      records.push_back({batch.seeds[i], batch.omega2_sq_grid[i], batch.rho[i], setup.schedule_id, setup.grid.id()});
    }
    std::ostringstream dcsv;
    distances::write_csv(dcsv, records);
    run.text("rho_samples.csv", dcsv.str());
  }
  const auto sorted = sorted_copy(batch.rho);

  nlohmann::json summary = {{"sigma_sq", sigma_sq},
                            {"sigma_sq_closed_form", sigma_closed},
                            {"sigma_pass", sigma_ok},
                            {"samples", N}};
  std::ostringstream csv;
  csv << "# rgeom-lipschitz-tail v1\nR,count,empirical,wilson_half_width,bound,pass\n";

  if (N == 0) {
    summary["insufficient"] = true;
    run.text("lipschitz_tail.csv", csv.str());
    return run.finish(summary, Verdict::None);
  }
  if (sigma_sq == 0.0) {
    // Degenerate schedule: rho vanishes identically and every tail frequency is zero.
    bool zero = sorted.back() == 0.0;
    summary["degenerate"] = true;
    run.text("lipschitz_tail.csv", csv.str());
    run.json("lipschitz_tail.json", summary);
    return run.finish(summary, zero && sigma_ok ? Verdict::Pass : Verdict::Fail);
  }

  const double r_fit = stats::quantile_sorted(sorted, 0.999);
  const std::size_t fit_count = stats::count_above_sorted(sorted, r_fit);
  // Largest R with at least kMinExceedances exceedances.
  const double r_last = N > kMinExceedances ? sorted[N - kMinExceedances - 1] : 0.0;
  if (fit_count == 0 || r_last <= r_fit) {
    summary["insufficient"] = true;
    run.text("lipschitz_tail.csv", csv.str());
    run.json("lipschitz_tail.json", summary);
    return run.finish(summary, Verdict::None);
  }
  const double p_fit = static_cast<double>(fit_count) / static_cast<double>(N);
  const double alpha = lawlab::fit_alpha(sigma_sq, n, r_fit, p_fit);

  bool dominance_ok = true;
  std::size_t tested = 0;
  for (std::size_t i = 1; i <= cfg.r_points; ++i) {
    const double R = r_fit + (r_last - r_fit) * static_cast<double>(i) / static_cast<double>(cfg.r_points);
    const std::size_t cnt = stats::count_above_sorted(sorted, R);
    if (cnt < kMinExceedances) continue;
    const double emp = static_cast<double>(cnt) / static_cast<double>(N);
    const double bound = lawlab::rho_tail_upper(sigma_sq, alpha, n, R);
    const bool ok = emp <= bound;
    dominance_ok = dominance_ok && ok;
    ++tested;
    csv << g17(R) << ',' << cnt << ',' << g17(emp) << ',' << g17(stats::wilson_half_width(cnt, N)) << ','
        << g17(bound) << ',' << ok << '\n';
  }
  run.text("lipschitz_tail.csv", csv.str());

  // Decay exponent: slope of -ln Prob{rho > R} against R^2 from the 99th percentile
  // to the last R with kMinExceedances exceedances.
  std::vector<double> x;
  std::vector<double> y;
  for (double R : linspace(stats::quantile_sorted(sorted, 0.99), r_last, 20)) {
    const std::size_t cnt = stats::count_above_sorted(sorted, R);
    if (cnt == 0) continue;
    x.push_back(R * R);
    y.push_back(-std::log(static_cast<double>(cnt) / static_cast<double>(N)));
  }
  double slope = std::nan("");
  if (x.size() >= 2 && x.front() != x.back()) slope = stats::least_squares(x, y).slope;
  const double target = 1.0 / (8.0 * sigma_sq);
  const bool exponent_ok = slope >= kRhoExponentFraction * target;

  summary["alpha"] = alpha;
  summary["alpha_fit_R"] = r_fit;
  summary["alpha_fit_probability"] = p_fit;
  summary["dominance_points"] = tested;
  summary["dominance_pass"] = dominance_ok && tested > 0;
  summary["exponent_slope"] = slope;
  summary["exponent_target"] = target;
  summary["exponent_ratio"] = slope / target;
  summary["exponent_pass"] = exponent_ok;
  run.json("lipschitz_tail.json", summary);
  const bool pass = sigma_ok && dominance_ok && tested > 0 && exponent_ok;
  return run.finish(summary, pass ? Verdict::Pass : Verdict::Fail);
}

// ---------------------------------------------------------------- sandwich

RunManifest run_sandwich(const ExperimentConfig& cfg) { return run_sandwich(cfg, make_setup(cfg)); }

RunManifest run_sandwich(const ExperimentConfig& cfg, const Setup& setup) {
  Run run(cfg);
  const std::size_t N = cfg.samples;
  const std::size_t k = cfg.k;
  std::ostringstream csv;
  csv << "# rgeom-sandwich v1\nseed,rho_hat,diam_ratio";
  for (std::size_t j = 1; j <= k; ++j) csv << ",lambda_ratio_" << j;
  csv << ",diam_pass,eig_pass\n";
  nlohmann::json summary = {{"samples", N}, {"k", k}};
  if (N == 0) {
    run.text("sandwich.csv", csv.str());
    return run.finish(summary, Verdict::None);
  }

  const auto flat = geomlab::flat_metric(setup.grid);
  const auto d0 = geomlab::discrete_diameter(flat, setup.grid);
  const auto l0 = geomlab::discrete_spectrum(flat, setup.grid, k).eigenvalues;
  const fields::Synthesizer synth(setup.basis, setup.grid);

  struct Row {
    std::uint64_t seed = 0;
    geomlab::SandwichResult diam;
    geomlab::SandwichResult eig;
  };
  std::vector<Row> rows(N);
  stats::parallel_for(
      N,
      [&](std::size_t i) {
        const std::uint64_t seed = rng::sample_seed(cfg.seed, i);
        const auto radial = synth.radial(setup.betas, seed, setup.schedule_id);
        const auto angular = synth.angular(setup.deltas, seed, setup.schedule2_id);
        const auto metric = fields::assemble_metric(radial, &angular);
        rows[i] = {seed, geomlab::sandwich_check_diam(metric, setup.grid, d0.value),
                   geomlab::sandwich_check_eig(metric, setup.grid, k, l0)};
      },
      cfg.threads);

  std::size_t diam_fail = 0;
  std::size_t eig_fail = 0;
  double max_rho = 0.0;
  for (const auto& r : rows) {
    diam_fail += r.diam.pass ? 0 : 1;
    eig_fail += r.eig.pass ? 0 : 1;
    max_rho = std::max(max_rho, r.diam.rho_hat);
    csv << r.seed << ',' << g17(r.diam.rho_hat) << ',' << g17(r.diam.ratios.front());
    for (double v : r.eig.ratios) csv << ',' << g17(v);
    csv << ',' << r.diam.pass << ',' << r.eig.pass << '\n';
  }
  run.text("sandwich.csv", csv.str());
  summary["reference_diameter"] = d0.value;
  summary["reference_diameter_exact"] = d0.exact;
  summary["reference_eigenvalues"] = l0;
  summary["diam_failures"] = diam_fail;
  summary["eig_failures"] = eig_fail;
  summary["max_rho_hat"] = max_rho;
  summary["slack"] = geomlab::kSandwichSlack;
  run.json("sandwich.json", summary);
  return run.finish(summary, diam_fail + eig_fail == 0 ? Verdict::Pass : Verdict::Fail);
}

// ---------------------------------------------------------------- sample / certify

RunManifest run_sample(const ExperimentConfig& cfg) {
  const Setup setup = make_setup(cfg);
  Run run(cfg);
  const fields::Synthesizer synth(setup.basis, setup.grid);
  const auto radial = synth.radial(setup.betas, cfg.seed, setup.schedule_id);
  const auto angular = synth.angular(setup.deltas, cfg.seed, setup.schedule2_id);
  const auto metric = fields::assemble_metric(radial, &angular);
  const std::string stem = "metric_" + std::to_string(cfg.seed);
  io::write_metric_dump(run.path(stem + ".bin"), metric);
  run.adopt(stem + ".bin");
  auto summary = io::summarize(metric);
  auto doc = summary;
  doc["basis_modes"] = spectrum::to_json(setup.basis);
  run.json(stem + ".json", doc);
  return run.finish(summary, Verdict::None);
}

RunManifest run_certify(const ExperimentConfig& cfg, const CertifyRequest& request) {
  double sigma_sq = 0.0;
  if (request.sigma_sq) {
    sigma_sq = *request.sigma_sq;
  } else {
    const Setup setup = make_setup(cfg);
    sigma_sq = fields::sigma_sup(setup.betas, setup.basis, setup.grid);
  }
  Run run(cfg);
  const auto cert = geomlab::integrability_certificate(request.c, sigma_sq, request.alpha, cfg.n, request.kind,
                                                       request.N, request.beta);
  nlohmann::json j = {
      {"kind", request.kind == geomlab::CertificateKind::Diameter ? "diameter" : "eigenvalue"},
      {"c", request.c},
      {"sigma_sq", sigma_sq},
      {"alpha", request.alpha},
      {"n", cfg.n},
      {"N", request.N},
      {"beta", request.beta},
      {"threshold", cert.threshold},
      {"converges", cert.converges},
  };
  if (cert.converges) {
    j["tail_bound"] = cert.tail_bound;
    j["log_tail_bound"] = cert.log_tail_bound;
    j["remainder"] = cert.remainder;
    j["last_index"] = cert.last_index;
  } else {
    j["divergence_witness"] = cert.divergence_witness;
  }
  run.json("certificate.json", j);
  return run.finish(j, Verdict::None);
}

}  // namespace rgeom::harness
