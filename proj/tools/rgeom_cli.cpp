// rgeom: command-line driver for the random-metric experiments.

#include <fmt/format.h>

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "rgeom/harness.hpp"

namespace {

using rgeom::harness::ExperimentConfig;
using rgeom::harness::RunManifest;
using rgeom::harness::Verdict;

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> samples;
  std::optional<int> grid;
  std::optional<std::string> schedule;
  std::optional<std::string> schedule2;
  std::optional<int> lambda_max;
  std::optional<std::size_t> j_min;
  std::optional<int> q;
  std::optional<unsigned> threads;
  bool angular = false;
};

void add_common(CLI::App* sub, CommonFlags& f) {
  sub->add_option("--config", f.config, "JSON config file")->check(CLI::ExistingFile);
  sub->add_option("--seed", f.seed, "root seed");
  sub->add_option("--out", f.out, "output directory");
  sub->add_option("--samples", f.samples, "number of samples");
  sub->add_option("--grid", f.grid, "grid nodes per axis");
  sub->add_option("--schedule", f.schedule, "radial decay, power:s=<s> or heat:t=<t>");
  sub->add_option("--schedule2", f.schedule2, "angular decay (defaults to --schedule)");
  sub->add_option("--lambda-max", f.lambda_max, "basis covers eigenvalues up to this value");
  sub->add_option("--j-min", f.j_min, "basis size floor (completed to whole eigenspaces)");
  sub->add_option("-q,--regularity", f.q, "required continuity order of the field");
  sub->add_option("--threads", f.threads, "worker threads, 0 for all cores");
  sub->add_flag("--angular", f.angular, "include the angular part where it matters");
}

ExperimentConfig resolve(const std::string& experiment, const CommonFlags& f) {
  ExperimentConfig cfg = f.config.empty() ? ExperimentConfig{} : ExperimentConfig::load(f.config);
  cfg.experiment = experiment;
  if (f.seed) cfg.seed = *f.seed;
  if (f.out) cfg.out = *f.out;
  if (f.samples) cfg.samples = *f.samples;
  if (f.grid) cfg.m = *f.grid;
  if (f.schedule) cfg.schedule = *f.schedule;
  if (f.schedule2) cfg.schedule2 = *f.schedule2;
  if (f.lambda_max) cfg.lambda_max = *f.lambda_max;
  if (f.j_min) cfg.j_min = *f.j_min;
  if (f.q) cfg.q = *f.q;
  if (f.threads) cfg.threads = *f.threads;
  if (f.angular) cfg.angular = true;
  cfg.validate();
  return cfg;
}

int report(const RunManifest& m) {
  std::cout << m.summary.dump(2) << '\n';
  std::cout << fmt::format("verdict: {}  ({:.2f} s, {} files)\n", rgeom::harness::to_string(m.verdict),
                           m.wall_clock_seconds, m.files.size());
  return m.verdict == Verdict::Fail ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rgeom: Gaussian random metrics with a fixed volume form on the flat torus"};
  app.require_subcommand(1);
  app.set_version_flag("--version", rgeom::harness::code_version());

  CommonFlags flags;
  std::size_t k = 6;
  std::size_t r_points = 40;
  std::vector<double> r_grid;

  auto* law = app.add_subcommand("law-match", "field-based Omega_2^2 against the chi-square law");
  auto* tail = app.add_subcommand("tail-sweep", "Omega_2 tail against the upper and lower bounds");
  auto* lip = app.add_subcommand("lipschitz-tail", "rho tail against the alpha-fitted bound");
  auto* sand = app.add_subcommand("sandwich", "diameter and eigenvalue sandwich checks");
  auto* cert = app.add_subcommand("certify-integrability", "series certificate for E exp(c diam^2)");
  auto* sample = app.add_subcommand("sample", "dump one metric field");
  for (auto* sub : {law, tail, lip, sand, cert, sample}) add_common(sub, flags);
  std::vector<CLI::Option*> r_point_opts;
  for (auto* sub : {tail, lip}) {
    r_point_opts.push_back(sub->add_option("--r-points", r_points, "points on the automatic R grid"));
  }
  tail->add_option("--r-grid", r_grid, "explicit R values");
  auto* k_opt = sand->add_option("-k,--eigenvalues", k, "number of nonzero eigenvalues compared");

  rgeom::harness::CertifyRequest request;
  std::optional<double> sigma_sq;
  std::string kind = "diameter";
  cert->add_option("-c", request.c, "exponent coefficient c")->required();
  cert->add_option("--sigma-sq", sigma_sq, "sigma^2 (defaults to the configured schedule)");
  cert->add_option("--alpha", request.alpha, "alpha in the rho tail bound");
  cert->add_option("--kind", kind, "diameter or eigenvalue")->check(CLI::IsMember({"diameter", "eigenvalue"}));
  cert->add_option("--index", request.N, "eigenvalue index N");
  cert->add_option("--beta", request.beta, "eigenvalue growth exponent");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 1;
  }

  try {
    auto* chosen = app.get_subcommands().front();
    ExperimentConfig cfg = resolve(chosen->get_name(), flags);
    for (auto* opt : r_point_opts) {
      if (opt->count() > 0) cfg.r_points = r_points;
    }
    if (!r_grid.empty()) cfg.r_grid = r_grid;
    if (k_opt->count() > 0) cfg.k = k;
    cfg.validate();

    if (chosen == law) return report(rgeom::harness::run_law_match(cfg));
    if (chosen == tail) return report(rgeom::harness::run_tail_sweep(cfg));
    if (chosen == lip) return report(rgeom::harness::run_lipschitz_tail(cfg));
    if (chosen == sand) return report(rgeom::harness::run_sandwich(cfg));
    if (chosen == sample) return report(rgeom::harness::run_sample(cfg));
    request.sigma_sq = sigma_sq;
    request.kind = kind == "eigenvalue" ? rgeom::geomlab::CertificateKind::Eigenvalue
                                        : rgeom::geomlab::CertificateKind::Diameter;
    return report(rgeom::harness::run_certify(cfg, request));
  } catch (const std::exception& e) {
    std::cerr << "rgeom: " << e.what() << '\n';
    return 1;
  }
}
