#include <benchmark/benchmark.h>

#include "rgeom/distances.hpp"
#include "rgeom/geomlab.hpp"
#include "rgeom/harness.hpp"
#include "rgeom/lawlab.hpp"
#include "rgeom/rng.hpp"
#include "rgeom/symspace.hpp"

using namespace rgeom;

namespace {

struct Default {
  spectrum::SpectralBasis basis = spectrum::torus_basis_through(3, 16);
  fields::GridSpec grid{3, 16};
  std::vector<double> betas = spectrum::decay_eval(spectrum::DecaySchedule::power_law(2.0), basis);
  fields::Synthesizer synth{basis, grid};
};

const Default& defaults() {
  static const Default d;
  return d;
}

}  // namespace

static void BM_FiberDistance(benchmark::State& state) {
  const auto n = state.range(0);
  symspace::Matrix x = symspace::Matrix::Random(n, n);
  x = 0.5 * (x + x.transpose()).eval();
  x.diagonal().array() -= x.trace() / static_cast<double>(n);
  const auto p = symspace::spd_exp(symspace::SymMatrix(x));
  const auto q = symspace::spd_exp(symspace::SymMatrix(-0.5 * x));
  for (auto _ : state) benchmark::DoNotOptimize(symspace::fiber_distance(p, q));
}
BENCHMARK(BM_FiberDistance)->Arg(3)->Arg(6);

static void BM_RadialCoefficients(benchmark::State& state) {
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(fields::radial_coefficients(defaults().betas, 3, seed++));
}
BENCHMARK(BM_RadialCoefficients);

static void BM_SynthesizeRadial(benchmark::State& state) {
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(defaults().synth.radial(defaults().betas, seed++));
}
BENCHMARK(BM_SynthesizeRadial);

static void BM_AssembleMetric(benchmark::State& state) {
  const auto r = defaults().synth.radial(defaults().betas, 1);
  const auto a = defaults().synth.angular(defaults().betas, 1);
  for (auto _ : state) benchmark::DoNotOptimize(fields::assemble_metric(r, &a));
}
BENCHMARK(BM_AssembleMetric)->Unit(benchmark::kMillisecond);

static void BM_SampleDistancesBatch(benchmark::State& state) {
  harness::ExperimentConfig cfg;
  const auto setup = harness::make_setup(cfg);
  for (auto _ : state) benchmark::DoNotOptimize(harness::sample_distances(setup, 1, 1024, state.range(0) != 0, 1));
  state.SetItemsProcessed(state.iterations() * 1024);
}
BENCHMARK(BM_SampleDistancesBatch)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_Dijkstra(benchmark::State& state) {
  const auto m = fields::assemble_metric(defaults().synth.radial(defaults().betas, 2));
  const auto mats = m.metric_matrices();
  const geomlab::GridGraph graph(defaults().grid, mats);
  std::size_t src = 0;
  for (auto _ : state) benchmark::DoNotOptimize(graph.shortest_paths(src++ % graph.node_count()));
}
BENCHMARK(BM_Dijkstra)->Unit(benchmark::kMicrosecond);

static void BM_DiscreteSpectrum(benchmark::State& state) {
  const auto r = defaults().synth.radial(defaults().betas, 3);
  const auto a = defaults().synth.angular(defaults().betas, 3);
  const auto mats = fields::assemble_metric(r, &a).metric_matrices();
  for (auto _ : state) benchmark::DoNotOptimize(geomlab::discrete_spectrum(mats, defaults().grid, 6));
}
BENCHMARK(BM_DiscreteSpectrum)->Unit(benchmark::kMillisecond);

static void BM_CdfInversion(benchmark::State& state) {
  const auto law = lawlab::law_constants(defaults().betas, 3);
  for (auto _ : state) benchmark::DoNotOptimize(lawlab::cdf(law, law.A_sq));
}
BENCHMARK(BM_CdfInversion)->Unit(benchmark::kMicrosecond);
BENCHMARK_MAIN();
