#include <benchmark/benchmark.h>

#include <Eigen/SVD>

#include "qgraph/bands.hpp"
#include "qgraph/decoration.hpp"
#include "qgraph/dtn.hpp"
#include "qgraph/eigensolve.hpp"
#include "qgraph/fem.hpp"
#include "qgraph/secular.hpp"
#include "test_helpers.hpp"

using namespace qgraph;

namespace {

void bm_secular_sigma_min(benchmark::State& state) {
  const MetricGraph g = fixtures::k5(1.0);
  double k = 4.1;
  for (auto _ : state) {
    const SecularMatrix m = build_secular(g, k);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m.entries);
    benchmark::DoNotOptimize(svd.singularValues());
    k += 1e-9;  // defeat any caching without moving off the regime
  }
}
BENCHMARK(bm_secular_sigma_min);

void bm_scan_spectrum_k5(benchmark::State& state) {
  const MetricGraph g = fixtures::k5(1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(scan_spectrum(g, 0.5, 30.0));
  }
}
BENCHMARK(bm_scan_spectrum_k5);

void bm_dtn_evaluate_spider(benchmark::State& state) {
  DtnEvaluator ev(make_spider(4, 1.0, 3), {});
  double lambda = 5.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ev.evaluate(lambda).entries);
    lambda = 5.0 + (lambda > 8.0 ? 0.0 : lambda * 1e-3);
  }
}
BENCHMARK(bm_dtn_evaluate_spider);

void bm_bloch_sample(benchmark::State& state) {
  const MetricGraph g = fixtures::square_lattice();
  const std::vector<double> theta = {1.3, 2.1};
  ScanOptions opts;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bloch_spectrum(g, theta, 20.0, 25.0, opts));
  }
}
BENCHMARK(bm_bloch_sample);

void bm_fem_assemble_solve(benchmark::State& state) {
  const MetricGraph g = fixtures::kirchhoff_interval();
  for (auto _ : state) {
    benchmark::DoNotOptimize(fem_spectrum(g, 1e-2, 5));
  }
}
BENCHMARK(bm_fem_assemble_solve);

}  // namespace

BENCHMARK_MAIN();
