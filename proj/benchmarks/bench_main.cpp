#include <benchmark/benchmark.h>

#include <vector>

#include "sdaqt/dense_matrix.hpp"
#include "sdaqt/eqt_matrix.hpp"
#include "sdaqt/oracle.hpp"
#include "sdaqt/qbd_models.hpp"
#include "sdaqt/sda.hpp"

using namespace sdaqt;

namespace {

// shared fixtures; building the symbol of the first walk model dominates the
// setup cost, so it happens once
const QbdCoefficients& walk_coefficients() {
  static QbdCoefficients c = build_coefficients(preset_model("test1"), 1e-15);
  return c;
}

const EqtMatrix& walk_start() {
  static EqtMatrix gt =
      make_gtilde_toeplitz(compute_symbol_g(preset_model("test1")), 1e-15);
  return gt;
}

void bm_dense_doubling(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  oracle::DenseQbd q = oracle::random_qbd(17, n);
  auto [am1, a0, a1] = oracle::to_coefficients(q);
  InitScheme<DenseMatrix> scheme = StandardScheme<DenseMatrix>{};
  for (auto _ : state) {
    auto rep = run_sda(am1, a0, a1, scheme, StopRule{1e-12, 64});
    benchmark::DoNotOptimize(rep.residual);
  }
}

void bm_dense_oracle(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  oracle::DenseQbd q = oracle::random_qbd(17, n);
  auto [am1, a0, a1] = oracle::to_coefficients(q);
  for (auto _ : state) {
    DenseMatrix g = oracle::minimal_solution_oracle(am1, a0, a1, 1e-12);
    benchmark::DoNotOptimize(g.norm_inf());
  }
}

void bm_eqt_product(benchmark::State& state) {
  const QbdCoefficients& c = walk_coefficients();
  for (auto _ : state) {
    EqtMatrix p = c.a1 * c.am1;
    benchmark::DoNotOptimize(p.norm_inf());
  }
}

void bm_eqt_inverse(benchmark::State& state) {
  const QbdCoefficients& c = walk_coefficients();
  for (auto _ : state) {
    EqtMatrix inv = c.a0.inverse();
    benchmark::DoNotOptimize(inv.norm_inf());
  }
}

void bm_symbol_g(benchmark::State& state) {
  QuarterPlaneModel m = preset_model("test1");
  for (auto _ : state) {
    LaurentSymbol g = compute_symbol_g(m);
    benchmark::DoNotOptimize(g.sum());
  }
}

void bm_walk_solve(benchmark::State& state) {
  const QbdCoefficients& c = walk_coefficients();
  InitScheme<EqtMatrix> scheme =
      ImprovedScheme<EqtMatrix>{walk_start(), {1.0}};
  for (auto _ : state) {
    auto rep = run_sda(c.am1, c.a0, c.a1, scheme, StopRule{1e-12, 64});
    benchmark::DoNotOptimize(rep.iterations);
  }
}

}  // namespace

BENCHMARK(bm_dense_doubling)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_dense_oracle)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_eqt_product)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_eqt_inverse)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_symbol_g)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_walk_solve)->Unit(benchmark::kMillisecond)->Iterations(1);

BENCHMARK_MAIN();
