#include <benchmark/benchmark.h>

#include "stocsens/lq/solve.hpp"
#include "stocsens/mv/closed_form.hpp"
#include "stocsens/mv/verify.hpp"

using namespace stocsens;

namespace {

lq::LQSpec scalar_spec() {
  lq::LQSpec s = lq::LQSpec::zeros(1, 1, 1);
  s.x0 = Eigen::VectorXd::Ones(1);
  s.B = TimeFunction::scalar(1.0);
  s.C[0] = TimeFunction::scalar(0.2);
  s.M = Eigen::MatrixXd::Ones(1, 1);
  return s;
}

Exec exec_of(const benchmark::State& st) { return st.range(0) == 0 ? Exec::kSerial : Exec::kParallel; }

void BM_SampleBrownian(benchmark::State& st) {
  const TimeGrid grid = build_grid(1.0, 500);
  for (auto _ : st) {
    benchmark::DoNotOptimize(sample_brownian(grid, 4000, 1, 7, exec_of(st)));
  }
}

void BM_Simulate(benchmark::State& st) {
  const TimeGrid grid = build_grid(1.0, 500);
  const auto model = lq::build_lq_model(scalar_spec(), grid);
  const BrownianEnsemble w = sample_brownian(grid, 4000, 1, 7);
  for (auto _ : st) benchmark::DoNotOptimize(lq::simulate(model, w, exec_of(st)));
}

void BM_DualityResidual(benchmark::State& st) {
  const TimeGrid grid = build_grid(1.0, 500);
  const auto model = lq::build_lq_model(scalar_spec(), grid);
  const BrownianEnsemble w = stream_brownian(grid, 4000, 1, 7);
  for (auto _ : st) benchmark::DoNotOptimize(lq::duality_residual(*model, w, exec_of(st)));
}

void BM_MVVerify(benchmark::State& st) {
  const TimeGrid grid = build_grid(1.0, 500);
  mv::MVSpec spec;
  spec.x = 0.0;
  spec.A = 1.0;
  spec.mu = TimeFunction::scalar(0.1);
  spec.sigma = TimeFunction::scalar(0.2);
  mv::SolveOptions opts;
  opts.store_paths = false;
  const mv::MVSolution sol = mv::solve_closed_form(spec, grid, BrownianEnsemble{}, opts);
  const BrownianEnsemble w = stream_brownian(grid, 4000, 1, 7);
  for (auto _ : st) benchmark::DoNotOptimize(mv::mc_verify(spec, sol, w, exec_of(st)));
}

}  // namespace

// Argument 0 runs the serial reference, 1 the OpenMP path-parallel kernel.
BENCHMARK(BM_SampleBrownian)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Simulate)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DualityResidual)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MVVerify)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
