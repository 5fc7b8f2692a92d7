#include <benchmark/benchmark.h>

#include <memory>

#include "logconf/bench/cylinder.hpp"
#include "logconf/solver/linear.hpp"

using namespace logconf;

namespace {

// M1 cylinder at Wi = 0.1 from the Stokes start; built once
struct M1 {
  bench::BenchConfig cfg;
  std::unique_ptr<bench::CylinderProblem> prob;
  fem::FieldState state;

  M1() {
    prob = std::make_unique<bench::CylinderProblem>(bench::make_benchmark_mesh(cfg.mesh, cfg.R), cfg);
    state = prob->stokes_start(0.1);
    prob->set_wi(0.1, state);
  }
  static M1& get() {
    static M1 m;
    return m;
  }
};

void BM_Residual(benchmark::State& st) {
  auto& m = M1::get();
  for (auto _ : st) benchmark::DoNotOptimize(m.prob->assembler().residual(m.state));
}
BENCHMARK(BM_Residual)->Unit(benchmark::kMillisecond);

void BM_Jacobian(benchmark::State& st) {
  auto& m = M1::get();
  for (auto _ : st) benchmark::DoNotOptimize(m.prob->assembler().jacobian(m.state));
}
BENCHMARK(BM_Jacobian)->Unit(benchmark::kMillisecond);

void BM_Ilut(benchmark::State& st) {
  auto& m = M1::get();
  const CsrMatrix a = m.prob->assembler().jacobian(m.state);
  for (auto _ : st) benchmark::DoNotOptimize(solver::ilut_factor(a, 200, 1e-4));
}
BENCHMARK(BM_Ilut)->Unit(benchmark::kMillisecond)->Iterations(2);

void BM_SparseLU(benchmark::State& st) {
  auto& m = M1::get();
  const CsrMatrix a = m.prob->assembler().jacobian(m.state);
  for (auto _ : st) {
    solver::DirectLu lu;
    lu.factorize(a);
    benchmark::DoNotOptimize(lu);
  }
}
BENCHMARK(BM_SparseLU)->Unit(benchmark::kMillisecond)->Iterations(2);

}  // namespace
