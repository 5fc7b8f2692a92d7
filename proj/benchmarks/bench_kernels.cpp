#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "logconf/constitutive.hpp"
#include "logconf/matfun.hpp"

using namespace logconf;

namespace {

std::vector<SymTensor2> random_psi(int n, double scale) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<SymTensor2> out(n);
  for (auto& p : out) p = {u(rng), u(rng), u(rng)};
  return out;
}

void BM_ExpmSym(benchmark::State& st) {
  const auto psi = random_psi(1024, 2.0);
  std::size_t i = 0;
  for (auto _ : st) benchmark::DoNotOptimize(expm_sym(psi[i++ & 1023]));
}
BENCHMARK(BM_ExpmSym);

void BM_StrainCoupling(benchmark::State& st) {
  const auto psi = random_psi(1024, 2.0);
  const SymTensor2 eps{0.3, -0.2, 0.1};
  std::size_t i = 0;
  for (auto _ : st) benchmark::DoNotOptimize(strain_coupling_closed(psi[i++ & 1023], eps));
}
BENCHMARK(BM_StrainCoupling);

void BM_StrainCouplingSeries(benchmark::State& st) {
  const auto psi = random_psi(1024, 1.0);
  const SymTensor2 eps{0.3, -0.2, 0.1};
  std::size_t i = 0;
  for (auto _ : st) benchmark::DoNotOptimize(series_rhs_oracle(psi[i++ & 1023], eps, 25));
}
BENCHMARK(BM_StrainCouplingSeries);

void BM_ExpDerivative(benchmark::State& st) {
  const auto psi = random_psi(1024, 2.0);
  const SymTensor2 d{0.3, -0.2, 0.1};
  std::size_t i = 0;
  for (auto _ : st) benchmark::DoNotOptimize(exp_directional_derivative(psi[i++ & 1023], d));
}
BENCHMARK(BM_ExpDerivative);

void BM_WilcoxQuadrature(benchmark::State& st) {
  const auto psi = random_psi(64, 2.0);
  const Tensor2 y{0.3, -0.2, 0.1, 0.5};
  std::size_t i = 0;
  for (auto _ : st) benchmark::DoNotOptimize(wilcox_integral_oracle(psi[i++ & 63].full(), y, 32));
}
BENCHMARK(BM_WilcoxQuadrature);

}  // namespace
BENCHMARK_MAIN();
