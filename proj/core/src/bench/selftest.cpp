#include "logconf/bench/selftest.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <numbers>
#include <random>

#include "logconf/constitutive.hpp"
#include "logconf/matfun.hpp"
#include "logconf/tensor2.hpp"

namespace logconf::bench {

namespace {

class Draw {
 public:
  explicit Draw(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  SymTensor2 sym(double lo, double hi) { return {uniform(lo, hi), uniform(lo, hi), uniform(lo, hi)}; }
  Tensor2 full(double lo, double hi) { return {uniform(lo, hi), uniform(lo, hi), uniform(lo, hi), uniform(lo, hi)}; }

  // Frobenius norm uniform in (lo, hi]
  SymTensor2 sym_with_norm(double lo, double hi) {
    SymTensor2 s = sym(-1.0, 1.0);
    while (frobenius(s) < 1e-3) s = sym(-1.0, 1.0);
    double n = uniform(lo, hi);
    while (n <= lo) n = uniform(lo, hi);
    return (n / frobenius(s)) * s;
  }
  Tensor2 full_with_norm(double lo, double hi) {
    Tensor2 t = full(-1.0, 1.0);
    while (frobenius(t) < 1e-3) t = full(-1.0, 1.0);
    return (uniform(lo, hi) / frobenius(t)) * t;
  }

 private:
  std::mt19937_64 engine_;
};

double rel(const Tensor2& a, const Tensor2& b) {
  const double scale = std::max(frobenius(a), frobenius(b));
  return scale == 0.0 ? 0.0 : frobenius(a - b) / scale;
}
double rel(const SymTensor2& a, const SymTensor2& b) { return rel(a.full(), b.full()); }

SelfTestCheck timed(int group, std::string name, double tolerance, int samples, const std::function<double()>& one) {
  SelfTestCheck c;
  c.group = group;
  c.name = std::move(name);
  c.tolerance = tolerance;
  c.samples = samples;
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < samples; ++i) c.max_error = std::max(c.max_error, one());
  c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return c;
}

}  // namespace

const std::vector<SelfTestGroup>& selftest_groups() {
  static const std::vector<SelfTestGroup> groups{
      {1, "strain coupling: closed form vs Bernoulli series", 5.0},
      {2, "analytic continuation beyond the series radius", 10.0},
      {3, "matrix function identities", 10.0},
      {4, "log-conformation to conformation transfer", 5.0},
  };
  return groups;
}

std::vector<SelfTestCheck> selftest_series(std::uint64_t seed) {
  Draw d(seed);
  return {timed(1, "closed vs 2 x 25-term series, |Psi| <= 2.5", 1e-10, 1000, [&] {
    const SymTensor2 psi = d.sym_with_norm(0.0, 2.5);
    const SymTensor2 eps = d.sym(-1.0, 1.0);
    return rel(strain_coupling_closed(psi, eps), 2.0 * series_rhs_oracle(psi, eps, 25));
  })};
}

std::vector<SelfTestCheck> selftest_continuation(std::uint64_t seed) {
  Draw d(seed);
  return {timed(2, "Wilcox quadrature vs symmetrized product, |Psi| in (pi, 6]", 1e-8, 200, [&] {
    const SymTensor2 psi = d.sym_with_norm(std::numbers::pi, 6.0);
    const SymTensor2 eps = d.sym(-1.0, 1.0);
    const SymTensor2 a = 0.5 * strain_coupling_closed(psi, eps);
    const SymTensor2 e = expm_sym(psi);
    return rel(wilcox_integral_oracle(psi.full(), a.full(), 32), 0.5 * (eps * e + e * eps));
  })};
}

std::vector<SelfTestCheck> selftest_appendix(std::uint64_t seed) {
  Draw d(seed);
  std::vector<SelfTestCheck> out;
  out.push_back(timed(3, "Hadamard series vs conjugation, |X| <= 2", 1e-10, 500, [&] {
    const Tensor2 x = d.full_with_norm(0.0, 2.0);
    const Tensor2 y = d.full(-1.0, 1.0);
    return rel(hadamard_series(x, y, 25), hadamard_conjugation(x, y));
  }));
  for (const int n : {2, 4, 6, 8}) {
    out.push_back(timed(3, "iterated commutator closed vs brute force, n = " + std::to_string(n), 1e-12, 250, [&] {
      const SymTensor2 a = d.sym(-3.0, 3.0);
      const SymTensor2 b = d.sym(-3.0, 3.0);
      return rel(iterated_commutator_closed(a, b, n).full(), iterated_commutator_bruteforce(a, b, n));
    }));
  }
  out.push_back(timed(3, "exp derivative vs central differences (abs)", 1e-6, 500, [&] {
    const double h = 1e-6;
    const SymTensor2 psi = d.sym_with_norm(0.0, 4.0);
    const SymTensor2 dpsi = d.sym(-1.0, 1.0);
    const SymTensor2 fd = (1.0 / (2 * h)) * (expm_sym(psi + h * dpsi) - expm_sym(psi - h * dpsi));
    return frobenius(exp_directional_derivative(psi, dpsi) - fd);
  }));
  return out;
}

std::vector<SelfTestCheck> selftest_transfer(std::uint64_t seed) {
  Draw d(seed);
  FluidParams oldroyd;
  oldroyd.lambda = 0.7;
  FluidParams giesekus = oldroyd;
  giesekus.model = Giesekus{0.3};
  int k = 0;
  return {timed(4, "transfer residual, |Psi| on both sides of pi", 1e-7, 700, [&] {
    // alternate inside/outside the radius and the two models
    const bool inside = (k % 2) == 0;
    const FluidParams& p = (k++ % 4) < 2 ? oldroyd : giesekus;
    const SymTensor2 psi = inside ? d.sym_with_norm(0.0, std::numbers::pi) : d.sym_with_norm(std::numbers::pi, 6.0);
    return theorem_transfer_check(psi, d.full(-2.0, 2.0), p);
  })};
}

std::vector<SelfTestCheck> run_selftests(std::uint64_t seed) {
  std::vector<SelfTestCheck> all;
  for (auto part : {selftest_series(seed), selftest_continuation(seed + 1), selftest_appendix(seed + 2),
                    selftest_transfer(seed + 3)}) {
    all.insert(all.end(), part.begin(), part.end());
  }
  return all;
}

double group_seconds(const std::vector<SelfTestCheck>& checks, int group) {
  double s = 0.0;
  for (const auto& c : checks) {
    if (c.group == group) s += c.seconds;
  }
  return s;
}

}  // namespace logconf::bench
