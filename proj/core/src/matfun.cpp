#include "logconf/matfun.hpp"

#include <algorithm>
#include <array>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace logconf {

namespace {

using boost::multiprecision::cpp_rational;

struct BernoulliTable {
  std::array<double, kMaxBernoulliIndex + 1> values{};

  BernoulliTable() {
    std::array<cpp_rational, kMaxBernoulliIndex + 2> factorial;
    factorial[0] = 1;
    for (int i = 1; i <= kMaxBernoulliIndex + 1; ++i) factorial[i] = factorial[i - 1] * i;

    std::array<cpp_rational, kMaxBernoulliIndex + 1> exact;
    exact[0] = 1;
    for (int n = 1; n <= kMaxBernoulliIndex; ++n) {
      cpp_rational acc = 0;
      for (int k = 0; k < n; ++k) acc += exact[k] / (factorial[k] * factorial[n - k + 1]);
      exact[n] = -acc * factorial[n];
    }
    for (int n = 0; n <= kMaxBernoulliIndex; ++n) values[n] = exact[n].convert_to<double>();
  }
};

const BernoulliTable& bernoulli_table() {
  static const BernoulliTable table;
  return table;
}

// Taylor coefficients of f(x) = sum_{n>=1} B_2n/(2n)! 4^n x^{2(n-1)}.
struct SeriesCoefficients {
  std::array<double, 60> f{};  // f[k] multiplies x^{2k}
  std::array<double, 60> g{};  // g[k] multiplies x^{2k}

  SeriesCoefficients() {
    double fact = 1.0;  // (2n)!
    for (int n = 1; n <= static_cast<int>(f.size()); ++n) {
      fact *= (2.0 * n - 1.0) * (2.0 * n);
      f[n - 1] = bernoulli(2 * n) / fact * std::ldexp(1.0, 2 * n);
    }
    double odd_fact = 6.0;  // 3!
    for (int k = 0; k < static_cast<int>(g.size()); ++k) {
      g[k] = 1.0 / odd_fact;
      odd_fact *= (2.0 * k + 4.0) * (2.0 * k + 5.0);
    }
  }
};

const SeriesCoefficients& series_coefficients() {
  static const SeriesCoefficients table;
  return table;
}

int clamp_terms(int terms) { return std::max(5, std::min(terms, 59)); }

// sum_{k} c[k] x^{2k}
double even_series(const std::array<double, 60>& c, double x, int terms) {
  const double x2 = x * x;
  double acc = 0.0;
  for (int k = clamp_terms(terms) - 1; k >= 0; --k) acc = acc * x2 + c[k];
  return acc;
}

// (1/x) d/dx sum_k c[k] x^{2k} = sum_{k>=1} 2k c[k] x^{2(k-1)}
double even_series_derivative_over_x(const std::array<double, 60>& c, double x, int terms) {
  const double x2 = x * x;
  double acc = 0.0;
  for (int k = clamp_terms(terms) - 1; k >= 1; --k) acc = acc * x2 + 2.0 * k * c[k];
  return acc;
}

double sinhc(double x) {
  if (std::abs(x) < 1e-3) {
    const double x2 = x * x;
    return 1.0 + x2 / 6.0 * (1.0 + x2 / 20.0);
  }
  return std::sinh(x) / x;
}

double inf_norm(const Tensor2& a) {
  return std::max(std::abs(a.xx) + std::abs(a.xy), std::abs(a.yx) + std::abs(a.yy));
}

Tensor2 inverse(const Tensor2& a) {
  const double d = det(a);
  return (1.0 / d) * Tensor2{a.yy, -a.xy, -a.yx, a.xx};
}

// Symmetric product A B A for symmetric A, B.
SymTensor2 congruence(const SymTensor2& a, const SymTensor2& b) { return sym(a * b * a); }

}  // namespace

void KernelTolerances::validate() const {
  if (!(small_x_threshold > 0.0)) throw std::invalid_argument("KernelTolerances: small_x_threshold must be > 0");
  if (series_terms < 5) throw std::invalid_argument("KernelTolerances: series_terms must be >= 5");
  if (!(pade_norm_cap > 0.0)) throw std::invalid_argument("KernelTolerances: pade_norm_cap must be > 0");
}

double bernoulli(int n) {
  if (n < 0 || n > kMaxBernoulliIndex) {
    throw std::out_of_range("bernoulli: index " + std::to_string(n) + " outside cached range");
  }
  return bernoulli_table().values[n];
}

SymTensor2 expm_sym(const SymTensor2& psi) {
  const double m = 0.5 * trace(psi);
  const double x = half_gap(psi);
  const double em = std::exp(m);
  const double c = std::cosh(x);
  const double s = sinhc(x);
  const double dev = 0.5 * (psi.xx - psi.yy);
  return {em * (c + s * dev), em * s * psi.xy, em * (c - s * dev)};
}

Tensor2 expm_pade(const Tensor2& x, const KernelTolerances& tol) {
  constexpr int q = 6;
  std::array<double, q + 1> coeff{};
  coeff[0] = 1.0;
  for (int k = 1; k <= q; ++k) {
    coeff[k] = coeff[k - 1] * static_cast<double>(q - k + 1) / static_cast<double>(k * (2 * q - k + 1));
  }

  int squarings = 0;
  const double nrm = inf_norm(x);
  if (nrm >= tol.pade_norm_cap) {
    squarings = static_cast<int>(std::floor(std::log2(nrm / tol.pade_norm_cap))) + 1;
    while (std::ldexp(nrm, -squarings) >= tol.pade_norm_cap) ++squarings;
  }
  const Tensor2 a = std::ldexp(1.0, -squarings) * x;

  Tensor2 num = coeff[0] * Tensor2::identity();
  Tensor2 den = coeff[0] * Tensor2::identity();
  Tensor2 power = Tensor2::identity();
  for (int k = 1; k <= q; ++k) {
    power = power * a;
    num += coeff[k] * power;
    den += ((k % 2 == 0) ? coeff[k] : -coeff[k]) * power;
  }
  Tensor2 r = inverse(den) * num;
  for (int i = 0; i < squarings; ++i) r = r * r;
  return r;
}

SymTensor2 logm_sym(const SymTensor2& sigma) {
  const double m = 0.5 * trace(sigma);
  const double d = half_gap(sigma);
  const double lmax = m + d;
  const double dt = det(sigma);
  if (!(lmax > 0.0) || !(dt > 0.0)) throw std::domain_error("logm_sym: tensor is not positive definite");
  const double lmin = dt / lmax;
  const double half_log_gap = 0.5 * (std::log(lmax) - std::log(lmin));
  // (Psi - tr(Psi)/2 I) = (half_log_gap / d) (sigma - m I)
  double ratio = 0.0;
  if (d > 1e-8 * m) {
    ratio = half_log_gap / d;
  } else {
    const double y = d / m;  // atanh(y) / (y m) ~ (1 + y^2/3) / m
    ratio = (1.0 + y * y / 3.0) / m;
  }
  const double mean_log = 0.5 * (std::log(lmax) + std::log(lmin));
  const double dev = 0.5 * (sigma.xx - sigma.yy);
  return {mean_log + ratio * dev, ratio * sigma.xy, mean_log - ratio * dev};
}

double f_of_gap(double x, const KernelTolerances& tol) {
  if (x < tol.small_x_threshold) return even_series(series_coefficients().f, x, tol.series_terms);
  return (x / std::tanh(x) - 1.0) / (x * x);
}

double f_prime_over_gap(double x, const KernelTolerances& tol) {
  if (x < tol.small_x_threshold) {
    return even_series_derivative_over_x(series_coefficients().f, x, tol.series_terms);
  }
  const double sh = std::sinh(x);
  const double coth = 1.0 / std::tanh(x);
  const double x_over_sh2 = std::isfinite(sh) ? x / (sh * sh) : 0.0;
  const double fp = (coth - x_over_sh2) / (x * x) - 2.0 * (x * coth - 1.0) / (x * x * x);
  return fp / x;
}

double g_of_gap(double x, const KernelTolerances& tol) {
  if (x < tol.small_x_threshold) return even_series(series_coefficients().g, x, tol.series_terms);
  return (std::sinh(x) - x) / (x * x * x);
}

double g_prime_over_gap(double x, const KernelTolerances& tol) {
  if (x < tol.small_x_threshold) {
    return even_series_derivative_over_x(series_coefficients().g, x, tol.series_terms);
  }
  const double x3 = x * x * x;
  const double gp = (std::cosh(x) - 1.0) / x3 - 3.0 * (std::sinh(x) - x) / (x3 * x);
  return gp / x;
}

SymTensor2 strain_coupling_closed(const SymTensor2& psi, const SymTensor2& eps, const KernelTolerances& tol) {
  const double scale = 2.0 * coupling_scalar(psi, eps) * f_coupling(psi, tol);
  return 2.0 * eps + scale * coupling_matrix(psi);
}

SymTensor2 strain_coupling_dpsi(const SymTensor2& psi, const SymTensor2& eps, const SymTensor2& dpsi,
                                const KernelTolerances& tol) {
  const double x = half_gap(psi);
  const double f = f_of_gap(x, tol);
  const double dx_times_x = gamma(psi) * gamma(dpsi) + psi.xy * dpsi.xy;
  const double df = f_prime_over_gap(x, tol) * dx_times_x;
  const double c = coupling_scalar(psi, eps);
  const double dc = coupling_scalar(dpsi, eps);
  return 2.0 * ((c * f) * coupling_matrix(dpsi) + (dc * f + c * df) * coupling_matrix(psi));
}

SymTensor2 series_rhs_oracle(const SymTensor2& psi, const SymTensor2& eps, int terms) {
  if (frobenius(psi) >= std::numbers::pi) {
    throw std::domain_error("series_rhs_oracle: ||Psi||_F must be < pi");
  }
  Tensor2 acc = eps.full();
  Tensor2 nested = eps.full();
  const Tensor2 p = psi.full();
  double fact = 1.0;
  for (int n = 1; n <= terms; ++n) {
    nested = commutator(p, commutator(p, nested));
    fact *= (2.0 * n - 1.0) * (2.0 * n);
    acc += (bernoulli(2 * n) / fact) * nested;
  }
  return sym(acc);
}

SymTensor2 exp_derivative_sandwich(const SymTensor2& psi, const SymTensor2& dpsi, const KernelTolerances& tol) {
  return dpsi + (coupling_scalar(psi, dpsi) * g_deriv(psi, tol)) * coupling_matrix(psi);
}

SymTensor2 exp_directional_derivative(const SymTensor2& psi, const SymTensor2& dpsi, const KernelTolerances& tol) {
  const SymTensor2 half = expm_sym(0.5 * psi);
  return congruence(half, exp_derivative_sandwich(psi, dpsi, tol));
}

SymTensor2 exp_derivative_sandwich_dpsi(const SymTensor2& psi, const SymTensor2& y, const SymTensor2& dpsi,
                                        const KernelTolerances& tol) {
  const double x = half_gap(psi);
  const double g = g_of_gap(x, tol);
  const double dg = g_prime_over_gap(x, tol) * (gamma(psi) * gamma(dpsi) + psi.xy * dpsi.xy);
  const double c = coupling_scalar(psi, y);
  const double dc = coupling_scalar(dpsi, y);
  return (c * g) * coupling_matrix(dpsi) + (dc * g + c * dg) * coupling_matrix(psi);
}

SymTensor2 exp_second_derivative(const SymTensor2& psi, const SymTensor2& y, const SymTensor2& dpsi,
                                 const KernelTolerances& tol) {
  const SymTensor2 half = expm_sym(0.5 * psi);
  const SymTensor2 dhalf = exp_directional_derivative(0.5 * psi, 0.5 * dpsi, tol);
  const SymTensor2 s = exp_derivative_sandwich(psi, y, tol);
  const SymTensor2 ds = exp_derivative_sandwich_dpsi(psi, y, dpsi, tol);
  const Tensor2 outer = dhalf * s * half;
  return SymTensor2{2.0 * outer.xx, outer.xy + outer.yx, 2.0 * outer.yy} + congruence(half, ds);
}

GaussRule1D gauss_legendre_unit(int npts) {
  if (npts < 1) throw std::invalid_argument("gauss_legendre_unit: npts must be >= 1");
  GaussRule1D rule;
  rule.nodes.resize(npts);
  rule.weights.resize(npts);
  const double pi = std::numbers::pi;
  for (int i = 0; i < (npts + 1) / 2; ++i) {
    double z = std::cos(pi * (i + 0.75) / (npts + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = z;
      for (int k = 2; k <= npts; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = npts * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.nodes[i] = 0.5 * (1.0 - z);
    rule.nodes[npts - 1 - i] = 0.5 * (1.0 + z);
    rule.weights[i] = 0.5 * w;
    rule.weights[npts - 1 - i] = 0.5 * w;
  }
  return rule;
}

Tensor2 wilcox_integral_oracle(const Tensor2& x, const Tensor2& y, int npts) {
  if (npts < 8) throw std::invalid_argument("wilcox_integral_oracle: npts must be >= 8");
  const GaussRule1D rule = gauss_legendre_unit(npts);
  Tensor2 acc;
  for (int i = 0; i < npts; ++i) {
    const double a = rule.nodes[i];
    acc += rule.weights[i] * (expm_pade((1.0 - a) * x) * y * expm_pade(a * x));
  }
  return acc;
}

Tensor2 wilcox_series(const Tensor2& x, const Tensor2& y, int terms) {
  Tensor2 acc = y;
  Tensor2 nested = y;
  double fact = 1.0;
  for (int n = 1; n <= terms; ++n) {
    nested = commutator(x, nested);
    fact *= (n + 1.0);
    acc += (1.0 / fact) * nested;
  }
  return acc * expm_pade(x);
}

Tensor2 wilcox_sandwich_series(const Tensor2& x, const Tensor2& y, int terms) {
  Tensor2 acc = y;
  Tensor2 nested = y;
  double fact = 1.0;
  for (int n = 1; n <= terms; ++n) {
    nested = commutator(x, commutator(x, nested));
    fact *= (2.0 * n) * (2.0 * n + 1.0);
    acc += (std::ldexp(1.0, -2 * n) / fact) * nested;
  }
  const Tensor2 half = expm_pade(0.5 * x);
  return half * acc * half;
}

Tensor2 hadamard_conjugation(const Tensor2& x, const Tensor2& y) { return expm_pade(x) * y * expm_pade(-x); }

Tensor2 hadamard_series(const Tensor2& x, const Tensor2& y, int terms) {
  Tensor2 acc = y;
  Tensor2 nested = y;
  double fact = 1.0;
  for (int n = 1; n <= terms; ++n) {
    nested = commutator(x, nested);
    fact *= n;
    acc += (1.0 / fact) * nested;
  }
  return acc;
}

}  // namespace logconf
