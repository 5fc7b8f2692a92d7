#pragma once

// Matrix functions for 2x2 tensors: exponentials, the closed-form commutator
// sums f and g, their derivatives, and series/quadrature oracles used to check
// them.

#include <span>
#include <vector>

#include "logconf/tensor2.hpp"

namespace logconf {

/// Numerical branch switches for the scalar kernels.
struct KernelTolerances {
  /// Below this half eigenvalue gap f and g (and their derivatives) are
  /// evaluated from their even Taylor series instead of the closed forms.
  double small_x_threshold{0.5};
  /// Number of series terms used by the small-gap branch.
  int series_terms{25};
  /// Scaling-and-squaring halves the argument until its infinity norm is below this.
  double pade_norm_cap{1.0};

  void validate() const;
};

// -- Bernoulli numbers ------------------------------------------------------

/// Largest index n for which bernoulli(n) is cached.
inline constexpr int kMaxBernoulliIndex = 120;

/// B_n from the recursion sum_{k=0..n} B_k / (k! (n-k+1)!) = delta_{n0},
/// evaluated in exact rational arithmetic and rounded once.
double bernoulli(int n);

/// B_{2m}.
inline double bernoulli_even(int m) { return bernoulli(2 * m); }

/// B_1 = -1/2, the only non-zero odd Bernoulli number.
inline double bernoulli_b1() { return bernoulli(1); }

// -- Exponentials -----------------------------------------------------------

/// exp of a symmetric tensor via the closed-form spectral formula
/// e^m (cosh(x) I + sinh(x)/x (Psi - m I)), m = tr/2, x = half gap.
SymTensor2 expm_sym(const SymTensor2& psi);

/// exp of a general tensor with the diagonal (6,6) Pade approximant combined
/// with scaling and squaring.
Tensor2 expm_pade(const Tensor2& x, const KernelTolerances& tol = {});

/// Principal matrix logarithm of a symmetric positive-definite tensor.
/// Throws std::domain_error for non-SPD input.
SymTensor2 logm_sym(const SymTensor2& sigma);

// -- Scalar coupling functions ----------------------------------------------

/// f as a function of the half gap x: (x coth x - 1) / x^2.
double f_of_gap(double x, const KernelTolerances& tol = {});
/// f'(x) / x, smooth at x = 0.
double f_prime_over_gap(double x, const KernelTolerances& tol = {});
/// g as a function of the half gap x: (sinh x - x) / x^3.
double g_of_gap(double x, const KernelTolerances& tol = {});
/// g'(x) / x, smooth at x = 0.
double g_prime_over_gap(double x, const KernelTolerances& tol = {});

inline double f_coupling(const SymTensor2& psi, const KernelTolerances& tol = {}) {
  return f_of_gap(half_gap(psi), tol);
}
inline double g_deriv(const SymTensor2& psi, const KernelTolerances& tol = {}) {
  return g_of_gap(half_gap(psi), tol);
}

/// 2 eps + 2 M(Psi) [gamma(Psi) eps12 - Psi12 gamma(eps)] f(Psi); the closed
/// form of 2 sum_n B_2n/(2n)! {Psi, eps}_2n valid for every symmetric Psi.
SymTensor2 strain_coupling_closed(const SymTensor2& psi, const SymTensor2& eps,
                                  const KernelTolerances& tol = {});

/// Derivative of strain_coupling_closed with respect to Psi in direction dpsi
/// (eps held fixed). Linear in eps as well, so the eps derivative is simply
/// strain_coupling_closed(psi, deps).
SymTensor2 strain_coupling_dpsi(const SymTensor2& psi, const SymTensor2& eps, const SymTensor2& dpsi,
                                const KernelTolerances& tol = {});

/// sum_{n=0..terms} B_2n/(2n)! {Psi, eps}_2n by brute-force commutators.
/// Throws std::domain_error if ||Psi||_F >= pi.
SymTensor2 series_rhs_oracle(const SymTensor2& psi, const SymTensor2& eps, int terms);

// -- Derivative of the exponential ------------------------------------------

/// e^{-Psi/2} (D exp(Psi)[dpsi]) e^{-Psi/2}
///   = dpsi + M(Psi) [gamma(Psi) dpsi12 - Psi12 gamma(dpsi)] g(Psi).
SymTensor2 exp_derivative_sandwich(const SymTensor2& psi, const SymTensor2& dpsi,
                                   const KernelTolerances& tol = {});

/// D exp(Psi)[dpsi] = e^{Psi/2} S(Psi, dpsi) e^{Psi/2}.
SymTensor2 exp_directional_derivative(const SymTensor2& psi, const SymTensor2& dpsi,
                                      const KernelTolerances& tol = {});

/// Derivative of exp_derivative_sandwich(psi, y) with respect to psi in direction dpsi.
SymTensor2 exp_derivative_sandwich_dpsi(const SymTensor2& psi, const SymTensor2& y,
                                        const SymTensor2& dpsi, const KernelTolerances& tol = {});

/// Second derivative D^2 exp(Psi)[y, dpsi]: the dpsi-derivative of
/// exp_directional_derivative(psi, y).
SymTensor2 exp_second_derivative(const SymTensor2& psi, const SymTensor2& y, const SymTensor2& dpsi,
                                 const KernelTolerances& tol = {});

// -- Quadrature and series oracles ------------------------------------------

struct GaussRule1D {
  std::vector<double> nodes;    ///< on [0, 1]
  std::vector<double> weights;  ///< sum to 1
};

/// Gauss-Legendre rule with npts points mapped to [0, 1].
GaussRule1D gauss_legendre_unit(int npts);

/// int_0^1 e^{(1-a) X} Y e^{a X} da by Gauss-Legendre quadrature (npts >= 8).
Tensor2 wilcox_integral_oracle(const Tensor2& x, const Tensor2& y, int npts);

/// sum_{n=0..terms} 1/(n+1)! {X, Y}_n e^X.
Tensor2 wilcox_series(const Tensor2& x, const Tensor2& y, int terms);

/// e^{X/2} (sum_{n=0..terms} 1/(2n+1)! 2^{-2n} {X, Y}_2n) e^{X/2}.
Tensor2 wilcox_sandwich_series(const Tensor2& x, const Tensor2& y, int terms);

/// e^X Y e^{-X} computed directly with expm_pade.
Tensor2 hadamard_conjugation(const Tensor2& x, const Tensor2& y);

/// sum_{n=0..terms} 1/n! {X, Y}_n.
Tensor2 hadamard_series(const Tensor2& x, const Tensor2& y, int terms);

}  // namespace logconf
