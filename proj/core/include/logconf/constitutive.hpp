#pragma once

// Pointwise kernels of the steady log-conformation constitutive equation
//
//   (u . grad) Psi + [Psi, Omega] + (1/lambda) P(e^Psi) e^-Psi - 2 eps
//     - 2 M(Psi) [gamma(Psi) eps12 - Psi12 gamma(eps)] f(Psi) = 0
//
// and of the original conformation equation, which serves as an oracle.

#include <array>
#include <variant>

#include "logconf/matfun.hpp"
#include "logconf/tensor2.hpp"

namespace logconf {

struct OldroydB {};

struct Giesekus {
  double alpha{0.0};  ///< mobility factor in [0, 1]
};

using ConstitutiveModel = std::variant<OldroydB, Giesekus>;

struct FluidParams {
  double rho{0.0};     ///< density [kg/m^3]; 0 selects creeping flow scaling
  double mu_s{0.59};   ///< solvent viscosity [Pa s]
  double mu_p{0.41};   ///< polymer viscosity [Pa s]
  double lambda{0.1};  ///< relaxation time [s]
  ConstitutiveModel model{OldroydB{}};

  double mu_total() const { return mu_s + mu_p; }
  /// Throws std::invalid_argument when an invariant is violated.
  void validate() const;
};

/// Pointwise field values entering the constitutive residual.
struct PointState {
  Vec2 u;
  Tensor2 gradu;
  SymTensor2 psi;
  std::array<SymTensor2, 2> gradpsi;  ///< d Psi / dx, d Psi / dy
};

/// P(e^Psi) e^-Psi expressed through exponentials of +-Psi.
SymTensor2 relaxation_source(const FluidParams& params, const SymTensor2& psi);

/// Derivative of relaxation_source with respect to Psi in direction dpsi.
SymTensor2 relaxation_source_dpsi(const FluidParams& params, const SymTensor2& psi, const SymTensor2& dpsi);

/// P(sigma) for the conformation tensor itself.
SymTensor2 relaxation_function(const FluidParams& params, const SymTensor2& sigma);

/// Steady residual of the log-conformation equation, in units of 1/s.
SymTensor2 psi_residual_steady(const PointState& state, const FluidParams& params,
                               const KernelTolerances& tol = {});

/// Direction for psi_residual_jacobian; unset members are zero.
struct PointDirection {
  Vec2 du;
  Tensor2 dgradu;
  SymTensor2 dpsi;
  std::array<SymTensor2, 2> dgradpsi;
};

/// Exact directional derivative of psi_residual_steady.
SymTensor2 psi_residual_jacobian(const PointState& state, const FluidParams& params, const PointDirection& dir,
                                 const KernelTolerances& tol = {});

/// Steady residual (u . grad) sigma - grad u sigma - sigma grad u^T + P(sigma)/lambda.
/// Throws std::domain_error when sigma is not positive definite.
SymTensor2 conformation_residual_steady(const Vec2& u, const Tensor2& gradu, const SymTensor2& sigma,
                                        const std::array<SymTensor2, 2>& gradsigma, const FluidParams& params);

/// Solves the log-conformation equation for the material derivative of Psi,
/// maps it to the material derivative of sigma = e^Psi through the closed-form
/// derivative of the exponential, and returns the Frobenius norm of the
/// resulting conformation-equation residual. Zero up to round-off for every
/// symmetric Psi, also outside the convergence radius of the commutator series.
double theorem_transfer_check(const SymTensor2& psi, const Tensor2& gradu, const FluidParams& params,
                              const KernelTolerances& tol = {});

}  // namespace logconf
