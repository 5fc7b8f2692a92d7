#include "logconf/constitutive.hpp"

#include <stdexcept>

namespace logconf {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

SymTensor2 advect(const Vec2& u, const std::array<SymTensor2, 2>& grad) { return u.x * grad[0] + u.y * grad[1]; }

}  // namespace

void FluidParams::validate() const {
  if (!(rho >= 0.0)) throw std::invalid_argument("FluidParams: rho must be >= 0");
  if (!(mu_s > 0.0)) throw std::invalid_argument("FluidParams: mu_s must be > 0");
  if (!(mu_p > 0.0)) throw std::invalid_argument("FluidParams: mu_p must be > 0");
  if (!(lambda > 0.0)) throw std::invalid_argument("FluidParams: lambda must be > 0");
  if (const auto* g = std::get_if<Giesekus>(&model)) {
    if (!(g->alpha >= 0.0 && g->alpha <= 1.0)) throw std::invalid_argument("FluidParams: Giesekus alpha must lie in [0, 1]");
  }
}

SymTensor2 relaxation_source(const FluidParams& params, const SymTensor2& psi) {
  return std::visit(Overloaded{
                        [&](const OldroydB&) { return SymTensor2::identity() - expm_sym(-psi); },
                        [&](const Giesekus& g) {
                          return (1.0 - 2.0 * g.alpha) * SymTensor2::identity() -
                                 (1.0 - g.alpha) * expm_sym(-psi) + g.alpha * expm_sym(psi);
                        },
                    },
                    params.model);
}

SymTensor2 relaxation_source_dpsi(const FluidParams& params, const SymTensor2& psi, const SymTensor2& dpsi) {
  // d/dt e^{-(Psi + t d)} = -D exp(-Psi)[d]
  return std::visit(Overloaded{
                        [&](const OldroydB&) { return exp_directional_derivative(-psi, dpsi); },
                        [&](const Giesekus& g) {
                          return (1.0 - g.alpha) * exp_directional_derivative(-psi, dpsi) +
                                 g.alpha * exp_directional_derivative(psi, dpsi);
                        },
                    },
                    params.model);
}

SymTensor2 relaxation_function(const FluidParams& params, const SymTensor2& sigma) {
  const SymTensor2 excess = sigma - SymTensor2::identity();
  return std::visit(Overloaded{
                        [&](const OldroydB&) { return excess; },
                        [&](const Giesekus& g) { return excess + g.alpha * sym(excess * excess); },
                    },
                    params.model);
}

SymTensor2 psi_residual_steady(const PointState& s, const FluidParams& params, const KernelTolerances& tol) {
  const auto [eps, omega] = strain_and_vorticity(s.gradu);
  return advect(s.u, s.gradpsi) + commutator_sym_antisym(s.psi, omega) +
         (1.0 / params.lambda) * relaxation_source(params, s.psi) - strain_coupling_closed(s.psi, eps, tol);
}

SymTensor2 psi_residual_jacobian(const PointState& s, const FluidParams& params, const PointDirection& d,
                                 const KernelTolerances& tol) {
  const auto [eps, omega] = strain_and_vorticity(s.gradu);
  const auto [deps, domega] = strain_and_vorticity(d.dgradu);
  return advect(d.du, s.gradpsi) + advect(s.u, d.dgradpsi) + commutator_sym_antisym(d.dpsi, omega) +
         commutator_sym_antisym(s.psi, domega) + (1.0 / params.lambda) * relaxation_source_dpsi(params, s.psi, d.dpsi) -
         strain_coupling_dpsi(s.psi, eps, d.dpsi, tol) - strain_coupling_closed(s.psi, deps, tol);
}

SymTensor2 conformation_residual_steady(const Vec2& u, const Tensor2& gradu, const SymTensor2& sigma,
                                        const std::array<SymTensor2, 2>& gradsigma, const FluidParams& params) {
  if (!(sigma.xx > 0.0) || !(det(sigma) > 0.0)) {
    throw std::domain_error("conformation_residual_steady: sigma is not positive definite");
  }
  const Tensor2 stretch = gradu * sigma;
  return advect(u, gradsigma) - SymTensor2{2.0 * stretch.xx, stretch.xy + stretch.yx, 2.0 * stretch.yy} +
         (1.0 / params.lambda) * relaxation_function(params, sigma);
}

double theorem_transfer_check(const SymTensor2& psi, const Tensor2& gradu, const FluidParams& params,
                              const KernelTolerances& tol) {
  const auto [eps, omega] = strain_and_vorticity(gradu);
  // material derivative of Psi such that the log-conformation residual vanishes
  const SymTensor2 dpsi_dt = strain_coupling_closed(psi, eps, tol) - commutator_sym_antisym(psi, omega) -
                             (1.0 / params.lambda) * relaxation_source(params, psi);
  const SymTensor2 sigma = expm_sym(psi);
  const SymTensor2 dsigma_dt = exp_directional_derivative(psi, dpsi_dt, tol);
  const Tensor2 stretch = gradu * sigma;
  const SymTensor2 residual = dsigma_dt - SymTensor2{2.0 * stretch.xx, stretch.xy + stretch.yx, 2.0 * stretch.yy} +
                              (1.0 / params.lambda) * relaxation_function(params, sigma);
  return frobenius(residual);
}

}  // namespace logconf
