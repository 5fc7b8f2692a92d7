#include "logconf/fem/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <string>

namespace logconf::fem {

namespace {

// Momentum stabilization constant, kept verbatim.
constexpr double kTauMomConstant = 314.0;

struct QpFields {
  Vec2 u;
  Tensor2 gradu;  // (grad u)_ij = d_j u_i
  Vec2 lapu;
  double p{0.0};
  Vec2 gradp;
  SymTensor2 psi;
  std::array<SymTensor2, 2> gradpsi{};
};

// Test-side coefficients of one equation: c0 * N + c1 . grad N + c2 * lap N.
struct Coeff {
  double c0{0.0};
  Vec2 c1;
  double c2{0.0};
};
using Coeffs = std::array<Coeff, kSlots>;

struct Stab {
  double rho{0.0};       // 0 in creeping flow
  double tau_gls{0.0};   // tau_mom / rho
  double tau_supg{0.0};
  Vec2 u_test;
};

constexpr std::array<SymTensor2, 3> kPsiBasis{SymTensor2{1.0, 0.0, 0.0}, SymTensor2{0.0, 1.0, 0.0}, SymTensor2{0.0, 0.0, 1.0}};

// E_s : R with the off-diagonal test counted on both entries
double psi_test_contract(int s, const SymTensor2& r) {
  return s == 0 ? r.xx : (s == 1 ? 2.0 * r.xy : r.yy);
}

// E_s applied to a vector
Vec2 psi_test_apply(int s, const Vec2& r) {
  return s == 0 ? Vec2{r.x, 0.0} : (s == 1 ? Vec2{r.y, r.x} : Vec2{0.0, r.y});
}

Vec2 divergence(const std::array<SymTensor2, 2>& d) { return {d[0].xx + d[1].xy, d[0].xy + d[1].yy}; }

// Fills the coefficients given the strong momentum residual r, the stress-like
// flux X, advection, continuity and Psi residual (or their linearizations).
void fill_coeffs(Coeffs& c, const FluidParams& prm, const Stab& st, const SymTensor2& X, const Vec2& adv,
                 const Vec2& r, double divu, const SymTensor2& rpsi, const Vec2& u_test) {
  c[U] = {st.rho * adv.x, Vec2{X.xx, X.xy} + (st.tau_gls * st.rho * r.x) * u_test, st.tau_gls * prm.mu_s * r.x};
  c[V] = {st.rho * adv.y, Vec2{X.xy, X.yy} + (st.tau_gls * st.rho * r.y) * u_test, st.tau_gls * prm.mu_s * r.y};
  c[P] = {divu, st.tau_gls * r, 0.0};
  const double k = prm.mu_p / (2.0 * prm.lambda);
  const double kg = st.tau_gls * prm.mu_p / prm.lambda;
  for (int s = 0; s < 3; ++s) {
    const double er = psi_test_contract(s, rpsi);
    c[PSI11 + s] = {k * er, (k * st.tau_supg * er) * u_test - kg * psi_test_apply(s, r), 0.0};
  }
}

struct QpResidual {
  SymTensor2 sigma;
  std::array<SymTensor2, 2> dsigma{};
  Vec2 r;
  SymTensor2 rpsi;
};

QpResidual residual_coeffs(Coeffs& c, const QpFields& f, const FluidParams& prm, const Stab& st,
                           const KernelTolerances& tol) {
  QpResidual q;
  q.sigma = expm_sym(f.psi);
  const double mp = prm.mu_p / prm.lambda;
  const SymTensor2 T = mp * (q.sigma - SymTensor2::identity());
  const SymTensor2 X = 2.0 * prm.mu_s * sym(f.gradu) + T - f.p * SymTensor2::identity();
  const Vec2 adv = f.gradu * f.u;
  for (int j = 0; j < 2; ++j) q.dsigma[j] = exp_directional_derivative(f.psi, f.gradpsi[j], tol);
  q.r = st.rho * adv + f.gradp - prm.mu_s * f.lapu - mp * divergence(q.dsigma);
  q.rpsi = psi_residual_steady(PointState{f.u, f.gradu, f.psi, f.gradpsi}, prm, tol);
  fill_coeffs(c, prm, st, X, adv, q.r, f.gradu.xx + f.gradu.yy, q.rpsi, st.u_test);
  return q;
}

void linear_coeffs(Coeffs& c, const QpFields& f, const QpFields& d, const QpResidual& base, const FluidParams& prm,
                   const Stab& st, bool full, const KernelTolerances& tol) {
  const double mp = prm.mu_p / prm.lambda;
  const bool has_dpsi = d.psi.xx != 0.0 || d.psi.xy != 0.0 || d.psi.yy != 0.0;
  const bool has_dgradpsi = frobenius(d.gradpsi[0]) != 0.0 || frobenius(d.gradpsi[1]) != 0.0;
  SymTensor2 dT;
  if (has_dpsi) dT = mp * exp_directional_derivative(f.psi, d.psi, tol);
  const SymTensor2 dX = 2.0 * prm.mu_s * sym(d.gradu) + dT - d.p * SymTensor2::identity();
  const Vec2 dadv = d.gradu * f.u + f.gradu * d.u;
  std::array<SymTensor2, 2> ddsigma{};
  for (int j = 0; j < 2; ++j) {
    if (has_dpsi) ddsigma[j] += exp_second_derivative(f.psi, f.gradpsi[j], d.psi, tol);
    if (has_dgradpsi) ddsigma[j] += exp_directional_derivative(f.psi, d.gradpsi[j], tol);
  }
  const Vec2 dr = st.rho * dadv + d.gradp - prm.mu_s * d.lapu - mp * divergence(ddsigma);
  const SymTensor2 drpsi =
      psi_residual_jacobian(PointState{f.u, f.gradu, f.psi, f.gradpsi}, prm, PointDirection{d.u, d.gradu, d.psi, d.gradpsi}, tol);
  fill_coeffs(c, prm, st, dX, dadv, dr, d.gradu.xx + d.gradu.yy, drpsi, st.u_test);
  if (full) {
    // velocity inside the test operators
    c[U].c1 += (st.tau_gls * st.rho * base.r.x) * d.u;
    c[V].c1 += (st.tau_gls * st.rho * base.r.y) * d.u;
    const double k = prm.mu_p / (2.0 * prm.lambda);
    for (int s = 0; s < 3; ++s) c[PSI11 + s].c1 += (k * st.tau_supg * psi_test_contract(s, base.rpsi)) * d.u;
  }
}

// Unit trial directions: for slot s, component 0 = value, 1 = d/dx, 2 = d/dy, 3 = Laplacian.
QpFields unit_direction(int slot, int comp) {
  QpFields d;
  if (slot == U || slot == V) {
    const bool x = slot == U;
    switch (comp) {
      case 0: (x ? d.u.x : d.u.y) = 1.0; break;
      case 1: (x ? d.gradu.xx : d.gradu.yx) = 1.0; break;
      case 2: (x ? d.gradu.xy : d.gradu.yy) = 1.0; break;
      case 3: (x ? d.lapu.x : d.lapu.y) = 1.0; break;
      default: break;
    }
  } else if (slot == P) {
    switch (comp) {
      case 0: d.p = 1.0; break;
      case 1: d.gradp.x = 1.0; break;
      case 2: d.gradp.y = 1.0; break;
      default: break;
    }
  } else {
    const SymTensor2 e = kPsiBasis[slot - PSI11];
    switch (comp) {
      case 0: d.psi = e; break;
      case 1: d.gradpsi[0] = e; break;
      case 2: d.gradpsi[1] = e; break;
      default: break;
    }
  }
  return d;
}

double test_value(const Coeff& c, const Assembler::QuadGeometry& g, int a) {
  return c.c0 * g.value[a] + dot(c.c1, g.grad[a]) + c.c2 * g.laplacian[a];
}

}  // namespace

double tau_mom(double h, double speed, const FluidParams& params, bool creeping) {
  const double diffusive = params.rho * h * h / (kTauMomConstant * params.mu_total());
  if (creeping || !(speed > 0.0)) return diffusive;
  return std::min(diffusive, h / (2.0 * speed));
}

double tau_mom_over_rho(double h, double speed, const FluidParams& params, bool creeping) {
  const double diffusive = h * h / (kTauMomConstant * params.mu_total());
  if (creeping || !(speed > 0.0) || params.rho == 0.0) return diffusive;
  return std::min(diffusive, h / (2.0 * params.rho * speed));
}

double tau_cons(double h, double speed, double lambda) { return 1.0 / (2.0 * speed / h + 1.0 / lambda); }

Assembler::QuadGeometry physical_shape(const Mesh& mesh, int element, const Vec2& ref, double rule_weight) {
  const auto& conn = mesh.elements[element];
  const ShapeP2 sh = shape_p2(ref);
  Tensor2 J;
  Vec2 x;
  SymTensor2 hx;  // reference Hessians of the map components
  SymTensor2 hy;
  for (int a = 0; a < kNodesPerElement; ++a) {
    const Vec2& p = mesh.nodes[conn[a]];
    x += sh.value[a] * p;
    J.xx += p.x * sh.grad[a].x;
    J.xy += p.x * sh.grad[a].y;
    J.yx += p.y * sh.grad[a].x;
    J.yy += p.y * sh.grad[a].y;
    hx += p.x * sh.hessian[a];
    hy += p.y * sh.hessian[a];
  }
  const double detJ = det(J);
  const Tensor2 Ji{J.yy / detJ, -J.xy / detJ, -J.yx / detJ, J.xx / detJ};
  const bool affine = mesh.affine[element] != 0;

  Assembler::QuadGeometry g{};
  g.weight = rule_weight * std::abs(detJ);
  g.x = x;
  for (int a = 0; a < kNodesPerElement; ++a) {
    g.value[a] = sh.value[a];
    const Vec2 gr = sh.grad[a];
    g.grad[a] = {Ji.xx * gr.x + Ji.yx * gr.y, Ji.xy * gr.x + Ji.yy * gr.y};
    // physical Hessian = Ji^T (H_ref - sum_k dN/dx_k H(x_k)) Ji
    SymTensor2 H = sh.hessian[a];
    if (!affine) H -= g.grad[a].x * hx + g.grad[a].y * hy;
    double lap = 0.0;
    for (int k = 0; k < 2; ++k) {
      const double c0 = k == 0 ? Ji.xx : Ji.xy;  // Ji(0, k)
      const double c1 = k == 0 ? Ji.yx : Ji.yy;  // Ji(1, k)
      lap += c0 * c0 * H.xx + 2.0 * c0 * c1 * H.xy + c1 * c1 * H.yy;
    }
    g.laplacian[a] = lap;
  }
  return g;
}

Assembler::Assembler(const Mesh& mesh, const DofMap& dofs, FluidParams params, AssemblyOptions options)
    : mesh_(&mesh), dofs_(&dofs), params_(params), options_(options) {
  params_.validate();
  if (dofs.num_nodes() != mesh.num_nodes()) throw std::invalid_argument("Assembler: DofMap does not match the mesh");
  const auto& rule = triangle_rule_degree5();
  geometry_.resize(mesh.elements.size());
  h_.resize(mesh.elements.size());
  for (int e = 0; e < mesh.num_elements(); ++e) {
    h_[e] = element_length(mesh, e);
    geometry_[e].reserve(rule.size());
    for (const auto& q : rule) geometry_[e].push_back(physical_shape(mesh, e, q.ref, q.weight));
  }
  build_pattern();
}

void Assembler::set_params(const FluidParams& params) {
  params.validate();
  params_ = params;
}

void Assembler::build_pattern() {
  std::vector<CsrMatrix::Triplet> triplets;
  const auto local_free = [this](int e, int i) {
    return dofs_->free_index(DofMap::global(mesh_->elements[e][i / kSlots], i % kSlots));
  };
  for (int e = 0; e < mesh_->num_elements(); ++e) {
    for (int i = 0; i < 36; ++i) {
      const int r = local_free(e, i);
      if (r < 0) continue;
      for (int j = 0; j < 36; ++j) {
        const int c = local_free(e, j);
        if (c >= 0) triplets.push_back({r, c, 0.0});
      }
    }
  }
  pattern_ = CsrMatrix::from_triplets(dofs_->num_free(), std::move(triplets));
  element_slots_.assign(static_cast<std::size_t>(mesh_->num_elements()) * 36 * 36, -1);
  for (int e = 0; e < mesh_->num_elements(); ++e) {
    for (int i = 0; i < 36; ++i) {
      const int r = local_free(e, i);
      if (r < 0) continue;
      for (int j = 0; j < 36; ++j) {
        const int c = local_free(e, j);
        if (c >= 0) element_slots_[(static_cast<std::size_t>(e) * 36 + i) * 36 + j] = pattern_.find(r, c);
      }
    }
  }
}

void Assembler::element_kernel(int e, const FieldState& state, const StabilizationFreeze& freeze,
                               std::array<double, 36>* res, std::array<double, 36 * 36>* jac) const {
  const auto& conn = mesh_->elements[e];
  const auto& prm = params_;
  const auto& geo = geometry_[e];

  std::array<double, 36> loc{};
  for (int a = 0; a < 6; ++a) {
    for (int s = 0; s < kSlots; ++s) loc[a * kSlots + s] = state.at(conn[a], s);
  }
  const auto velocity_at = [&conn](const FieldState& f, const std::array<double, 6>& N) {
    Vec2 u;
    for (int a = 0; a < 6; ++a) u += N[a] * f.velocity(conn[a]);
    return u;
  };

  // stabilization parameters from the velocity at the element centre
  static const std::array<double, 6> centroid = shape_p2({1.0 / 3.0, 1.0 / 3.0}).value;
  const FieldState& tau_state = freeze.tau_velocity ? *freeze.tau_velocity : state;
  const double speed = norm(velocity_at(tau_state, centroid));
  Stab st;
  st.rho = options_.creeping ? 0.0 : prm.rho;
  st.tau_gls = options_.include_gls ? tau_mom_over_rho(h_[e], speed, prm, options_.creeping) : 0.0;
  st.tau_supg = options_.include_supg ? tau_cons(h_[e], speed, prm.lambda) : 0.0;
  const bool full = options_.full_jacobian && freeze.test_velocity == nullptr;

  if (res) res->fill(0.0);
  if (jac) jac->fill(0.0);

  for (const auto& g : geo) {
    QpFields f;
    for (int a = 0; a < 6; ++a) {
      const double* v = &loc[a * kSlots];
      const Vec2 u{v[U], v[V]};
      f.u += g.value[a] * u;
      f.gradu.xx += u.x * g.grad[a].x;
      f.gradu.xy += u.x * g.grad[a].y;
      f.gradu.yx += u.y * g.grad[a].x;
      f.gradu.yy += u.y * g.grad[a].y;
      f.lapu += g.laplacian[a] * u;
      f.p += g.value[a] * v[P];
      f.gradp += v[P] * g.grad[a];
      const SymTensor2 psi{v[PSI11], v[PSI12], v[PSI22]};
      f.psi += g.value[a] * psi;
      f.gradpsi[0] += g.grad[a].x * psi;
      f.gradpsi[1] += g.grad[a].y * psi;
    }
    st.u_test = freeze.test_velocity ? velocity_at(*freeze.test_velocity, g.value) : f.u;

    Coeffs c;
    const QpResidual base = residual_coeffs(c, f, prm, st, options_.kernel);
    if (res) {
      for (int a = 0; a < 6; ++a) {
        for (int ts = 0; ts < kSlots; ++ts) (*res)[a * kSlots + ts] += g.weight * test_value(c[ts], g, a);
      }
    }
    if (!jac) continue;

    std::array<std::array<double, 6>, kSlots> test{};
    for (int s = 0; s < kSlots; ++s) {
      const int ncomp = (s == U || s == V) ? 4 : 3;
      for (int k = 0; k < ncomp; ++k) {
        Coeffs dc;
        linear_coeffs(dc, f, unit_direction(s, k), base, prm, st, full, options_.kernel);
        for (int ts = 0; ts < kSlots; ++ts) {
          for (int a = 0; a < 6; ++a) test[ts][a] = test_value(dc[ts], g, a);
        }
        for (int b = 0; b < 6; ++b) {
          const double trial = g.weight * (k == 0 ? g.value[b] : k == 1 ? g.grad[b].x : k == 2 ? g.grad[b].y : g.laplacian[b]);
          if (trial == 0.0) continue;
          for (int ts = 0; ts < kSlots; ++ts) {
            for (int a = 0; a < 6; ++a) (*jac)[(a * kSlots + ts) * 36 + b * kSlots + s] += test[ts][a] * trial;
          }
        }
      }
    }
  }

  if (res) {
    for (int i = 0; i < 36; ++i) {
      if (!std::isfinite((*res)[i])) throw AssemblyError(e, "non-finite residual in element " + std::to_string(e));
    }
  }
  if (jac) {
    for (double v : *jac) {
      if (!std::isfinite(v)) throw AssemblyError(e, "non-finite Jacobian entry in element " + std::to_string(e));
    }
  }
}

std::vector<double> Assembler::residual(const FieldState& state, const StabilizationFreeze& freeze) const {
  std::vector<double> out(dofs_->num_dofs(), 0.0);
  std::array<double, 36> local{};
  for (int e = 0; e < mesh_->num_elements(); ++e) {
    element_kernel(e, state, freeze, &local, nullptr);
    const auto& conn = mesh_->elements[e];
    for (int i = 0; i < 36; ++i) {
      const int dof = DofMap::global(conn[i / kSlots], i % kSlots);
      if (!dofs_->is_dirichlet(dof)) out[dof] += local[i];
    }
  }
  return out;
}

CsrMatrix Assembler::jacobian(const FieldState& state) const {
  CsrMatrix J = pattern_;
  std::fill(J.val.begin(), J.val.end(), 0.0);
  auto local = std::make_unique<std::array<double, 36 * 36>>();
  for (int e = 0; e < mesh_->num_elements(); ++e) {
    element_kernel(e, state, {}, nullptr, local.get());
    const int* slots = &element_slots_[static_cast<std::size_t>(e) * 36 * 36];
    for (int k = 0; k < 36 * 36; ++k) {
      if (slots[k] >= 0) J.val[slots[k]] += (*local)[k];
    }
  }
  return J;
}

std::vector<double> Assembler::free_part(const std::vector<double>& full) const {
  std::vector<double> out(dofs_->num_free());
  for (int i = 0; i < dofs_->num_free(); ++i) out[i] = full[dofs_->free_dofs()[i]];
  return out;
}

std::vector<double> assemble_residual(const Mesh& mesh, const DofMap& dofs, const FieldState& state,
                                      const FluidParams& params, const AssemblyOptions& options) {
  return Assembler(mesh, dofs, params, options).residual(state);
}

CsrMatrix assemble_jacobian(const Mesh& mesh, const DofMap& dofs, const FieldState& state, const FluidParams& params,
                            const AssemblyOptions& options) {
  return Assembler(mesh, dofs, params, options).jacobian(state);
}

}  // namespace logconf::fem
