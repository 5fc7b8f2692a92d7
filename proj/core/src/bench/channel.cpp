#include "logconf/bench/channel.hpp"

#include <cmath>

#include "logconf/bench/inflow.hpp"
#include "logconf/fem/assembly.hpp"
#include "logconf/fem/postprocess.hpp"
#include "logconf/fem/reference.hpp"

namespace logconf::bench {

namespace {

struct Exact {
  double R, ubar, mu, lambda;

  [[nodiscard]] std::array<double, fem::kSlots> at(const Vec2& x) const {
    const double y = std::clamp(x.y, 0.0, 2.0 * R);
    const SymTensor2 psi = inflow_psi(y, lambda, ubar, R);
    // dp/dx = mu u'' for steady Oldroyd-B shear; p = 0 at x = 0
    const double dpdx = -0.75 * mu * ubar / (R * R);
    return {inflow_velocity(y, ubar, R), 0.0, dpdx * x.x, psi.xx, psi.xy, psi.yy};
  }
};

}  // namespace

std::vector<ChannelCase> solve_channel(const ChannelConfig& cfg, int nx, int ny) {
  const Mesh mesh = gen_channel_mesh(cfg.length, 2.0 * cfg.R, nx, ny);
  std::vector<ChannelCase> out;
  for (const double wi : cfg.wis) {
    FluidParams prm;
    prm.mu_s = cfg.beta * cfg.mu;
    prm.mu_p = (1.0 - cfg.beta) * cfg.mu;
    prm.lambda = wi * cfg.R / cfg.ubar;
    const Exact exact{cfg.R, cfg.ubar, cfg.mu, prm.lambda};
    const auto value = [&](const Vec2& x) { return exact.at(x); };

    fem::BcSpec bc;
    bc.prescriptions.push_back({BoundaryTag::Inflow, {true, true, false, true, true, true}, value});
    bc.prescriptions.push_back({BoundaryTag::Wall, {true, true, false, false, false, false}, value});
    bc.prescriptions.push_back({BoundaryTag::Symmetry, {false, true, false, false, true, false}, value});
    bc.prescriptions.push_back({BoundaryTag::Outflow, {true, true, false, false, false, false}, value});
    int pin = 0;
    for (int n = 1; n < mesh.num_nodes(); ++n) {
      if (norm(mesh.nodes[n]) < norm(mesh.nodes[pin])) pin = n;
    }
    bc.pressure_pin_node = pin;
    bc.pressure_pin_value = exact.at(mesh.nodes[pin])[fem::P];

    // Stokes start: Psi clamped to zero everywhere
    fem::FieldState state(mesh.num_nodes());
    fem::DofMap clamped(mesh.num_nodes());
    fem::apply_dirichlet(mesh, clamped, state, bc);
    std::vector<std::uint8_t> mask(clamped.num_dofs());
    for (int d = 0; d < clamped.num_dofs(); ++d) {
      const bool psi = d % fem::kSlots >= fem::PSI11;
      mask[d] = clamped.is_dirichlet(d) || psi;
      if (psi) state.values[d] = 0.0;
    }
    clamped.set_dirichlet_mask(std::move(mask));
    const fem::Assembler stokes(mesh, clamped, prm);
    solver::NewtonResult start = solver::newton_solve(stokes, state, cfg.newton, cfg.linear);
    if (!start.converged()) throw std::runtime_error("channel: Stokes start failed: " + start.message);

    fem::DofMap dofs(mesh.num_nodes());
    fem::apply_dirichlet(mesh, dofs, start.state, bc);
    const fem::Assembler A(mesh, dofs, prm);
    const solver::NewtonResult r = solver::newton_solve(A, start.state, cfg.newton, cfg.linear);

    ChannelCase c;
    c.wi = wi;
    c.nx = nx;
    c.ny = ny;
    c.converged = r.converged();
    c.newton_iters = r.iterations();
    c.history = r.history;
    for (int n = 0; n < mesh.num_nodes(); ++n) {
      const auto e = exact.at(mesh.nodes[n]);
      c.velocity_max_error = std::max({c.velocity_max_error, std::abs(r.state.at(n, fem::U) - e[fem::U]),
                                       std::abs(r.state.at(n, fem::V))});
    }
    double err2 = 0.0;
    for (int e = 0; e < mesh.num_elements(); ++e) {
      for (const auto& q : fem::triangle_rule_degree5()) {
        const fem::FieldSample s = fem::evaluate_at(mesh, r.state, e, q.ref);
        const ElementMap m = map_point(mesh, e, q.ref);
        const SymTensor2 ex = inflow_psi(std::clamp(m.x.y, 0.0, 2.0 * cfg.R), prm.lambda, cfg.ubar, cfg.R);
        err2 += q.weight * std::abs(m.det) * frobenius(s.psi - ex) * frobenius(s.psi - ex);
      }
    }
    c.psi_l2_error = std::sqrt(err2);
    c.spd_violations = fem::count_spd_violations(mesh, r.state);
    out.push_back(std::move(c));
  }
  return out;
}

ChannelReport run_channel_verification(const ChannelConfig& cfg) {
  ChannelReport rep;
  rep.coarse = solve_channel(cfg, cfg.nx, cfg.ny);
  if (cfg.refine) {
    rep.fine = solve_channel(cfg, 2 * cfg.nx, 2 * cfg.ny);
    for (std::size_t i = 0; i < rep.coarse.size(); ++i) {
      rep.psi_order.push_back(std::log2(rep.coarse[i].psi_l2_error / rep.fine[i].psi_l2_error));
    }
  }
  return rep;
}

}  // namespace logconf::bench
