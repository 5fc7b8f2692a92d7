#pragma once

// Channel flow with the fully developed Oldroyd-B Poiseuille solution as the
// exact field: inflow, wall and outflow velocity prescribed, pressure pinned.

#include <vector>

#include "logconf/mesh.hpp"
#include "logconf/solver/newton.hpp"

namespace logconf::bench {

struct ChannelConfig {
  double R{1.0};  ///< half height is 2R
  double length{30.0};
  double ubar{1.0};
  double mu{1.0};
  double beta{0.59};
  std::vector<double> wis{0.1, 0.3, 0.6};
  int nx{60};
  int ny{8};
  bool refine{true};  ///< also run 2 nx x 2 ny for the convergence order
  solver::NewtonConfig newton;
  solver::LinearConfig linear;
};

struct ChannelCase {
  double wi{0.0};
  int nx{0};
  int ny{0};
  bool converged{false};
  int newton_iters{0};
  std::vector<solver::NewtonIterate> history;
  double velocity_max_error{0.0};  ///< over all nodes, |u_h - u| and |v_h|
  double psi_l2_error{0.0};
  int spd_violations{0};
};

struct ChannelReport {
  std::vector<ChannelCase> coarse;
  std::vector<ChannelCase> fine;  ///< empty unless refine
  /// log2 of the coarse/fine Psi L2 error ratio, per Wi
  std::vector<double> psi_order;
};

/// Solves each Wi from a zero-Psi Stokes start on one channel mesh.
std::vector<ChannelCase> solve_channel(const ChannelConfig& cfg, int nx, int ny);
ChannelReport run_channel_verification(const ChannelConfig& cfg);

}  // namespace logconf::bench
