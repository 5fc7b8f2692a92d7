#pragma once

// Fully developed Oldroyd-B Poiseuille flow in the half channel 0 <= y <= 2R.

#include "logconf/tensor2.hpp"

namespace logconf::bench {

/// u = 3/8 ubar (4 - y^2 / R^2)
double inflow_velocity(double y, double ubar, double R);
/// du/dy = -3/4 ubar y / R^2
double inflow_shear_rate(double y, double ubar, double R);

/// Steady shear conformation [[1 + 2 w^2, w], [w, 1]] with w = lambda du/dy.
SymTensor2 shear_conformation(double w);

/// log of the shear conformation through the closed-form symmetric logarithm.
SymTensor2 shear_psi_logm(double w);
/// The same through the scalar (o, p, q) formulas, with q = 2 ln(sqrt(1 + w^2) - |w|)
/// evaluated as -2 asinh|w| and the off-diagonal sign taken from w.
SymTensor2 shear_psi_opq(double w);

/// Inflow log-conformation at height y (logm route).
SymTensor2 inflow_psi(double y, double lambda, double ubar, double R);

}  // namespace logconf::bench
