#include "logconf/bench/inflow.hpp"

#include <cmath>
#include <stdexcept>

#include "logconf/matfun.hpp"

namespace logconf::bench {

namespace {

void check_height(double y, double R) {
  if (!(R > 0.0)) throw std::invalid_argument("inflow: R must be > 0");
  const double slack = 1e-12 * R;
  if (!(y >= -slack && y <= 2.0 * R + slack)) throw std::invalid_argument("inflow: y outside [0, 2R]");
}

}  // namespace

double inflow_velocity(double y, double ubar, double R) {
  check_height(y, R);
  return 0.375 * ubar * (4.0 - y * y / (R * R));
}

double inflow_shear_rate(double y, double ubar, double R) {
  check_height(y, R);
  return -0.75 * ubar * y / (R * R);
}

SymTensor2 shear_conformation(double w) { return {1.0 + 2.0 * w * w, w, 1.0}; }

SymTensor2 shear_psi_logm(double w) { return logm_sym(shear_conformation(w)); }

SymTensor2 shear_psi_opq(double w) {
  if (w == 0.0) return {};
  const double a = std::abs(w);
  const double root = std::sqrt(1.0 + w * w);
  const double p = std::log1p(w * w);
  const double q = -2.0 * std::asinh(a);
  // q w^2 / o = q |w| / sqrt(1 + w^2) and q w / o = sign(w) q / sqrt(1 + w^2)
  const double q_w2_over_o = q * a / root;
  const double sign = w > 0.0 ? 1.0 : -1.0;
  return {0.5 * (p - q_w2_over_o), -0.5 * sign * q / root, 0.5 * (p + q_w2_over_o)};
}

SymTensor2 inflow_psi(double y, double lambda, double ubar, double R) {
  return shear_psi_logm(lambda * inflow_shear_rate(y, ubar, R));
}

}  // namespace logconf::bench
