#pragma once

// Steady equal-order P2 weak form: Galerkin momentum and continuity, adjoint
// GLS momentum stabilization, SUPG-weighted log-conformation equation.

#include <array>
#include <stdexcept>
#include <vector>

#include "logconf/constitutive.hpp"
#include "logconf/fem/dofmap.hpp"
#include "logconf/fem/reference.hpp"
#include "logconf/mesh.hpp"
#include "logconf/sparse.hpp"

namespace logconf::fem {

struct AssemblyOptions {
  bool creeping{true};
  bool include_gls{true};
  bool include_supg{true};
  /// Also differentiate the velocity inside the stabilization test operators
  /// (the stabilization parameters stay frozen). Off reproduces the documented omissions.
  bool full_jacobian{false};
  KernelTolerances kernel{};
};

class AssemblyError : public std::runtime_error {
 public:
  AssemblyError(int element, const std::string& what) : std::runtime_error(what), element_(element) {}
  [[nodiscard]] int element() const { return element_; }

 private:
  int element_;
};

/// Momentum stabilization time scale; creeping: rho h^2 / (314 mu), else
/// min(rho h^2 / (314 mu), h / (2 speed)), mu = mu_s + mu_p.
double tau_mom(double h, double speed, const FluidParams& params, bool creeping);
/// tau_mom / rho, finite as rho -> 0; this is the weight of the GLS term.
double tau_mom_over_rho(double h, double speed, const FluidParams& params, bool creeping);
/// (2 speed / h + 1 / lambda)^-1
double tau_cons(double h, double speed, double lambda);

/// Velocity that enters the stabilization: test operators and parameters.
/// Null means "the state being assembled".
struct StabilizationFreeze {
  const FieldState* test_velocity{nullptr};
  const FieldState* tau_velocity{nullptr};
};

/// Holds per-element geometry and the fixed sparsity pattern over free dofs.
class Assembler {
 public:
  Assembler(const Mesh& mesh, const DofMap& dofs, FluidParams params, AssemblyOptions options = {});

  [[nodiscard]] const Mesh& mesh() const { return *mesh_; }
  [[nodiscard]] const DofMap& dofs() const { return *dofs_; }
  [[nodiscard]] const FluidParams& params() const { return params_; }
  [[nodiscard]] const AssemblyOptions& options() const { return options_; }
  void set_params(const FluidParams& params);

  /// Full-length residual (6 per node), Dirichlet rows zero.
  [[nodiscard]] std::vector<double> residual(const FieldState& state, const StabilizationFreeze& freeze = {}) const;
  /// Jacobian over free dofs (rows and columns in DofMap free order).
  [[nodiscard]] CsrMatrix jacobian(const FieldState& state) const;
  /// Residual restricted to the free dofs.
  [[nodiscard]] std::vector<double> free_part(const std::vector<double>& full) const;

  /// Per-quadrature-point geometry, cached at construction.
  struct QuadGeometry {
    double weight;                   ///< rule weight times |det J|
    Vec2 x;
    std::array<double, 6> value;
    std::array<Vec2, 6> grad;
    std::array<double, 6> laplacian;
  };
  [[nodiscard]] const std::vector<QuadGeometry>& geometry(int element) const { return geometry_[element]; }
  [[nodiscard]] double element_h(int element) const { return h_[element]; }

 private:
  void build_pattern();
  void element_kernel(int element, const FieldState& state, const StabilizationFreeze& freeze,
                      std::array<double, 36>* residual, std::array<double, 36 * 36>* jacobian) const;

  const Mesh* mesh_;
  const DofMap* dofs_;
  FluidParams params_;
  AssemblyOptions options_;
  std::vector<std::vector<QuadGeometry>> geometry_;
  std::vector<double> h_;
  CsrMatrix pattern_;
  std::vector<int> element_slots_;  ///< 36 x 36 CSR positions per element, -1 for Dirichlet rows/cols
};

/// Physical shape data at a reference point: values, gradients, Laplacians.
Assembler::QuadGeometry physical_shape(const Mesh& mesh, int element, const Vec2& ref, double rule_weight = 0.0);

std::vector<double> assemble_residual(const Mesh& mesh, const DofMap& dofs, const FieldState& state,
                                      const FluidParams& params, const AssemblyOptions& options = {});
CsrMatrix assemble_jacobian(const Mesh& mesh, const DofMap& dofs, const FieldState& state, const FluidParams& params,
                            const AssemblyOptions& options = {});

}  // namespace logconf::fem
