#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "logconf/mesh.hpp"
#include "logconf/tensor2.hpp"

namespace logconf::fem {

enum Slot : int { U = 0, V = 1, P = 2, PSI11 = 3, PSI12 = 4, PSI22 = 5 };
inline constexpr int kSlots = 6;

/// Equal-order unknowns per node: [u, v, p, Psi11, Psi12, Psi22], global index 6 * node + slot.
class DofMap {
 public:
  explicit DofMap(int num_nodes = 0);

  static constexpr int global(int node, int slot) { return kSlots * node + slot; }
  [[nodiscard]] int num_nodes() const { return num_nodes_; }
  [[nodiscard]] int num_dofs() const { return kSlots * num_nodes_; }
  [[nodiscard]] int num_free() const { return static_cast<int>(free_to_global_.size()); }
  [[nodiscard]] bool is_dirichlet(int dof) const { return dirichlet_[dof] != 0; }
  /// Free index of a global dof, -1 for Dirichlet dofs.
  [[nodiscard]] int free_index(int dof) const { return global_to_free_[dof]; }
  [[nodiscard]] const std::vector<int>& free_dofs() const { return free_to_global_; }

  void set_dirichlet(int dof, bool on);
  void set_dirichlet_mask(std::vector<std::uint8_t> mask);
  void clear_dirichlet();

 private:
  void rebuild();

  int num_nodes_{0};
  std::vector<std::uint8_t> dirichlet_;
  std::vector<int> global_to_free_;
  std::vector<int> free_to_global_;
};

struct FieldState {
  std::vector<double> values;

  FieldState() = default;
  explicit FieldState(int num_nodes) : values(static_cast<std::size_t>(kSlots) * num_nodes, 0.0) {}

  double& at(int node, int slot) { return values[DofMap::global(node, slot)]; }
  [[nodiscard]] double at(int node, int slot) const { return values[DofMap::global(node, slot)]; }
  [[nodiscard]] Vec2 velocity(int node) const { return {at(node, U), at(node, V)}; }
  [[nodiscard]] SymTensor2 psi(int node) const { return {at(node, PSI11), at(node, PSI12), at(node, PSI22)}; }
  void set_psi(int node, const SymTensor2& p) {
    at(node, PSI11) = p.xx;
    at(node, PSI12) = p.xy;
    at(node, PSI22) = p.yy;
  }
  [[nodiscard]] bool all_finite() const;
};

/// Values for all six slots at a boundary point; only the masked slots are used.
using BoundaryValue = std::function<std::array<double, kSlots>(const Vec2&)>;

struct BoundaryPrescription {
  BoundaryTag tag{BoundaryTag::Wall};
  std::array<bool, kSlots> components{};
  BoundaryValue value;  ///< empty means homogeneous
};

struct BcSpec {
  std::vector<BoundaryPrescription> prescriptions;
  /// Earlier tags win at shared nodes.
  std::vector<BoundaryTag> precedence{BoundaryTag::Inflow, BoundaryTag::Wall, BoundaryTag::Cylinder,
                                      BoundaryTag::Symmetry, BoundaryTag::Outflow};
  std::optional<int> pressure_pin_node;
  double pressure_pin_value{0.0};
};

/// Sets the Dirichlet mask and values. Throws std::invalid_argument when two
/// tags outside the precedence list prescribe different values at one dof.
void apply_dirichlet(const Mesh& mesh, DofMap& dofs, FieldState& state, const BcSpec& bc);

/// Boundary prescriptions of the benchmark: walls and cylinder no-slip, symmetry
/// v = Psi12 = 0, outflow v = 0, inflow full velocity and Psi from `inflow`.
BcSpec benchmark_bcs(BoundaryValue inflow);

}  // namespace logconf::fem
