#include "logconf/fem/dofmap.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>

namespace logconf::fem {

DofMap::DofMap(int num_nodes) : num_nodes_(num_nodes), dirichlet_(static_cast<std::size_t>(kSlots) * num_nodes, 0) {
  rebuild();
}

void DofMap::set_dirichlet(int dof, bool on) {
  dirichlet_.at(dof) = on ? 1 : 0;
  rebuild();
}

void DofMap::set_dirichlet_mask(std::vector<std::uint8_t> mask) {
  if (mask.size() != dirichlet_.size()) throw std::invalid_argument("DofMap: mask size mismatch");
  dirichlet_ = std::move(mask);
  rebuild();
}

void DofMap::clear_dirichlet() {
  std::fill(dirichlet_.begin(), dirichlet_.end(), 0);
  rebuild();
}

void DofMap::rebuild() {
  global_to_free_.assign(dirichlet_.size(), -1);
  free_to_global_.clear();
  for (int i = 0; i < static_cast<int>(dirichlet_.size()); ++i) {
    if (!dirichlet_[i]) {
      global_to_free_[i] = static_cast<int>(free_to_global_.size());
      free_to_global_.push_back(i);
    }
  }
}

bool FieldState::all_finite() const {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

void apply_dirichlet(const Mesh& mesh, DofMap& dofs, FieldState& state, const BcSpec& bc) {
  const auto rank = [&bc](BoundaryTag t) {
    const auto it = std::find(bc.precedence.begin(), bc.precedence.end(), t);
    return it == bc.precedence.end() ? static_cast<int>(bc.precedence.size()) : static_cast<int>(it - bc.precedence.begin());
  };
  struct Choice {
    int rank;
    BoundaryTag tag;
    double value;
  };
  std::map<int, Choice> chosen;  // global dof -> winning prescription

  for (const BoundaryPrescription& pr : bc.prescriptions) {
    const int r = rank(pr.tag);
    for (const BoundaryEdge& edge : mesh.boundary_edges) {
      if (edge.tag != pr.tag) continue;
      for (int node : edge.nodes) {
        std::array<double, kSlots> values{};
        if (pr.value) values = pr.value(mesh.nodes[node]);
        for (int s = 0; s < kSlots; ++s) {
          if (!pr.components[s]) continue;
          const int dof = DofMap::global(node, s);
          const auto it = chosen.find(dof);
          if (it == chosen.end() || r < it->second.rank) {
            chosen[dof] = {r, pr.tag, values[s]};
          } else if (r == it->second.rank && it->second.tag != pr.tag && it->second.value != values[s]) {
            throw std::invalid_argument("apply_dirichlet: conflicting prescriptions for " + std::string(to_string(pr.tag)) +
                                        " and " + std::string(to_string(it->second.tag)) + " at node " +
                                        std::to_string(node));
          }
        }
      }
    }
  }

  std::vector<std::uint8_t> mask(dofs.num_dofs(), 0);
  for (const auto& [dof, c] : chosen) {
    state.values[dof] = c.value;
    mask[dof] = 1;
  }
  if (bc.pressure_pin_node) {
    const int dof = DofMap::global(*bc.pressure_pin_node, P);
    state.values.at(dof) = bc.pressure_pin_value;
    mask.at(dof) = 1;
  }
  dofs.set_dirichlet_mask(std::move(mask));
}

BcSpec benchmark_bcs(BoundaryValue inflow) {
  BcSpec bc;
  const std::array<bool, kSlots> all_but_p{true, true, false, true, true, true};
  bc.prescriptions.push_back({BoundaryTag::Inflow, all_but_p, std::move(inflow)});
  bc.prescriptions.push_back({BoundaryTag::Wall, {true, true, false, false, false, false}, {}});
  bc.prescriptions.push_back({BoundaryTag::Cylinder, {true, true, false, false, false, false}, {}});
  bc.prescriptions.push_back({BoundaryTag::Symmetry, {false, true, false, false, true, false}, {}});
  bc.prescriptions.push_back({BoundaryTag::Outflow, {false, true, false, false, false, false}, {}});
  return bc;
}

}  // namespace logconf::fem
