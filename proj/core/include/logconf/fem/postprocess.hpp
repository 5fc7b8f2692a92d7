#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <vector>

#include "logconf/constitutive.hpp"
#include "logconf/fem/dofmap.hpp"
#include "logconf/mesh.hpp"

namespace logconf::fem {

struct FieldSample {
  Vec2 u;
  double p{0.0};
  SymTensor2 psi;
  SymTensor2 sigma;  ///< exp(psi) of the interpolated psi
  int element{-1};
  Vec2 ref;
};

class PointOutsideDomain : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Walk-search point location with a brute-force fallback (the domain is not convex).
class PointLocator {
 public:
  explicit PointLocator(const Mesh& mesh);

  /// Element and reference coordinates containing x; nullopt if outside.
  [[nodiscard]] std::optional<std::pair<int, Vec2>> locate(const Vec2& x, int hint = -1) const;
  /// Reference coordinates of x under the element map (Newton on curved elements).
  [[nodiscard]] Vec2 inverse_map(int element, const Vec2& x) const;

 private:
  [[nodiscard]] bool inside(const Vec2& ref) const;

  const Mesh* mesh_;
  std::vector<std::array<int, 3>> neighbours_;  ///< across local edges 0, 1, 2; -1 on the boundary
  mutable int last_{0};
};

FieldSample evaluate_at(const Mesh& mesh, const FieldState& state, int element, const Vec2& ref);
FieldSample evaluate_field(const Mesh& mesh, const FieldState& state, const Vec2& point);
FieldSample evaluate_field(const PointLocator& locator, const Mesh& mesh, const FieldState& state, const Vec2& point);

/// Legacy ASCII VTK of u, p, Psi, sigma and T11 on 4 linear sub-triangles per element.
void write_vtk(const Mesh& mesh, const FieldState& state, const FluidParams& params, const std::filesystem::path& path);

/// Number of quadrature points where exp(Psi^h) fails to be symmetric positive definite.
int count_spd_violations(const Mesh& mesh, const FieldState& state);

}  // namespace logconf::fem
