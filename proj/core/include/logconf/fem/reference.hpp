#pragma once

// Reference triangle (0,0), (1,0), (0,1): quadratic Lagrange basis and
// quadrature rules.
//
// Local node order: vertices 0, 1, 2 followed by the edge midnodes of
// (0,1), (1,2), (2,0). Gmsh uses the same ordering for its 6-node triangle.

#include <array>
#include <vector>

#include "logconf/tensor2.hpp"

namespace logconf::fem {

inline constexpr int kNodesPerElement = 6;

/// Local node triples (end, end, mid) for the three element edges.
inline constexpr std::array<std::array<int, 3>, 3> kElementEdges{{{0, 1, 3}, {1, 2, 4}, {2, 0, 5}}};

struct ShapeP2 {
  std::array<double, 6> value{};
  std::array<Vec2, 6> grad{};                  ///< d/dxi, d/deta
  std::array<SymTensor2, 6> hessian{};         ///< constant on the reference element
};

/// Basis values, reference gradients and reference Hessians at (xi, eta).
ShapeP2 shape_p2(const Vec2& ref);

struct QuadraturePoint {
  Vec2 ref;
  double weight{0.0};
};

/// Interior rule exact for polynomials of degree 5 (7 points); weights sum to 1/2.
const std::vector<QuadraturePoint>& triangle_rule_degree5();

/// Gauss-Legendre points on [0, 1] for edge integrals (weights sum to 1).
struct EdgeRule {
  std::vector<double> points;
  std::vector<double> weights;
};
const EdgeRule& edge_rule_4pt();

/// Reference coordinates of the point at parameter t in [0, 1] along local edge e
/// (from its first to its second end vertex).
Vec2 edge_reference_point(int local_edge, double t);

/// Reference coordinates of the six local nodes.
const std::array<Vec2, 6>& reference_nodes();

}  // namespace logconf::fem
