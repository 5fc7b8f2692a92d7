#include "logconf/fem/reference.hpp"

#include <cmath>

#include "logconf/matfun.hpp"

namespace logconf::fem {

ShapeP2 shape_p2(const Vec2& ref) {
  const double xi = ref.x;
  const double eta = ref.y;
  const double l0 = 1.0 - xi - eta;
  const double l1 = xi;
  const double l2 = eta;
  // gradients of barycentric coordinates
  constexpr Vec2 g0{-1.0, -1.0};
  constexpr Vec2 g1{1.0, 0.0};
  constexpr Vec2 g2{0.0, 1.0};

  ShapeP2 s;
  s.value = {l0 * (2.0 * l0 - 1.0), l1 * (2.0 * l1 - 1.0), l2 * (2.0 * l2 - 1.0),
             4.0 * l0 * l1,         4.0 * l1 * l2,         4.0 * l2 * l0};
  s.grad = {(4.0 * l0 - 1.0) * g0,    (4.0 * l1 - 1.0) * g1,    (4.0 * l2 - 1.0) * g2,
            4.0 * (l1 * g0 + l0 * g1), 4.0 * (l2 * g1 + l1 * g2), 4.0 * (l0 * g2 + l2 * g0)};

  // Hessian of 4 la lb is 4 (ga gb^T + gb ga^T); of la(2la-1) it is 4 ga ga^T
  const auto outer_sym = [](const Vec2& a, const Vec2& b) {
    return SymTensor2{2.0 * a.x * b.x, a.x * b.y + a.y * b.x, 2.0 * a.y * b.y};
  };
  s.hessian = {2.0 * outer_sym(g0, g0), 2.0 * outer_sym(g1, g1), 2.0 * outer_sym(g2, g2),
               4.0 * outer_sym(g0, g1), 4.0 * outer_sym(g1, g2), 4.0 * outer_sym(g2, g0)};
  return s;
}

const std::vector<QuadraturePoint>& triangle_rule_degree5() {
  static const std::vector<QuadraturePoint> rule = [] {
    const double s15 = std::sqrt(15.0);
    const double a = (6.0 - s15) / 21.0;
    const double b = (9.0 + 2.0 * s15) / 21.0;
    const double c = (6.0 + s15) / 21.0;
    const double d = (9.0 - 2.0 * s15) / 21.0;
    const double wa = (155.0 - s15) / 2400.0;
    const double wc = (155.0 + s15) / 2400.0;
    return std::vector<QuadraturePoint>{
        {{1.0 / 3.0, 1.0 / 3.0}, 9.0 / 80.0},
        {{a, a}, wa}, {{b, a}, wa}, {{a, b}, wa},
        {{c, c}, wc}, {{d, c}, wc}, {{c, d}, wc},
    };
  }();
  return rule;
}

const EdgeRule& edge_rule_4pt() {
  static const EdgeRule rule = [] {
    const GaussRule1D g = gauss_legendre_unit(4);
    return EdgeRule{g.nodes, g.weights};
  }();
  return rule;
}

const std::array<Vec2, 6>& reference_nodes() {
  static const std::array<Vec2, 6> nodes{{{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}, {0.5, 0.0}, {0.5, 0.5}, {0.0, 0.5}}};
  return nodes;
}

Vec2 edge_reference_point(int local_edge, double t) {
  const auto& nodes = reference_nodes();
  const Vec2 a = nodes[kElementEdges[local_edge][0]];
  const Vec2 b = nodes[kElementEdges[local_edge][1]];
  return (1.0 - t) * a + t * b;
}

}  // namespace logconf::fem
