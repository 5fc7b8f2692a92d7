#include "logconf/fem/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>

#include "logconf/fem/reference.hpp"
#include "logconf/matfun.hpp"

namespace logconf::fem {

namespace {

constexpr double kInsideTol = 1e-10;

// Barycentric coordinates of a reference point, index i opposite local edge (i + 1) % 3.
std::array<double, 3> barycentric(const Vec2& ref) { return {1.0 - ref.x - ref.y, ref.x, ref.y}; }

}  // namespace

PointLocator::PointLocator(const Mesh& mesh) : mesh_(&mesh), neighbours_(mesh.elements.size(), {-1, -1, -1}) {
  std::map<std::pair<int, int>, std::pair<int, int>> open;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    for (int le = 0; le < 3; ++le) {
      int a = mesh.elements[e][kElementEdges[le][0]];
      int b = mesh.elements[e][kElementEdges[le][1]];
      if (a > b) std::swap(a, b);
      const auto it = open.find({a, b});
      if (it == open.end()) {
        open[{a, b}] = {e, le};
      } else {
        neighbours_[e][le] = it->second.first;
        neighbours_[it->second.first][it->second.second] = e;
        open.erase(it);
      }
    }
  }
}

bool PointLocator::inside(const Vec2& ref) const {
  const auto l = barycentric(ref);
  return l[0] >= -kInsideTol && l[1] >= -kInsideTol && l[2] >= -kInsideTol;
}

Vec2 PointLocator::inverse_map(int element, const Vec2& x) const {
  const auto& conn = mesh_->elements[element];
  const Vec2 p0 = mesh_->nodes[conn[0]];
  const Vec2 e1 = mesh_->nodes[conn[1]] - p0;
  const Vec2 e2 = mesh_->nodes[conn[2]] - p0;
  const double d = e1.x * e2.y - e1.y * e2.x;
  const Vec2 r = x - p0;
  Vec2 ref{(r.x * e2.y - r.y * e2.x) / d, (e1.x * r.y - e1.y * r.x) / d};
  if (mesh_->affine[element]) return ref;
  for (int it = 0; it < 30; ++it) {
    const ElementMap m = map_point(*mesh_, element, ref);
    const Vec2 res = m.x - x;
    const Vec2 step{(m.jacobian.yy * res.x - m.jacobian.xy * res.y) / m.det,
                    (-m.jacobian.yx * res.x + m.jacobian.xx * res.y) / m.det};
    ref -= step;
    if (std::hypot(step.x, step.y) < 1e-15) break;
  }
  return ref;
}

std::optional<std::pair<int, Vec2>> PointLocator::locate(const Vec2& x, int hint) const {
  int e = (hint >= 0 && hint < mesh_->num_elements()) ? hint : last_;
  for (int step = 0; step < mesh_->num_elements(); ++step) {
    const Vec2 ref = inverse_map(e, x);
    if (inside(ref)) {
      last_ = e;
      return std::make_pair(e, ref);
    }
    const auto l = barycentric(ref);
    const int worst = static_cast<int>(std::min_element(l.begin(), l.end()) - l.begin());
    const int next = neighbours_[e][(worst + 1) % 3];
    if (next < 0) break;
    e = next;
  }
  // the walk ran into the boundary (cylinder) or cycled
  for (int k = 0; k < mesh_->num_elements(); ++k) {
    const Vec2 ref = inverse_map(k, x);
    if (inside(ref)) {
      last_ = k;
      return std::make_pair(k, ref);
    }
  }
  return std::nullopt;
}

FieldSample evaluate_at(const Mesh& mesh, const FieldState& state, int element, const Vec2& ref) {
  const auto& conn = mesh.elements[element];
  const ShapeP2 sh = shape_p2(ref);
  FieldSample s;
  s.element = element;
  s.ref = ref;
  for (int a = 0; a < kNodesPerElement; ++a) {
    s.u += sh.value[a] * state.velocity(conn[a]);
    s.p += sh.value[a] * state.at(conn[a], P);
    s.psi += sh.value[a] * state.psi(conn[a]);
  }
  s.sigma = expm_sym(s.psi);
  return s;
}

FieldSample evaluate_field(const PointLocator& locator, const Mesh& mesh, const FieldState& state, const Vec2& point) {
  const auto hit = locator.locate(point);
  if (!hit) {
    throw PointOutsideDomain("evaluate_field: point (" + std::to_string(point.x) + ", " + std::to_string(point.y) +
                             ") is outside the domain");
  }
  return evaluate_at(mesh, state, hit->first, hit->second);
}

FieldSample evaluate_field(const Mesh& mesh, const FieldState& state, const Vec2& point) {
  return evaluate_field(PointLocator(mesh), mesh, state, point);
}

void write_vtk(const Mesh& mesh, const FieldState& state, const FluidParams& params, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_vtk: cannot open " + path.string());
  out << std::setprecision(10);
  out << "# vtk DataFile Version 3.0\nlog-conformation solution\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  const int n = mesh.num_nodes();
  out << "POINTS " << n << " double\n";
  for (const Vec2& x : mesh.nodes) out << x.x << ' ' << x.y << " 0\n";
  const int cells = 4 * mesh.num_elements();
  out << "CELLS " << cells << ' ' << 4 * cells << '\n';
  for (const auto& c : mesh.elements) {
    out << "3 " << c[0] << ' ' << c[3] << ' ' << c[5] << '\n';
    out << "3 " << c[3] << ' ' << c[1] << ' ' << c[4] << '\n';
    out << "3 " << c[5] << ' ' << c[4] << ' ' << c[2] << '\n';
    out << "3 " << c[3] << ' ' << c[4] << ' ' << c[5] << '\n';
  }
  out << "CELL_TYPES " << cells << '\n';
  for (int i = 0; i < cells; ++i) out << "5\n";
  out << "POINT_DATA " << n << '\n';
  out << "VECTORS velocity double\n";
  for (int i = 0; i < n; ++i) out << state.at(i, U) << ' ' << state.at(i, V) << " 0\n";
  const auto scalar = [&](const char* name, auto&& f) {
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (int i = 0; i < n; ++i) out << f(i) << '\n';
  };
  scalar("pressure", [&](int i) { return state.at(i, P); });
  scalar("psi11", [&](int i) { return state.at(i, PSI11); });
  scalar("psi12", [&](int i) { return state.at(i, PSI12); });
  scalar("psi22", [&](int i) { return state.at(i, PSI22); });
  std::vector<SymTensor2> sigma(n);
  for (int i = 0; i < n; ++i) sigma[i] = expm_sym(state.psi(i));
  scalar("sigma11", [&](int i) { return sigma[i].xx; });
  scalar("sigma12", [&](int i) { return sigma[i].xy; });
  scalar("sigma22", [&](int i) { return sigma[i].yy; });
  scalar("T11", [&](int i) { return params.mu_p / params.lambda * (sigma[i].xx - 1.0); });
  if (!out) throw std::runtime_error("write_vtk: failed while writing " + path.string());
}

int count_spd_violations(const Mesh& mesh, const FieldState& state) {
  int bad = 0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    for (const auto& q : triangle_rule_degree5()) {
      const SymTensor2 s = evaluate_at(mesh, state, e, q.ref).sigma;
      const bool spd = std::isfinite(s.xx) && std::isfinite(s.xy) && std::isfinite(s.yy) && s.xx > 0.0 &&
                       s.xx * s.yy - s.xy * s.xy > 0.0;
      if (!spd) ++bad;
    }
  }
  return bad;
}

}  // namespace logconf::fem
