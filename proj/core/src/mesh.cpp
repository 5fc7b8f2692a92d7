#include "logconf/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iterator>
#include <map>
#include <numbers>
#include <optional>
#include <tuple>
#include <utility>

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/cuthill_mckee_ordering.hpp>

#include "logconf/fem/reference.hpp"

namespace logconf {

namespace {

struct Triangulation {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;
};

using EdgeKey = std::pair<int, int>;

EdgeKey edge_key(int a, int b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

double signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

using Classifier = std::function<std::optional<BoundaryTag>(const Vec2&, const Vec2&)>;

// Builds the P2 mesh from a linear triangulation; boundary edges are the edges
// with a single adjacent triangle and are tagged by the classifier.
Mesh enrich_p2(const Triangulation& tri, const Classifier& classify, double cylinder_radius) {
  Mesh mesh;
  mesh.nodes = tri.vertices;
  mesh.cylinder_radius = cylinder_radius;

  std::map<EdgeKey, std::vector<std::pair<int, int>>> owners;  // edge -> (element, local edge)
  for (int e = 0; e < static_cast<int>(tri.triangles.size()); ++e) {
    auto t = tri.triangles[e];
    if (signed_area(tri.vertices[t[0]], tri.vertices[t[1]], tri.vertices[t[2]]) < 0.0) std::swap(t[1], t[2]);
    std::array<int, 6> conn{t[0], t[1], t[2], -1, -1, -1};
    mesh.elements.push_back(conn);
    for (int le = 0; le < 3; ++le) {
      owners[edge_key(conn[fem::kElementEdges[le][0]], conn[fem::kElementEdges[le][1]])].emplace_back(e, le);
    }
  }
  mesh.affine.assign(mesh.elements.size(), 1);

  for (const auto& [key, adj] : owners) {
    const Vec2 a = mesh.nodes[key.first];
    const Vec2 b = mesh.nodes[key.second];
    Vec2 mid = 0.5 * (a + b);
    std::optional<BoundaryTag> tag;
    if (adj.size() == 1) {
      tag = classify(a, b);
      if (!tag) throw MeshError(MeshError::Kind::InvalidTopology, "boundary edge could not be tagged");
      if (*tag == BoundaryTag::Cylinder) mid = (cylinder_radius / norm(mid)) * mid;
    } else if (adj.size() != 2) {
      throw MeshError(MeshError::Kind::InvalidTopology, "edge shared by more than two triangles");
    }
    const int mid_id = mesh.num_nodes();
    mesh.nodes.push_back(mid);
    for (const auto& [e, le] : adj) mesh.elements[e][fem::kElementEdges[le][2]] = mid_id;
    if (tag) {
      const auto [e, le] = adj.front();
      const auto& conn = mesh.elements[e];
      BoundaryEdge edge;
      edge.nodes = {conn[fem::kElementEdges[le][0]], conn[fem::kElementEdges[le][1]], mid_id};
      edge.tag = *tag;
      edge.element = e;
      edge.local_edge = le;
      edge.curved = (*tag == BoundaryTag::Cylinder);
      if (edge.curved) mesh.affine[e] = 0;
      mesh.boundary_edges.push_back(edge);
    }
  }
  std::sort(mesh.boundary_edges.begin(), mesh.boundary_edges.end(), [](const BoundaryEdge& l, const BoundaryEdge& r) {
    return std::tie(l.tag, l.element, l.local_edge) < std::tie(r.tag, r.element, r.local_edge);
  });
  return mesh;
}

Classifier box_classifier(double x0, double x1, double height, double radius, double tol) {
  return [=](const Vec2& a, const Vec2& b) -> std::optional<BoundaryTag> {
    const auto near = [tol](double p, double q) { return std::abs(p - q) <= tol; };
    if (near(a.x, x0) && near(b.x, x0)) return BoundaryTag::Inflow;
    if (near(a.x, x1) && near(b.x, x1)) return BoundaryTag::Outflow;
    if (radius > 0.0 && near(norm(a), radius) && near(norm(b), radius)) return BoundaryTag::Cylinder;
    if (near(a.y, height) && near(b.y, height)) return BoundaryTag::Wall;
    if (near(a.y, 0.0) && near(b.y, 0.0)) return BoundaryTag::Symmetry;
    return std::nullopt;
  };
}

// Splits the quad a-b-c-d (counter-clockwise) along its shorter diagonal.
void add_quad(Triangulation& tri, int a, int b, int c, int d) {
  const auto& v = tri.vertices;
  if (norm(v[a] - v[c]) <= norm(v[b] - v[d])) {
    tri.triangles.push_back({a, b, c});
    tri.triangles.push_back({a, c, d});
  } else {
    tri.triangles.push_back({a, b, d});
    tri.triangles.push_back({b, c, d});
  }
}

// Growth ratio r with first * (1 + r + ... + r^{n-1}) = total.
double geometric_ratio(double total, double first, int n) {
  const auto sum = [n](double r) { return std::abs(r - 1.0) < 1e-12 ? n : (std::pow(r, n) - 1.0) / (r - 1.0); };
  const double target = total / first;
  double lo = 1e-3;
  double hi = 10.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (sum(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Partition of [0, 1] into n cells growing geometrically by ratio r.
std::vector<double> graded_unit(int n, double r) {
  std::vector<double> s(n + 1, 0.0);
  double w = 1.0;
  for (int i = 1; i <= n; ++i) {
    s[i] = s[i - 1] + w;
    w *= r;
  }
  for (double& v : s) v /= s[n];
  return s;
}

// Reverse Cuthill-McKee renumbering of the node graph (nodes sharing an
// element are adjacent); keeps the coupled system banded for ILUT.
Mesh renumber_rcm(const Mesh& mesh) {
  using Graph = boost::adjacency_list<boost::setS, boost::vecS, boost::undirectedS>;
  Graph graph(mesh.nodes.size());
  for (const auto& conn : mesh.elements) {
    for (int a = 0; a < 6; ++a) {
      for (int b = a + 1; b < 6; ++b) boost::add_edge(conn[a], conn[b], graph);
    }
  }
  std::vector<Graph::vertex_descriptor> order;
  order.reserve(mesh.nodes.size());
  boost::cuthill_mckee_ordering(graph, std::back_inserter(order));
  std::vector<int> new_id(mesh.nodes.size());
  const int n = static_cast<int>(order.size());
  for (int i = 0; i < n; ++i) new_id[order[i]] = n - 1 - i;

  Mesh out = mesh;
  for (std::size_t i = 0; i < mesh.nodes.size(); ++i) out.nodes[new_id[i]] = mesh.nodes[i];
  for (auto& conn : out.elements) {
    for (int& n : conn) n = new_id[n];
  }
  for (auto& b : out.boundary_edges) {
    for (int& n : b.nodes) n = new_id[n];
  }
  return out;
}

}  // namespace

std::string_view to_string(BoundaryTag tag) {
  switch (tag) {
    case BoundaryTag::Inflow: return "inflow";
    case BoundaryTag::Outflow: return "outflow";
    case BoundaryTag::Wall: return "wall";
    case BoundaryTag::Cylinder: return "cylinder";
    case BoundaryTag::Symmetry: return "symmetry";
  }
  return "unknown";
}

bool Mesh::has_tag(BoundaryTag tag) const {
  return std::any_of(boundary_edges.begin(), boundary_edges.end(), [tag](const BoundaryEdge& e) { return e.tag == tag; });
}

Mesh gen_channel_mesh(double length, double height, int nx, int ny) {
  if (!(length > 0.0) || !(height > 0.0)) throw std::invalid_argument("gen_channel_mesh: dimensions must be positive");
  if (nx < 1 || ny < 1) throw std::invalid_argument("gen_channel_mesh: nx and ny must be >= 1");
  Triangulation tri;
  const auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) tri.vertices.push_back({length * i / nx, height * j / ny});
  }
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      // alternate the diagonal so neighbouring cells cross
      if ((i + j) % 2 == 0) {
        tri.triangles.push_back({a, b, c});
        tri.triangles.push_back({a, c, d});
      } else {
        tri.triangles.push_back({a, b, d});
        tri.triangles.push_back({b, c, d});
      }
    }
  }
  const double tol = 1e-12 * std::max(length, height);
  Mesh mesh = renumber_rcm(enrich_p2(tri, box_classifier(0.0, length, height, 0.0, tol), 0.0));
  validate_mesh(mesh);
  return mesh;
}

Mesh gen_cylinder_mesh(double R, int n_cyl, const GradingParams& g) {
  if (!(R > 0.0)) throw std::invalid_argument("gen_cylinder_mesh: R must be positive");
  if (n_cyl < 8 || n_cyl % 2 != 0) throw std::invalid_argument("gen_cylinder_mesh: n_cyl must be even and >= 8");
  if (!(g.box_half_width > 1.0) || !(g.height > 1.0) || !(g.upstream_length > g.box_half_width) ||
      !(g.downstream_length > g.box_half_width) || !(g.first_layer > 0.0)) {
    throw std::invalid_argument("gen_cylinder_mesh: inconsistent grading parameters");
  }
  const int n_side = n_cyl / 4;
  const int n_top = n_cyl - 2 * n_side;
  const int n_rad = g.radial_layers > 0 ? g.radial_layers : std::max(2, n_cyl / 4);
  const int n_up = g.upstream_columns > 0 ? g.upstream_columns : std::max(1, (20 * n_cyl + 24) / 48);
  const int n_down = g.downstream_columns > 0 ? g.downstream_columns : std::max(1, (37 * n_cyl + 24) / 48);
  const double a = g.box_half_width * R;
  const double H = g.height * R;
  const double x_in = -g.upstream_length * R;
  const double x_out = g.downstream_length * R;

  Triangulation tri;
  auto add_vertex = [&tri](const Vec2& p) {
    tri.vertices.push_back(p);
    return static_cast<int>(tri.vertices.size()) - 1;
  };

  // O-grid: ray i runs from the arc point at angle pi (1 - i / n_cyl) to the box
  const auto outer = [&](int i) -> Vec2 {
    if (i <= n_side) return {-a, H * i / n_side};
    if (i <= n_side + n_top) return {-a + 2.0 * a * (i - n_side) / n_top, H};
    return {a, H * (n_cyl - i) / n_side};
  };
  const double arc_spacing = std::numbers::pi * R / n_cyl;
  const double first = std::min(g.first_layer * arc_spacing, (a - R) / n_rad);
  const std::vector<double> s = graded_unit(n_rad, geometric_ratio(a - R, first, n_rad));
  std::vector<std::vector<int>> ogrid(n_cyl + 1, std::vector<int>(n_rad + 1));
  for (int i = 0; i <= n_cyl; ++i) {
    const double theta = std::numbers::pi * (1.0 - static_cast<double>(i) / n_cyl);
    Vec2 arc{R * std::cos(theta), R * std::sin(theta)};
    if (i == 0) arc = {-R, 0.0};
    if (i == n_cyl) arc = {R, 0.0};
    if (2 * i == n_cyl) arc = {0.0, R};
    const Vec2 out = outer(i);
    for (int k = 0; k <= n_rad; ++k) ogrid[i][k] = add_vertex(k == n_rad ? out : (1.0 - s[k]) * arc + s[k] * out);
  }
  for (int i = 0; i < n_cyl; ++i) {
    for (int k = 0; k < n_rad; ++k) add_quad(tri, ogrid[i][k], ogrid[i][k + 1], ogrid[i + 1][k + 1], ogrid[i + 1][k]);
  }

  // channel blocks: column spacing grows geometrically away from the box
  const double box_spacing = H / n_side;
  const auto block = [&](int columns, double length, bool upstream) {
    const double ratio = std::max(1.0, geometric_ratio(length, box_spacing, columns));
    const std::vector<double> t = graded_unit(columns, ratio);
    std::vector<std::vector<int>> ids(columns + 1, std::vector<int>(n_side + 1));
    for (int c = 0; c <= columns; ++c) {
      for (int r = 0; r <= n_side; ++r) {
        if (c == 0) {
          ids[c][r] = upstream ? ogrid[r][n_rad] : ogrid[n_cyl - r][n_rad];
        } else {
          const double dist = (c == columns) ? length : length * t[c];
          const double x = upstream ? -a - dist : a + dist;
          ids[c][r] = add_vertex({c == columns ? (upstream ? x_in : x_out) : x, H * r / n_side});
        }
      }
    }
    for (int c = 0; c < columns; ++c) {
      for (int r = 0; r < n_side; ++r) {
        const int p = ids[c][r], q = ids[c + 1][r], u = ids[c + 1][r + 1], v = ids[c][r + 1];
        if (upstream) {
          add_quad(tri, q, p, v, u);
        } else {
          add_quad(tri, p, q, u, v);
        }
      }
    }
  };
  block(n_up, -x_in - a, true);
  block(n_down, x_out - a, false);

  const double tol = 1e-9 * R;
  Mesh mesh = renumber_rcm(enrich_p2(tri, box_classifier(x_in, x_out, H, R, tol), R));
  try {
    validate_mesh(mesh);
  } catch (const MeshError& err) {
    if (err.kind() == MeshError::Kind::InvertedElement) {
      throw MeshError(MeshError::Kind::InvertedElement, std::string("gen_cylinder_mesh: grading produced ") + err.what());
    }
    throw;
  }
  return mesh;
}

double element_length(const Vec2& a, const Vec2& b, const Vec2& c) {
  return std::sqrt(2.0 * std::abs(signed_area(a, b, c)));
}

double element_length(const Mesh& mesh, int element) {
  const auto& n = mesh.elements[element];
  return element_length(mesh.nodes[n[0]], mesh.nodes[n[1]], mesh.nodes[n[2]]);
}

double element_area(const Mesh& mesh, int element) {
  const auto& n = mesh.elements[element];
  return signed_area(mesh.nodes[n[0]], mesh.nodes[n[1]], mesh.nodes[n[2]]);
}

ElementMap map_point(const Mesh& mesh, int element, const Vec2& ref) {
  const auto& conn = mesh.elements[element];
  const fem::ShapeP2 sh = fem::shape_p2(ref);
  ElementMap m;
  for (int a = 0; a < fem::kNodesPerElement; ++a) {
    const Vec2& p = mesh.nodes[conn[a]];
    m.x += sh.value[a] * p;
    m.jacobian.xx += p.x * sh.grad[a].x;
    m.jacobian.xy += p.x * sh.grad[a].y;
    m.jacobian.yx += p.y * sh.grad[a].x;
    m.jacobian.yy += p.y * sh.grad[a].y;
  }
  m.det = det(m.jacobian);
  return m;
}

void validate_mesh(const Mesh& mesh) {
  using K = MeshError::Kind;
  const int nn = mesh.num_nodes();
  if (mesh.affine.size() != mesh.elements.size()) throw MeshError(K::InvalidTopology, "affine flags do not match elements");
  for (int e = 0; e < mesh.num_elements(); ++e) {
    for (int idx : mesh.elements[e]) {
      if (idx < 0 || idx >= nn) throw MeshError(K::InvalidTopology, "element " + std::to_string(e) + " has an invalid node index");
    }
  }

  std::map<EdgeKey, std::vector<std::pair<int, int>>> owners;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto& conn = mesh.elements[e];
    for (int le = 0; le < 3; ++le) {
      owners[edge_key(conn[fem::kElementEdges[le][0]], conn[fem::kElementEdges[le][1]])].emplace_back(e, le);
    }
  }
  std::map<EdgeKey, const BoundaryEdge*> tagged;
  for (const BoundaryEdge& b : mesh.boundary_edges) {
    for (int idx : b.nodes) {
      if (idx < 0 || idx >= nn) throw MeshError(K::InvalidTopology, "boundary edge has an invalid node index");
    }
    const EdgeKey key = edge_key(b.nodes[0], b.nodes[1]);
    const auto it = owners.find(key);
    if (it == owners.end() || it->second.size() != 1) {
      throw MeshError(K::InvalidTopology, "boundary edge does not belong to exactly one element");
    }
    const auto [e, le] = it->second.front();
    if (e != b.element || le != b.local_edge || mesh.elements[e][fem::kElementEdges[le][2]] != b.nodes[2]) {
      throw MeshError(K::InvalidTopology, "boundary edge does not match its element");
    }
    if (!tagged.emplace(key, &b).second) throw MeshError(K::InvalidTopology, "boundary edge listed twice");
  }

  for (const auto& [key, adj] : owners) {
    if (adj.size() > 2) throw MeshError(K::InvalidTopology, "edge shared by more than two elements");
    if (adj.size() == 1 && !tagged.count(key)) throw MeshError(K::InvalidTopology, "boundary edge without a tag");
    if (adj.size() == 2) {
      const int m0 = mesh.elements[adj[0].first][fem::kElementEdges[adj[0].second][2]];
      const int m1 = mesh.elements[adj[1].first][fem::kElementEdges[adj[1].second][2]];
      if (m0 != m1) throw MeshError(K::InvalidTopology, "neighbouring elements disagree on an edge midnode");
    }
    const Vec2 a = mesh.nodes[key.first];
    const Vec2 b = mesh.nodes[key.second];
    const Vec2 mid = mesh.nodes[mesh.elements[adj[0].first][fem::kElementEdges[adj[0].second][2]]];
    const double len = norm(b - a);
    const auto t = tagged.find(key);
    const bool curved = t != tagged.end() && t->second->curved;
    if (curved) {
      if (mesh.cylinder_radius > 0.0 && std::abs(norm(mid) - mesh.cylinder_radius) > 1e-10 * mesh.cylinder_radius) {
        throw MeshError(K::InvalidGeometry, "cylinder midnode is not on the circle");
      }
    } else if (norm(mid - 0.5 * (a + b)) > 1e-10 * len) {
      throw MeshError(K::InvalidGeometry, "midnode of a straight edge is off the edge midpoint");
    }
  }

  for (BoundaryTag tag : {BoundaryTag::Inflow, BoundaryTag::Outflow, BoundaryTag::Wall, BoundaryTag::Symmetry}) {
    if (!mesh.has_tag(tag)) throw MeshError(K::InvalidTopology, "boundary has no " + std::string(to_string(tag)) + " edges");
  }

  const auto& rule = fem::triangle_rule_degree5();
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto check = [&](const Vec2& ref) {
      if (!(map_point(mesh, e, ref).det > 0.0)) {
        throw MeshError(K::InvertedElement, "element " + std::to_string(e) + " has a non-positive Jacobian");
      }
    };
    for (const auto& q : rule) check(q.ref);
    for (const Vec2& v : fem::reference_nodes()) check(v);
  }
}

double cylinder_arc_length(const Mesh& mesh) {
  const auto& rule = fem::edge_rule_4pt();
  double total = 0.0;
  for (const BoundaryEdge& b : mesh.boundary_edges) {
    if (b.tag != BoundaryTag::Cylinder) continue;
    const Vec2 p0 = mesh.nodes[b.nodes[0]];
    const Vec2 p1 = mesh.nodes[b.nodes[1]];
    const Vec2 pm = mesh.nodes[b.nodes[2]];
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const double t = rule.points[q];
      // derivative of the quadratic edge interpolant
      const Vec2 dx = (4.0 * t - 3.0) * p0 + (4.0 * t - 1.0) * p1 + (4.0 - 8.0 * t) * pm;
      total += rule.weights[q] * norm(dx);
    }
  }
  return total;
}

}  // namespace logconf
