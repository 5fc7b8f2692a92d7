#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "logconf/fem/reference.hpp"
#include "logconf/mesh.hpp"

using namespace logconf;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "logconf_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

double total_area(const Mesh& m) {
  double a = 0.0;
  for (int e = 0; e < m.num_elements(); ++e) {
    for (const auto& q : fem::triangle_rule_degree5()) a += q.weight * map_point(m, e, q.ref).det;
  }
  return a;
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

MeshError::Kind import_error_kind(const std::filesystem::path& p) {
  try {
    import_gmsh(p);
  } catch (const MeshError& e) {
    return e.kind();
  }
  FAIL("import did not throw");
  return MeshError::Kind::Io;
}

}  // namespace

TEST_CASE("reference P2 basis") {
  const auto& ref = fem::reference_nodes();
  for (int i = 0; i < 6; ++i) {
    const auto s = fem::shape_p2(ref[i]);
    for (int j = 0; j < 6; ++j) CHECK(s.value[j] == doctest::Approx(i == j ? 1.0 : 0.0));
  }
  const auto c = fem::shape_p2({1.0 / 3.0, 1.0 / 3.0});
  double sum = 0.0;
  Vec2 gsum;
  for (int j = 0; j < 6; ++j) {
    sum += c.value[j];
    gsum += c.grad[j];
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(gsum.x) + std::abs(gsum.y) <= 1e-14);
  CHECK(c.value[3] == doctest::Approx(4.0 / 9.0).epsilon(1e-15));

  // gradients and Hessians against central differences
  const Vec2 p{0.23, 0.41};
  const double h = 1e-5;
  const auto s = fem::shape_p2(p);
  const auto sx = fem::shape_p2({p.x + h, p.y});
  const auto sxm = fem::shape_p2({p.x - h, p.y});
  const auto sy = fem::shape_p2({p.x, p.y + h});
  const auto sym = fem::shape_p2({p.x, p.y - h});
  for (int j = 0; j < 6; ++j) {
    CHECK(s.grad[j].x == doctest::Approx((sx.value[j] - sxm.value[j]) / (2 * h)).epsilon(1e-8));
    CHECK(s.grad[j].y == doctest::Approx((sy.value[j] - sym.value[j]) / (2 * h)).epsilon(1e-8));
    CHECK(s.hessian[j].xx == doctest::Approx((sx.grad[j].x - sxm.grad[j].x) / (2 * h)).epsilon(1e-8));
    CHECK(s.hessian[j].xy == doctest::Approx((sy.grad[j].x - sym.grad[j].x) / (2 * h)).epsilon(1e-8));
    CHECK(s.hessian[j].yy == doctest::Approx((sy.grad[j].y - sym.grad[j].y) / (2 * h)).epsilon(1e-8));
  }
}

TEST_CASE("quadrature rules") {
  double w = 0.0;
  for (const auto& q : fem::triangle_rule_degree5()) w += q.weight;
  CHECK(w == doctest::Approx(0.5).epsilon(1e-15));
  // int over reference triangle of xi^a eta^b = a! b! / (a + b + 2)!
  const auto exact = [](int a, int b) { return std::tgamma(a + 1) * std::tgamma(b + 1) / std::tgamma(a + b + 3); };
  for (int a = 0; a <= 5; ++a) {
    for (int b = 0; a + b <= 5; ++b) {
      double sum = 0.0;
      for (const auto& q : fem::triangle_rule_degree5()) sum += q.weight * std::pow(q.ref.x, a) * std::pow(q.ref.y, b);
      CHECK(sum == doctest::Approx(exact(a, b)).epsilon(1e-14));
    }
  }
  const auto& edge = fem::edge_rule_4pt();
  double ew = 0.0;
  double m7 = 0.0;
  for (std::size_t i = 0; i < edge.points.size(); ++i) {
    ew += edge.weights[i];
    m7 += edge.weights[i] * std::pow(edge.points[i], 7);
  }
  CHECK(ew == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(m7 == doctest::Approx(1.0 / 8.0).epsilon(1e-14));
}

TEST_CASE("element length") {
  CHECK(element_length({0, 0}, {1, 0}, {0, 1}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(element_length({0, 0}, {1, 0}, {0.5, std::sqrt(3.0) / 2}) == doctest::Approx(0.9306048591020996).epsilon(1e-14));
  const Vec2 a{0.3, -0.2}, b{1.1, 0.4}, c{-0.5, 0.9};
  CHECK(element_length(2.5 * a, 2.5 * b, 2.5 * c) == doctest::Approx(2.5 * element_length(a, b, c)).epsilon(1e-14));
}

TEST_CASE("channel mesh") {
  const Mesh one = gen_channel_mesh(1, 1, 1, 1);
  CHECK(one.num_elements() == 2);
  CHECK(one.num_nodes() == 9);

  const Mesh m = gen_channel_mesh(30, 2, 60, 8);
  CHECK(m.num_elements() == 960);
  CHECK(total_area(m) == doctest::Approx(60.0).epsilon(1e-12));
  CHECK_FALSE(m.has_tag(BoundaryTag::Cylinder));
  for (BoundaryTag t : {BoundaryTag::Inflow, BoundaryTag::Outflow, BoundaryTag::Wall, BoundaryTag::Symmetry}) CHECK(m.has_tag(t));
  for (const auto& b : m.boundary_edges) {
    const Vec2 p = m.nodes[b.nodes[2]];
    switch (b.tag) {
      case BoundaryTag::Inflow: CHECK(p.x == 0.0); break;
      case BoundaryTag::Outflow: CHECK(p.x == doctest::Approx(30.0)); break;
      case BoundaryTag::Wall: CHECK(p.y == doctest::Approx(2.0)); break;
      case BoundaryTag::Symmetry: CHECK(p.y == 0.0); break;
      case BoundaryTag::Cylinder: FAIL("unexpected cylinder edge"); break;
    }
  }
  CHECK_THROWS_AS(gen_channel_mesh(0, 1, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(gen_channel_mesh(1, -1, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(gen_channel_mesh(1, 1, 0, 1), std::invalid_argument);
}

TEST_CASE("cylinder mesh classes") {
  const double R = 1.0;
  const Mesh m1 = gen_cylinder_mesh(R, 48);
  const Mesh m2 = gen_cylinder_mesh(R, 96);
  CHECK(std::abs(m1.num_elements() - 2532) <= 0.2 * 2532);
  CHECK(std::abs(m2.num_elements() - 10104) <= 0.2 * 10104);
  for (BoundaryTag t : kAllBoundaryTags) CHECK(m1.has_tag(t));

  int cyl_edges = 0;
  double worst = 0.0;
  for (const auto& b : m1.boundary_edges) {
    if (b.tag != BoundaryTag::Cylinder) continue;
    ++cyl_edges;
    CHECK(b.curved);
    for (int n : b.nodes) worst = std::max(worst, std::abs(norm(m1.nodes[n]) - R));
  }
  CHECK(cyl_edges == 48);
  CHECK(worst <= 1e-12 * R);

  // domain area: 30R x 2R minus a half disc
  const double area = 60.0 * R * R - 0.5 * std::numbers::pi * R * R;
  CHECK(total_area(m1) == doctest::Approx(area).epsilon(1e-6));
  CHECK(total_area(m2) == doctest::Approx(area).epsilon(1e-7));
}

TEST_CASE("cylinder arc length converges at high order") {
  const double e1 = std::abs(cylinder_arc_length(gen_cylinder_mesh(1.0, 24)) - std::numbers::pi);
  const double e2 = std::abs(cylinder_arc_length(gen_cylinder_mesh(1.0, 48)) - std::numbers::pi);
  const double e3 = std::abs(cylinder_arc_length(gen_cylinder_mesh(1.0, 96)) - std::numbers::pi);
  CHECK(std::log2(e1 / e2) >= 3.0);
  CHECK(std::log2(e2 / e3) >= 3.0);
}

TEST_CASE("cylinder mesh argument checks") {
  CHECK_THROWS_AS(gen_cylinder_mesh(1.0, 7), std::invalid_argument);
  CHECK_THROWS_AS(gen_cylinder_mesh(1.0, 6), std::invalid_argument);
  CHECK_THROWS_AS(gen_cylinder_mesh(-1.0, 48), std::invalid_argument);
  GradingParams bad;
  bad.box_half_width = 0.9;
  CHECK_THROWS_AS(gen_cylinder_mesh(1.0, 48, bad), std::invalid_argument);
  // a box barely larger than the cylinder squeezes the corner elements inside out
  GradingParams squeeze;
  squeeze.box_half_width = 1.02;
  squeeze.height = 1.02;
  try {
    gen_cylinder_mesh(1.0, 48, squeeze);
    FAIL("expected an inverted element");
  } catch (const MeshError& e) {
    CHECK(e.kind() == MeshError::Kind::InvertedElement);
  }
}

TEST_CASE("gmsh round trip") {
  const Mesh m = gen_cylinder_mesh(1.0, 16);
  const auto path = scratch("roundtrip.msh");
  export_gmsh(m, path);
  const Mesh back = import_gmsh(path);
  CHECK(back.elements == m.elements);
  REQUIRE(back.nodes.size() == m.nodes.size());
  double dx = 0.0;
  for (std::size_t i = 0; i < m.nodes.size(); ++i) dx = std::max(dx, norm(back.nodes[i] - m.nodes[i]));
  CHECK(dx == 0.0);
  REQUIRE(back.boundary_edges.size() == m.boundary_edges.size());
  for (std::size_t i = 0; i < m.boundary_edges.size(); ++i) {
    CHECK(back.boundary_edges[i].nodes == m.boundary_edges[i].nodes);
    CHECK(back.boundary_edges[i].tag == m.boundary_edges[i].tag);
    CHECK(back.boundary_edges[i].curved == m.boundary_edges[i].curved);
  }
  CHECK(back.affine == m.affine);
  CHECK(back.cylinder_radius == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("gmsh import errors") {
  const std::string header = "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n";
  const std::string names =
      "$PhysicalNames\n4\n1 1 \"Inflow\"\n1 2 \"OUTFLOW\"\n1 3 \"wall\"\n1 4 \"symmetry\"\n$EndPhysicalNames\n";
  const std::string nodes = "$Nodes\n3\n1 0 0 0\n2 1 0 0\n3 0 1 0\n$EndNodes\n";

  const auto v4 = scratch("v4.msh");
  write_text(v4, "$MeshFormat\n4.1 0 8\n$EndMeshFormat\n" + names + nodes);
  CHECK(import_error_kind(v4) == MeshError::Kind::UnsupportedVersion);

  const auto linear = scratch("linear.msh");
  write_text(linear, header + names + nodes + "$Elements\n1\n1 2 2 100 1 1 2 3\n$EndElements\n");
  CHECK(import_error_kind(linear) == MeshError::Kind::UnsupportedElementOrder);
  try {
    import_gmsh(linear);
  } catch (const MeshError& e) {
    CHECK(std::string(e.what()).find("unsupported element order") != std::string::npos);
  }

  // a generated mesh with the inflow group renamed
  const auto good = scratch("good.msh");
  export_gmsh(gen_channel_mesh(2, 1, 2, 2), good);
  std::ifstream in(good);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto renamed = scratch("noinflow.msh");
  std::string t2 = text;
  t2.replace(t2.find("\"inflow\""), 8, "\"entry\"");
  write_text(renamed, t2);
  CHECK(import_error_kind(renamed) == MeshError::Kind::MissingPhysicalGroup);
  try {
    import_gmsh(renamed);
  } catch (const MeshError& e) {
    CHECK(std::string(e.what()).find("inflow") != std::string::npos);
  }

  const auto nonames = scratch("nonames.msh");
  std::string t3 = text;
  t3.erase(t3.find("$PhysicalNames"), t3.find("$EndPhysicalNames\n") + 18 - t3.find("$PhysicalNames"));
  write_text(nonames, t3);
  CHECK(import_error_kind(nonames) == MeshError::Kind::MissingPhysicalNames);

  // swap two vertices of the first triangle to invert it
  const Mesh small = gen_channel_mesh(2, 1, 2, 2);
  Mesh flipped = small;
  auto& c = flipped.elements[0];
  std::swap(c[1], c[2]);
  std::swap(c[3], c[5]);
  const auto inv = scratch("inverted.msh");
  export_gmsh(flipped, inv);
  CHECK(import_error_kind(inv) == MeshError::Kind::InvertedElement);

  CHECK(import_error_kind(scratch("does_not_exist.msh")) == MeshError::Kind::Io);
}

TEST_CASE("validation catches broken meshes") {
  Mesh m = gen_channel_mesh(1, 1, 2, 2);
  CHECK_NOTHROW(validate_mesh(m));

  Mesh drop = m;
  drop.boundary_edges.pop_back();
  CHECK_THROWS_AS(validate_mesh(drop), MeshError);

  Mesh moved = m;
  moved.nodes[moved.elements[0][3]].x += 1e-3;
  CHECK_THROWS_AS(validate_mesh(moved), MeshError);

  Mesh bad_index = m;
  bad_index.elements[0][0] = 10000;
  CHECK_THROWS_AS(validate_mesh(bad_index), MeshError);
}
