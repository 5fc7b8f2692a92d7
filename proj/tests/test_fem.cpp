#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "logconf/fem/assembly.hpp"
#include "logconf/fem/postprocess.hpp"
#include "test_support.hpp"

using namespace logconf;
using namespace logconf::fem;

namespace {

FluidParams oldroyd(double lambda) {
  FluidParams p;
  p.lambda = lambda;
  return p;
}

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// Smooth, moderately large state; Dirichlet values come from the same fields.
FieldState smooth_state(const Mesh& mesh, double amp, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::array<double, 12> c{};
  for (double& v : c) v = unif(rng);
  FieldState s(mesh.num_nodes());
  for (int n = 0; n < mesh.num_nodes(); ++n) {
    const Vec2 x = mesh.nodes[n];
    s.at(n, U) = 1.0 + c[0] * std::sin(x.x + 0.3) * x.y + 0.5 * c[1] * x.y * x.y;
    s.at(n, V) = c[2] * std::cos(0.7 * x.x) * x.y * (2.0 - x.y);
    s.at(n, P) = c[3] * x.x + c[4] * std::sin(x.y);
    s.set_psi(n, amp * SymTensor2{c[5] + c[6] * std::sin(x.x * x.y), c[7] * x.y + c[8] * std::cos(x.x),
                                  c[9] + c[10] * x.x * 0.1 + c[11] * x.y});
  }
  return s;
}

struct Fixture {
  Mesh mesh;
  DofMap dofs;
  FieldState state;
};

Fixture cylinder_fixture(double amp, unsigned seed) {
  Fixture f{gen_cylinder_mesh(1.0, 8), DofMap{}, {}};
  f.dofs = DofMap(f.mesh.num_nodes());
  f.state = smooth_state(f.mesh, amp, seed);
  apply_dirichlet(f.mesh, f.dofs, f.state, benchmark_bcs([](const Vec2& x) {
                    return std::array<double, kSlots>{0.375 * (4.0 - x.y * x.y), 0.0, 0.0, 0.1 * x.y, -0.2 * x.y, 0.0};
                  }));
  return f;
}

// Directional finite difference of the residual with the stabilization velocity frozen.
double jacobian_fd_error(const Assembler& A, const FieldState& z, unsigned seed, bool freeze_test) {
  const DofMap& dofs = A.dofs();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<double> d(dofs.num_free());
  for (double& v : d) v = unif(rng);
  const CsrMatrix J = A.jacobian(z);
  const std::vector<double> Jd = J.multiply(d);

  const double h = 1e-6;
  FieldState zp = z;
  FieldState zm = z;
  for (int i = 0; i < dofs.num_free(); ++i) {
    zp.values[dofs.free_dofs()[i]] += h * d[i];
    zm.values[dofs.free_dofs()[i]] -= h * d[i];
  }
  StabilizationFreeze freeze;
  freeze.tau_velocity = &z;
  if (freeze_test) freeze.test_velocity = &z;
  const auto rp = A.free_part(A.residual(zp, freeze));
  const auto rm = A.free_part(A.residual(zm, freeze));
  std::vector<double> diff(Jd.size());
  std::vector<double> fd(Jd.size());
  for (std::size_t i = 0; i < Jd.size(); ++i) {
    fd[i] = (rp[i] - rm[i]) / (2 * h);
    diff[i] = Jd[i] - fd[i];
  }
  return norm2(diff) / norm2(fd);
}

}  // namespace

TEST_CASE("stabilization parameters") {
  FluidParams p;
  p.rho = 1.0;
  p.mu_s = 0.59;
  p.mu_p = 0.41;
  CHECK(tau_mom(0.1, 0.0, p, true) == doctest::Approx(0.01 / 314.0).epsilon(1e-14));
  CHECK(tau_mom(0.1, 0.0, p, true) == doctest::Approx(3.1847e-5).epsilon(1e-4));
  CHECK(tau_mom(0.1, 0.0, p, false) == doctest::Approx(0.01 / 314.0));
  CHECK(tau_mom(0.1, 1e4, p, false) == doctest::Approx(0.1 / 2e4));
  p.rho = 0.0;
  CHECK(tau_mom(0.1, 1.0, p, true) == 0.0);
  CHECK(tau_mom_over_rho(0.1, 1.0, p, true) == doctest::Approx(0.01 / 314.0));

  CHECK(tau_cons(0.1, 1.0, 0.5) == doctest::Approx(1.0 / 22.0).epsilon(1e-14));
  CHECK(tau_cons(0.1, 0.0, 0.5) == doctest::Approx(0.5));
  double prev = 0.0;
  for (double h : {0.05, 0.1, 0.2, 0.4}) {
    CHECK(tau_cons(h, 1.0, 0.5) > prev);
    prev = tau_cons(h, 1.0, 0.5);
  }
}

TEST_CASE("physical shape data reproduces linear fields on curved elements") {
  const Mesh mesh = gen_cylinder_mesh(1.0, 8);
  int curved = 0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    if (mesh.affine[e]) continue;
    ++curved;
    for (const auto& q : triangle_rule_degree5()) {
      const auto g = physical_shape(mesh, e, q.ref, q.weight);
      Vec2 grad_fx;
      Vec2 grad_fy;
      double lap_x = 0.0;
      double lap_y = 0.0;
      for (int a = 0; a < 6; ++a) {
        const Vec2 xa = mesh.nodes[mesh.elements[e][a]];
        grad_fx += xa.x * g.grad[a];
        grad_fy += xa.y * g.grad[a];
        lap_x += xa.x * g.laplacian[a];
        lap_y += xa.y * g.laplacian[a];
      }
      CHECK(grad_fx.x == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(std::abs(grad_fx.y) <= 1e-12);
      CHECK(std::abs(grad_fy.x) <= 1e-12);
      CHECK(grad_fy.y == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(std::abs(lap_x) <= 1e-10);
      CHECK(std::abs(lap_y) <= 1e-10);
    }
  }
  CHECK(curved == 8);
}

TEST_CASE("zero state gives zero residual") {
  const Mesh mesh = gen_channel_mesh(4, 2, 4, 2);
  DofMap dofs(mesh.num_nodes());
  FieldState z(mesh.num_nodes());
  apply_dirichlet(mesh, dofs, z, benchmark_bcs({}));
  const auto r = assemble_residual(mesh, dofs, z, oldroyd(0.5));
  CHECK(norm2(r) == 0.0);
}

TEST_CASE("Stokes Poiseuille interpolant is an exact discrete solution") {
  // Newtonian limit: Psi = 0, so the polymer stress vanishes and only mu_s acts
  const double H = 2.0;
  const Mesh mesh = gen_channel_mesh(6, H, 6, 3);
  const FluidParams prm = oldroyd(0.5);
  const auto exact = [&](const Vec2& x) {
    const double u = 0.375 * (4.0 - x.y * x.y);
    const double dpdx = prm.mu_s * (-0.75);  // mu_s * u''
    return std::array<double, kSlots>{u, 0.0, dpdx * x.x, 0.0, 0.0, 0.0};
  };
  FieldState s(mesh.num_nodes());
  for (int n = 0; n < mesh.num_nodes(); ++n) {
    const auto v = exact(mesh.nodes[n]);
    for (int k = 0; k < kSlots; ++k) s.at(n, k) = v[k];
  }
  BcSpec bc;
  for (BoundaryTag t : {BoundaryTag::Inflow, BoundaryTag::Outflow, BoundaryTag::Wall, BoundaryTag::Symmetry}) {
    bc.prescriptions.push_back({t, {true, true, false, false, false, false}, exact});
  }
  bc.pressure_pin_node = 0;
  bc.pressure_pin_value = exact(mesh.nodes[0])[P];
  DofMap dofs(mesh.num_nodes());
  apply_dirichlet(mesh, dofs, s, bc);
  const auto r = assemble_residual(mesh, dofs, s, prm);
  double worst = 0.0;
  for (int n = 0; n < mesh.num_nodes(); ++n) {
    for (int k : {U, V, P}) worst = std::max(worst, std::abs(r[DofMap::global(n, k)]));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("constant pressure shift leaves the residual unchanged") {
  const Mesh mesh = gen_channel_mesh(3, 2, 3, 2);
  DofMap dofs(mesh.num_nodes());
  FieldState s = smooth_state(mesh, 0.3, 7);
  BcSpec bc;
  for (BoundaryTag t : {BoundaryTag::Inflow, BoundaryTag::Outflow, BoundaryTag::Wall, BoundaryTag::Symmetry}) {
    bc.prescriptions.push_back({t, {true, true, false, false, false, false}, [](const Vec2& x) {
                                  return std::array<double, kSlots>{x.y, 0.1 * x.x, 0, 0, 0, 0};
                                }});
  }
  apply_dirichlet(mesh, dofs, s, bc);
  FieldState shifted = s;
  for (int n = 0; n < mesh.num_nodes(); ++n) shifted.at(n, P) += 3.7;
  const auto r0 = assemble_residual(mesh, dofs, s, oldroyd(0.4));
  const auto r1 = assemble_residual(mesh, dofs, shifted, oldroyd(0.4));
  double worst = 0.0;
  for (std::size_t i = 0; i < r0.size(); ++i) worst = std::max(worst, std::abs(r1[i] - r0[i]));
  CHECK(worst <= 1e-12);
}

TEST_CASE("Jacobian matches finite differences with the stabilization velocity frozen") {
  for (unsigned seed : {1u, 2u, 3u}) {
    Fixture f = cylinder_fixture(0.6, seed);
    const Assembler creeping(f.mesh, f.dofs, oldroyd(0.7));
    CHECK(jacobian_fd_error(creeping, f.state, seed + 10, true) <= 1e-6);

    FluidParams gies = oldroyd(0.4);
    gies.model = Giesekus{0.2};
    const Assembler g(f.mesh, f.dofs, gies);
    CHECK(jacobian_fd_error(g, f.state, seed + 20, true) <= 1e-6);

    FluidParams inertial = oldroyd(0.7);
    inertial.rho = 1.0;
    AssemblyOptions opt;
    opt.creeping = false;
    const Assembler navier(f.mesh, f.dofs, inertial, opt);
    CHECK(jacobian_fd_error(navier, f.state, seed + 30, true) <= 1e-6);

    opt.full_jacobian = true;
    const Assembler full(f.mesh, f.dofs, inertial, opt);
    CHECK(jacobian_fd_error(full, f.state, seed + 40, false) <= 1e-6);
  }
}

TEST_CASE("Stokes block symmetry without stabilization") {
  Fixture f = cylinder_fixture(0.5, 4);
  AssemblyOptions opt;
  opt.include_gls = false;
  opt.include_supg = false;
  const CsrMatrix J = assemble_jacobian(f.mesh, f.dofs, f.state, oldroyd(0.5), opt);
  const auto slot_of = [&f](int free) { return f.dofs.free_dofs()[free] % kSlots; };
  double worst = 0.0;
  for (int i = 0; i < J.n; ++i) {
    const int si = slot_of(i);
    if (si > P) continue;
    for (int k = J.row_ptr[i]; k < J.row_ptr[i + 1]; ++k) {
      const int j = J.col[k];
      const int sj = slot_of(j);
      if (sj > P) continue;
      const bool velocity_i = si != P;
      const bool velocity_j = sj != P;
      if (velocity_i && velocity_j) worst = std::max(worst, std::abs(J.val[k] - J.at(j, i)));
      if (velocity_i != velocity_j) worst = std::max(worst, std::abs(J.val[k] + J.at(j, i)));
    }
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("constitutive block at equilibrium is a scaled mass matrix") {
  const Mesh mesh = gen_channel_mesh(2, 1, 2, 1);
  DofMap dofs(mesh.num_nodes());
  FieldState z(mesh.num_nodes());
  const double lambda = 0.8;
  const FluidParams prm = oldroyd(lambda);
  AssemblyOptions opt;
  opt.include_gls = false;
  const CsrMatrix J = assemble_jacobian(mesh, dofs, z, prm, opt);

  // reference mass matrix
  const Assembler A(mesh, dofs, prm, opt);
  std::vector<std::vector<double>> M(mesh.num_nodes(), std::vector<double>(mesh.num_nodes(), 0.0));
  for (int e = 0; e < mesh.num_elements(); ++e) {
    for (const auto& g : A.geometry(e)) {
      for (int a = 0; a < 6; ++a) {
        for (int b = 0; b < 6; ++b) M[mesh.elements[e][a]][mesh.elements[e][b]] += g.weight * g.value[a] * g.value[b];
      }
    }
  }
  const double scale = prm.mu_p / (2.0 * lambda * lambda);
  double worst = 0.0;
  for (int n = 0; n < mesh.num_nodes(); ++n) {
    for (int m = 0; m < mesh.num_nodes(); ++m) {
      for (int s = 0; s < 3; ++s) {
        for (int t = 0; t < 3; ++t) {
          const int row = dofs.free_index(DofMap::global(n, PSI11 + s));
          const int col = dofs.free_index(DofMap::global(m, PSI11 + t));
          const double expected = s == t ? scale * M[n][m] * (s == 1 ? 2.0 : 1.0) : 0.0;
          worst = std::max(worst, std::abs(J.at(row, col) - expected));
        }
      }
    }
  }
  CHECK(worst <= 1e-14);
}

TEST_CASE("Dirichlet prescriptions") {
  const Mesh mesh = gen_cylinder_mesh(1.0, 8);
  DofMap dofs(mesh.num_nodes());
  FieldState s(mesh.num_nodes());
  for (double& v : s.values) v = 5.0;
  apply_dirichlet(mesh, dofs, s, benchmark_bcs([](const Vec2& x) {
                    return std::array<double, kSlots>{0.375 * (4.0 - x.y * x.y), 0.0, 0.0, 1.0, 2.0, 3.0};
                  }));
  for (const auto& edge : mesh.boundary_edges) {
    for (int n : edge.nodes) {
      const Vec2 x = mesh.nodes[n];
      const bool inflow_node = std::abs(x.x + 15.0) < 1e-12;
      CHECK(dofs.is_dirichlet(DofMap::global(n, V)));
      CHECK_FALSE(dofs.is_dirichlet(DofMap::global(n, P)));
      switch (edge.tag) {
        case BoundaryTag::Symmetry:
          CHECK(s.at(n, V) == 0.0);
          CHECK(dofs.is_dirichlet(DofMap::global(n, PSI12)));
          if (!inflow_node) {
            CHECK(s.at(n, PSI12) == 0.0);
            CHECK_FALSE(dofs.is_dirichlet(DofMap::global(n, PSI11)));
          }
          break;
        case BoundaryTag::Wall:
        case BoundaryTag::Cylinder:
          CHECK(s.at(n, V) == 0.0);
          CHECK(s.at(n, U) == 0.0);
          CHECK(dofs.is_dirichlet(DofMap::global(n, U)));
          if (!inflow_node) CHECK_FALSE(dofs.is_dirichlet(DofMap::global(n, PSI11)));
          break;
        case BoundaryTag::Outflow:
          CHECK(s.at(n, V) == 0.0);
          if (std::abs(x.y) > 1e-12 && std::abs(x.y - 2.0) > 1e-12) CHECK_FALSE(dofs.is_dirichlet(DofMap::global(n, U)));
          break;
        case BoundaryTag::Inflow:
          CHECK(s.at(n, U) == doctest::Approx(0.375 * (4.0 - x.y * x.y)));
          CHECK(s.at(n, PSI11) == 1.0);
          // inflow outranks symmetry at the corner
          CHECK(s.at(n, PSI12) == 2.0);
          break;
      }
    }
  }

  // two tags outside the precedence list disagreeing at a corner
  BcSpec bc;
  bc.precedence.clear();
  bc.prescriptions.push_back({BoundaryTag::Wall, {true, false, false, false, false, false}, {}});
  bc.prescriptions.push_back({BoundaryTag::Inflow, {true, false, false, false, false, false}, [](const Vec2&) {
                                return std::array<double, kSlots>{1, 0, 0, 0, 0, 0};
                              }});
  CHECK_THROWS_AS(apply_dirichlet(mesh, dofs, s, bc), std::invalid_argument);
}

TEST_CASE("field evaluation") {
  const Mesh mesh = gen_cylinder_mesh(1.0, 16);
  const FieldState s = smooth_state(mesh, 1.5, 11);
  const PointLocator locator(mesh);
  for (int n = 0; n < mesh.num_nodes(); n += 37) {
    const FieldSample f = evaluate_field(locator, mesh, s, mesh.nodes[n]);
    CHECK(f.u.x == doctest::Approx(s.at(n, U)).epsilon(1e-9));
    CHECK(f.p == doctest::Approx(s.at(n, P)).epsilon(1e-9));
    CHECK(f.psi.xy == doctest::Approx(s.at(n, PSI12)).epsilon(1e-9));
  }
  const int e = mesh.num_elements() / 2;
  const auto& c = mesh.elements[e];
  const Vec2 centroid = map_point(mesh, e, {1.0 / 3.0, 1.0 / 3.0}).x;
  const FieldSample f = evaluate_field(mesh, s, centroid);
  double expected = 0.0;
  for (int a = 0; a < 3; ++a) expected += -1.0 / 9.0 * s.at(c[a], P) + 4.0 / 9.0 * s.at(c[a + 3], P);
  CHECK(f.p == doctest::Approx(expected).epsilon(1e-12));

  // points hugging the cylinder, reached through the fallback search
  for (double t : {0.1, 0.7, 1.6, 2.9}) {
    const FieldSample g = evaluate_field(locator, mesh, s, {1.0005 * std::cos(t), 1.0005 * std::sin(t)});
    CHECK(g.sigma.xx > 0.0);
    CHECK(g.sigma.xx * g.sigma.yy - g.sigma.xy * g.sigma.xy > 0.0);
  }
  CHECK(count_spd_violations(mesh, s) == 0);
  CHECK_THROWS_AS(evaluate_field(locator, mesh, s, {0.0, 0.5}), PointOutsideDomain);
  CHECK_THROWS_AS(evaluate_field(locator, mesh, s, {16.0, 0.5}), PointOutsideDomain);
}

TEST_CASE("VTK export") {
  const Mesh mesh = gen_channel_mesh(2, 1, 2, 1);
  FieldState s(mesh.num_nodes());
  const auto path = std::filesystem::temp_directory_path() / "logconf_tests_fields.vtk";
  write_vtk(mesh, s, oldroyd(0.5), path);
  std::ifstream in(path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(text.find("CELLS 16 64") != std::string::npos);
  CHECK(text.find("SCALARS T11") != std::string::npos);
}
