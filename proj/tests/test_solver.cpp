#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "logconf/solver/newton.hpp"

using namespace logconf;
using namespace logconf::solver;

namespace {

CsrMatrix from_dense(const std::vector<std::vector<double>>& a) {
  std::vector<CsrMatrix::Triplet> t;
  for (int i = 0; i < static_cast<int>(a.size()); ++i) {
    for (int j = 0; j < static_cast<int>(a.size()); ++j) {
      if (a[i][j] != 0.0) t.push_back({i, j, a[i][j]});
    }
  }
  return CsrMatrix::from_triplets(static_cast<int>(a.size()), t);
}

// Nonsymmetric, diagonally dominant, random sparsity.
CsrMatrix random_sparse(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::uniform_int_distribution<int> pick(0, n - 1);
  std::vector<CsrMatrix::Triplet> t;
  for (int i = 0; i < n; ++i) {
    t.push_back({i, i, 6.0 + unif(rng)});
    for (int k = 0; k < 4; ++k) t.push_back({i, pick(rng), unif(rng)});
  }
  return CsrMatrix::from_triplets(n, t);
}

// Upwinded 2D convection-diffusion on an m x m grid.
CsrMatrix convection_diffusion(int m, double peclet) {
  std::vector<CsrMatrix::Triplet> t;
  const auto id = [m](int i, int j) { return i * m + j; };
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      t.push_back({id(i, j), id(i, j), 4.0 + peclet});
      if (i > 0) t.push_back({id(i, j), id(i - 1, j), -1.0 - peclet});
      if (i + 1 < m) t.push_back({id(i, j), id(i + 1, j), -1.0});
      if (j > 0) t.push_back({id(i, j), id(i, j - 1), -1.0});
      if (j + 1 < m) t.push_back({id(i, j), id(i, j + 1), -1.0});
    }
  }
  return CsrMatrix::from_triplets(m * m, t);
}

double rel_residual(const CsrMatrix& a, const std::vector<double>& x, const std::vector<double>& b) {
  std::vector<double> r = a.multiply(x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
  return norm2(r) / norm2(b);
}

std::vector<double> random_vector(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = unif(rng);
  return v;
}

LinearConfig gmres_cfg() {
  LinearConfig c;
  c.backend = Backend::Gmres;
  return c;
}

}  // namespace

TEST_CASE("GMRES on the identity converges in one iteration") {
  const CsrMatrix a = from_dense({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
  const std::vector<double> b{1.0, -2.0, 3.0};
  const GmresResult r = gmres_solve(a, b, IdentityPreconditioner{}, gmres_cfg());
  CHECK(r.converged);
  CHECK(r.iterations == 1);
  for (int i = 0; i < 3; ++i) CHECK(r.x[i] == doctest::Approx(b[i]).epsilon(1e-14));
}

TEST_CASE("GMRES with Jacobi on an SPD diagonal matrix") {
  const CsrMatrix a = from_dense({{2, 0, 0, 0}, {0, 5, 0, 0}, {0, 0, 0.1, 0}, {0, 0, 0, 7}});
  const std::vector<double> b{1.0, 1.0, 1.0, 1.0};
  const GmresResult r = gmres_solve(a, b, JacobiPreconditioner(a), gmres_cfg());
  CHECK(r.converged);
  CHECK(r.iterations <= 2);
  CHECK(r.x[2] == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("GMRES zero right-hand side and dimension checks") {
  const CsrMatrix a = from_dense({{1, 2}, {3, 4}});
  const GmresResult r = gmres_solve(a, std::vector<double>{0.0, 0.0}, IdentityPreconditioner{}, gmres_cfg());
  CHECK(r.converged);
  CHECK(r.x == std::vector<double>{0.0, 0.0});
  CHECK_THROWS_AS(gmres_solve(a, std::vector<double>{1.0}, IdentityPreconditioner{}, gmres_cfg()), std::invalid_argument);
}

TEST_CASE("restarted GMRES converges and reports the true residual") {
  const CsrMatrix a = convection_diffusion(20, 2.0);
  const std::vector<double> b = random_vector(a.n, 3);
  LinearConfig cfg = gmres_cfg();
  cfg.restart = 10;
  const GmresResult r = gmres_solve(a, b, IdentityPreconditioner{}, cfg);
  CHECK(r.converged);
  CHECK(r.iterations > 10);
  CHECK(rel_residual(a, r.x, b) == doctest::Approx(r.relative_residual).epsilon(1e-6));
  CHECK(r.relative_residual <= 1e-8);
}

TEST_CASE("GMRES reports stagnation when the iteration budget runs out") {
  const CsrMatrix a = convection_diffusion(20, 2.0);
  LinearConfig cfg = gmres_cfg();
  cfg.restart = 5;
  cfg.max_iterations = 5;
  cfg.precondition = false;
  const GmresResult r = gmres_solve(a, random_vector(a.n, 4), IdentityPreconditioner{}, cfg);
  CHECK_FALSE(r.converged);
  CHECK(r.iterations == 5);
  LinearSolver solver(cfg);
  CHECK_THROWS_AS(solver.solve(a, random_vector(a.n, 4)), LinearSolverError);
}

TEST_CASE("ILUT on a tridiagonal matrix is an exact factorization") {
  const int n = 50;
  std::vector<CsrMatrix::Triplet> t;
  for (int i = 0; i < n; ++i) {
    t.push_back({i, i, 2.0});
    if (i > 0) t.push_back({i, i - 1, -1.0});
    if (i + 1 < n) t.push_back({i, i + 1, -1.0});
  }
  const CsrMatrix a = CsrMatrix::from_triplets(n, t);
  const Ilut ilu(a, 1, 1e-4);
  CHECK(ilu.nnz() == 3 * n - 2);
  const std::vector<double> b = random_vector(n, 5);
  const GmresResult r = gmres_solve(a, b, ilu, gmres_cfg());
  CHECK(r.converged);
  CHECK(r.iterations == 1);
  CHECK(rel_residual(a, r.x, b) <= 1e-12);
}

TEST_CASE("ILUT with no fill and infinite threshold acts as Jacobi") {
  const CsrMatrix a = random_sparse(40, 6);
  const Ilut ilu(a, 0, std::numeric_limits<double>::infinity());
  const JacobiPreconditioner jac(a);
  const std::vector<double> v = random_vector(a.n, 7);
  std::vector<double> x1(a.n), x2(a.n);
  ilu.apply(v, x1);
  jac.apply(v, x2);
  for (int i = 0; i < a.n; ++i) CHECK(x1[i] == doctest::Approx(x2[i]).epsilon(1e-15));
  CHECK(ilu.nnz() == a.n);
}

TEST_CASE("ILUT preconditioning reduces GMRES iterations") {
  const CsrMatrix a = convection_diffusion(30, 1.0);
  const std::vector<double> b = random_vector(a.n, 8);
  const GmresResult plain = gmres_solve(a, b, IdentityPreconditioner{}, gmres_cfg());
  const auto pc = ilut_factor(a, 200, 1e-4);
  const GmresResult pre = gmres_solve(a, b, *pc, gmres_cfg());
  REQUIRE(plain.converged);
  REQUIRE(pre.converged);
  CHECK(pre.iterations * 5 <= plain.iterations);
}

TEST_CASE("ILUT shifts a zero pivot and rejects an empty row") {
  // the (0,0) entry is structurally zero
  const CsrMatrix a = from_dense({{0, 1}, {1, 1}});
  const Ilut ilu(a, 10, 1e-4);
  CHECK(ilu.shifted_pivots() == 1);
  const CsrMatrix empty = from_dense({{1, 0}, {0, 0}});
  CHECK_THROWS_WITH_AS(Ilut(empty, 10, 1e-4), doctest::Contains("row 1"), LinearSolverError);
  CHECK_THROWS_AS(Ilut(a, -1, 1e-4), std::invalid_argument);
}

TEST_CASE("GMRES with ILUT matches the direct solve on a nonsymmetric matrix") {
  const CsrMatrix a = random_sparse(300, 9);
  const std::vector<double> b = random_vector(a.n, 10);
  const auto pc = ilut_factor(a, 200, 1e-4);
  const GmresResult g = gmres_solve(a, b, *pc, gmres_cfg());
  const std::vector<double> x = direct_lu(a, b);
  REQUIRE(g.converged);
  std::vector<double> d(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) d[i] = g.x[i] - x[i];
  CHECK(norm2(d) / norm2(x) <= 1e-8);
}

TEST_CASE("direct LU") {
  SUBCASE("diagonal 2x2") {
    const std::vector<double> x = direct_lu(from_dense({{2, 0}, {0, 4}}), std::vector<double>{2.0, 4.0});
    CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(x[1] == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("random sparse 100x100") {
    const CsrMatrix a = random_sparse(100, 11);
    const std::vector<double> b = random_vector(100, 12);
    CHECK(rel_residual(a, direct_lu(a, b), b) <= 1e-10);
  }
  SUBCASE("singular matrix is an error") {
    CHECK_THROWS_AS(direct_lu(from_dense({{1, 2}, {2, 4}}), std::vector<double>{1.0, 1.0}), LinearSolverError);
    CHECK_THROWS_AS(direct_lu(from_dense({{1, 0, 0}, {0, 0, 0}, {0, 0, 1}}), std::vector<double>{1.0, 1.0, 1.0}),
                    LinearSolverError);
  }
  SUBCASE("refactorization with the same pattern") {
    DirectLu lu;
    CsrMatrix a = random_sparse(50, 13);
    const std::vector<double> b = random_vector(50, 14);
    lu.factorize(a);
    const auto x1 = lu.solve(b);
    for (double& v : a.val) v *= 2.0;
    lu.factorize(a);
    const auto x2 = lu.solve(b);
    for (int i = 0; i < 50; ++i) CHECK(x2[i] == doctest::Approx(0.5 * x1[i]).epsilon(1e-12));
  }
}

TEST_CASE("linear and Newton configuration validation") {
  LinearConfig c;
  c.restart = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.ilut_fill = -1;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  NewtonConfig n;
  n.abs_tol = 0.0;
  CHECK_THROWS_AS(n.validate(), std::invalid_argument);
}

namespace {

// Stokes in a channel with Psi fixed at zero everywhere: the problem is linear.
struct StokesChannel {
  Mesh mesh = gen_channel_mesh(6.0, 2.0, 6, 3);
  fem::DofMap dofs{mesh.num_nodes()};
  fem::FieldState state{mesh.num_nodes()};
  FluidParams params;

  static std::array<double, fem::kSlots> exact(const Vec2& x) {
    return {0.375 * (4.0 - x.y * x.y), 0.0, 0.59 * (-0.75) * (x.x - 6.0), 0.0, 0.0, 0.0};
  }

  StokesChannel() {
    fem::BcSpec bc;
    bc.prescriptions.push_back({BoundaryTag::Inflow, {true, true, false, true, true, true}, exact});
    bc.prescriptions.push_back({BoundaryTag::Wall, {true, true, false, false, false, false}, {}});
    bc.prescriptions.push_back({BoundaryTag::Symmetry, {false, true, false, false, false, false}, {}});
    bc.prescriptions.push_back({BoundaryTag::Outflow, {false, true, false, false, false, false}, {}});
    fem::apply_dirichlet(mesh, dofs, state, bc);
    std::vector<std::uint8_t> mask(dofs.num_dofs());
    for (int d = 0; d < dofs.num_dofs(); ++d) mask[d] = dofs.is_dirichlet(d) || d % fem::kSlots >= fem::PSI11;
    dofs.set_dirichlet_mask(mask);
  }
};

}  // namespace

TEST_CASE("Newton on a linear problem converges in one iteration") {
  StokesChannel ch;
  const fem::Assembler A(ch.mesh, ch.dofs, ch.params);
  for (Backend backend : {Backend::DirectLU, Backend::Gmres}) {
    LinearConfig lin;
    lin.backend = backend;
    lin.tol = 1e-12;
    const NewtonResult r = newton_solve(A, ch.state, NewtonConfig{}, lin);
    REQUIRE(r.converged());
    CHECK(r.iterations() == 1);
    CHECK(r.history.size() == 2);
    double worst = 0.0;
    for (int n = 0; n < ch.mesh.num_nodes(); ++n) {
      const auto e = StokesChannel::exact(ch.mesh.nodes[n]);
      worst = std::max({worst, std::abs(r.state.at(n, fem::U) - e[0]), std::abs(r.state.at(n, fem::V))});
    }
    CHECK(worst <= 1e-9);
    if (backend == Backend::Gmres) CHECK(r.history[1].gmres_iters > 0);
  }
}

TEST_CASE("Newton reports a non-finite state and keeps the iterate") {
  StokesChannel ch;
  const fem::Assembler A(ch.mesh, ch.dofs, ch.params);
  fem::FieldState bad = ch.state;
  bad.at(ch.mesh.num_nodes() / 2, fem::U) = std::nan("");
  const NewtonResult r = newton_solve(A, bad, NewtonConfig{}, LinearConfig{});
  CHECK(r.status == NewtonStatus::NonFinite);
  CHECK(std::isnan(r.state.at(ch.mesh.num_nodes() / 2, fem::U)));
}

TEST_CASE("Newton history CSV") {
  const std::vector<NewtonIterate> h{{0, 1.5, 0, 0.0, 1.0}, {1, 1e-9, 17, 0.3, 1.0}};
  const auto path = std::filesystem::temp_directory_path() / "logconf_history_test.csv";
  write_history_csv(h, path);
  std::ifstream f(path);
  std::string line;
  std::getline(f, line);
  CHECK(line == "iter,residual,gmres_iters");
  std::getline(f, line);
  CHECK(line == "0,1.5,0");
  std::getline(f, line);
  CHECK(line == "1,1e-09,17");
  std::filesystem::remove(path);
}

namespace {

// Pretend solve: succeeds only for Wi steps no larger than max_step.
SolveAtWi toy_solver(double max_step, std::vector<double>& visited) {
  return [max_step, &visited](double wi, const fem::FieldState& start) {
    NewtonResult r;
    r.state = start;
    const double from = start.values[0];
    visited.push_back(wi);
    if (wi - from <= max_step + 1e-12) {
      r.state.values[0] = wi;
      r.status = NewtonStatus::Converged;
    } else {
      r.status = NewtonStatus::MaxIterations;
      r.message = "toy";
    }
    return r;
  };
}

}  // namespace

TEST_CASE("Weissenberg continuation warm-starts and bisects") {
  fem::FieldState start(1);
  std::vector<double> visited;
  SUBCASE("plain schedule") {
    const auto res = wi_continuation(toy_solver(0.1, visited), 0.0, start, {0.1, 0.2, 0.3});
    CHECK(res.solutions.size() == 3);
    CHECK(res.attempts == 3);
    CHECK(res.solutions.at(0.3).state.values[0] == doctest::Approx(0.3));
  }
  SUBCASE("bisection recovers") {
    const auto res = wi_continuation(toy_solver(0.1, visited), 0.0, start, {0.4});
    // 0.4 fails, 0.2 fails, then 0.1 steps
    REQUIRE(visited.size() == 6);
    CHECK(visited[1] == doctest::Approx(0.2));
    CHECK(visited[2] == doctest::Approx(0.1));
    CHECK(visited[5] == 0.4);
    CHECK(res.solutions.count(0.4) == 1);
    CHECK(res.solutions.size() == 1);
  }
  SUBCASE("stall when the depth limit is exceeded") {
    ContinuationConfig cfg;
    cfg.max_bisections = 2;
    try {
      wi_continuation(toy_solver(0.05, visited), 0.0, start, {0.1, 0.9}, cfg);
      FAIL("expected a stall");
    } catch (const ContinuationStall& e) {
      CHECK(e.wi_reached() == doctest::Approx(0.1));
      CHECK(e.last_state().values[0] == doctest::Approx(0.1));
    }
  }
  SUBCASE("schedule must increase") {
    CHECK_THROWS_AS(wi_continuation(toy_solver(1.0, visited), 0.0, start, {0.2, 0.2}), std::invalid_argument);
    CHECK_THROWS_AS(wi_continuation(toy_solver(1.0, visited), 0.3, start, {0.2}), std::invalid_argument);
  }
}
