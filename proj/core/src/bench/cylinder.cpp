#include "logconf/bench/cylinder.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>

#include "logconf/bench/inflow.hpp"
#include "logconf/fem/postprocess.hpp"
#include "logconf/fem/reference.hpp"
#include "logconf/matfun.hpp"

namespace logconf::bench {

int mesh_class_segments(const std::string& id) {
  if (id == "M1") return 48;
  if (id == "M2") return 96;
  if (id == "M3") return 192;
  return 0;
}

Mesh make_benchmark_mesh(const std::string& id, double R) {
  const int n = mesh_class_segments(id);
  if (n > 0) return gen_cylinder_mesh(R, n);
  Mesh m = import_gmsh(id);
  if (!m.has_tag(BoundaryTag::Cylinder)) {
    throw MeshError(MeshError::Kind::MissingPhysicalGroup, id + ": mesh has no cylinder boundary");
  }
  if (std::abs(m.cylinder_radius - R) > 1e-6 * R) {
    std::ostringstream msg;
    msg << id << ": cylinder radius " << m.cylinder_radius << " does not match fluid.R = " << R;
    throw MeshError(MeshError::Kind::InvalidGeometry, msg.str());
  }
  return m;
}

fem::BcSpec cylinder_bcs(const BenchConfig& cfg, double wi, std::optional<int> pin_node) {
  const double lambda = cfg.lambda(wi);
  const double ubar = cfg.ubar;
  const double R = cfg.R;
  const fem::BoundaryValue developed = [=](const Vec2& x) {
    const double y = std::clamp(x.y, 0.0, 2.0 * R);
    const SymTensor2 psi = inflow_psi(y, lambda, ubar, R);
    return std::array<double, fem::kSlots>{inflow_velocity(y, ubar, R), 0.0, 0.0, psi.xx, psi.xy, psi.yy};
  };
  fem::BcSpec bc = fem::benchmark_bcs(developed);
  if (cfg.outflow == Outflow::Developed) {
    for (auto& p : bc.prescriptions) {
      if (p.tag != BoundaryTag::Outflow) continue;
      p.components[fem::U] = true;
      p.value = developed;
    }
    if (!pin_node) throw std::invalid_argument("cylinder_bcs: developed outflow needs a pressure pin node");
    bc.pressure_pin_node = pin_node;
    bc.pressure_pin_value = 0.0;
  }
  return bc;
}

namespace {

fem::AssemblyOptions assembly_options(const BenchConfig& cfg) {
  fem::AssemblyOptions o;
  o.creeping = cfg.creeping;
  o.full_jacobian = cfg.full_jacobian;
  return o;
}

}  // namespace

CylinderProblem::CylinderProblem(Mesh mesh, const BenchConfig& cfg)
    : cfg_(cfg), mesh_(std::move(mesh)), dofs_(mesh_.num_nodes()) {
  cfg_.validate();
  if (cfg_.outflow == Outflow::Developed) {
    // outflow node closest to the centerline
    for (const auto& edge : mesh_.boundary_edges) {
      if (edge.tag != BoundaryTag::Outflow) continue;
      for (int n : edge.nodes) {
        if (!pin_ || std::abs(mesh_.nodes[n].y) < std::abs(mesh_.nodes[*pin_].y)) pin_ = n;
      }
    }
    if (!pin_) throw MeshError(MeshError::Kind::MissingPhysicalGroup, "developed outflow: mesh has no Outflow edges");
  }
  const double wi0 = cfg_.schedule().front();
  fem::FieldState scratch(mesh_.num_nodes());
  fem::apply_dirichlet(mesh_, dofs_, scratch, bcs(wi0));
  assembler_ = std::make_unique<fem::Assembler>(mesh_, dofs_, cfg_.fluid(wi0), assembly_options(cfg_));
}

void CylinderProblem::set_wi(double wi, fem::FieldState& state) {
  // the Dirichlet mask does not depend on Wi, only the inflow Psi values do
  fem::apply_dirichlet(mesh_, dofs_, state, bcs(wi));
  assembler_->set_params(cfg_.fluid(wi));
}

fem::FieldState CylinderProblem::stokes_start(double wi) {
  fem::FieldState state(mesh_.num_nodes());
  fem::DofMap clamped(mesh_.num_nodes());
  fem::BcSpec bc = bcs(wi);
  fem::apply_dirichlet(mesh_, clamped, state, bc);
  std::vector<std::uint8_t> mask(clamped.num_dofs());
  for (int d = 0; d < clamped.num_dofs(); ++d) {
    mask[d] = clamped.is_dirichlet(d) || d % fem::kSlots >= fem::PSI11;
    if (d % fem::kSlots >= fem::PSI11) state.values[d] = 0.0;
  }
  clamped.set_dirichlet_mask(std::move(mask));
  const fem::Assembler stokes(mesh_, clamped, cfg_.fluid(wi), assembly_options(cfg_));
  solver::NewtonResult r = solver::newton_solve(stokes, state, cfg_.newton, cfg_.linear);
  if (!r.converged()) throw std::runtime_error("Stokes start failed: " + r.message);
  set_wi(wi, r.state);
  return std::move(r.state);
}

solver::NewtonResult CylinderProblem::solve(double wi, const fem::FieldState& start) {
  fem::FieldState state = start;
  set_wi(wi, state);
  return solver::newton_solve(*assembler_, std::move(state), cfg_.newton, cfg_.linear);
}

namespace {

// Physical tangent length |dx/dt| of the quadratic edge (end a, end b, mid m) at t.
double edge_speed(const Vec2& a, const Vec2& b, const Vec2& m, double t) {
  const Vec2 d = (4.0 * t - 3.0) * a + (4.0 * t - 1.0) * b + (4.0 - 8.0 * t) * m;
  return norm(d);
}

struct PointFields {
  Vec2 x;
  double p{0.0};
  Tensor2 gradu;
  SymTensor2 psi;
};

PointFields fields_at(const Mesh& mesh, const fem::FieldState& state, int element, const Vec2& ref) {
  const auto g = fem::physical_shape(mesh, element, ref);
  const auto& conn = mesh.elements[element];
  PointFields f;
  f.x = g.x;
  for (int a = 0; a < fem::kNodesPerElement; ++a) {
    const int n = conn[a];
    f.p += g.value[a] * state.at(n, fem::P);
    f.psi += g.value[a] * state.psi(n);
    const double u = state.at(n, fem::U);
    const double v = state.at(n, fem::V);
    f.gradu.xx += u * g.grad[a].x;
    f.gradu.xy += u * g.grad[a].y;
    f.gradu.yx += v * g.grad[a].x;
    f.gradu.yy += v * g.grad[a].y;
  }
  return f;
}

}  // namespace

double drag_coefficient(const Mesh& mesh, const fem::FieldState& state, const FluidParams& params, double ubar) {
  if (!mesh.has_tag(BoundaryTag::Cylinder)) throw std::invalid_argument("drag_coefficient: mesh has no cylinder boundary");
  const fem::EdgeRule& rule = fem::edge_rule_4pt();
  const double cp = params.mu_p / params.lambda;
  double force = 0.0;
  for (const BoundaryEdge& be : mesh.boundary_edges) {
    if (be.tag != BoundaryTag::Cylinder) continue;
    const auto& conn = mesh.elements[be.element];
    const auto& le = fem::kElementEdges[be.local_edge];
    const Vec2 a = mesh.nodes[conn[le[0]]];
    const Vec2 b = mesh.nodes[conn[le[1]]];
    const Vec2 m = mesh.nodes[conn[le[2]]];
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const double t = rule.points[q];
      const PointFields f = fields_at(mesh, state, be.element, fem::edge_reference_point(be.local_edge, t));
      const Vec2 n = (1.0 / norm(f.x)) * f.x;  // out of the cylinder, into the fluid
      const SymTensor2 s = expm_sym(f.psi);
      const double sxx = -f.p + 2.0 * params.mu_s * f.gradu.xx + cp * (s.xx - 1.0);
      const double sxy = params.mu_s * (f.gradu.xy + f.gradu.yx) + cp * s.xy;
      force += rule.weights[q] * edge_speed(a, b, m, t) * (sxx * n.x + sxy * n.y);
    }
  }
  return 2.0 * force / (params.mu_total() * ubar);
}

std::vector<WakeSample> wake_profile(const Mesh& mesh, const fem::FieldState& state, const FluidParams& params,
                                     int points_per_edge, int centerline_samples) {
  if (points_per_edge < 1 || centerline_samples < 2) throw std::invalid_argument("wake_profile: too few samples");
  const double R = mesh.cylinder_radius;
  const double cp = params.mu_p / params.lambda;
  std::vector<WakeSample> surface;
  for (const BoundaryEdge& be : mesh.boundary_edges) {
    if (be.tag != BoundaryTag::Cylinder) continue;
    for (int k = 0; k <= points_per_edge; ++k) {
      const Vec2 ref = fem::edge_reference_point(be.local_edge, static_cast<double>(k) / points_per_edge);
      const fem::FieldSample fs = fem::evaluate_at(mesh, state, be.element, ref);
      const Vec2 x = map_point(mesh, be.element, ref).x;
      const double theta = std::atan2(std::max(x.y, 0.0), x.x);
      surface.push_back({R * (std::numbers::pi - theta), x.x, x.y, cp * (fs.sigma.xx - 1.0), true});
    }
  }
  std::sort(surface.begin(), surface.end(), [](const WakeSample& p, const WakeSample& q) { return p.s < q.s; });
  std::vector<WakeSample> out;
  for (const WakeSample& w : surface) {
    if (out.empty() || w.s - out.back().s > 1e-12 * R) out.push_back(w);
  }
  const fem::PointLocator locator(mesh);
  for (int i = 0; i < centerline_samples; ++i) {
    const double x = R + 14.0 * R * i / (centerline_samples - 1);
    if (i == 0 && !out.empty() && std::abs(out.back().x - R) < 1e-12 * R) continue;  // rear stagnation point
    const fem::FieldSample fs = fem::evaluate_field(locator, mesh, state, {x, 0.0});
    out.push_back({std::numbers::pi * R + (x - R), x, 0.0, cp * (fs.sigma.xx - 1.0), false});
  }
  return out;
}

void write_wake_csv(const std::vector<WakeSample>& wake, const std::filesystem::path& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_wake_csv: cannot open " + path.string());
  f << "# s: arc length from the upstream stagnation point (x = -R), continued along y = 0 behind the cylinder\n";
  f << "s,x,T11\n" << std::setprecision(12);
  for (const WakeSample& w : wake) f << w.s << ',' << w.x << ',' << w.T11 << '\n';
}

int count_interior_maxima(const std::vector<double>& values, double tol) {
  if (values.size() < 3) return 0;
  double scale = 0.0;
  for (double v : values) scale = std::max(scale, std::abs(v));
  const double delta = tol * scale;
  // hysteresis walk: a peak needs a rise of delta before it and a fall of delta after it
  int peaks = 0;
  double low = values.front();
  double high = values.front();
  bool rising = false;
  for (double v : values) {
    if (!rising) {
      low = std::min(low, v);
      if (v - low > delta) {
        rising = true;
        high = v;
      }
    } else {
      high = std::max(high, v);
      if (high - v > delta) {
        ++peaks;
        rising = false;
        low = v;
      }
    }
  }
  return peaks;
}

SweepResult run_cylinder_sweep(const BenchConfig& cfg_in, bool write_files, std::ostream* log) {
  BenchConfig cfg = cfg_in;
  cfg.validate();
  const std::vector<double> schedule = cfg.schedule();
  const std::string mesh_id = mesh_class_segments(cfg.mesh) > 0 ? cfg.mesh : std::filesystem::path(cfg.mesh).stem().string();
  if (write_files) std::filesystem::create_directories(cfg.out_dir);

  CylinderProblem problem(make_benchmark_mesh(cfg.mesh, cfg.R), cfg);
  if (log) {
    *log << "mesh " << mesh_id << ": " << problem.mesh().num_elements() << " elements, " << problem.mesh().num_nodes()
         << " nodes, " << problem.dofs().num_free() << " unknowns\n";
  }
  SweepResult out;
  std::ofstream drag_csv;
  if (write_files) {
    drag_csv.open(cfg.out_dir / "drag.csv");
    drag_csv << "Wi,K,iters,seconds\n" << std::setprecision(10);
  }
  const auto tag = [](double wi) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(3) << wi;
    return s.str();
  };

  using clock = std::chrono::steady_clock;
  auto t_start = clock::now();
  const fem::FieldState start = problem.stokes_start(schedule.front());
  std::size_t next_point = 0;
  solver::ContinuationConfig ccfg;
  ccfg.max_bisections = cfg.max_bisections;
  ccfg.on_solve = [&](double wi, const solver::NewtonResult& r, int depth) {
    if (log) {
      *log << "  Wi " << tag(wi) << (depth ? " (bisected)" : "") << ": " << solver::to_string(r.status) << " in "
           << r.iterations() << " iterations, residual " << r.history.back().residual << '\n';
    }
    if (!r.converged() || next_point >= schedule.size() || wi != schedule[next_point]) return;
    ++next_point;
    const FluidParams prm = cfg.fluid(wi);
    DragResult d;
    d.wi = wi;
    d.K = drag_coefficient(problem.mesh(), r.state, prm, cfg.ubar);
    d.mesh_id = mesh_id;
    d.newton_iters = r.iterations();
    d.spd_violations = fem::count_spd_violations(problem.mesh(), r.state);
    const auto now = clock::now();
    d.seconds = std::chrono::duration<double>(now - t_start).count();
    t_start = now;
    auto wake = wake_profile(problem.mesh(), r.state, prm, cfg.wake_points_per_edge, cfg.wake_centerline_samples);
    if (log) *log << "Wi " << tag(wi) << "  K = " << std::setprecision(10) << d.K << std::setprecision(6) << '\n';
    if (write_files) {
      drag_csv << wi << ',' << d.K << ',' << d.newton_iters << ',' << d.seconds << '\n' << std::flush;
      write_wake_csv(wake, cfg.out_dir / ("wake_Wi" + tag(wi) + ".csv"));
      solver::write_history_csv(r.history, cfg.out_dir / ("history_Wi" + tag(wi) + ".csv"));
      if (cfg.write_vtk) fem::write_vtk(problem.mesh(), r.state, prm, cfg.out_dir / ("solution_Wi" + tag(wi) + ".vtk"));
    }
    out.drag.push_back(d);
    out.states.emplace(wi, r.state);
    out.wakes.emplace(wi, std::move(wake));
  };
  try {
    solver::wi_continuation([&](double wi, const fem::FieldState& s) { return problem.solve(wi, s); }, 0.0, start,
                            schedule, ccfg);
  } catch (const solver::ContinuationStall& e) {
    out.error = e.what();
  }
  return out;
}

const std::vector<Table3Row>& table3() {
  static const std::vector<Table3Row> rows{
      {0.1, 130.3706, 130.3613, 130.3620},  {0.2, 126.6609, 126.6288, 126.6254},  {0.3, 123.2622, 123.2008, 123.1922},
      {0.4, 120.6953, 120.6080, 120.5931},  {0.5, 118.9615, 118.8505, 118.8291},  {0.6, 117.9542, 117.8048, 117.7798},
      {0.7, 117.5430, 117.3416, 117.3193},  {0.75, 117.5108, 117.2940, 117.2747}, {0.8, 117.5639, 117.3539, 117.3365},
      {0.85, 117.6809, 117.5116, 117.4925}, {0.88, 117.7743, 117.6495, 117.6265}, {0.89, 117.8085, 117.7022, 117.6774},
      {0.9, 117.8442, 117.7584, 117.7312}};
  return rows;
}

}  // namespace logconf::bench
