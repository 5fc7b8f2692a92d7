#pragma once

#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "logconf/bench/config.hpp"
#include "logconf/fem/assembly.hpp"
#include "logconf/mesh.hpp"
#include "logconf/solver/newton.hpp"

namespace logconf::bench {

/// Cylinder segments of the generated mesh classes: M1 48, M2 96, M3 192; 0 for anything else.
int mesh_class_segments(const std::string& id);
/// Generated mesh for M1/M2/M3, otherwise a gmsh file. Throws MeshError.
Mesh make_benchmark_mesh(const std::string& id, double R);

/// Benchmark boundary data: no-slip walls and cylinder, symmetry v = Psi12 = 0,
/// outflow v = 0, Poiseuille velocity and Psi at the inflow. With Outflow::Developed
/// the outflow also gets the Poiseuille u and the pressure is pinned to 0 at pin_node.
fem::BcSpec cylinder_bcs(const BenchConfig& cfg, double wi, std::optional<int> pin_node = {});

class CylinderProblem {
 public:
  CylinderProblem(Mesh mesh, const BenchConfig& cfg);
  CylinderProblem(const CylinderProblem&) = delete;
  CylinderProblem& operator=(const CylinderProblem&) = delete;

  [[nodiscard]] const Mesh& mesh() const { return mesh_; }
  [[nodiscard]] const fem::DofMap& dofs() const { return dofs_; }
  [[nodiscard]] const fem::Assembler& assembler() const { return *assembler_; }
  [[nodiscard]] const BenchConfig& config() const { return cfg_; }

  /// Switches parameters and Dirichlet values to wi; overwrites the Dirichlet dofs of state.
  void set_wi(double wi, fem::FieldState& state);
  /// Velocity and pressure of the Stokes problem with Psi clamped to 0, then the
  /// Psi inflow data of wi on top (Psi = 0 inside).
  fem::FieldState stokes_start(double wi);
  solver::NewtonResult solve(double wi, const fem::FieldState& start);

 private:
  [[nodiscard]] fem::BcSpec bcs(double wi) const { return cylinder_bcs(cfg_, wi, pin_); }

  BenchConfig cfg_;
  Mesh mesh_;
  fem::DofMap dofs_;
  std::unique_ptr<fem::Assembler> assembler_;
  std::optional<int> pin_;
};

/// K = 2 / (mu ubar) * x-force on the half cylinder, 4-point Gauss per curved edge.
double drag_coefficient(const Mesh& mesh, const fem::FieldState& state, const FluidParams& params, double ubar);

struct WakeSample {
  double s{0.0};  ///< arc length from the upstream stagnation point, then along y = 0
  double x{0.0};
  double y{0.0};
  double T11{0.0};
  bool on_cylinder{false};
};

/// T11 along the cylinder surface and the downstream centerline x in [R, 15R].
std::vector<WakeSample> wake_profile(const Mesh& mesh, const fem::FieldState& state, const FluidParams& params,
                                     int points_per_edge, int centerline_samples);
void write_wake_csv(const std::vector<WakeSample>& wake, const std::filesystem::path& path);

/// Peaks in a sampled curve whose rise and fall both exceed tol * max|v|; the ends count only as troughs.
int count_interior_maxima(const std::vector<double>& values, double tol);

struct DragResult {
  double wi{0.0};
  double K{0.0};
  std::string mesh_id;
  int newton_iters{0};
  double seconds{0.0};
  int spd_violations{0};
};

struct SweepResult {
  std::vector<DragResult> drag;
  std::map<double, fem::FieldState> states;
  std::map<double, std::vector<WakeSample>> wakes;
  std::optional<std::string> error;  ///< set when the continuation stalled
};

/// Continuation sweep over cfg.schedule() from a Stokes start. Writes drag.csv,
/// wake/history CSVs and VTK files to cfg.out_dir when write_files is set.
SweepResult run_cylinder_sweep(const BenchConfig& cfg, bool write_files, std::ostream* log = nullptr);

struct Table3Row {
  double wi;
  double m1;
  double m2;
  double m3;
};
/// Reference drag coefficients on meshes M1 to M3.
const std::vector<Table3Row>& table3();

}  // namespace logconf::bench
