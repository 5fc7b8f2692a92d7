#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "logconf/constitutive.hpp"
#include "logconf/solver/newton.hpp"

namespace logconf::bench {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Outflow {
  Natural,    ///< v = 0 only, traction-free in x
  Developed,  ///< Poiseuille velocity prescribed, pressure pinned at the outflow centerline
};

struct BenchConfig {
  double R{1.0};
  double ubar{1.0};
  double mu{1.0};  ///< total viscosity mu_s + mu_p
  double beta{0.59};
  double rho{0.0};
  bool creeping{true};
  bool full_jacobian{false};
  Outflow outflow{Outflow::Natural};
  std::vector<double> wi_schedule;  ///< empty: default_schedule(0.9)
  std::string mesh{"M1"};           ///< M1, M2, M3 or a .msh path
  solver::NewtonConfig newton;
  solver::LinearConfig linear;
  int max_bisections{4};
  std::filesystem::path out_dir{"out"};
  bool write_vtk{true};
  int wake_points_per_edge{8};
  int wake_centerline_samples{281};

  void validate() const;
  [[nodiscard]] double lambda(double wi) const { return wi * R / ubar; }
  [[nodiscard]] FluidParams fluid(double wi) const;
  [[nodiscard]] std::vector<double> schedule() const;
};

/// 0.1 steps up to 0.5, then 0.05 steps, up to and including wi_max.
std::vector<double> default_schedule(double wi_max);

/// "a:b:h" ranges and plain values, comma separated: "0.1:0.5:0.1,0.55:0.9:0.05".
std::vector<double> parse_schedule(const std::string& text);

/// Sets one key (fluid.beta, bench.wi, mesh.class, solver.backend, ...).
void set_config_value(BenchConfig& cfg, const std::string& key, const std::string& value);
/// "key = value" form of set_config_value.
void apply_override(BenchConfig& cfg, const std::string& assignment);

/// Flat key = value file; '#' starts a comment.
BenchConfig load_config(const std::filesystem::path& path, BenchConfig base = {});

/// All keys with their current values, in file syntax.
std::string dump_config(const BenchConfig& cfg);

}  // namespace logconf::bench
