#include "logconf/bench/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace logconf::bench {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw ConfigError(key + ": expected a number, got '" + v + "'");
  return x;
}

int to_int(const std::string& key, const std::string& v) {
  const double x = to_double(key, v);
  if (x != std::floor(x) || std::abs(x) > 1e9) throw ConfigError(key + ": expected an integer, got '" + v + "'");
  return static_cast<int>(x);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "on" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "off" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": expected a boolean, got '" + v + "'");
}

}  // namespace

void BenchConfig::validate() const {
  if (!(R > 0.0) || !(ubar > 0.0) || !(mu > 0.0)) throw ConfigError("R, ubar and mu must be > 0");
  if (!(beta > 0.0 && beta < 1.0)) throw ConfigError("beta must lie in (0, 1)");
  if (!(rho >= 0.0)) throw ConfigError("rho must be >= 0");
  if (!creeping && rho == 0.0) throw ConfigError("inertial runs need rho > 0");
  for (double wi : schedule()) {
    if (!(wi > 0.0)) throw ConfigError("Weissenberg numbers must be > 0");
  }
  if (max_bisections < 0) throw ConfigError("continuation.max_bisections must be >= 0");
  if (wake_points_per_edge < 1 || wake_centerline_samples < 2) throw ConfigError("wake sample counts too small");
  try {
    newton.validate();
    linear.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

FluidParams BenchConfig::fluid(double wi) const {
  FluidParams p;
  p.rho = creeping ? 0.0 : rho;
  p.mu_s = beta * mu;
  p.mu_p = (1.0 - beta) * mu;
  p.lambda = lambda(wi);
  p.model = OldroydB{};
  p.validate();
  return p;
}

std::vector<double> BenchConfig::schedule() const { return wi_schedule.empty() ? default_schedule(0.9) : wi_schedule; }

std::vector<double> default_schedule(double wi_max) {
  // integer steps in units of 0.05 keep the values exact to print
  std::vector<double> s;
  for (int k = 2; k <= 18 && 0.05 * k <= wi_max + 1e-12; ++k) {
    if (k <= 10 && k % 2 != 0) continue;
    s.push_back(k * 0.05);
  }
  return s;
}

std::vector<double> parse_schedule(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto c1 = item.find(':');
    if (c1 == std::string::npos) {
      out.push_back(to_double("bench.wi", item));
      continue;
    }
    const auto c2 = item.find(':', c1 + 1);
    if (c2 == std::string::npos) throw ConfigError("bench.wi: range must be a:b:step, got '" + item + "'");
    const double a = to_double("bench.wi", trim(item.substr(0, c1)));
    const double b = to_double("bench.wi", trim(item.substr(c1 + 1, c2 - c1 - 1)));
    const double h = to_double("bench.wi", trim(item.substr(c2 + 1)));
    if (!(h > 0.0) || b < a) throw ConfigError("bench.wi: bad range '" + item + "'");
    const int n = static_cast<int>(std::floor((b - a) / h + 1e-9));
    for (int k = 0; k <= n; ++k) out.push_back(a + k * h);
  }
  if (out.empty()) throw ConfigError("bench.wi: empty schedule");
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (!(out[i] > out[i - 1])) throw ConfigError("bench.wi: schedule must be strictly increasing");
  }
  return out;
}

void set_config_value(BenchConfig& cfg, const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (key == "fluid.R") {
    cfg.R = to_double(key, v);
  } else if (key == "fluid.ubar") {
    cfg.ubar = to_double(key, v);
  } else if (key == "fluid.mu") {
    cfg.mu = to_double(key, v);
  } else if (key == "fluid.beta") {
    cfg.beta = to_double(key, v);
  } else if (key == "fluid.rho") {
    cfg.rho = to_double(key, v);
  } else if (key == "bench.creeping") {
    cfg.creeping = to_bool(key, v);
  } else if (key == "bench.outflow") {
    if (v == "natural") {
      cfg.outflow = Outflow::Natural;
    } else if (v == "developed") {
      cfg.outflow = Outflow::Developed;
    } else {
      throw ConfigError(key + ": expected natural or developed, got '" + v + "'");
    }
  } else if (key == "bench.wi") {
    cfg.wi_schedule = parse_schedule(v);
  } else if (key == "mesh.class" || key == "mesh.file") {
    cfg.mesh = v;
  } else if (key == "solver.backend") {
    if (v == "gmres") {
      cfg.linear.backend = solver::Backend::Gmres;
    } else if (v == "direct" || v == "lu") {
      cfg.linear.backend = solver::Backend::DirectLU;
    } else {
      throw ConfigError(key + ": expected gmres or direct, got '" + v + "'");
    }
  } else if (key == "solver.restart") {
    cfg.linear.restart = to_int(key, v);
  } else if (key == "solver.ilut_fill") {
    cfg.linear.ilut_fill = to_int(key, v);
  } else if (key == "solver.ilut_threshold") {
    cfg.linear.ilut_threshold = to_double(key, v);
  } else if (key == "solver.precondition") {
    cfg.linear.precondition = to_bool(key, v);
  } else if (key == "solver.max_iterations") {
    cfg.linear.max_iterations = to_int(key, v);
  } else if (key == "solver.tol") {
    cfg.linear.tol = to_double(key, v);
  } else if (key == "newton.abs_tol") {
    cfg.newton.abs_tol = to_double(key, v);
  } else if (key == "newton.rel_tol") {
    cfg.newton.rel_tol = to_double(key, v);
  } else if (key == "newton.max_iter") {
    cfg.newton.max_iter = to_int(key, v);
  } else if (key == "newton.line_search") {
    if (v == "none") {
      cfg.newton.line_search = solver::LineSearch::None;
    } else if (v == "backtracking") {
      cfg.newton.line_search = solver::LineSearch::Backtracking;
    } else {
      throw ConfigError(key + ": expected none or backtracking, got '" + v + "'");
    }
  } else if (key == "newton.full_jacobian") {
    cfg.full_jacobian = to_bool(key, v);
  } else if (key == "continuation.max_bisections") {
    cfg.max_bisections = to_int(key, v);
  } else if (key == "output.dir") {
    cfg.out_dir = v;
  } else if (key == "output.vtk") {
    cfg.write_vtk = to_bool(key, v);
  } else if (key == "wake.points_per_edge") {
    cfg.wake_points_per_edge = to_int(key, v);
  } else if (key == "wake.centerline_samples") {
    cfg.wake_centerline_samples = to_int(key, v);
  } else {
    throw ConfigError("unknown key '" + key + "'");
  }
}

void apply_override(BenchConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("expected key = value, got '" + assignment + "'");
  set_config_value(cfg, trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

BenchConfig load_config(const std::filesystem::path& path, BenchConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    try {
      apply_override(base, line);
    } catch (const ConfigError& e) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return base;
}

std::string dump_config(const BenchConfig& cfg) {
  std::ostringstream o;
  o.precision(12);
  o << "fluid.R = " << cfg.R << "\nfluid.ubar = " << cfg.ubar << "\nfluid.mu = " << cfg.mu << "\nfluid.beta = " << cfg.beta
    << "\nfluid.rho = " << cfg.rho << "\nbench.creeping = " << (cfg.creeping ? "true" : "false")
    << "\nbench.outflow = " << (cfg.outflow == Outflow::Natural ? "natural" : "developed") << "\nbench.wi = ";
  const auto s = cfg.schedule();
  for (std::size_t i = 0; i < s.size(); ++i) o << (i ? "," : "") << s[i];
  o << "\nmesh.class = " << cfg.mesh
    << "\nsolver.backend = " << (cfg.linear.backend == solver::Backend::Gmres ? "gmres" : "direct")
    << "\nsolver.restart = " << cfg.linear.restart << "\nsolver.ilut_fill = " << cfg.linear.ilut_fill
    << "\nsolver.ilut_threshold = " << cfg.linear.ilut_threshold
    << "\nsolver.precondition = " << (cfg.linear.precondition ? "true" : "false")
    << "\nsolver.max_iterations = " << cfg.linear.max_iterations << "\nsolver.tol = " << cfg.linear.tol
    << "\nnewton.abs_tol = " << cfg.newton.abs_tol << "\nnewton.rel_tol = " << cfg.newton.rel_tol
    << "\nnewton.max_iter = " << cfg.newton.max_iter << "\nnewton.line_search = "
    << (cfg.newton.line_search == solver::LineSearch::Backtracking ? "backtracking" : "none")
    << "\nnewton.full_jacobian = " << (cfg.full_jacobian ? "true" : "false")
    << "\ncontinuation.max_bisections = " << cfg.max_bisections << "\noutput.dir = " << cfg.out_dir.string()
    << "\noutput.vtk = " << (cfg.write_vtk ? "true" : "false") << "\nwake.points_per_edge = " << cfg.wake_points_per_edge
    << "\nwake.centerline_samples = " << cfg.wake_centerline_samples << '\n';
  return o.str();
}

}  // namespace logconf::bench
