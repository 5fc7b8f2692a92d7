// logconf: confined-cylinder benchmark, channel verification and kernel self-tests.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "logconf/bench/channel.hpp"
#include "logconf/bench/config.hpp"
#include "logconf/bench/cylinder.hpp"
#include "logconf/bench/selftest.hpp"

using namespace logconf;
using namespace logconf::bench;

namespace {

constexpr int kFailure = 1;
constexpr int kUsage = 2;

int fail(int code, const std::string& kind, const std::string& what) {
  std::cerr << "error: " << kind << ": " << what << '\n';
  return code;
}

int cmd_selftest(std::uint64_t seed) {
  const auto checks = run_selftests(seed);
  bool ok = true;
  std::printf("%-62s %7s %11s %11s %9s  %s\n", "check", "samples", "max error", "tolerance", "seconds", "result");
  for (const auto& g : selftest_groups()) {
    std::printf("-- %s (limit %.0f s)\n", g.title.c_str(), g.time_limit);
    for (const auto& c : checks) {
      if (c.group != g.id) continue;
      std::printf("%-62s %7d %11.3e %11.1e %9.4f  %s\n", c.name.c_str(), c.samples, c.max_error, c.tolerance,
                  c.seconds, c.passed() ? "pass" : "FAIL");
      ok = ok && c.passed();
    }
    const double t = group_seconds(checks, g.id);
    if (t >= g.time_limit) {
      std::printf("   group runtime %.2f s exceeds the limit\n", t);
      ok = false;
    }
  }
  std::printf("%s\n", ok ? "all suites pass" : "some suites FAILED");
  return ok ? 0 : kFailure;
}

int cmd_channel(ChannelConfig cc) {
  const ChannelReport rep = run_channel_verification(cc);
  bool converged = true;
  std::printf("%5s %9s %6s %5s %13s %13s %4s\n", "Wi", "mesh", "newton", "conv", "vel max err", "Psi L2 err", "spd");
  for (const auto* cases : {&rep.coarse, &rep.fine}) {
    for (const auto& c : *cases) {
      std::printf("%5.2f %4dx%-4d %6d %5s %13.3e %13.3e %4d\n", c.wi, c.nx, c.ny, c.newton_iters,
                  c.converged ? "yes" : "no", c.velocity_max_error, c.psi_l2_error, c.spd_violations);
      converged = converged && c.converged;
    }
  }
  for (std::size_t i = 0; i < rep.psi_order.size(); ++i) {
    std::printf("Wi %.2f: Psi L2 order %.3f\n", rep.coarse[i].wi, rep.psi_order[i]);
  }
  if (!converged) return fail(kFailure, "solver", "Newton did not converge for every channel case");
  return 0;
}

std::map<double, double> read_drag_csv(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  std::map<double, double> k;
  std::string line;
  std::getline(f, line);  // header
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string wi;
    std::string val;
    std::getline(ss, wi, ',');
    std::getline(ss, val, ',');
    k[std::round(std::stod(wi) * 100.0) / 100.0] = std::stod(val);
  }
  return k;
}

void print_table3(const std::map<double, double>& computed, const std::string& mesh_id) {
  std::printf("%6s %12s %12s %12s %12s %10s\n", "Wi", ("K " + mesh_id).c_str(), "ref M1", "ref M2", "ref M3",
              "diff M1");
  for (const auto& row : table3()) {
    const auto it = computed.find(std::round(row.wi * 100.0) / 100.0);
    if (it == computed.end()) {
      std::printf("%6.2f %12s %12.4f %12.4f %12.4f %10s\n", row.wi, "-", row.m1, row.m2, row.m3, "-");
    } else {
      std::printf("%6.2f %12.4f %12.4f %12.4f %12.4f %+10.4f\n", row.wi, it->second, row.m1, row.m2, row.m3,
                  it->second - row.m1);
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Log-conformation FEM solver: confined-cylinder benchmark and verification"};
  app.require_subcommand(1);

  std::uint64_t seed = 20240611;
  auto* selftest = app.add_subcommand("selftest", "run the kernel oracle suites");
  selftest->add_option("--seed", seed, "random seed");

  ChannelConfig cc;
  auto* channel = app.add_subcommand("channel", "channel flow verification against the exact Poiseuille solution");
  channel->add_option("--nx", cc.nx, "elements along the channel")->check(CLI::PositiveNumber);
  channel->add_option("--ny", cc.ny, "elements across the channel")->check(CLI::PositiveNumber);
  channel->add_option("--wi", cc.wis, "Weissenberg numbers");
  bool no_refine = false;
  channel->add_flag("--no-refine", no_refine, "skip the refined mesh");

  std::string mesh = "M1";
  double wi_max = 0.9;
  std::string out_dir = "out";
  std::string config_file;
  std::vector<std::string> overrides;
  bool no_vtk = false;
  auto* cylinder = app.add_subcommand("cylinder", "continuation sweep for the confined cylinder");
  cylinder->add_option("--wi-max", wi_max, "largest Weissenberg number of the default schedule")
      ->check(CLI::PositiveNumber);
  auto* mesh_opt = cylinder->add_option("--mesh", mesh, "M1, M2, M3 or a gmsh file");
  auto* out_opt = cylinder->add_option("--out", out_dir, "output directory");
  cylinder->add_option("--config", config_file, "key = value configuration file");
  cylinder->add_option("--set", overrides, "key=value override, applied after --config");
  cylinder->add_flag("--no-vtk", no_vtk, "skip VTK snapshots");

  bool compare = false;
  std::string drag_csv;
  std::string tables_mesh = "M1";
  auto* tables = app.add_subcommand("tables", "drag coefficients next to the published values");
  tables->add_flag("--compare", compare, "compare against the published M1 to M3 columns")->required();
  tables->add_option("--drag", drag_csv, "existing drag.csv instead of a fresh sweep");
  tables->add_option("--mesh", tables_mesh, "mesh for a fresh sweep");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsage;
  }

  try {
    if (*selftest) return cmd_selftest(seed);
    if (*channel) {
      cc.refine = !no_refine;
      return cmd_channel(cc);
    }
    if (*cylinder) {
      BenchConfig cfg;
      try {
        if (!config_file.empty()) cfg = load_config(config_file, cfg);
        if (cylinder->count("--wi-max") || cfg.wi_schedule.empty()) cfg.wi_schedule = default_schedule(wi_max);
        if (*mesh_opt) cfg.mesh = mesh;
        if (*out_opt || config_file.empty()) cfg.out_dir = out_dir;
        if (no_vtk) cfg.write_vtk = false;
        for (const auto& o : overrides) apply_override(cfg, o);
        cfg.validate();
      } catch (const ConfigError& e) {
        return fail(kUsage, "config", e.what());
      } catch (const std::invalid_argument& e) {
        return fail(kUsage, "config", e.what());
      }
      if (mesh_class_segments(cfg.mesh) == 0 && !std::filesystem::is_regular_file(cfg.mesh)) {
        return fail(kUsage, "mesh", "no such mesh file: " + cfg.mesh);
      }
      if (cfg.wi_schedule.empty()) return fail(kUsage, "config", "empty Weissenberg schedule");
      SweepResult sweep;
      try {
        sweep = run_cylinder_sweep(cfg, true, &std::cout);
      } catch (const MeshError& e) {
        return fail(kUsage, "mesh", e.what());
      }
      std::cout << "wrote " << (cfg.out_dir / "drag.csv").string() << '\n';
      if (sweep.error) return fail(kFailure, "continuation", *sweep.error);
      return 0;
    }
    if (*tables) {
      std::map<double, double> k;
      std::string id = tables_mesh;
      if (!drag_csv.empty()) {
        if (!std::filesystem::is_regular_file(drag_csv)) return fail(kUsage, "io", "no such file: " + drag_csv);
        k = read_drag_csv(drag_csv);
        id = "csv";
      } else {
        BenchConfig cfg;
        cfg.mesh = tables_mesh;
        if (mesh_class_segments(cfg.mesh) == 0 && !std::filesystem::is_regular_file(cfg.mesh)) {
          return fail(kUsage, "mesh", "no such mesh file: " + cfg.mesh);
        }
        const SweepResult sweep = run_cylinder_sweep(cfg, false, &std::cerr);
        for (const auto& d : sweep.drag) k[std::round(d.wi * 100.0) / 100.0] = d.K;
        if (sweep.error) {
          print_table3(k, id);
          return fail(kFailure, "continuation", *sweep.error);
        }
      }
      print_table3(k, id);
      return 0;
    }
  } catch (const std::exception& e) {
    return fail(kFailure, "runtime", e.what());
  }
  return kUsage;
}
