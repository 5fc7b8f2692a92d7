#include "logconf/solver/newton.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace logconf::solver {

void NewtonConfig::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) throw std::invalid_argument("NewtonConfig: tolerances must be > 0");
  if (max_iter < 1) throw std::invalid_argument("NewtonConfig: max_iter must be >= 1");
}

const char* to_string(NewtonStatus s) {
  switch (s) {
    case NewtonStatus::Converged: return "converged";
    case NewtonStatus::MaxIterations: return "max_iter exceeded";
    case NewtonStatus::LinearFailure: return "linear solver failure";
    case NewtonStatus::NonFinite: return "non-finite residual";
  }
  return "?";
}

namespace {

bool finite(const std::vector<double>& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

// Free residual norm, NaN when assembly fails.
double free_residual(const fem::Assembler& a, const fem::FieldState& s, std::vector<double>& out) {
  try {
    out = a.free_part(a.residual(s));
  } catch (const fem::AssemblyError&) {
    return std::nan("");
  }
  return finite(out) ? norm2(out) : std::nan("");
}

}  // namespace

LinearSolveResult newton_step(const fem::Assembler& assembler, const fem::FieldState& state, LinearSolver& linear) {
  std::vector<double> r = assembler.free_part(assembler.residual(state));
  for (double& x : r) x = -x;
  return linear.solve(assembler.jacobian(state), r);
}

NewtonResult newton_solve(const fem::Assembler& assembler, fem::FieldState state0, const NewtonConfig& newton_cfg,
                          const LinearConfig& linear_cfg) {
  newton_cfg.validate();
  LinearSolver linear(linear_cfg);
  const auto& free = assembler.dofs().free_dofs();
  NewtonResult out;
  out.state = std::move(state0);

  std::vector<double> r;
  double res = free_residual(assembler, out.state, r);
  if (!std::isfinite(res)) {
    out.status = NewtonStatus::NonFinite;
    out.message = "non-finite residual at the initial state";
    return out;
  }
  const double res0 = res;
  out.history.push_back({0, res, 0, 0.0, 1.0});
  const auto done = [&](double value) { return value <= newton_cfg.abs_tol || value <= newton_cfg.rel_tol * res0; };
  if (done(res)) {
    out.status = NewtonStatus::Converged;
    return out;
  }

  for (int it = 1; it <= newton_cfg.max_iter; ++it) {
    for (double& x : r) x = -x;
    LinearSolveResult step;
    try {
      step = linear.solve(assembler.jacobian(out.state), r);
    } catch (const LinearSolverError& e) {
      out.status = NewtonStatus::LinearFailure;
      out.message = e.what();
      return out;
    } catch (const fem::AssemblyError& e) {
      out.status = NewtonStatus::NonFinite;
      out.message = e.what();
      return out;
    }
    if (!finite(step.x)) {
      out.status = NewtonStatus::LinearFailure;
      out.message = "non-finite Newton correction";
      return out;
    }

    double alpha = 1.0;
    fem::FieldState trial = out.state;
    std::vector<double> r_trial;
    double res_trial = 0.0;
    const int tries = newton_cfg.line_search == LineSearch::Backtracking ? 12 : 1;
    for (int k = 0; k < tries; ++k) {
      for (std::size_t i = 0; i < free.size(); ++i) trial.values[free[i]] = out.state.values[free[i]] + alpha * step.x[i];
      res_trial = free_residual(assembler, trial, r_trial);
      if (std::isfinite(res_trial) && res_trial <= (1.0 - 1e-4 * alpha) * res) break;
      if (k + 1 < tries) alpha *= 0.5;
    }
    if (!std::isfinite(res_trial)) {
      out.status = NewtonStatus::NonFinite;
      std::ostringstream msg;
      msg << "non-finite residual after Newton iteration " << it;
      out.message = msg.str();
      return out;
    }
    out.state = std::move(trial);
    r = std::move(r_trial);
    res = res_trial;
    out.history.push_back({it, res, step.iterations, norm2(step.x), alpha});
    if (done(res)) {
      out.status = NewtonStatus::Converged;
      return out;
    }
  }
  out.status = NewtonStatus::MaxIterations;
  std::ostringstream msg;
  msg << "no convergence in " << newton_cfg.max_iter << " iterations, residual " << res;
  out.message = msg.str();
  return out;
}

void write_history_csv(const std::vector<NewtonIterate>& history, const std::filesystem::path& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_history_csv: cannot open " + path.string());
  f << "iter,residual,gmres_iters\n" << std::setprecision(12);
  for (const auto& h : history) f << h.iter << ',' << h.residual << ',' << h.gmres_iters << '\n';
}

ContinuationResult wi_continuation(const SolveAtWi& solve, double wi_start, const fem::FieldState& start,
                                   const std::vector<double>& schedule, const ContinuationConfig& cfg) {
  if (cfg.max_bisections < 0) throw std::invalid_argument("wi_continuation: max_bisections must be >= 0");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const double prev = i == 0 ? wi_start : schedule[i - 1];
    if (!(schedule[i] > prev)) throw std::invalid_argument("wi_continuation: schedule must be strictly increasing");
  }
  ContinuationResult out;
  double wi = wi_start;
  fem::FieldState state = start;
  for (const double target : schedule) {
    // halve the step on failure and keep the smaller step up to the target
    double step = target - wi;
    int depth = 0;
    while (wi < target) {
      double next = wi + step;
      if (next > target - 1e-12 * std::abs(target)) next = target;
      NewtonResult r = solve(next, state);
      ++out.attempts;
      if (cfg.on_solve) cfg.on_solve(next, r, depth);
      if (r.converged()) {
        wi = next;
        state = r.state;
        if (next == target) out.solutions.emplace(target, std::move(r));
        continue;
      }
      if (depth == cfg.max_bisections) {
        std::ostringstream msg;
        msg << "continuation stalled between Wi = " << wi << " and Wi = " << next << " after " << depth
            << " bisections (" << r.message << ")";
        throw ContinuationStall(msg.str(), wi, state);
      }
      ++depth;
      step *= 0.5;
    }
  }
  return out;
}

}  // namespace logconf::solver
