#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "logconf/fem/assembly.hpp"
#include "logconf/solver/linear.hpp"

namespace logconf::solver {

enum class LineSearch { None, Backtracking };

struct NewtonConfig {
  double abs_tol{1e-8};   ///< on the 2-norm of the free residual
  double rel_tol{1e-10};  ///< relative to the initial residual
  int max_iter{30};
  LineSearch line_search{LineSearch::None};

  void validate() const;
};

struct NewtonIterate {
  int iter{0};
  double residual{0.0};
  int gmres_iters{0};  ///< of the step that produced this iterate
  double step_norm{0.0};
  double damping{1.0};
};

enum class NewtonStatus { Converged, MaxIterations, LinearFailure, NonFinite };
const char* to_string(NewtonStatus s);

struct NewtonResult {
  fem::FieldState state;  ///< converged state, or the last finite iterate on failure
  std::vector<NewtonIterate> history;
  NewtonStatus status{NewtonStatus::MaxIterations};
  std::string message;

  [[nodiscard]] bool converged() const { return status == NewtonStatus::Converged; }
  [[nodiscard]] int iterations() const { return history.empty() ? 0 : history.back().iter; }
};

/// Solves R(z) = 0 over the free dofs; state0 must already carry the Dirichlet data.
NewtonResult newton_solve(const fem::Assembler& assembler, fem::FieldState state0, const NewtonConfig& newton_cfg,
                          const LinearConfig& linear_cfg);

/// One Newton correction J dz = -R over the free dofs.
LinearSolveResult newton_step(const fem::Assembler& assembler, const fem::FieldState& state, LinearSolver& linear);

void write_history_csv(const std::vector<NewtonIterate>& history, const std::filesystem::path& path);

class ContinuationStall : public std::runtime_error {
 public:
  ContinuationStall(const std::string& what, double wi_reached, fem::FieldState last)
      : std::runtime_error(what), wi_reached_(wi_reached), last_(std::move(last)) {}
  [[nodiscard]] double wi_reached() const { return wi_reached_; }
  [[nodiscard]] const fem::FieldState& last_state() const { return last_; }

 private:
  double wi_reached_;
  fem::FieldState last_;
};

/// Solves the problem at one Weissenberg number starting from `start`. The
/// callee is responsible for updating parameters and Dirichlet data.
using SolveAtWi = std::function<NewtonResult(double wi, const fem::FieldState& start)>;

struct ContinuationConfig {
  int max_bisections{4};  ///< per schedule step
  std::function<void(double wi, const NewtonResult&, int depth)> on_solve;  ///< every attempt, also failed ones
};

struct ContinuationResult {
  std::map<double, NewtonResult> solutions;  ///< schedule points only
  int attempts{0};
};

/// Warm-started sweep over a strictly increasing schedule, starting from `start`
/// at wi_start. A failed step is halved until it succeeds or the depth limit is hit.
ContinuationResult wi_continuation(const SolveAtWi& solve, double wi_start, const fem::FieldState& start,
                                   const std::vector<double>& schedule, const ContinuationConfig& cfg = {});

}  // namespace logconf::solver
