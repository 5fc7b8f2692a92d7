#pragma once

#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "logconf/sparse.hpp"

namespace logconf::solver {

class LinearSolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Backend { Gmres, DirectLU };

struct LinearConfig {
  Backend backend{Backend::DirectLU};
  int restart{200};
  int ilut_fill{200};
  double ilut_threshold{1e-4};
  bool precondition{true};
  int max_iterations{2000};
  double tol{1e-9};  ///< relative residual

  void validate() const;
};

class Preconditioner {
 public:
  virtual ~Preconditioner() = default;
  /// out = M^{-1} in
  virtual void apply(std::span<const double> in, std::span<double> out) const = 0;
};

class IdentityPreconditioner final : public Preconditioner {
 public:
  void apply(std::span<const double> in, std::span<double> out) const override;
};

class JacobiPreconditioner final : public Preconditioner {
 public:
  explicit JacobiPreconditioner(const CsrMatrix& a);
  void apply(std::span<const double> in, std::span<double> out) const override;

 private:
  std::vector<double> inv_diag_;
};

/// Dual-threshold incomplete LU: entries below threshold * ||row|| are dropped and
/// at most `fill` entries are kept in each of the L and U parts of a row.
class Ilut final : public Preconditioner {
 public:
  Ilut(const CsrMatrix& a, int fill, double threshold);
  void apply(std::span<const double> in, std::span<double> out) const override;

  [[nodiscard]] int nnz() const;
  [[nodiscard]] int shifted_pivots() const { return shifted_pivots_; }

 private:
  int n_{0};
  std::vector<int> l_ptr_, l_col_;  // strictly lower, unit diagonal implied
  std::vector<double> l_val_;
  std::vector<int> u_ptr_, u_col_;  // diagonal first in each row
  std::vector<double> u_val_;
  int shifted_pivots_{0};
};

std::unique_ptr<Preconditioner> ilut_factor(const CsrMatrix& a, int fill, double threshold);

struct GmresResult {
  std::vector<double> x;
  int iterations{0};
  double relative_residual{0.0};  ///< true residual ||b - A x|| / ||b||
  bool converged{false};
};

/// Restarted GMRES with right preconditioning; x0 may be empty (zero start).
GmresResult gmres_solve(const CsrMatrix& a, std::span<const double> b, const Preconditioner& precond,
                        const LinearConfig& cfg, std::span<const double> x0 = {});

/// Sparse direct LU (Eigen SparseLU, COLAMD ordering). The symbolic analysis is reused
/// while the pattern stays the same.
class DirectLu {
 public:
  DirectLu();
  ~DirectLu();
  DirectLu(DirectLu&&) noexcept;
  DirectLu& operator=(DirectLu&&) noexcept;

  void factorize(const CsrMatrix& a);
  [[nodiscard]] std::vector<double> solve(std::span<const double> b) const;
  [[nodiscard]] static const char* backend_name();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

std::vector<double> direct_lu(const CsrMatrix& a, std::span<const double> b);

/// One linear solve according to cfg; returns the solution and the Krylov iteration count (0 for LU).
struct LinearSolveResult {
  std::vector<double> x;
  int iterations{0};
  double relative_residual{0.0};
};

class LinearSolver {
 public:
  explicit LinearSolver(LinearConfig cfg) : cfg_(cfg) { cfg_.validate(); }
  LinearSolveResult solve(const CsrMatrix& a, std::span<const double> b);
  [[nodiscard]] const LinearConfig& config() const { return cfg_; }

 private:
  LinearConfig cfg_;
  DirectLu lu_;
};

double norm2(std::span<const double> v);

}  // namespace logconf::solver
