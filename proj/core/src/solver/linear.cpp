#include "logconf/solver/linear.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

namespace logconf::solver {

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

void LinearConfig::validate() const {
  if (restart < 1) throw std::invalid_argument("LinearConfig: restart must be >= 1");
  if (ilut_fill < 0) throw std::invalid_argument("LinearConfig: ilut_fill must be >= 0");
  if (!(ilut_threshold >= 0.0)) throw std::invalid_argument("LinearConfig: ilut_threshold must be >= 0");
  if (max_iterations < 1) throw std::invalid_argument("LinearConfig: max_iterations must be >= 1");
  if (!(tol > 0.0)) throw std::invalid_argument("LinearConfig: tol must be > 0");
}

void IdentityPreconditioner::apply(std::span<const double> in, std::span<double> out) const {
  std::copy(in.begin(), in.end(), out.begin());
}

JacobiPreconditioner::JacobiPreconditioner(const CsrMatrix& a) : inv_diag_(a.n, 1.0) {
  for (int i = 0; i < a.n; ++i) {
    const double d = a.at(i, i);
    if (d != 0.0) inv_diag_[i] = 1.0 / d;
  }
}

void JacobiPreconditioner::apply(std::span<const double> in, std::span<double> out) const {
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = inv_diag_[i] * in[i];
}

Ilut::Ilut(const CsrMatrix& a, int fill, double threshold) : n_(a.n) {
  if (fill < 0 || !(threshold >= 0.0)) throw std::invalid_argument("Ilut: fill must be >= 0 and threshold >= 0");
  l_ptr_.assign(1, 0);
  u_ptr_.assign(1, 0);
  std::vector<double> w(n_, 0.0);
  std::vector<char> used(n_, 0);
  std::vector<int> nz;
  std::vector<int> u_diag_pos;  // position of the diagonal in u_val_ per row
  u_diag_pos.reserve(n_);

  for (int i = 0; i < n_; ++i) {
    double row_norm = 0.0;
    nz.clear();
    std::priority_queue<int, std::vector<int>, std::greater<>> lower;
    for (int k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
      const int j = a.col[k];
      w[j] = a.val[k];
      used[j] = 1;
      nz.push_back(j);
      if (j < i) lower.push(j);
      row_norm += a.val[k] * a.val[k];
    }
    if (!used[i]) {
      used[i] = 1;
      w[i] = 0.0;
      nz.push_back(i);
    }
    row_norm = std::sqrt(row_norm);
    if (row_norm == 0.0) throw LinearSolverError("ilut: structurally zero row " + std::to_string(i));
    const double drop = threshold * row_norm;

    while (!lower.empty()) {
      const int k = lower.top();
      lower.pop();
      if (w[k] == 0.0) continue;
      w[k] /= u_val_[u_diag_pos[k]];
      if (std::abs(w[k]) < drop) {
        w[k] = 0.0;
        continue;
      }
      const double factor = w[k];
      for (int q = u_ptr_[k] + 1; q < u_ptr_[k + 1]; ++q) {
        const int j = u_col_[q];
        if (!used[j]) {
          used[j] = 1;
          w[j] = 0.0;
          nz.push_back(j);
          if (j < i) lower.push(j);
        }
        w[j] -= factor * u_val_[q];
      }
    }

    // split, drop and keep the largest `fill` entries of each part
    std::vector<std::pair<double, int>> lpart;
    std::vector<std::pair<double, int>> upart;
    double diag = 0.0;
    for (int j : nz) {
      const double v = w[j];
      if (j == i) {
        diag = v;
      } else if (v != 0.0 && std::abs(v) >= drop) {
        (j < i ? lpart : upart).emplace_back(v, j);
      }
      w[j] = 0.0;
      used[j] = 0;
    }
    const auto keep_largest = [fill](std::vector<std::pair<double, int>>& part) {
      if (static_cast<int>(part.size()) > fill) {
        std::nth_element(part.begin(), part.begin() + fill, part.end(),
                         [](const auto& x, const auto& y) { return std::abs(x.first) > std::abs(y.first); });
        part.resize(fill);
      }
      std::sort(part.begin(), part.end(), [](const auto& x, const auto& y) { return x.second < y.second; });
    };
    keep_largest(lpart);
    keep_largest(upart);

    if (diag == 0.0) {
      // zero pivot after dropping: shift
      diag = (threshold > 0.0 ? threshold : 1e-4) * row_norm;
      ++shifted_pivots_;
    }
    for (const auto& [v, j] : lpart) {
      l_col_.push_back(j);
      l_val_.push_back(v);
    }
    l_ptr_.push_back(static_cast<int>(l_col_.size()));
    u_diag_pos.push_back(static_cast<int>(u_col_.size()));
    u_col_.push_back(i);
    u_val_.push_back(diag);
    for (const auto& [v, j] : upart) {
      u_col_.push_back(j);
      u_val_.push_back(v);
    }
    u_ptr_.push_back(static_cast<int>(u_col_.size()));
  }
}

void Ilut::apply(std::span<const double> in, std::span<double> out) const {
  // L y = in (unit lower), then U out = y
  for (int i = 0; i < n_; ++i) {
    double s = in[i];
    for (int k = l_ptr_[i]; k < l_ptr_[i + 1]; ++k) s -= l_val_[k] * out[l_col_[k]];
    out[i] = s;
  }
  for (int i = n_ - 1; i >= 0; --i) {
    double s = out[i];
    for (int k = u_ptr_[i] + 1; k < u_ptr_[i + 1]; ++k) s -= u_val_[k] * out[u_col_[k]];
    out[i] = s / u_val_[u_ptr_[i]];
  }
}

int Ilut::nnz() const { return static_cast<int>(l_col_.size() + u_col_.size()); }

std::unique_ptr<Preconditioner> ilut_factor(const CsrMatrix& a, int fill, double threshold) {
  return std::make_unique<Ilut>(a, fill, threshold);
}

GmresResult gmres_solve(const CsrMatrix& a, std::span<const double> b, const Preconditioner& precond,
                        const LinearConfig& cfg, std::span<const double> x0) {
  cfg.validate();
  const int n = a.n;
  if (static_cast<int>(b.size()) != n || (!x0.empty() && static_cast<int>(x0.size()) != n)) {
    throw std::invalid_argument("gmres_solve: dimension mismatch");
  }
  GmresResult res;
  res.x.assign(n, 0.0);
  if (!x0.empty()) std::copy(x0.begin(), x0.end(), res.x.begin());
  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    std::fill(res.x.begin(), res.x.end(), 0.0);
    res.converged = true;
    return res;
  }
  const int m = std::min(cfg.restart, n);
  std::vector<std::vector<double>> V(m + 1, std::vector<double>(n));
  std::vector<std::vector<double>> H(m + 1, std::vector<double>(m, 0.0));
  std::vector<double> cs(m), sn(m), g(m + 1), z(n), w(n), r(n);

  const auto residual = [&](std::vector<double>& out) {
    a.multiply(res.x, out);
    for (int i = 0; i < n; ++i) out[i] = b[i] - out[i];
  };

  int total = 0;
  residual(r);
  double beta = norm2(r);
  while (total < cfg.max_iterations) {
    if (beta / bnorm <= cfg.tol) break;
    for (int i = 0; i < n; ++i) V[0][i] = r[i] / beta;
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = beta;
    int k = 0;
    for (; k < m && total < cfg.max_iterations; ++k) {
      ++total;
      precond.apply(V[k], z);
      a.multiply(z, w);
      // modified Gram-Schmidt
      for (int j = 0; j <= k; ++j) {
        double h = 0.0;
        for (int i = 0; i < n; ++i) h += w[i] * V[j][i];
        H[j][k] = h;
        for (int i = 0; i < n; ++i) w[i] -= h * V[j][i];
      }
      const double hn = norm2(w);
      H[k + 1][k] = hn;
      for (int j = 0; j < k; ++j) {
        const double t = cs[j] * H[j][k] + sn[j] * H[j + 1][k];
        H[j + 1][k] = -sn[j] * H[j][k] + cs[j] * H[j + 1][k];
        H[j][k] = t;
      }
      const double denom = std::hypot(H[k][k], H[k + 1][k]);
      if (denom == 0.0) throw LinearSolverError("gmres: breakdown (zero Hessenberg column)");
      cs[k] = H[k][k] / denom;
      sn[k] = H[k + 1][k] / denom;
      H[k][k] = denom;
      H[k + 1][k] = 0.0;
      g[k + 1] = -sn[k] * g[k];
      g[k] = cs[k] * g[k];
      if (hn > 0.0) {
        for (int i = 0; i < n; ++i) V[k + 1][i] = w[i] / hn;
      }
      if (std::abs(g[k + 1]) / bnorm <= cfg.tol || hn == 0.0) {
        ++k;
        break;
      }
    }
    // back substitution and update x += M^{-1} V y
    std::vector<double> y(k);
    for (int j = k - 1; j >= 0; --j) {
      double s = g[j];
      for (int l = j + 1; l < k; ++l) s -= H[j][l] * y[l];
      y[j] = s / H[j][j];
    }
    std::fill(w.begin(), w.end(), 0.0);
    for (int j = 0; j < k; ++j) {
      for (int i = 0; i < n; ++i) w[i] += y[j] * V[j][i];
    }
    precond.apply(w, z);
    for (int i = 0; i < n; ++i) res.x[i] += z[i];
    residual(r);
    beta = norm2(r);
  }
  res.iterations = total;
  res.relative_residual = beta / bnorm;
  // allow for the gap between the recurrence and the recomputed residual
  res.converged = res.relative_residual <= 10.0 * cfg.tol;
  return res;
}

struct DirectLu::Impl {
  using Matrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
  Eigen::SparseLU<Matrix, Eigen::COLAMDOrdering<int>> lu;
  Matrix matrix;
  std::vector<int> pattern_ptr;
  std::vector<int> pattern_col;
  bool analyzed{false};
  bool factored{false};
};

DirectLu::DirectLu() : impl_(std::make_unique<Impl>()) {}
DirectLu::~DirectLu() = default;
DirectLu::DirectLu(DirectLu&&) noexcept = default;
DirectLu& DirectLu::operator=(DirectLu&&) noexcept = default;

const char* DirectLu::backend_name() { return "eigen-sparselu"; }

void DirectLu::factorize(const CsrMatrix& a) {
  Impl& d = *impl_;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(a.nnz());
  for (int i = 0; i < a.n; ++i) {
    for (int k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) trip.emplace_back(i, a.col[k], a.val[k]);
  }
  d.matrix.resize(a.n, a.n);
  d.matrix.setFromTriplets(trip.begin(), trip.end());
  d.matrix.makeCompressed();
  const bool same_pattern = d.analyzed && d.pattern_ptr == a.row_ptr && d.pattern_col == a.col;
  if (!same_pattern) {
    d.lu.analyzePattern(d.matrix);
    d.pattern_ptr = a.row_ptr;
    d.pattern_col = a.col;
    d.analyzed = true;
  }
  d.lu.factorize(d.matrix);
  d.factored = d.lu.info() == Eigen::Success;
  if (!d.factored) throw LinearSolverError("direct_lu: factorization failed (singular matrix)");
}

std::vector<double> DirectLu::solve(std::span<const double> b) const {
  if (!impl_->factored) throw LinearSolverError("direct_lu: solve before a successful factorization");
  const Eigen::Map<const Eigen::VectorXd> rhs(b.data(), static_cast<Eigen::Index>(b.size()));
  const Eigen::VectorXd x = impl_->lu.solve(rhs);
  if (impl_->lu.info() != Eigen::Success || !x.allFinite()) throw LinearSolverError("direct_lu: solve failed (singular matrix)");
  return {x.data(), x.data() + x.size()};
}

std::vector<double> direct_lu(const CsrMatrix& a, std::span<const double> b) {
  DirectLu lu;
  lu.factorize(a);
  std::vector<double> x = lu.solve(b);
  // a singular matrix can slip through with a tiny pivot; check the residual
  std::vector<double> r = a.multiply(x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
  const double bn = norm2(b);
  if (norm2(r) > 1e-8 * std::max(bn, 1e-300)) throw LinearSolverError("direct_lu: inaccurate solve, matrix is (nearly) singular");
  return x;
}

LinearSolveResult LinearSolver::solve(const CsrMatrix& a, std::span<const double> b) {
  LinearSolveResult out;
  if (cfg_.backend == Backend::DirectLU) {
    lu_.factorize(a);
    out.x = lu_.solve(b);
  } else {
    std::unique_ptr<Preconditioner> pc;
    if (cfg_.precondition) {
      pc = ilut_factor(a, cfg_.ilut_fill, cfg_.ilut_threshold);
    } else {
      pc = std::make_unique<IdentityPreconditioner>();
    }
    GmresResult g = gmres_solve(a, b, *pc, cfg_);
    if (!g.converged) {
      throw LinearSolverError("gmres: no convergence after " + std::to_string(g.iterations) +
                              " iterations (relative residual " + std::to_string(g.relative_residual) + ")");
    }
    out.x = std::move(g.x);
    out.iterations = g.iterations;
  }
  std::vector<double> r = a.multiply(out.x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
  const double bn = norm2(b);
  out.relative_residual = bn > 0.0 ? norm2(r) / bn : 0.0;
  return out;
}

}  // namespace logconf::solver
