#pragma once

#include <cmath>
#include <algorithm>
#include <random>

#include "logconf/tensor2.hpp"

namespace logconf::testing {

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }

  SymTensor2 sym(double lo, double hi) { return {uniform(lo, hi), uniform(lo, hi), uniform(lo, hi)}; }
  Tensor2 full(double lo, double hi) { return {uniform(lo, hi), uniform(lo, hi), uniform(lo, hi), uniform(lo, hi)}; }
  Vec2 vec(double lo, double hi) { return {uniform(lo, hi), uniform(lo, hi)}; }

  /// Random symmetric tensor with Frobenius norm drawn uniformly from (lo, hi].
  SymTensor2 sym_with_norm(double lo, double hi) {
    SymTensor2 s = sym(-1.0, 1.0);
    while (frobenius(s) < 1e-3) s = sym(-1.0, 1.0);
    return (uniform(lo, hi) / frobenius(s)) * s;
  }

  Tensor2 full_with_norm(double lo, double hi) {
    Tensor2 t = full(-1.0, 1.0);
    while (frobenius(t) < 1e-3) t = full(-1.0, 1.0);
    return (uniform(lo, hi) / frobenius(t)) * t;
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

inline double rel_diff(const Tensor2& a, const Tensor2& b) {
  const double scale = std::max(frobenius(a), frobenius(b));
  return scale == 0.0 ? 0.0 : frobenius(a - b) / scale;
}
inline double rel_diff(const SymTensor2& a, const SymTensor2& b) { return rel_diff(a.full(), b.full()); }
inline double abs_diff(const Tensor2& a, const Tensor2& b) { return frobenius(a - b); }
inline double abs_diff(const SymTensor2& a, const SymTensor2& b) { return frobenius(a - b); }

}  // namespace logconf::testing
