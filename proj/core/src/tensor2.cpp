#include "logconf/tensor2.hpp"

#include <stdexcept>
#include <string>

namespace logconf {

SymTensor2 iterated_commutator_closed(const SymTensor2& a, const SymTensor2& b, int n) {
  if (n < 2 || n % 2 != 0) {
    throw std::invalid_argument("iterated_commutator_closed: n must be even and >= 2, got " +
                                std::to_string(n));
  }
  const int pairs = n / 2;
  const double r2 = gamma(a) * gamma(a) + a.xy * a.xy;
  const double scale = std::ldexp(1.0, 2 * pairs) * coupling_scalar(a, b) * std::pow(r2, pairs - 1);
  return scale * coupling_matrix(a);
}

Tensor2 iterated_commutator_bruteforce(const Tensor2& x, const Tensor2& y, int n) {
  if (n < 0) throw std::invalid_argument("iterated_commutator_bruteforce: n must be >= 0");
  Tensor2 acc = y;
  for (int i = 0; i < n; ++i) acc = commutator(x, acc);
  return acc;
}

}  // namespace logconf
