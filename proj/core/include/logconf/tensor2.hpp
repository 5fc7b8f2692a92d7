#pragma once

// Small fixed-size tensor algebra in two space dimensions.
//
// Gradient convention used throughout the library: (grad u)_ij = d u_i / d x_j,
// so that (grad u) * sigma acts row-on-column as in the upper-convected
// derivative.

#include <cmath>

namespace logconf {

struct Vec2 {
  double x{0.0};
  double y{0.0};

  constexpr Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
  constexpr Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
  constexpr Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
};

constexpr Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
constexpr Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
constexpr Vec2 operator-(const Vec2& a) { return {-a.x, -a.y}; }
constexpr Vec2 operator*(double s, Vec2 a) { return a *= s; }
constexpr Vec2 operator*(Vec2 a, double s) { return a *= s; }
constexpr double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double norm(const Vec2& a) { return std::hypot(a.x, a.y); }

/// General 2x2 tensor, row-major naming: xy is row x, column y.
struct Tensor2 {
  double xx{0.0};
  double xy{0.0};
  double yx{0.0};
  double yy{0.0};

  static constexpr Tensor2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static constexpr Tensor2 zero() { return {}; }

  constexpr Tensor2& operator+=(const Tensor2& o) {
    xx += o.xx; xy += o.xy; yx += o.yx; yy += o.yy;
    return *this;
  }
  constexpr Tensor2& operator-=(const Tensor2& o) {
    xx -= o.xx; xy -= o.xy; yx -= o.yx; yy -= o.yy;
    return *this;
  }
  constexpr Tensor2& operator*=(double s) {
    xx *= s; xy *= s; yx *= s; yy *= s;
    return *this;
  }
};

/// Symmetric 2x2 tensor. Symmetry is structural: there is no yx entry.
struct SymTensor2 {
  double xx{0.0};
  double xy{0.0};
  double yy{0.0};

  static constexpr SymTensor2 identity() { return {1.0, 0.0, 1.0}; }
  static constexpr SymTensor2 zero() { return {}; }

  constexpr SymTensor2& operator+=(const SymTensor2& o) {
    xx += o.xx; xy += o.xy; yy += o.yy;
    return *this;
  }
  constexpr SymTensor2& operator-=(const SymTensor2& o) {
    xx -= o.xx; xy -= o.xy; yy -= o.yy;
    return *this;
  }
  constexpr SymTensor2& operator*=(double s) {
    xx *= s; xy *= s; yy *= s;
    return *this;
  }

  constexpr Tensor2 full() const { return {xx, xy, xy, yy}; }
};

constexpr Tensor2 operator+(Tensor2 a, const Tensor2& b) { return a += b; }
constexpr Tensor2 operator-(Tensor2 a, const Tensor2& b) { return a -= b; }
constexpr Tensor2 operator-(const Tensor2& a) { return {-a.xx, -a.xy, -a.yx, -a.yy}; }
constexpr Tensor2 operator*(double s, Tensor2 a) { return a *= s; }
constexpr Tensor2 operator*(Tensor2 a, double s) { return a *= s; }

constexpr SymTensor2 operator+(SymTensor2 a, const SymTensor2& b) { return a += b; }
constexpr SymTensor2 operator-(SymTensor2 a, const SymTensor2& b) { return a -= b; }
constexpr SymTensor2 operator-(const SymTensor2& a) { return {-a.xx, -a.xy, -a.yy}; }
constexpr SymTensor2 operator*(double s, SymTensor2 a) { return a *= s; }
constexpr SymTensor2 operator*(SymTensor2 a, double s) { return a *= s; }

constexpr Tensor2 operator*(const Tensor2& a, const Tensor2& b) {
  return {a.xx * b.xx + a.xy * b.yx, a.xx * b.xy + a.xy * b.yy,
          a.yx * b.xx + a.yy * b.yx, a.yx * b.xy + a.yy * b.yy};
}
constexpr Tensor2 operator*(const SymTensor2& a, const Tensor2& b) { return a.full() * b; }
constexpr Tensor2 operator*(const Tensor2& a, const SymTensor2& b) { return a * b.full(); }
constexpr Tensor2 operator*(const SymTensor2& a, const SymTensor2& b) { return a.full() * b.full(); }

constexpr Vec2 operator*(const Tensor2& a, const Vec2& v) {
  return {a.xx * v.x + a.xy * v.y, a.yx * v.x + a.yy * v.y};
}
constexpr Vec2 operator*(const SymTensor2& a, const Vec2& v) {
  return {a.xx * v.x + a.xy * v.y, a.xy * v.x + a.yy * v.y};
}

constexpr Tensor2 transpose(const Tensor2& a) { return {a.xx, a.yx, a.xy, a.yy}; }
constexpr double trace(const Tensor2& a) { return a.xx + a.yy; }
constexpr double trace(const SymTensor2& a) { return a.xx + a.yy; }
constexpr double det(const Tensor2& a) { return a.xx * a.yy - a.xy * a.yx; }
constexpr double det(const SymTensor2& a) { return a.xx * a.yy - a.xy * a.xy; }

/// Frobenius inner product A : B.
constexpr double ddot(const Tensor2& a, const Tensor2& b) {
  return a.xx * b.xx + a.xy * b.xy + a.yx * b.yx + a.yy * b.yy;
}
constexpr double ddot(const SymTensor2& a, const SymTensor2& b) {
  return a.xx * b.xx + 2.0 * a.xy * b.xy + a.yy * b.yy;
}

inline double frobenius(const Tensor2& a) { return std::sqrt(ddot(a, a)); }
inline double frobenius(const SymTensor2& a) { return std::sqrt(ddot(a, a)); }

/// Symmetric part of a general tensor.
constexpr SymTensor2 sym(const Tensor2& a) { return {a.xx, 0.5 * (a.xy + a.yx), a.yy}; }

/// gamma(C) = (C11 - C22) / 2, half the diagonal difference.
constexpr double gamma(const SymTensor2& c) { return 0.5 * (c.xx - c.yy); }
constexpr double gamma(const Tensor2& c) { return 0.5 * (c.xx - c.yy); }

/// Half the eigenvalue gap, sqrt(gamma^2 + C12^2).
inline double half_gap(const SymTensor2& c) { return std::hypot(gamma(c), c.xy); }

/// The matrix [[-A12, gamma(A)], [gamma(A), A12]] shared by all closed-form
/// commutator sums.
constexpr SymTensor2 coupling_matrix(const SymTensor2& a) { return {-a.xy, gamma(a), a.xy}; }

/// The scalar gamma(A) B12 - A12 gamma(B).
constexpr double coupling_scalar(const SymTensor2& a, const SymTensor2& b) {
  return gamma(a) * b.xy - a.xy * gamma(b);
}

struct StrainVorticity {
  SymTensor2 strain;
  Tensor2 vorticity;
};

/// Split grad u into its symmetric (strain) and antisymmetric (vorticity) parts.
constexpr StrainVorticity strain_and_vorticity(const Tensor2& gradu) {
  const double w = 0.5 * (gradu.xy - gradu.yx);
  return {sym(gradu), {0.0, w, -w, 0.0}};
}

constexpr Tensor2 commutator(const Tensor2& x, const Tensor2& y) { return x * y - y * x; }

/// [S, W] for symmetric S and antisymmetric W is symmetric.
constexpr SymTensor2 commutator_sym_antisym(const SymTensor2& s, const Tensor2& w) {
  return sym(s * w - w * s);
}

/// Closed form of the even iterated commutator {A, B}_n for symmetric A, B.
/// n counts single commutators and must be even and >= 2.
SymTensor2 iterated_commutator_closed(const SymTensor2& a, const SymTensor2& b, int n);

/// {X, Y}_n by applying n nested commutators from the left; {X, Y}_0 = Y.
Tensor2 iterated_commutator_bruteforce(const Tensor2& x, const Tensor2& y, int n);

inline Tensor2 iterated_commutator_bruteforce(const SymTensor2& a, const SymTensor2& b, int n) {
  return iterated_commutator_bruteforce(a.full(), b.full(), n);
}

}  // namespace logconf
