#pragma once

#include <array>
#include <functional>
#include <string>

#include "spinsym/eval.h"
#include "spinsym/expr.h"

namespace spinsym {

/// c0*s0 + c1*s1 + c2*s2 + c3*s3 with scalar expression coefficients.
struct PauliExpr {
  std::array<Expr, 4> c;

  PauliExpr() = default;
  PauliExpr(const Expr& scalar) : c{scalar, Expr(), Expr(), Expr()} {}
  PauliExpr(Expr c0, Expr c1, Expr c2, Expr c3) : c{std::move(c0), std::move(c1), std::move(c2), std::move(c3)} {}
  static PauliExpr sigma(int a);  // a = 0..3
  /// sum_a v[a-1]*s_a
  static PauliExpr dot(const std::array<Expr, 3>& v);

  bool is_zero() const { return c[0].is_zero() && c[1].is_zero() && c[2].is_zero() && c[3].is_zero(); }
  bool is_scalar() const { return c[1].is_zero() && c[2].is_zero() && c[3].is_zero(); }

  PauliExpr map(const std::function<Expr(const Expr&)>& f) const;

  friend PauliExpr operator+(const PauliExpr& a, const PauliExpr& b);
  friend PauliExpr operator-(const PauliExpr& a, const PauliExpr& b);
  friend PauliExpr operator*(const PauliExpr& a, const PauliExpr& b);
  PauliExpr operator-() const;
  PauliExpr& operator+=(const PauliExpr& b) { return *this = *this + b; }
  friend bool operator==(const PauliExpr& a, const PauliExpr& b) { return a.c == b.c; }
};

PauliExpr mul(const PauliExpr& a, const PauliExpr& b);
PauliExpr commutator(const PauliExpr& a, const PauliExpr& b);
PauliExpr anticommutator(const PauliExpr& a, const PauliExpr& b);
/// Hermitian adjoint: coefficients conjugated (the basis is hermitian).
PauliExpr adjoint(const PauliExpr& a);
PauliExpr differentiate(const PauliExpr& a, Var v);
PauliExpr reflect(const PauliExpr& a);

ZeroVerdict is_zero(const PauliExpr& a, const ZeroTestOptions& opt = {});
bool is_hermitian(const PauliExpr& a, const ZeroTestOptions& opt = {});

std::string to_string(const PauliExpr& a);

/// Row-major 2x2 complex matrix.
using Mat2 = std::array<cplx, 4>;
Mat2 to_matrix(const std::array<cplx, 4>& coeffs);
Mat2 matmul(const Mat2& a, const Mat2& b);

}  // namespace spinsym
