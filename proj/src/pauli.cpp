#include "spinsym/pauli.h"

#include <stdexcept>

namespace spinsym {

PauliExpr PauliExpr::sigma(int a) {
  if (a < 0 || a > 3) throw std::invalid_argument("Pauli index must be 0..3");
  PauliExpr p;
  p.c[a] = Expr(1);
  return p;
}

PauliExpr PauliExpr::dot(const std::array<Expr, 3>& v) { return PauliExpr(Expr(), v[0], v[1], v[2]); }

PauliExpr PauliExpr::map(const std::function<Expr(const Expr&)>& f) const {
  return PauliExpr(f(c[0]), f(c[1]), f(c[2]), f(c[3]));
}

PauliExpr operator+(const PauliExpr& a, const PauliExpr& b) {
  return PauliExpr(a.c[0] + b.c[0], a.c[1] + b.c[1], a.c[2] + b.c[2], a.c[3] + b.c[3]);
}

PauliExpr operator-(const PauliExpr& a, const PauliExpr& b) {
  return PauliExpr(a.c[0] - b.c[0], a.c[1] - b.c[1], a.c[2] - b.c[2], a.c[3] - b.c[3]);
}

PauliExpr PauliExpr::operator-() const { return PauliExpr(-c[0], -c[1], -c[2], -c[3]); }

PauliExpr operator*(const PauliExpr& a, const PauliExpr& b) { return mul(a, b); }

PauliExpr mul(const PauliExpr& a, const PauliExpr& b) {
  if (a.is_scalar()) return b.map([&](const Expr& e) { return a.c[0] * e; });
  if (b.is_scalar()) return a.map([&](const Expr& e) { return e * b.c[0]; });
  const Expr I = Expr::imag_unit();
  const auto& x = a.c;
  const auto& y = b.c;
  Expr s0 = sum({x[0] * y[0], x[1] * y[1], x[2] * y[2], x[3] * y[3]});
  Expr s1 = sum({x[0] * y[1], y[0] * x[1], I * (x[2] * y[3] - x[3] * y[2])});
  Expr s2 = sum({x[0] * y[2], y[0] * x[2], I * (x[3] * y[1] - x[1] * y[3])});
  Expr s3 = sum({x[0] * y[3], y[0] * x[3], I * (x[1] * y[2] - x[2] * y[1])});
  return PauliExpr(s0, s1, s2, s3);
}

PauliExpr commutator(const PauliExpr& a, const PauliExpr& b) {
  // Only the cross product survives: [a, b] = 2i (a x b).s
  const Expr I2 = Expr(CRational(Rational(0), Rational(2)));
  const auto& x = a.c;
  const auto& y = b.c;
  return PauliExpr(Expr(), I2 * (x[2] * y[3] - x[3] * y[2]), I2 * (x[3] * y[1] - x[1] * y[3]),
                   I2 * (x[1] * y[2] - x[2] * y[1]));
}

PauliExpr anticommutator(const PauliExpr& a, const PauliExpr& b) { return mul(a, b) + mul(b, a); }

PauliExpr adjoint(const PauliExpr& a) { return a.map([](const Expr& e) { return conj(e); }); }

PauliExpr differentiate(const PauliExpr& a, Var v) {
  return a.map([v](const Expr& e) { return differentiate(e, v); });
}

PauliExpr reflect(const PauliExpr& a) { return a.map([](const Expr& e) { return reflect(e); }); }

ZeroVerdict is_zero(const PauliExpr& a, const ZeroTestOptions& opt) {
  return all_zero({a.c[0], a.c[1], a.c[2], a.c[3]}, opt);
}

bool is_hermitian(const PauliExpr& a, const ZeroTestOptions& opt) { return is_zero(a - adjoint(a), opt).zero; }

std::string to_string(const PauliExpr& a) {
  std::string out;
  for (int k = 0; k < 4; ++k) {
    if (a.c[k].is_zero()) continue;
    if (!out.empty()) out += " + ";
    out += "(" + to_string(a.c[k]) + ")*s" + std::to_string(k);
  }
  return out.empty() ? "0" : out;
}

Mat2 to_matrix(const std::array<cplx, 4>& c) {
  const cplx I(0, 1);
  return {c[0] + c[3], c[1] - I * c[2], c[1] + I * c[2], c[0] - c[3]};
}

Mat2 matmul(const Mat2& a, const Mat2& b) {
  return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}

}  // namespace spinsym
