#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "spinsym/parse.h"
#include "spinsym/pauli.h"

using namespace spinsym;

namespace {

const Expr I = Expr::imag_unit();

Expr P(const std::string& s) {
  ParseContext ctx;
  ctx.declare_opaque("F", 2);
  return parse_expr(s, ctx);
}

bool zero(const PauliExpr& a) { return is_zero(a).zero; }

PauliExpr s(int k) { return PauliExpr::sigma(k); }

std::array<cplx, 4> numeric(const PauliExpr& a, const EvalEnv& env) {
  return {evaluate(a.c[0], env), evaluate(a.c[1], env), evaluate(a.c[2], env), evaluate(a.c[3], env)};
}

double dist(const Mat2& a, const Mat2& b) {
  double d = 0;
  for (int k = 0; k < 4; ++k) d = std::max(d, std::abs(a[k] - b[k]));
  return d;
}

PauliExpr random_pauli(std::mt19937_64& rng) {
  static const char* pool[] = {"x1", "x2*x3", "sin(x3)", "i*rt", "1/r", "exp(x1)", "g*x2", "phi", "2 - i", "F(x1, x3)"};
  std::uniform_int_distribution<int> pick(0, 9);
  PauliExpr p;
  for (auto& c : p.c) c = P(pool[pick(rng)]) * P(pool[pick(rng)]);
  return p;
}

}  // namespace

TEST_CASE("Pauli products") {
  CHECK(s(1) * s(2) == PauliExpr(Expr(), Expr(), Expr(), I));
  CHECK(s(2) * s(1) == PauliExpr(Expr(), Expr(), Expr(), -I));
  for (int a = 1; a <= 3; ++a) CHECK(s(a) * s(a) == s(0));

  // (s.x/r)^2 = 1
  PauliExpr n = PauliExpr::dot({P("x1/r"), P("x2/r"), P("x3/r")});
  PauliExpr sq = n * n;
  CHECK(zero(sq - s(0)));
  CHECK(sq.c[1].is_zero());
  CHECK(sq.c[2].is_zero());
  CHECK(sq.c[3].is_zero());
}

TEST_CASE("commutators and anticommutators") {
  CHECK(commutator(s(1), s(2)) == PauliExpr(Expr(), Expr(), Expr(), Expr(2) * I));
  CHECK(anticommutator(s(1), s(2)).is_zero());
  CHECK(anticommutator(s(3), s(3)) == PauliExpr(Expr(2)));

  // [s3/2, g H1 s1] = i g H1 s2
  Expr H1 = P("F(x1, x2)");
  Expr g = P("g");
  PauliExpr eta = PauliExpr(Expr(), Expr(), Expr(), Expr(Rational(1, 2)));
  PauliExpr V = PauliExpr(Expr(), g * H1, Expr(), Expr());
  CHECK(zero(commutator(eta, V) - PauliExpr(Expr(), Expr(), I * g * H1, Expr())));

  std::mt19937_64 rng(3);
  for (int k = 0; k < 10; ++k) {
    PauliExpr a = random_pauli(rng);
    CHECK(commutator(a, a).is_zero());
    PauliExpr b = random_pauli(rng);
    CHECK(zero(commutator(a, b) - (a * b - b * a)));
    CHECK(zero(anticommutator(a, b) - (a * b + b * a)));
  }
}

TEST_CASE("symbolic products agree with 2x2 matrices") {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 40; ++k) {
    PauliExpr a = random_pauli(rng), b = random_pauli(rng);
    PauliExpr ab = a * b;
    EvalEnv env;
    env.point = sample_point(rng);
    env.params["g"] = sample_param(rng);
    env.functions["F"] = PolyGauss::random(2, rng);
    Mat2 lhs = to_matrix(numeric(ab, env));
    Mat2 rhs = matmul(to_matrix(numeric(a, env)), to_matrix(numeric(b, env)));
    double scale = 1;
    for (auto v : rhs) scale = std::max(scale, std::abs(v));
    CHECK(dist(lhs, rhs) <= 1e-10 * scale);
  }
}

TEST_CASE("commutators are traceless") {
  std::mt19937_64 rng(17);
  for (int k = 0; k < 20; ++k) {
    PauliExpr c = commutator(random_pauli(rng), random_pauli(rng));
    CHECK(is_zero(c.c[0]).zero);
  }
}

TEST_CASE("Jacobi identity on numeric instantiations") {
  std::mt19937_64 rng(23);
  for (int k = 0; k < 100; ++k) {
    PauliExpr a = random_pauli(rng), b = random_pauli(rng), c = random_pauli(rng);
    PauliExpr j = commutator(a, commutator(b, c)) + commutator(b, commutator(c, a)) + commutator(c, commutator(a, b));
    EvalEnv env;
    env.point = sample_point(rng);
    env.params["g"] = sample_param(rng);
    env.functions["F"] = PolyGauss::random(2, rng);
    auto v = numeric(j, env);
    auto va = numeric(a, env), vb = numeric(b, env), vc = numeric(c, env);
    double scale = 1;
    for (int m = 0; m < 4; ++m) scale = std::max({scale, std::abs(va[m]), std::abs(vb[m]), std::abs(vc[m])});
    for (auto x : v) CHECK(std::abs(x) <= 1e-9 * scale * scale * scale);
  }
}

TEST_CASE("hermiticity") {
  CHECK(is_hermitian(PauliExpr::dot({P("x1"), P("sin(x2)"), P("g*rt")})));
  CHECK_FALSE(is_hermitian(PauliExpr(I * P("x1"))));
  CHECK(is_hermitian(PauliExpr(P("F(x1, x2)"))));
}

TEST_CASE("Pauli printing") {
  CHECK(to_string(PauliExpr()) == "0");
  CHECK(to_string(s(2)) == "(1)*s2");
  CHECK(to_string(PauliExpr(P("x1"), Expr(), Expr(), Expr(-1))) == "(x1)*s0 + (-1)*s3");
}
