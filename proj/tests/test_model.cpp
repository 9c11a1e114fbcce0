#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "spinsym/model.h"

using namespace spinsym;

namespace {

PotentialConfig config(const std::string& F, const std::string& G, const std::string& A0, const std::string& S = "0") {
  PotentialConfig cfg;
  cfg.ctx.declare_opaque("Fo", 2);
  cfg.ctx.declare_opaque("Go", 2);
  cfg.ctx.declare_opaque("Ro", 2);
  cfg.ctx.declare_opaque("So", 2);
  cfg.F = parse_expr(F, cfg.ctx);
  cfg.G = parse_expr(G, cfg.ctx);
  cfg.A0 = parse_expr(A0, cfg.ctx);
  cfg.S = parse_expr(S, cfg.ctx);
  return cfg;
}

Expr P(const std::string& s) {
  ParseContext ctx;
  ctx.declare_opaque("Fo", 2);
  return parse_expr(s, ctx);
}

bool zero(const Expr& e) { return is_zero(e).zero; }
bool zero(const DiffOp& q) { return is_zero_op(q).zero; }

bool vec_equal(const Vec3& a, const Vec3& b) {
  return all_zero({a[0] - b[0], a[1] - b[1], a[2] - b[2]}).zero;
}

DiffOp laplace() { return DiffOp::d(1) * DiffOp::d(1) + DiffOp::d(2) * DiffOp::d(2) + DiffOp::d(3) * DiffOp::d(3); }

PotentialConfig random_config(std::mt19937_64& rng) {
  static const char* fs[] = {"Fo(x1, x2)", "Fo(rt, x3)", "x1*Go(x3, x2)", "sin(x1*x3) + x2", "0", "Fo(theta, phi)/r"};
  static const char* gs[] = {"Go(x1, x3)", "Go(rt, x3)", "x2^2*x3", "-rt^2/4", "0", "Go(theta, phi)"};
  static const char* as[] = {"Ro(x1, x2)", "kappa/r^2", "ln(r)", "Ro(rt, x3) + kappa*phi", "0"};
  std::uniform_int_distribution<int> pf(0, 5), pa(0, 4);
  return config(fs[pf(rng)], gs[pf(rng)], as[pa(rng)], "So(x1, x3)");
}

}  // namespace

TEST_CASE("vector potential examples") {
  Vec3 a = vector_potential(config("0", "0", "0"));
  for (const auto& c : a) CHECK(c.is_zero());

  Vec3 b = vector_potential(config("alpha*x1*x2", "alpha*x1^2", "0"));
  CHECK(vec_equal(b, {Expr(), P("-2*alpha*x1"), P("alpha*x1*x2")}));

  Vec3 c = vector_potential(config("0", "-(x1^2 + x2^2)/4", "0"));
  CHECK(vec_equal(c, {P("-x2/2"), P("x1/2"), Expr()}));
}

TEST_CASE("magnetic field examples") {
  CHECK(vec_equal(magnetic_field(config("0", "-(x1^2 + x2^2)/4", "0")), {Expr(), Expr(), Expr(1)}));
  CHECK(vec_equal(magnetic_field(config("x2", "0", "0")), {Expr(1), Expr(), Expr()}));

  // x3-independent opaque F, G: curl gives (+d2 F, -d1 F, -(d1^2 + d2^2) G).
  PotentialConfig cfg = config("Fo(x1, x2)", "Go(x1, x2)", "Ro(x1, x2)");
  Vec3 H = magnetic_field(cfg);
  CHECK(vec_equal(H, magnetic_field_formula(cfg)));
  Expr F = cfg.F;
  CHECK(zero(H[0] - differentiate(F, Var::X2)));
  CHECK(zero(H[1] + differentiate(F, Var::X1)));
  // the opposite sign on the F part is not the curl
  CHECK_FALSE(zero(H[0] + differentiate(F, Var::X2)));
}

TEST_CASE("curl formula and divergence-free field on random configurations") {
  std::mt19937_64 rng(41);
  for (int k = 0; k < 12; ++k) {
    PotentialConfig cfg = random_config(rng);
    if (k % 3 == 0) cfg.Ftilde = P("x1*x3^2 + sin(x2)");
    Vec3 H = magnetic_field(cfg);
    CHECK(vec_equal(H, magnetic_field_formula(cfg)));
    CHECK(zero(divergence(H)));
    FieldSet f = fields(cfg);
    CHECK(vec_equal(f.E, gradient(cfg.A0)));
    for (const auto& c : {cfg.F, cfg.G, cfg.A0, cfg.S}) CHECK(differentiate(c, Var::T).is_zero());
  }
}

TEST_CASE("SP Hamiltonian assembly") {
  DiffOp free = build_sp_hamiltonian(config("0", "0", "0"));
  CHECK(free == DiffOp(Expr(Rational(-1, 2))) * laplace());

  // expanded form: -1/2 Lap + i e A.d + (i e/2) div A + e^2 A^2/2 + A0 + g s.H
  std::mt19937_64 rng(43);
  for (int k = 0; k < 6; ++k) {
    PotentialConfig cfg = random_config(rng);
    Vec3 A = vector_potential(cfg);
    Vec3 H = magnetic_field(cfg);
    const Expr I = Expr::imag_unit();
    DiffOp expected = DiffOp(Expr(Rational(-1, 2))) * laplace();
    for (int a = 1; a <= 3; ++a) expected += DiffOp(I * cfg.e * A[a - 1]) * DiffOp::d(a);
    Expr v0 = cfg.A0 + I * cfg.e / Expr(2) * divergence(A) +
              cfg.e * cfg.e / Expr(2) * sum({A[0] * A[0], A[1] * A[1], A[2] * A[2]});
    expected += DiffOp(PauliExpr(v0) + PauliExpr::dot({cfg.g * H[0], cfg.g * H[1], cfg.g * H[2]}));
    DiffOp h = build_sp_hamiltonian(cfg);
    CHECK(zero(h - expected));
    CHECK(zero(adjoint(h) - h));
  }
}

TEST_CASE("SP Hamiltonian of a constant field carries a s3 Pauli term") {
  PotentialConfig cfg = config("0", "-(x1^2 + x2^2)/4", "0");
  DiffOp h = build_sp_hamiltonian(cfg);
  PauliExpr c0 = h.coeff({0, 0, 0, 0});
  CHECK(c0.c[3] == P("g"));
  CHECK(c0.c[1].is_zero());
  CHECK(c0.c[2].is_zero());
  // Q = s1 cos(2gt) + s2 sin(2gt) + c s3: [Q, i dt - H] = 0
  DiffOp Q(PauliExpr(Expr(), P("cos(2*g*t)"), P("sin(2*g*t)"), P("c1")));
  DiffOp L = DiffOp(Expr::imag_unit()) * DiffOp::d(0) - h;
  CHECK(zero(commutator(Q, L)));
}

TEST_CASE("QRSE Hamiltonians") {
  std::mt19937_64 rng(47);
  for (int k = 0; k < 5; ++k) {
    PotentialConfig cfg = random_config(rng);
    DiffOp sp = build_sp_hamiltonian(cfg);
    for (Variant v : {Variant::H3, Variant::H3a}) {
      DiffOp h = build_qrse_hamiltonian(cfg, v);
      CHECK(zero(adjoint(h) - h));
      PotentialConfig red = cfg;
      red.nu = Expr();
      red.mu = Expr();
      CHECK(zero(build_qrse_hamiltonian(red, v) - sp));
    }
  }
  // The H3 spin-orbit term of a radial field is nu f(r) s.L with E = f(r) x.
  PotentialConfig rad = config("0", "0", "ln(r)");
  DiffOp h = build_qrse_hamiltonian(rad, Variant::H3);
  DiffOp sp = build_sp_hamiltonian(rad);
  const Expr I = Expr::imag_unit();
  DiffOp sL;
  const char* L[] = {"x2*d3 - x3*d2", "x3*d1 - x1*d3", "x1*d2 - x2*d1"};
  for (int a = 1; a <= 3; ++a) {
    ParseContext ctx;
    sL += DiffOp(PauliExpr::sigma(a)) * DiffOp(-I) * parse_op(L[a - 1], ctx);
  }
  DiffOp expected = sp + DiffOp(P("nu/r^2")) * sL + DiffOp(P("mu/r^2"));
  CHECK(zero(h - expected));
}

TEST_CASE("H3a uses the generalized field") {
  // q = 0 and A = 0: both variants coincide.
  PotentialConfig pure = config("0", "0", "kappa/r^2", "So(x1, x3)");
  pure.q = Expr();
  CHECK(zero(build_qrse_hamiltonian(pure, Variant::H3a) - build_qrse_hamiltonian(pure, Variant::H3)));

  // With a vector potential the difference is -nu e eps_abc s_a E^b A^c.
  PotentialConfig cfg = config("Fo(x1, x2)", "Go(x1, x3)", "kappa/r^2");
  cfg.q = Expr();
  FieldSet f = fields(cfg);
  PauliExpr extra;
  for (int a = 1; a <= 3; ++a) {
    int b = a % 3 + 1, c = b % 3 + 1;
    extra.c[a] = -cfg.nu * cfg.e * (f.E[b - 1] * f.A[c - 1] - f.E[c - 1] * f.A[b - 1]);
  }
  CHECK(zero(build_qrse_hamiltonian(cfg, Variant::H3a) - build_qrse_hamiltonian(cfg, Variant::H3) - DiffOp(extra)));

  // The generalized potential replaces A0 - q S inside the field only.
  PotentialConfig direct = config("0", "0", "kappa/r^2");
  direct.Atilde = P("lambda*ln(r)");
  DiffOp h = build_qrse_hamiltonian(direct, Variant::H3a);
  CHECK(zero(h.coeff({0, 0, 0, 0}).c[0] - P("kappa/r^2 + mu*lambda/r^2")));
  Vec3 Et = fields(direct).Et;
  CHECK(vec_equal(Et, {P("lambda*x1/r^2"), P("lambda*x2/r^2"), P("lambda*x3/r^2")}));
}

TEST_CASE("gauge transformation") {
  PotentialConfig cfg = config("Fo(x1, x2)", "Go(x1, x3)", "Ro(x1, x2)");
  DiffOp h = build_sp_hamiltonian(cfg);
  CHECK(zero(gauge_transform(h, P("c1")) - h));

  Expr phi = P("e*x3*c2");
  DiffOp ht = gauge_transform(h, phi);
  PotentialConfig shifted = cfg;
  shifted.F = cfg.F - P("c2");
  CHECK(zero(ht - build_sp_hamiltonian(shifted)));
  CHECK(zero(ht - build_sp_hamiltonian(gauge_shifted_config(cfg, phi))));

  Expr chi = P("x1*x2^2 + sin(x3)*x1");
  CHECK(zero(gauge_transform(h, chi) - build_sp_hamiltonian(gauge_shifted_config(cfg, chi))));
}

TEST_CASE("gauge transformation shifts the H3 Pauli field") {
  PotentialConfig cfg = config("Fo(x1, x2)", "Go(x1, x3)", "Ro(x2, x3)");
  Expr chi = P("x1*x2 + x3^2");
  DiffOp ht = gauge_transform(build_qrse_hamiltonian(cfg, Variant::H3), chi);
  PotentialConfig shifted = gauge_shifted_config(cfg, chi);
  Vec3 H = magnetic_field(cfg);
  Vec3 Hp = gauge_shifted_pauli_field(cfg, chi);
  PauliExpr delta = PauliExpr::dot({cfg.g * (Hp[0] - H[0]), cfg.g * (Hp[1] - H[1]), cfg.g * (Hp[2] - H[2])});
  CHECK(zero(ht - build_qrse_hamiltonian(shifted, Variant::H3) - DiffOp(delta)));

  // E = (E1, 0, 0) orthogonal to H = (0, 0, h): the Pauli term can be removed.
  PotentialConfig cross = config("0", "0", "0");
  cross.ctx.declare_param("h");
  cross.ctx.declare_param("E1");
  cross.G = parse_expr("-h*(x1^2 + x2^2)/4", cross.ctx);
  cross.A0 = parse_expr("E1*x1", cross.ctx);
  Expr kill = parse_expr("-g*h*x2/(nu*E1)", cross.ctx);
  Vec3 Hk = gauge_shifted_pauli_field(cross, kill);
  for (const auto& c : Hk) CHECK(zero(c));
  DiffOp hk = gauge_transform(build_qrse_hamiltonian(cross, Variant::H3), kill);
  PauliExpr c0 = hk.coeff({0, 0, 0, 0});
  CHECK(all_zero({c0.c[1], c0.c[2], c0.c[3]}).zero);
  PauliExpr before = build_qrse_hamiltonian(cross, Variant::H3).coeff({0, 0, 0, 0});
  CHECK_FALSE(is_zero(before.c[3]).zero);
}

TEST_CASE("potential config JSON round trip") {
  PotentialConfig cfg = config("Fo(rt, x3)", "Go(rt, x3)", "Ro(rt, x3) + kappa*phi", "So(rt, x3)");
  cfg.Ftilde = P("x1*x2");
  cfg.ctx.declare_param("w1");
  cfg.nu = parse_expr("w1/2", cfg.ctx);
  nlohmann::json j = cfg.to_json();
  CHECK(j["schema"] == kPotentialSchema);
  PotentialConfig back = PotentialConfig::from_json(j);
  CHECK(back.F == cfg.F);
  CHECK(back.G == cfg.G);
  CHECK(back.A0 == cfg.A0);
  CHECK(back.S == cfg.S);
  CHECK(*back.Ftilde == *cfg.Ftilde);
  CHECK(back.nu == cfg.nu);
  CHECK(back.to_json().dump() == j.dump());
  nlohmann::json bad = j;
  bad["schema"] = "other/9";
  CHECK_THROWS(PotentialConfig::from_json(bad));
}
