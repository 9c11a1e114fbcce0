#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "spinsym/verify.h"

using namespace spinsym;

namespace {

PotentialConfig config(const std::string& F, const std::string& G, const std::string& A0, const std::string& S = "0") {
  PotentialConfig cfg;
  cfg.ctx.declare_opaque("F", 2);
  cfg.ctx.declare_opaque("G", 2);
  cfg.ctx.declare_opaque("R", 2);
  cfg.ctx.declare_opaque("R3", 3);
  cfg.F = parse_expr(F, cfg.ctx);
  cfg.G = parse_expr(G, cfg.ctx);
  cfg.A0 = parse_expr(A0, cfg.ctx);
  cfg.S = parse_expr(S, cfg.ctx);
  return cfg;
}

DiffOp op(const std::string& s) {
  ParseContext ctx;
  return parse_op(s, ctx);
}

const char* kL3 = "-i*(x1*d2 - x2*d1)";

bool passes(const DeterminingReport& r, const std::string& name) {
  for (const auto& e : r.equations) {
    if (e.name == name) return e.pass;
  }
  FAIL("no equation " << name);
  return false;
}

bool printed_passes(const DeterminingReport& r, const std::string& name) {
  for (const auto& e : r.as_printed) {
    if (e.name == name) return e.pass;
  }
  FAIL("no printed equation " << name);
  return false;
}

SymmetryCandidate candidate(const DiffOp& q) {
  auto c = SymmetryCandidate::from_op(q);
  REQUIRE(c.has_value());
  return *c;
}

bool residual_zero(const DiffOp& Q, const PotentialConfig& cfg, Variant v) {
  return is_zero_op(symmetry_residual(Q, build_hamiltonian(cfg, v))).zero;
}

PotentialConfig random_config(std::mt19937_64& rng) {
  static const char* fs[] = {"F(x1, x2)", "F(rt, x3)", "0", "x1*x2", "F(theta, phi)/r"};
  static const char* gs[] = {"G(x1, x2)", "G(rt, x3)", "-rt^2/4", "0", "x1^2"};
  static const char* as[] = {"R(x1, x2)", "R(rt, x3) + kappa*phi", "ln(r)/(2*nu)", "kappa/r^2", "R3(x1, x2, x3)"};
  std::uniform_int_distribution<int> pf(0, 4);
  return config(fs[pf(rng)], gs[pf(rng)], as[pf(rng)], "R(x3, x1)");
}

const char* kGenerators[] = {"-i*d3",
                             "-i*(x1*d2 - x2*d1) + s3/2 + kappa*t",
                             "-i*(x1*d2 - x2*d1) + s3 + kappa*t",
                             "s3",
                             "s1*cos(2*g*t) + s2*sin(2*g*t)",
                             "(x1*s1 + x2*s2 + x3*s3)/r",
                             "2*t*i*dt + i*(x1*d1 + x2*d2 + x3*d3) + 3*i/2",
                             "-i*t*d1 - x1",
                             "exp(omega*t)*(-i*d3 - omega*x3)"};

}  // namespace

TEST_CASE("candidate assembly follows the symmetrized ansatz") {
  SymmetryCandidate c;
  c.xi0 = parse_expr("t^2");
  c.xi = {parse_expr("x1*t"), parse_expr("x2*t"), parse_expr("x3*t")};
  c.eta0 = parse_expr("x1^2 + x2^2 + x3^2");
  c.eta = {Expr(), Expr(), parse_expr("t")};
  DiffOp q = c.to_op();
  CHECK(q == op("t^2*dt + t*(x1*d1 + x2*d2 + x3*d3) + 3*t/2 + i*(x1^2 + x2^2 + x3^2) + i*t*s3"));
  DiffOp sym = op("t^2*dt") + DiffOp(Expr(Rational(1, 2))) * (op("x1*t*d1 + x2*t*d2 + x3*t*d3") +
                                                              op("d1*x1*t + d2*x2*t + d3*x3*t")) +
               op("i*(x1^2 + x2^2 + x3^2) + i*t*s3");
  CHECK(q == sym);
  CHECK(is_zero(c.alpha() + parse_expr("2*t")).zero);

  auto back = SymmetryCandidate::from_op(q);
  REQUIRE(back.has_value());
  CHECK(back->to_op() == q);
  CHECK_FALSE(SymmetryCandidate::from_op(op("d1^2")).has_value());
  CHECK_FALSE(SymmetryCandidate::from_op(op("s1*d1")).has_value());
  CHECK_FALSE(SymmetryCandidate::from_op(op("Par")).has_value());
}

TEST_CASE("hamiltonian parts reassemble the model Hamiltonians") {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 6; ++k) {
    PotentialConfig cfg = random_config(rng);
    for (Variant v : {Variant::SP, Variant::H3, Variant::H3a}) {
      CHECK(is_zero_op(hamiltonian_parts(cfg, v).to_op() - build_hamiltonian(cfg, v)).zero);
    }
  }
}

TEST_CASE("free particle residuals") {
  PotentialConfig cfg = config("0", "0", "0");
  DiffOp H = build_hamiltonian(cfg, Variant::SP);
  CHECK(symmetry_residual(op("-i*d3"), H).empty());
  CHECK(is_zero_op(symmetry_residual(op("2*t*i*dt + i*(x1*d1 + x2*d2 + x3*d3) + 3*i/2"), H)).zero);
  CHECK(is_zero_op(symmetry_residual(op("-i*t*d2 - x2"), H)).zero);
  CHECK_FALSE(is_zero_op(symmetry_residual(op("x2"), H)).zero);
}

TEST_CASE("alpha is minus the time derivative of xi0") {
  CHECK(derived_alpha(op("-i*d1")).is_zero());
  CHECK(is_zero(derived_alpha(op("2*t*i*dt + i*(x1*d1 + x2*d2 + x3*d3) + 3*i/2")) - parse_expr("-2*i")).zero);
  CHECK(is_zero(derived_alpha(op("exp(2*omega*t)*i*dt")) - parse_expr("-2*i*omega*exp(2*omega*t)")).zero);
}

TEST_CASE("axial row: J3 + kappa t") {
  PotentialConfig cfg = config("F(rt, x3)", "G(rt, x3)", "R(rt, x3) + kappa*phi");
  DiffOp J3 = op(std::string(kL3) + " + s3/2 + kappa*t");
  VerificationReport r = verify_candidate("axial", J3, cfg, Variant::SP);
  CHECK(r.symmetry);
  CHECK(r.routes_agree);
  REQUIRE(r.determining);
  for (const auto& e : r.determining->equations) CHECK_MESSAGE(e.pass, e.name);

  // Orbital part alone and a doubled spin part fail on the Pauli relation.
  for (const char* spin : {" + kappa*t", " + s3 + kappa*t"}) {
    VerificationReport bad = verify_candidate("axial-bad", op(std::string(kL3) + spin), cfg, Variant::SP);
    CHECK_FALSE(bad.symmetry);
    CHECK(bad.routes_agree);
    REQUIRE(bad.determining);
    CHECK_FALSE(passes(*bad.determining, "pauli"));
    CHECK(passes(*bad.determining, "first-order-scalar"));
    CHECK(passes(*bad.determining, "potential"));
    for (const auto& e : bad.determining->equations) {
      if (e.name == "pauli") CHECK(e.witness.has_value());
    }
  }
}

TEST_CASE("constant field rotating spin symmetry") {
  // H = (0, 0, 1) for G = -rt^2/4.
  PotentialConfig cfg = config("0", "-rt^2/4", "R3(x1, x2, x3)");
  DiffOp Q = op("s1*cos(2*g*t) + s2*sin(2*g*t) + c4*s3");
  DeterminingReport rep = check_determining_sp(candidate(Q), cfg);
  CHECK(rep.all_pass);
  CHECK(residual_zero(Q, cfg, Variant::SP));
  CHECK(residual_zero(op("s3"), cfg, Variant::SP));

  // The opposite rotation sense satisfies only the printed sign of the Pauli
  // relation and is not a symmetry.
  DiffOp Qm = op("s1*cos(2*g*t) - s2*sin(2*g*t) + c4*s3");
  DeterminingReport repm = check_determining_sp(candidate(Qm), cfg);
  CHECK_FALSE(repm.all_pass);
  CHECK_FALSE(passes(repm, "pauli"));
  CHECK(printed_passes(repm, "pauli"));
  CHECK_FALSE(printed_passes(rep, "pauli"));
  CHECK_FALSE(residual_zero(Qm, cfg, Variant::SP));

  // The rotating symmetry does not survive a spin-orbit term.
  CHECK_FALSE(residual_zero(Q, cfg, Variant::H3));
}

TEST_CASE("translation row under every variant") {
  PotentialConfig cfg = config("F(x1, x2)", "G(x1, x2)", "R(x1, x2)");
  for (Variant v : {Variant::SP, Variant::H3, Variant::H3a}) {
    VerificationReport r = verify_candidate("P3", op("-i*d3"), cfg, v);
    CHECK(r.symmetry);
    CHECK(r.routes_agree);
    if (v == Variant::H3) {
      REQUIRE(r.determining);
      REQUIRE(r.determining->hop_incompatible.has_value());
      CHECK_FALSE(*r.determining->hop_incompatible);
    }
  }
}

TEST_CASE("exponential translation loses its symmetry under spin-orbit coupling") {
  PotentialConfig cfg = config("F(x1, x2)", "G(x1, x2)", "R(x1, x2) - omega^2*x3^2/2 + omega*x3*F(x1, x2)");
  cfg.e = Expr(1);
  DiffOp B3 = op("exp(omega*t)*(-i*d3 - omega*x3)");
  VerificationReport sp = verify_candidate("B3", B3, cfg, Variant::SP);
  CHECK(sp.symmetry);
  CHECK(sp.routes_agree);

  VerificationReport h3 = verify_candidate("B3", B3, cfg, Variant::H3);
  CHECK_FALSE(h3.symmetry);
  CHECK(h3.routes_agree);
  REQUIRE(h3.determining);
  CHECK(passes(*h3.determining, "first-order-scalar"));
  CHECK_FALSE(passes(*h3.determining, "first-order-spin"));
  REQUIRE(h3.determining->hop_incompatible.has_value());
  CHECK(*h3.determining->hop_incompatible);
  // Only the unit coefficient of eta_a reproduces this solution.
  CHECK_FALSE(printed_passes(*h3.determining, "first-order-scalar/half"));
  CHECK(printed_passes(*h3.determining, "first-order-scalar/unit"));

  // A general charge breaks the SP symmetry of this potential.
  PotentialConfig charged = cfg;
  charged.e = Expr::param("e");
  CHECK_FALSE(residual_zero(B3, charged, Variant::SP));
}

TEST_CASE("hedgehog spin operator with logarithmic potential") {
  PotentialConfig cfg = config("0", "0", "ln(r)/(2*nu)");
  DiffOp Qh = op("(x1*s1 + x2*s2 + x3*s3)/r");
  VerificationReport r = verify_candidate("Qhat", Qh, cfg, Variant::H3);
  CHECK(r.symmetry);
  CHECK(r.routes_agree);

  PotentialConfig wrong = config("0", "0", "ln(r)/nu");
  VerificationReport w = verify_candidate("Qhat", Qh, wrong, Variant::H3);
  CHECK_FALSE(w.symmetry);
  CHECK(w.routes_agree);
  CHECK_FALSE(residual_zero(Qh, cfg, Variant::SP));
}

TEST_CASE("scalar potential relation sign: exponential translation with unit charge") {
  PotentialConfig cfg = config("F(x1, x2)", "G(x1, x2)", "R(x1, x2) - omega^2*x3^2/2 + omega*x3*F(x1, x2)");
  cfg.e = Expr(1);
  DeterminingReport rep = check_determining_sp(candidate(op("exp(omega*t)*(-i*d3 - omega*x3)")), cfg);
  CHECK(rep.all_pass);
  CHECK_FALSE(printed_passes(rep, "potential"));
}

TEST_CASE("route equivalence on random candidates") {
  std::mt19937_64 rng(5);
  int agree = 0, total = 0, symmetric = 0;
  for (int k = 0; k < 10; ++k) {
    PotentialConfig cfg = random_config(rng);
    for (const char* g : kGenerators) {
      for (Variant v : {Variant::SP, Variant::H3, Variant::H3a}) {
        ZeroTestOptions opt;
        opt.trials = 16;
        VerificationReport r = verify_candidate("rand", op(g), cfg, v, opt);
        ++total;
        agree += r.routes_agree;
        symmetric += r.symmetry;
        CHECK_MESSAGE(r.routes_agree, g << " " << variant_name(v) << " " << to_string(cfg.A0));
      }
    }
  }
  CHECK(agree == total);
  CHECK(symmetric > 0);
  CHECK(symmetric < total);
}

TEST_CASE("perturbed symmetries fail") {
  PotentialConfig cfg = config("F(rt, x3)", "G(rt, x3)", "R(rt, x3) + kappa*phi");
  std::mt19937_64 rng(3);
  static const char* kicks[] = {"x1", "t*s1", "x3*d1", "sin(x2)", "t^2*dt", "s2*x3"};
  std::uniform_real_distribution<double> mag(1e-3, 1e-2);
  for (const char* k : kicks) {
    DiffOp Q = op(std::string(kL3) + " + s3/2 + kappa*t") + DiffOp(Expr(Rational(static_cast<int64_t>(mag(rng) * 1e6), 1000000))) * op(k);
    CHECK_FALSE(verify_candidate("kick", Q, cfg, Variant::SP).symmetry);
  }
}

TEST_CASE("report serialization is deterministic") {
  PotentialConfig cfg = config("F(rt, x3)", "G(rt, x3)", "R(rt, x3) + kappa*phi");
  DiffOp Q = op(std::string(kL3) + " + s3 + kappa*t");
  auto a = verify_candidate("row", Q, cfg, Variant::H3).to_json().dump();
  auto b = verify_candidate("row", Q, cfg, Variant::H3).to_json().dump();
  CHECK(a == b);
  auto j = nlohmann::json::parse(a);
  CHECK(j["verdict"] == "non-symmetry");
  CHECK(j["variant"] == "qrse-h3");
  CHECK(j.contains("witness"));
  CHECK(j["determining"]["equations"].size() == 7);
  CHECK_FALSE(j.contains("millis"));
}
