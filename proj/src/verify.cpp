#include "spinsym/verify.h"

#include <chrono>
#include <sstream>

namespace spinsym {

namespace {

int levi(int a, int b, int c) {
  if (a == b || b == c || a == c) return 0;
  return ((b - a + 3) % 3 == 1) ? 1 : -1;
}

Expr d(const Expr& f, int k) { return differentiate(f, static_cast<Var>(k)); }
PauliExpr dP(const PauliExpr& f, int k) { return differentiate(f, static_cast<Var>(k)); }

const Expr& I() {
  static const Expr i = Expr::imag_unit();
  return i;
}

PauliExpr lap(const PauliExpr& f) { return dP(dP(f, 1), 1) + dP(dP(f, 2), 2) + dP(dP(f, 3), 3); }

Expr div(const Vec3& v) { return d(v[0], 1) + d(v[1], 2) + d(v[2], 3); }

MultiIndex mono(int k) {
  MultiIndex m{};
  m[k] = 1;
  return m;
}

// Collects named scalar roots and tests them together.
class EquationSet {
 public:
  void add(const std::string& label, const Expr& e) {
    labels_.push_back(label);
    roots_.push_back(e);
  }
  void add(const std::string& label, const PauliExpr& p) {
    static const char* parts[] = {"s0", "s1", "s2", "s3"};
    for (int j = 0; j < 4; ++j) add(label + "/" + parts[j], p.c[j]);
  }
  void add_sigma(const std::string& label, const PauliExpr& p) {
    static const char* parts[] = {"s1", "s2", "s3"};
    for (int j = 1; j < 4; ++j) add(label + "/" + parts[j - 1], p.c[j]);
  }
  EquationResult run(const std::string& name, const ZeroTestOptions& opt) const {
    EquationResult r;
    r.name = name;
    ZeroVerdict v = all_zero(roots_, opt);
    r.pass = v.zero;
    if (v.witness) {
      r.witness = v.witness;
      r.component = labels_[v.witness->root];
    }
    return r;
  }

 private:
  std::vector<std::string> labels_;
  std::vector<Expr> roots_;
};

struct Runner {
  DeterminingReport report;
  ZeroTestOptions opt;
  uint64_t next = 0;

  ZeroTestOptions next_opt() {
    ZeroTestOptions o = opt;
    o.stream = opt.stream + 0x9e3779b9ULL * (++next);
    return o;
  }
  void equation(const std::string& name, const EquationSet& s) {
    report.equations.push_back(s.run(name, next_opt()));
    if (!report.equations.back().pass) report.all_pass = false;
  }
  void printed(const std::string& name, const EquationSet& s) { report.as_printed.push_back(s.run(name, next_opt())); }
};

// Kinematic conditions on xi0 and xi, shared by every variant.
void kinematic_equations(const SymmetryCandidate& Q, Runner& run) {
  Expr alpha = Q.alpha();
  EquationSet xi0_eqs;
  for (int a = 1; a <= 3; ++a) xi0_eqs.add("a=" + std::to_string(a), d(Q.xi0, a));
  xi0_eqs.add("alpha", alpha + d(Q.xi0, 0));
  run.equation("xi0-time-only", xi0_eqs);

  Expr trace = div(Q.xi);
  EquationSet killing;
  for (int a = 1; a <= 3; ++a) {
    for (int b = a; b <= 3; ++b) {
      Expr e = d(Q.xi[a - 1], b) + d(Q.xi[b - 1], a);
      if (a == b) e = e - Expr(Rational(2, 3)) * trace;
      killing.add("ab=" + std::to_string(a) + std::to_string(b), e);
    }
  }
  run.equation("conformal-killing", killing);

  EquationSet trace_eqs;
  trace_eqs.add("trace", Expr(2) * trace + Expr(3) * alpha);
  run.equation("trace", trace_eqs);
}

// Right-hand side of the printed vector relation eta^c_a = R^c_a (index
// [a-1][c-1]) built from the potential P (A0 for H3, A~ for H3a); kappa
// multiplies alpha in the H3a print.
std::array<std::array<Expr, 3>, 3> printed_eta_gradient(const SymmetryCandidate& Q, const Expr& P, const Expr& nu,
                                                         const Expr& kappa) {
  Expr alpha = Q.alpha();
  Vec3 Pd{d(P, 1), d(P, 2), d(P, 3)};
  std::array<std::array<Expr, 3>, 3> R;
  for (int a = 1; a <= 3; ++a) {
    for (int c = 1; c <= 3; ++c) {
      std::vector<Expr> t;
      for (int b = 1; b <= 3; ++b) {
        for (int dd = 1; dd <= 3; ++dd) {
          if (int s = levi(b, c, dd)) t.push_back(Expr(s) * Pd[dd - 1] * d(Q.xi[a - 1], b));
          if (int s = levi(a, c, dd); s && b == 1) {
            std::vector<Expr> inner;
            for (int k = 1; k <= 3; ++k) inner.push_back(Q.xi[k - 1] * d(Pd[dd - 1], k));
            t.push_back(Expr(-s) * (sum(inner) + kappa * alpha * Pd[dd - 1]));
          }
        }
      }
      if (a == c) {
        for (int k = 1; k <= 3; ++k) t.push_back(Expr(2) * Q.eta[k - 1] * Pd[k - 1]);
      }
      t.push_back(Expr(-2) * Q.eta[a - 1] * Pd[c - 1]);
      R[a - 1][c - 1] = nu * sum(t);
    }
  }
  return R;
}

// g (xi^a K^b_a - alpha K^b + s eps_bcd eta^c K^d) - eta^b_t, per b.
Vec3 pauli_relation(const SymmetryCandidate& Q, const Vec3& K, const Expr& g, int sign) {
  Expr alpha = Q.alpha();
  Vec3 out;
  for (int b = 1; b <= 3; ++b) {
    std::vector<Expr> t;
    for (int a = 1; a <= 3; ++a) t.push_back(Q.xi[a - 1] * d(K[b - 1], a));
    t.push_back(-alpha * K[b - 1]);
    for (int c = 1; c <= 3; ++c) {
      for (int dd = 1; dd <= 3; ++dd) {
        if (int s = levi(b, c, dd)) t.push_back(Expr(2 * sign * s) * Q.eta[c - 1] * K[dd - 1]);
      }
    }
    out[b - 1] = g * sum(t) - d(Q.eta[b - 1], 0);
  }
  return out;
}

}  // namespace

DiffOp SymmetryCandidate::to_op() const {
  DiffOp out = DiffOp::term(PauliExpr(xi0), mono(0));
  for (int a = 1; a <= 3; ++a) out += DiffOp::term(PauliExpr(xi[a - 1]), mono(a));
  out += DiffOp(PauliExpr(Expr(Rational(1, 2)) * div(xi)) + PauliExpr(I()) * eta_matrix());
  return out;
}

std::optional<SymmetryCandidate> SymmetryCandidate::from_op(const DiffOp& q) {
  if (q.has_parity() || q.order() > 1) return std::nullopt;
  SymmetryCandidate c;
  PauliExpr lead[4];
  for (int k = 0; k < 4; ++k) {
    lead[k] = q.coeff(mono(k));
    if (!lead[k].is_scalar()) return std::nullopt;
  }
  c.xi0 = lead[0].c[0];
  for (int a = 1; a <= 3; ++a) c.xi[a - 1] = lead[a].c[0];
  PauliExpr zeta = q.coeff(MultiIndex{}) - PauliExpr(Expr(Rational(1, 2)) * div(c.xi));
  PauliExpr eta = PauliExpr(-I()) * zeta;
  c.eta0 = eta.c[0];
  for (int a = 1; a <= 3; ++a) c.eta[a - 1] = eta.c[a];
  return c;
}

Expr derived_alpha(const DiffOp& q) { return -d(q.coeff(mono(0)).c[0], 0); }

DiffOp symmetry_residual(const DiffOp& Q, const DiffOp& H) {
  DiffOp L = DiffOp(I()) * DiffOp::d(0) - H;
  return commutator(Q, L) - DiffOp(derived_alpha(Q)) * L;
}

DiffOp symmetry_residual(const SymmetryCandidate& Q, const DiffOp& H) { return symmetry_residual(Q.to_op(), H); }

DiffOp HamiltonianParts::to_op() const {
  DiffOp out;
  for (int a = 1; a <= 3; ++a) {
    out += DiffOp(Expr(Rational(-1, 2))) * DiffOp::d(a) * DiffOp::d(a);
    out += DiffOp(B[a - 1]) * DiffOp::d(a);
  }
  out += DiffOp(U);
  return out;
}

HamiltonianParts hamiltonian_parts(const PotentialConfig& cfg, Variant variant) {
  FieldSet f = fields(cfg);
  const Expr& e = cfg.e;
  HamiltonianParts hp;
  std::vector<Expr> a2;
  for (int c = 1; c <= 3; ++c) {
    hp.B[c - 1] = PauliExpr(I() * e * f.A[c - 1]);
    a2.push_back(f.A[c - 1] * f.A[c - 1]);
  }
  hp.U = PauliExpr(cfg.A0 + I() * e / Expr(2) * div(f.A) + e * e / Expr(2) * sum(a2)) +
         PauliExpr::dot({cfg.g * f.H[0], cfg.g * f.H[1], cfg.g * f.H[2]});
  if (variant == Variant::SP) return hp;
  const Vec3& E = variant == Variant::H3 ? f.E : f.Et;
  // -i nu eps_abc s_a E^b d_c
  for (int c = 1; c <= 3; ++c) {
    Vec3 s;
    for (int a = 1; a <= 3; ++a) {
      std::vector<Expr> t;
      for (int b = 1; b <= 3; ++b) {
        if (int l = levi(a, b, c)) t.push_back(Expr(l) * E[b - 1]);
      }
      s[a - 1] = -I() * cfg.nu * sum(t);
    }
    hp.B[c - 1] += PauliExpr::dot(s);
  }
  if (variant == Variant::H3) {
    hp.U += PauliExpr(cfg.mu * div(f.E));
    return hp;
  }
  // -nu e s.(E~ x A)
  Vec3 ea;
  for (int a = 1; a <= 3; ++a) {
    int b = a % 3 + 1, c = b % 3 + 1;
    ea[a - 1] = -cfg.nu * e * (E[b - 1] * f.A[c - 1] - E[c - 1] * f.A[b - 1]);
  }
  hp.U += PauliExpr::dot(ea) + PauliExpr(cfg.mu * div(f.Et));
  return hp;
}

DeterminingReport check_determining_sp(const SymmetryCandidate& Q, const PotentialConfig& cfg,
                                       const ZeroTestOptions& opt) {
  Runner run{{}, opt};
  kinematic_equations(Q, run);
  FieldSet f = fields(cfg);
  Expr alpha = Q.alpha();
  const Expr& e = cfg.e;

  EquationSet scalar1;
  for (int a = 1; a <= 3; ++a) {
    std::vector<Expr> t;
    for (int b = 1; b <= 3; ++b) {
      t.push_back(f.A[b - 1] * d(Q.xi[a - 1], b));
      t.push_back(-Q.xi[b - 1] * d(f.A[a - 1], b));
    }
    t.push_back(alpha * f.A[a - 1]);
    scalar1.add("a=" + std::to_string(a), d(Q.xi[a - 1], 0) + d(Q.eta0, a) - e * sum(t));
  }
  run.equation("first-order-scalar", scalar1);

  EquationSet eta_const;
  for (int a = 1; a <= 3; ++a) {
    for (int b = 1; b <= 3; ++b) eta_const.add("eta" + std::to_string(b) + "_" + std::to_string(a), d(Q.eta[b - 1], a));
  }
  run.equation("eta-constant", eta_const);

  std::vector<Expr> xa, xdA;
  for (int a = 1; a <= 3; ++a) {
    xa.push_back(Q.xi[a - 1] * d(cfg.A0, a));
    xdA.push_back(d(Q.xi[a - 1], 0) * f.A[a - 1]);
  }
  EquationSet pot;
  pot.add("scalar", sum(xa) - e * sum(xdA) - alpha * cfg.A0 - d(Q.eta0, 0));
  run.equation("potential", pot);

  EquationSet pauli;
  Vec3 pv = pauli_relation(Q, f.H, cfg.g, -1);
  for (int b = 1; b <= 3; ++b) pauli.add("b=" + std::to_string(b), pv[b - 1]);
  run.equation("pauli", pauli);

  EquationSet pot_printed;
  pot_printed.add("scalar", sum(xa) + sum(xdA) - alpha * cfg.A0 - d(Q.eta0, 0));
  run.printed("potential", pot_printed);
  EquationSet pauli_printed;
  Vec3 pv_printed = pauli_relation(Q, f.H, cfg.g, 1);
  for (int b = 1; b <= 3; ++b) pauli_printed.add("b=" + std::to_string(b), pv_printed[b - 1]);
  run.printed("pauli", pauli_printed);
  return run.report;
}

DeterminingReport check_determining_qrse(const SymmetryCandidate& Q, const PotentialConfig& cfg, Variant variant,
                                         const ZeroTestOptions& opt) {
  if (variant == Variant::SP) return check_determining_sp(Q, cfg, opt);
  Runner run{{}, opt};
  kinematic_equations(Q, run);
  HamiltonianParts hp = hamiltonian_parts(cfg, variant);
  FieldSet f = fields(cfg);
  Expr alpha = Q.alpha();
  PauliExpr A(alpha);
  PauliExpr zeta = PauliExpr(Expr(Rational(1, 2)) * div(Q.xi)) + PauliExpr(I()) * Q.eta_matrix();

  // i times the d_a coefficient of the residual.
  EquationSet scalar1, spin1;
  for (int a = 1; a <= 3; ++a) {
    const PauliExpr& Ba = hp.B[a - 1];
    PauliExpr t = PauliExpr(-I() * d(Q.xi[a - 1], 0)) - PauliExpr(Expr(Rational(1, 2))) * lap(PauliExpr(Q.xi[a - 1])) -
                  dP(zeta, a) - PauliExpr(Q.xi0) * dP(Ba, 0) - commutator(zeta, Ba) + A * Ba;
    for (int b = 1; b <= 3; ++b) {
      t += PauliExpr(-Q.xi[b - 1]) * dP(Ba, b) + hp.B[b - 1] * PauliExpr(d(Q.xi[a - 1], b));
    }
    PauliExpr eq = PauliExpr(I()) * t;
    scalar1.add("a=" + std::to_string(a), eq.c[0]);
    spin1.add_sigma("a=" + std::to_string(a), eq);
  }
  run.equation("first-order-scalar", scalar1);
  run.equation("first-order-spin", spin1);

  // Order-zero coefficient of the residual.
  PauliExpr t = PauliExpr(-I()) * dP(zeta, 0) - PauliExpr(Expr(Rational(1, 2))) * lap(zeta) -
                PauliExpr(Q.xi0) * dP(hp.U, 0) - commutator(zeta, hp.U) + A * hp.U;
  for (int a = 1; a <= 3; ++a) {
    t += PauliExpr(-Q.xi[a - 1]) * dP(hp.U, a) + hp.B[a - 1] * dP(zeta, a);
  }
  EquationSet scalar0, spin0;
  scalar0.add("scalar", t.c[0]);
  spin0.add_sigma("b", t);
  run.equation("zeroth-order-scalar", scalar0);
  run.equation("zeroth-order-spin", spin0);

  // Printed forms.
  const Expr P = variant == Variant::H3 ? cfg.A0 : cfg.effective_potential();
  const Expr kappa = variant == Variant::H3 ? Expr(1) : Expr::param("kappa");
  auto R = printed_eta_gradient(Q, P, cfg.nu, kappa);
  EquationSet spin1_printed;
  std::vector<Expr> hop;
  for (int a = 1; a <= 3; ++a) {
    for (int c = 1; c <= 3; ++c) {
      spin1_printed.add("eta" + std::to_string(c) + "_" + std::to_string(a), d(Q.eta[c - 1], a) - R[a - 1][c - 1]);
      for (int b = 1; b <= 3; ++b) {
        if (int s = levi(a, b, c)) hop.push_back(Expr(s) * d(R[a - 1][c - 1], b));
      }
    }
  }
  run.printed("first-order-spin", spin1_printed);

  Vec3 Pd = gradient(P);
  Vec3 Ht;
  for (int a = 1; a <= 3; ++a) {
    int b = a % 3 + 1, c = b % 3 + 1;
    Ht[a - 1] = f.H[a - 1] - Expr(2) * cfg.nu * (f.A[b - 1] * Pd[c - 1] - f.A[c - 1] * Pd[b - 1]);
  }
  Vec3 pauli_ht = pauli_relation(Q, Ht, cfg.g, 1);
  EquationSet spin0_printed;
  for (int b = 1; b <= 3; ++b) {
    std::vector<Expr> t2{pauli_ht[b - 1]};
    for (int a = 1; a <= 3; ++a) {
      for (int dd = 1; dd <= 3; ++dd) {
        if (int s = levi(a, b, dd)) t2.push_back(Expr(s) * cfg.nu * d(Q.eta0, a) * d(cfg.A0, dd));
      }
      t2.push_back(-d(Q.eta[b - 1], a) * f.A[a - 1]);
    }
    spin0_printed.add("b=" + std::to_string(b), sum(t2));
  }
  run.printed("zeroth-order-spin", spin0_printed);

  std::vector<Expr> lhs, xdA;
  for (int a = 1; a <= 3; ++a) xdA.push_back(d(Q.xi[a - 1], 0) * f.A[a - 1]);
  EquationSet scalar0_printed;
  if (variant == Variant::H3) {
    Expr lapA0 = laplacian(cfg.A0);
    for (int a = 1; a <= 3; ++a) lhs.push_back(Q.xi[a - 1] * (Pd[a - 1] + cfg.mu * d(lapA0, a)));
    std::vector<Expr> quad;
    for (int dd = 1; dd <= 3; ++dd) {
      quad.push_back(Expr(2) * alpha * Pd[dd - 1] * Pd[dd - 1]);
      for (int k = 1; k <= 3; ++k) quad.push_back(Expr(2) * Q.xi[k - 1] * d(Pd[dd - 1], k) * Pd[dd - 1]);
    }
    Expr trace = div(Q.xi);
    for (int m = 1; m <= 3; ++m) {
      quad.push_back(trace * Pd[m - 1] * Pd[m - 1]);
      for (int n = 1; n <= 3; ++n) quad.push_back(-d(Q.xi[m - 1], n) * Pd[m - 1] * Pd[n - 1]);
    }
    scalar0_printed.add("scalar", sum(lhs) + sum(xdA) - alpha * (cfg.A0 + cfg.mu * lapA0) - d(Q.eta0, 0) -
                          cfg.nu * cfg.nu * sum(quad));
    run.printed("zeroth-order-scalar", scalar0_printed);
  } else {
    Expr lapP = laplacian(P);
    for (int a = 1; a <= 3; ++a) lhs.push_back(Q.xi[a - 1] * (Pd[a - 1] + cfg.mu * d(lapP, a)));
    std::vector<Expr> so;
    for (int a = 1; a <= 3; ++a) {
      for (int c = 1; c <= 3; ++c) {
        for (int dd = 1; dd <= 3; ++dd) {
          if (int s = levi(a, c, dd)) so.push_back(Expr(s) * d(Q.eta[c - 1], a) * Pd[dd - 1]);
        }
      }
    }
    scalar0_printed.add("scalar", sum(lhs) + sum(xdA) - alpha * (P + cfg.mu * laplacian(cfg.A0)) - d(Q.eta0, 0) +
                          cfg.nu * sum(so));
    run.printed("zeroth-order-scalar", scalar0_printed);
  }

  // Scalar part of the printed vector relation, with the 1/2 in front of
  // eta_a and with a unit coefficient.
  for (int half = 1; half >= 0; --half) {
    EquationSet v;
    for (int a = 1; a <= 3; ++a) {
      std::vector<Expr> t2;
      for (int b = 1; b <= 3; ++b) {
        t2.push_back(f.A[b - 1] * d(Q.xi[a - 1], b));
        t2.push_back(-Q.xi[b - 1] * d(f.A[a - 1], b));
      }
      t2.push_back(alpha * f.A[a - 1]);
      Expr c = half ? Expr(Rational(1, 2)) : Expr(1);
      v.add("a=" + std::to_string(a), d(Q.xi[a - 1], 0) + c * d(Q.eta0, a) - cfg.e * sum(t2));
    }
    run.printed(half ? "first-order-scalar/half" : "first-order-scalar/unit", v);
  }

  ZeroTestOptions ho = run.next_opt();
  run.report.hop_incompatible = !is_zero(sum(hop), ho).zero;
  return run.report;
}

DeterminingReport check_determining(const SymmetryCandidate& Q, const PotentialConfig& cfg, Variant variant,
                                    const ZeroTestOptions& opt) {
  return variant == Variant::SP ? check_determining_sp(Q, cfg, opt) : check_determining_qrse(Q, cfg, variant, opt);
}

nlohmann::json witness_json(const Witness& w) {
  nlohmann::json j;
  j["t"] = w.point.t;
  j["x"] = {w.point.x[0], w.point.x[1], w.point.x[2]};
  j["params"] = w.params;
  j["value"] = {w.value.real(), w.value.imag()};
  j["scale"] = w.scale;
  j["trial"] = w.trial;
  return j;
}

namespace {

nlohmann::json equations_json(const std::vector<EquationResult>& eqs) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& e : eqs) {
    nlohmann::json r{{"name", e.name}, {"pass", e.pass}};
    if (!e.pass) {
      r["component"] = e.component;
      if (e.witness) r["witness"] = witness_json(*e.witness);
    }
    j.push_back(r);
  }
  return j;
}

}  // namespace

nlohmann::json VerificationReport::to_json() const {
  nlohmann::json j;
  j["id"] = id;
  j["variant"] = variant_name(variant);
  j["generator"] = generator;
  j["verdict"] = symmetry ? "symmetry" : "non-symmetry";
  j["residual"] = symmetry ? std::string("0") : to_string(residual);
  if (witness) j["witness"] = witness_json(*witness);
  if (!failing_term.empty()) j["failing_term"] = failing_term;
  if (determining) {
    j["determining"] = {{"equations", equations_json(determining->equations)},
                        {"as_printed", equations_json(determining->as_printed)},
                        {"all_pass", determining->all_pass}};
    if (determining->hop_incompatible) j["determining"]["hop_incompatible"] = *determining->hop_incompatible;
  }
  j["routes_agree"] = routes_agree;
  return j;
}

std::string VerificationReport::to_text() const {
  std::ostringstream os;
  os << id << " [" << variant_name(variant) << "] " << generator << ": " << (symmetry ? "symmetry" : "non-symmetry");
  if (!failing_term.empty()) os << " (term " << failing_term << ")";
  if (!routes_agree) os << " ROUTE MISMATCH";
  if (determining) {
    std::string failed;
    for (const auto& e : determining->equations) {
      if (!e.pass) failed += (failed.empty() ? "" : ",") + e.name;
    }
    if (!failed.empty()) os << " failing: " << failed;
  }
  os << " " << static_cast<int>(millis) << " ms";
  return os.str();
}

VerificationReport verify_candidate(const std::string& id, const DiffOp& Q, const PotentialConfig& cfg, Variant variant,
                                    const ZeroTestOptions& opt) {
  auto start = std::chrono::steady_clock::now();
  VerificationReport r;
  r.id = id;
  r.variant = variant;
  DiffOp H = build_hamiltonian(cfg, variant);
  r.residual = symmetry_residual(Q, H);
  OpVerdict v = is_zero_op(r.residual, opt);
  r.symmetry = v.zero;
  if (!v.zero) {
    r.witness = v.coefficients.witness;
    if (v.term) r.failing_term = monomial_name(*v.term);
  }
  if (auto cand = SymmetryCandidate::from_op(Q)) {
    r.determining = check_determining(*cand, cfg, variant, opt);
    r.routes_agree = r.determining->all_pass == r.symmetry;
  }
  r.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace spinsym
