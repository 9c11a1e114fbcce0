#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "spinsym/catalog.h"

using namespace spinsym;

namespace {

const Catalog& catalog() {
  static const Catalog cat = load_catalog();
  return cat;
}

DiffOp gen(const std::string& text) {
  ParseContext ctx;
  return parse_generator(text, ctx);
}

bool zero(const DiffOp& q) { return is_zero_op(q).zero; }

PotentialConfig free_config() {
  PotentialConfig cfg;
  cfg.F = cfg.G = cfg.A0 = cfg.S = Expr(0);
  return cfg;
}

bool symmetric(const std::string& text, const PotentialConfig& cfg, Variant v = Variant::SP) {
  return verify_candidate("probe", gen(text), cfg, v).symmetry;
}

const GeneratorOutcome& outcome(const EntryReport& r, const std::string& name) {
  for (const auto& g : r.readings.at(r.primary).generators) {
    if (g.spec.name == name) return g;
  }
  FAIL("no generator " << name << " in " << r.id);
  throw std::logic_error("unreachable");
}

std::set<std::string> ids(const CatalogSummary& s, bool (*pick)(const EntryReport&)) {
  std::set<std::string> out;
  for (const auto& e : s.entries) {
    if (pick(e)) out.insert(e.id);
  }
  return out;
}

}  // namespace

TEST_CASE("catalog completeness") {
  const auto& cat = catalog();
  CHECK(cat.count(1) == 14);
  CHECK(cat.count(2) == 8);
  CHECK(cat.count(3) == 17);
  CHECK(cat.count(4) == 13);
  CHECK(cat.entries.size() == 52);
  std::set<std::string> seen;
  for (const auto& e : cat.entries) CHECK(seen.insert(e.id()).second);
  REQUIRE(cat.find(3, 17) != nullptr);
  CHECK(cat.find(3, 18) == nullptr);
  CHECK(cat.titles.at(4) == "Pure electric field");
}

TEST_CASE("expected-verdict matrix is total") {
  for (const auto& e : catalog().entries) {
    CAPTURE(e.id());
    CHECK(e.claim.size() == 3);
    for (const auto& r : e.readings) {
      CHECK_FALSE(r.generators.empty());
      for (const auto& g : r.generators) CHECK(g.expect.size() == 3);
      CHECK_NOTHROW(r.config());
    }
    if (e.readings.size() > 1) {
      CHECK(e.primary == 1);
      CHECK(e.readings[1].name == "best-effort");
      CHECK_FALSE(e.readings[1].note.empty());
    }
  }
}

TEST_CASE("every template symbol resolves") {
  for (const auto& e : catalog().entries) {
    for (const auto& r : e.readings) {
      PotentialConfig cfg = r.config();
      for (const auto& g : r.generators) {
        CAPTURE(e.id());
        CAPTURE(g.op);
        CHECK_NOTHROW(parse_generator(g.op, cfg.ctx));
      }
    }
  }
}

TEST_CASE("free-particle sanity of the generator library") {
  PotentialConfig cfg = free_config();
  for (const char* name : {"P0", "P1", "P2", "P3", "G1", "G2", "G3", "L1", "L2", "L3", "J1", "J2", "J3", "D", "A"}) {
    CAPTURE(name);
    CHECK(symmetric(name, cfg));
  }
  CHECK(symmetric("s2", cfg));
  CHECK_FALSE(symmetric("Bp(1, omega)", cfg));
  CHECK_FALSE(symmetric("x1", cfg));
}

TEST_CASE("repulsive oscillator admits the exponential generators") {
  PotentialConfig cfg = free_config();
  cfg.A0 = parse_expr("-omega^2*r^2/2", cfg.ctx);
  for (const char* name : {"Bp(1, omega)", "Bm(1, omega)", "Bp(3, omega)", "Bm(2, omega)", "Ap(omega)", "J3"}) {
    CAPTURE(name);
    CHECK(symmetric(name, cfg));
  }
  CHECK_FALSE(symmetric("Bp(1, 2*omega)", cfg));
  CHECK_FALSE(symmetric("G1", cfg));
}

TEST_CASE("library generators match their definitions") {
  CHECK(zero(gen("G2") - gen("t*P2 - x2")));
  CHECK(zero(gen("J1") - gen("L1 + s1/2")));
  CHECK(zero(gen("A") - gen("t*D - t^2*P0 + r^2/2")));
  CHECK(zero(gen("Bp(3, omega)") - gen("exp(omega*t)*(P3 - omega*x3)")));
  CHECK(zero(gen("Bm(3, omega)") - gen("exp(-omega*t)*(P3 + omega*x3)")));
  CHECK(zero(gen("Qhat") - gen("(s1*x1 + s2*x2 + s3*x3)/r")));
  CHECK(zero(gen("Qtil") - gen("s1*L1 + s2*L2 + s3*L3 + 1")));
  CHECK_THROWS(gen("B(1, omega)"));
  CHECK_THROWS(gen("Bp(4, omega)"));
}

TEST_CASE("constant field row under SP") {
  const auto* e = catalog().find(1, 13);
  REQUIRE(e);
  EntryReport r = verify_entry(*e, Variant::SP);
  CHECK(r.verdict());
  for (const char* name : {"P1 + alpha*x2", "P2 - alpha*x1", "J3", "Q", "Qt"}) {
    CAPTURE(name);
    CHECK(outcome(r, name).report.symmetry);
  }
  CHECK(r.routes_agree());
}

TEST_CASE("triple oscillator admits six exponential generators") {
  const auto* e = catalog().find(4, 8);
  REQUIRE(e);
  EntryReport r = verify_entry(*e, Variant::SP);
  REQUIRE(r.readings.at(r.primary).generators.size() == 6);
  CHECK(r.verdict());
}

TEST_CASE("dilatation row loses its generators under qrse-h3") {
  const auto* e = catalog().find(2, 5);
  REQUIRE(e);
  EntryReport r = verify_entry(*e, Variant::H3);
  CHECK_FALSE(r.verdict());
  CHECK_FALSE(outcome(r, "D").report.symmetry);
  CHECK_FALSE(outcome(r, "A").report.symmetry);
  CHECK(r.matches_claim());
  CHECK(r.matches_expected());
}

TEST_CASE("catalog regression: verdicts match the frozen expectations") {
  for (Variant v : {Variant::SP, Variant::H3, Variant::H3a}) {
    CAPTURE(variant_name(v));
    CatalogSummary s = verify_all(catalog(), v);
    REQUIRE(s.entries.size() == 52);
    for (const auto& e : s.entries) {
      CAPTURE(e.id);
      CHECK(e.matches_expected());
      CHECK(e.routes_agree());
      for (const auto& rd : e.readings) {
        for (const auto& g : rd.generators) CHECK(g.matches_expected());
      }
    }
    CHECK(s.all_matched());
  }
}

TEST_CASE("SP rows that contradict their table") {
  CatalogSummary s = verify_all(catalog(), Variant::SP);
  CHECK(s.symmetric == 48);
  std::set<std::string> want{"T2.7", "T2.8", "T3.3", "T3.4"};
  CHECK(ids(s, [](const EntryReport& e) { return !e.matches_claim(); }) == want);
  CHECK(s.claim_mismatches == want.size());
}

TEST_CASE("qrse-h3 keeps only rows without boosts across the field") {
  CatalogSummary s = verify_all(catalog(), Variant::H3);
  std::set<std::string> pass = ids(s, [](const EntryReport& e) { return e.verdict(); });
  std::set<std::string> want{"T1.1", "T1.2", "T1.3", "T1.4", "T1.7", "T1.14", "T4.4", "T4.13"};
  CHECK(pass == want);
}

TEST_CASE("every printed reading that differs from the best effort is recorded") {
  size_t differ = 0;
  for (const auto& e : catalog().entries) {
    if (e.readings.size() < 2) continue;
    EntryReport r = verify_entry(e, Variant::SP);
    if (r.readings[0].all_symmetric() != r.readings[1].all_symmetric()) ++differ;
    CHECK(r.readings[1].matches_expected());
  }
  CHECK(differ > 10);
}

TEST_CASE("theorem: orbital momentum alone fails exactly where the Pauli term acts") {
  auto checks = theorem_check(catalog());
  REQUIRE(checks.size() > 10);
  size_t active = 0;
  for (const auto& c : checks) {
    CAPTURE(c.id);
    CAPTURE(c.generator);
    CHECK(c.consistent());
    if (c.pauli_active) ++active;
  }
  CHECK(active > 0);
  CHECK(active < checks.size());
}

TEST_CASE("su(2) closure of total angular momentum") {
  ClosureTable t = closure({{"J1", gen("J1")}, {"J2", gen("J2")}, {"J3", gen("J3")}});
  REQUIRE(t.closed());
  REQUIRE(t.relations.size() == 3);
  for (const auto& rel : t.relations) {
    CAPTURE(rel.text());
    CHECK_FALSE(rel.anti);
    int nonzero = 0;
    for (const auto& [name, c] : rel.coefficients) {
      if (std::abs(c) > 1e-12) {
        ++nonzero;
        CHECK(std::abs(std::abs(c.imag()) - 1.0) < 1e-12);
        CHECK(std::abs(c.real()) < 1e-12);
      }
    }
    CHECK(nonzero == 1);
  }
  const auto& r12 = t.relations[0];
  CHECK(r12.left == "J1");
  CHECK(r12.right == "J2");
  CHECK(r12.coefficients.at("J3") == std::complex<double>(0, 1));
}

TEST_CASE("superalgebra of the log potential") {
  DiffOp qhat = gen("Qhat"), qtil = gen("Qtil");
  CHECK(zero(anticommutator(qhat, qtil)));
  CHECK(zero(compose(qhat, qhat) - DiffOp(Expr(1))));
  DiffOp j2 = compose(gen("J1"), gen("J1")) + compose(gen("J2"), gen("J2")) + compose(gen("J3"), gen("J3"));
  CHECK(zero(compose(qtil, qtil) - j2 - DiffOp(Expr(Rational(1, 4)))));
  for (const char* j : {"J1", "J2", "J3"}) {
    CHECK(zero(commutator(gen(j), qhat)));
    CHECK(zero(commutator(gen(j), qtil)));
  }
  CHECK(zero(commutator(gen("QP"), qhat)));
  CHECK_FALSE(zero(commutator(gen("Qtil"), gen("s3"))));

  ClosureTable t = closure({{"Qhat", qhat, true}, {"Qtil", qtil, true}, {"J1", gen("J1")}, {"J2", gen("J2")},
                            {"J3", gen("J3")}, {"J^2", j2}});
  CHECK(t.closed());
  bool saw_anti = false;
  for (const auto& rel : t.relations) {
    if (rel.left == "Qhat" && rel.right == "Qtil") {
      saw_anti = true;
      CHECK(rel.anti);
      for (const auto& [name, c] : rel.coefficients) CHECK(std::abs(c) < 1e-12);
    }
    if (rel.left == "Qhat" && rel.right == "Qhat") CHECK(rel.coefficients.at("1") == std::complex<double>(2, 0));
  }
  CHECK(saw_anti);
}

TEST_CASE("closure reports a non-closing set") {
  ClosureTable t = closure({{"P1", gen("P1")}, {"L3", gen("L3")}});
  CHECK_FALSE(t.closed());
  nlohmann::json j = t.to_json();
  CHECK(j.at("closed") == false);
}

TEST_CASE("superintegrable system without vector potential") {
  SuperintegrableOptions so;
  SuperintegrableReport rep = verify_superintegrable(so);
  REQUIRE(rep.checks.size() == 6);
  for (const auto& [name, r] : rep.checks) {
    CAPTURE(name);
    CHECK(r.symmetry);
  }
  REQUIRE(rep.relations.size() == 4);
  for (const auto& [name, ok] : rep.relations) {
    CAPTURE(name);
    CHECK(ok);
  }
  CHECK(rep.matches_claim());
  CHECK(rep.to_json().at("matches_claim") == true);
}

TEST_CASE("axial vector potential at the printed exponent breaks Qhat") {
  SuperintegrableOptions so;
  so.vecpot = VecPot::Axial;
  SuperintegrableReport rep = verify_superintegrable(so);
  std::map<std::string, bool> got;
  for (const auto& [name, r] : rep.checks) got[name] = r.symmetry;
  CHECK_FALSE(got.at("Qhat"));
  CHECK(got.at("J3"));
  CHECK_FALSE(got.at("J1"));
  CHECK(rep.claimed == std::set<std::string>{"Qhat", "J3"});
  CHECK_FALSE(rep.matches_claim());
}

TEST_CASE("axial vector potential keeps Qhat and J3 at exponent 2 + 1/(2g)") {
  // [s.x/r, H] picks up i (1 + 2g (2 - k)) s.A / r from the kinetic and Pauli terms.
  for (auto [g, nu] : std::vector<std::pair<Rational, Rational>>{{1, 1}, {Rational(1, 2), 1}, {2, Rational(1, 3)}}) {
    SuperintegrableOptions so;
    so.vecpot = VecPot::Axial;
    so.g = Expr(g);
    so.nu = Expr(nu);
    so.exponent = Expr(2) + Expr(1) / (Expr(2) * Expr(g));
    SuperintegrableReport rep = verify_superintegrable(so);
    for (const auto& [name, r] : rep.checks) {
      CAPTURE(name);
      CHECK(r.symmetry == (name == "Qhat" || name == "J3"));
      if (name == "J1") CHECK(r.witness.has_value());
    }
  }
}

TEST_CASE("superintegrable control with the wrong log factor") {
  SuperintegrableOptions so;
  so.log_factor = Expr(1);
  so.nu = Expr(1);
  SuperintegrableReport rep = verify_superintegrable(so);
  for (const auto& [name, r] : rep.checks) {
    if (name == "Qhat") CHECK_FALSE(r.symmetry);
    if (name == "J3") CHECK(r.symmetry);
  }
}

TEST_CASE("superintegrable system for other couplings") {
  for (int k = 1; k <= 3; ++k) {
    SuperintegrableOptions so;
    so.nu = Expr(Rational(k, 2));
    SuperintegrableReport rep = verify_superintegrable(so);
    for (const auto& [name, r] : rep.checks) {
      CAPTURE(name);
      CHECK(r.symmetry);
    }
  }
}

TEST_CASE("verify_all is deterministic") {
  ZeroTestOptions opt;
  opt.seed = 99;
  std::string a = verify_all(catalog(), Variant::SP, opt).to_json().dump();
  std::string b = verify_all(catalog(), Variant::SP, opt, 1).to_json().dump();
  CHECK(a == b);
  nlohmann::json j = nlohmann::json::parse(a);
  CHECK(j.at("schema") == "spinsym.summary/1");
  CHECK(j.at("entries").size() == 52);
}

TEST_CASE("Jacobi identity on catalog generators") {
  std::vector<DiffOp> ops;
  for (const auto& e : catalog().entries) {
    const Reading& r = e.primary_reading();
    PotentialConfig cfg = r.config();
    for (const auto& g : r.generators) ops.push_back(parse_generator(g.op, cfg.ctx));
  }
  REQUIRE(ops.size() > 100);
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<size_t> pick(0, ops.size() - 1);
  for (int k = 0; k < 50; ++k) {
    const DiffOp &a = ops[pick(rng)], &b = ops[pick(rng)], &c = ops[pick(rng)];
    DiffOp j = commutator(a, commutator(b, c)) + commutator(b, commutator(c, a)) + commutator(c, commutator(a, b));
    CHECK(zero(j));
  }
}

TEST_CASE("degree bound on catalog generators") {
  std::vector<DiffOp> ops;
  for (const auto& e : catalog().entries) {
    const Reading& r = e.primary_reading();
    PotentialConfig cfg = r.config();
    for (const auto& g : r.generators) {
      DiffOp q = parse_generator(g.op, cfg.ctx);
      if (SymmetryCandidate::from_op(q)) ops.push_back(q);
    }
  }
  REQUIRE(ops.size() > 100);
  for (size_t i = 0; i < ops.size(); i += 7) {
    for (size_t j = 0; j < ops.size(); j += 5) {
      DiffOp c = commutator(ops[i], ops[j]);
      CHECK(c.order() <= std::max(0, ops[i].order() + ops[j].order() - 1));
    }
  }
}

TEST_CASE("catalog loader rejects malformed tables") {
  CHECK_THROWS(load_catalog_files({SPINSYM_DATA_DIR "/does-not-exist.json"}));
  CHECK_THROWS(load_catalog("/nonexistent-dir"));
}
