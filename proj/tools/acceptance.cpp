// Acceptance report: one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "spinsym/catalog.h"
#include "spinsym/run.h"

using namespace spinsym;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : ",") + x;
  return s.empty() ? "none" : s;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(3);
  os << x;
  return os.str();
}

struct Context {
  Catalog catalog;
  ZeroTestOptions opt;
  std::map<Variant, CatalogSummary> summaries;
  std::map<Variant, double> seconds;
  std::string data_dir;
};

Outcome sp_suite(Context& c) {
  const CatalogSummary& s = c.summaries.at(Variant::SP);
  std::vector<std::string> failing;
  for (const auto& e : s.entries) {
    if (!e.verdict()) failing.push_back(e.id);
  }
  auto theorem = theorem_check(c.catalog, c.opt);
  size_t inconsistent = std::count_if(theorem.begin(), theorem.end(), [](const auto& t) { return !t.consistent(); });
  Outcome o;
  o.pass = failing.empty() && s.entries.size() == 52 && inconsistent == 0;
  o.detail = std::to_string(s.symmetric) + "/" + std::to_string(s.entries.size()) + " rows symmetric (failing " +
             join(failing) + "); L for J replacement inconsistent in " + std::to_string(inconsistent) + "/" +
             std::to_string(theorem.size()) + " generators; suite " + fmt(c.seconds.at(Variant::SP)) + " s";
  o.pass = o.pass && c.seconds.at(Variant::SP) <= 300;
  return o;
}

Outcome constant_field(Context& c) {
  PotentialConfig cfg = PotentialConfig::from_json({{"G", "-c1*rt^2/4"}});
  auto check = [&](const std::string& text) {
    ParseContext ctx = cfg.ctx;
    return verify_candidate(text, parse_generator(text, ctx), cfg, Variant::SP, c.opt);
  };
  VerificationReport q = check("Q(c1, c2)"), qt = check("Qt"), off = check("Q(201*c1/200, c2)");
  Outcome o;
  o.pass = q.symmetry && qt.symmetry && !off.symmetry && off.witness.has_value();
  o.detail = std::string("Q ") + (q.symmetry ? "passes" : "fails") + ", Qt " + (qt.symmetry ? "passes" : "fails") +
             ", frequency 2.01 g " + (off.symmetry ? "passes" : "fails");
  if (off.witness) o.detail += " (witness t=" + fmt(off.witness->point.t) + ", term " + off.failing_term + ")";
  return o;
}

Outcome qrse_matrix(Context& c) {
  auto count = [&](Variant v, std::set<int> tables) {
    size_t sym = 0, n = 0;
    for (const auto& e : c.summaries.at(v).entries) {
      int t = std::stoi(e.id.substr(1, e.id.find('.') - 1));
      if (!tables.count(t)) continue;
      ++n;
      sym += e.verdict();
    }
    return std::pair{sym, n};
  };
  auto [t1, n1] = count(Variant::H3, {1});
  auto [t23, n23] = count(Variant::H3, {2, 3});
  auto [t24, n24] = count(Variant::H3a, {2, 3, 4});
  Outcome o;
  o.pass = t1 == n1 && t23 == 0 && t24 == n24;
  o.detail = "qrse-h3 Table 1 " + std::to_string(t1) + "/" + std::to_string(n1) + " pass; qrse-h3 Tables 2-3 " +
             std::to_string(n23 - t23) + "/" + std::to_string(n23) + " fail; qrse-h3a Tables 2-4 " +
             std::to_string(t24) + "/" + std::to_string(n24) + " pass";
  return o;
}

Outcome superintegrable(Context& c) {
  auto t0 = std::chrono::steady_clock::now();
  SuperintegrableReport zero = verify_superintegrable({}, c.opt);
  SuperintegrableOptions ax;
  ax.vecpot = VecPot::Axial;
  SuperintegrableReport axial = verify_superintegrable(ax, c.opt);
  double secs = seconds_since(t0);
  double slowest = 0;
  std::vector<std::string> survivors;
  for (const auto& r : {&zero, &axial}) {
    for (const auto& [name, v] : r->checks) slowest = std::max(slowest, v.millis / 1000);
  }
  for (const auto& [name, v] : axial.checks) {
    if (v.symmetry) survivors.push_back(name);
  }
  bool zero_ok = zero.matches_claim();
  Outcome o;
  o.pass = zero_ok && axial.matches_claim() && slowest <= 10;
  o.detail = std::string("A = 0: ") + (zero_ok ? "all integrals and relations hold" : "mismatch") +
             "; axial A at k = 1 + nu + 1/g: survivors " + join(survivors) + " (claimed Qhat,J3); slowest check " +
             fmt(slowest) + " s, total " + fmt(secs) + " s";
  return o;
}

Outcome routes(Context& c) {
  size_t mismatches = 0, checked = 0;
  for (const auto& [v, s] : c.summaries) {
    mismatches += s.route_mismatches;
    checked += s.entries.size();
  }
  Outcome o;
  o.pass = mismatches == 0 && checked == 3 * c.catalog.entries.size();
  o.detail = std::to_string(mismatches) + " discrepancies over " + std::to_string(checked) + " row verifications";
  return o;
}

Outcome numeric(Context& c) {
  struct Run {
    std::string file;
    RunResult result;
    double drift(const std::string& name) const {
      for (const auto& d : result.drift) {
        if (d.name == name) return d.drift;
      }
      throw std::runtime_error("untracked " + name);
    }
  };
  std::vector<Run> runs(3);
  runs[0].file = "j3.json";
  runs[1].file = "qhat.json";
  runs[2].file = "qhat_control.json";
  bool ok = true;
  double slowest = 0;
  for (auto& r : runs) {
    RunConfig cfg = RunConfig::load(c.data_dir + "/runs/" + r.file);
    ok = ok && cfg.grid.n == 48 && cfg.spec.steps >= 200;
    r.result = run_conservation(cfg);
    ok = ok && !r.result.trajectory.boundary_contact;
    slowest = std::max(slowest, r.result.seconds);
  }
  double j3 = runs[0].drift("J3"), l3 = runs[0].drift("L3");
  double qhat = runs[1].drift("Qhat"), broken = runs[2].drift("Qhat");
  Outcome o;
  o.pass = ok && j3 <= 1e-4 && qhat <= 1e-4 && l3 >= 10 * j3 && broken >= 10 * qhat && slowest <= 300;
  o.detail = "J3 drift " + fmt(j3) + " (L3 control " + fmt(l3) + "), Qhat drift " + fmt(qhat) +
             " (perturbed potential " + fmt(broken) + "), slowest run " + fmt(slowest) + " s";
  return o;
}

Outcome oracle(Context&) {
  ParseContext ctx;
  auto ex = [&](const std::string& s) { return parse_expr(s, ctx); };
  NumericEnv env;
  env.params = {{"g", 1}, {"e", 1}, {"nu", 1}, {"mu", 1}, {"q", 0}};
  StencilSpec st{2, Boundary::Dirichlet};
  DiffOp lap = DiffOp(Expr(Rational(-1, 2))) *
               (DiffOp::d(1) * DiffOp::d(1) + DiffOp::d(2) * DiffOp::d(2) + DiffOp::d(3) * DiffOp::d(3));
  DiffOp sp = build_hamiltonian(
      PotentialConfig::from_json({{"F", "x3*exp(-rt^2/8)"}, {"G", "rt^2/10"}, {"A0", "(rt^2 + x3^2)/20"}}),
      Variant::SP);
  DiffOp h3 = build_hamiltonian(PotentialConfig::from_json({{"A0", "x1^2/10 + sin(x2)/4 + x3/5"}}), Variant::H3);
  std::string packet = "exp(-((x1-3)^2 + x2^2 + x3^2)/2)";
  double a = convergence_study(lap, {ex("exp(-r^2/2)"), Expr(0)}, {48, 64, 80}, 6, {}, st).order;
  double b = convergence_study(sp, {ex("(x1 + i*x2)*exp(-r^2/4)"), ex("exp(-((x1-1)^2 + x2^2 + x3^2)/3)")},
                               {48, 64, 80}, 7, env, st)
                 .order;
  double d = convergence_study(h3, {ex(packet), ex("0.5*i*" + packet)}, {48, 64, 80}, 7, env, st).order;
  Outcome o;
  o.pass = a >= 1.9 && b >= 1.9 && d >= 1.9;
  o.detail = "orders " + fmt(a) + " (Laplacian), " + fmt(b) + " (sp Hamiltonian), " + fmt(d) + " (qrse-h3 Hamiltonian)";
  return o;
}

Outcome determinism(Context& c) {
  ZeroTestOptions o7 = c.opt;
  o7.seed = 7;
  std::string first = verify_all(c.catalog, Variant::SP, o7).to_json().dump();
  std::string second = verify_all(c.catalog, Variant::SP, o7, 1).to_json().dump();
  Outcome o;
  o.pass = first == second;
  o.detail = std::string("verify-all JSON ") + (o.pass ? "byte-identical" : "differs") + " across runs (" +
             std::to_string(first.size()) + " bytes)";
  return o;
}

std::set<int> parse_set(const std::string& s) {
  std::set<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.insert(std::stoi(item));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria report"};
  std::string expect_fail;
  Context c;
  c.data_dir = SPINSYM_DATA_DIR;
  app.add_option("--expect-fail", expect_fail,
                 "Comma-separated criteria known to fail; exit 0 iff exactly these fail");
  app.add_option("--data", c.data_dir, "Data directory")->check(CLI::ExistingDirectory);
  CLI11_PARSE(app, argc, argv);

  std::set<int> known;
  try {
    known = parse_set(expect_fail);
  } catch (const std::exception&) {
    std::cerr << "acceptance: bad --expect-fail list\n";
    return 64;
  }

  std::set<int> failed;
  try {
    c.catalog = load_catalog(c.data_dir + "/catalog");
    for (Variant v : {Variant::SP, Variant::H3, Variant::H3a}) {
      auto t0 = std::chrono::steady_clock::now();
      c.summaries[v] = verify_all(c.catalog, v, c.opt);
      c.seconds[v] = seconds_since(t0);
    }
    std::vector<std::pair<const char*, Outcome (*)(Context&)>> criteria{
        {"SP classification suite", sp_suite},     {"constant-field matrix symmetries", constant_field},
        {"QRSE positive/negative matrix", qrse_matrix}, {"superintegrable system", superintegrable},
        {"route equivalence", routes},               {"numeric conservation", numeric},
        {"grid oracle agreement", oracle},          {"determinism", determinism}};
    for (size_t k = 0; k < criteria.size(); ++k) {
      auto t0 = std::chrono::steady_clock::now();
      Outcome o = criteria[k].second(c);
      if (!o.pass) failed.insert(static_cast<int>(k + 1));
      std::cout << "criterion " << k + 1 << " " << (o.pass ? "PASS" : "FAIL") << ": " << criteria[k].first << ": "
                << o.detail << " [" << fmt(seconds_since(t0)) << " s]" << std::endl;
    }
  } catch (const std::exception& e) {
    std::cerr << "acceptance: " << e.what() << "\n";
    return 70;
  }
  if (!expect_fail.empty() && failed != known) {
    std::vector<std::string> f;
    for (int k : failed) f.push_back(std::to_string(k));
    std::cerr << "acceptance: failing criteria " << join(f) << " differ from --expect-fail " << expect_fail << "\n";
  }
  return failed == known ? 0 : 1;
}
