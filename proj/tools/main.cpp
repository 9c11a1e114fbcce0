#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "spinsym/catalog.h"
#include "spinsym/parse.h"
#include "spinsym/run.h"

using namespace spinsym;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kMismatch = 1;
constexpr int kUsage = 64;
constexpr int kInternal = 70;

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct Globals {
  std::string variant = "sp";
  uint64_t seed = kDefaultSeed;
  int trials = 64;
  double tol = 1e-9;
  std::string format = "text";
  bool expected = false;
  std::string catalog = SPINSYM_DATA_DIR "/catalog";
  unsigned threads = 0;

  Variant parsed_variant() const { return parse_variant(variant); }
  ZeroTestOptions zero_options() const {
    ZeroTestOptions o;
    o.seed = seed;
    o.trials = trials;
    o.tol = tol;
    return o;
  }
  bool json() const { return format == "json"; }
};

/// Emits a report; JSON output is wrapped in a versioned envelope.
class Output {
 public:
  Output(const Globals& g, std::string command) : g_(g), command_(std::move(command)) {}

  std::ostringstream& text() { return text_; }
  json& result() { return result_; }

  int finish(int code) {
    if (g_.json()) {
      json j;
      j["schema"] = "spinsym.report/1";
      j["command"] = command_;
      j["options"] = {{"variant", g_.variant}, {"seed", g_.seed},        {"trials", g_.trials},
                      {"tol", g_.tol},         {"expected", g_.expected}};
      j["result"] = result_;
      j["exit"] = code;
      std::cout << j.dump(2) << "\n";
    } else {
      std::cout << text_.str();
    }
    return code;
  }

 private:
  const Globals& g_;
  std::string command_;
  std::ostringstream text_;
  json result_;
};

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError(path + ": " + e.what());
  }
}

std::string verdict_word(bool symmetric) { return symmetric ? "symmetry" : "non-symmetry"; }

std::string claim_word(const std::optional<Expect>& c) {
  if (!c) return "-";
  return *c == Expect::Pass ? "symmetry" : "non-symmetry";
}

const CatalogEntry& select_entry(const Catalog& cat, int table, int row) {
  const CatalogEntry* e = cat.find(table, row);
  if (!e) throw UsageError("no catalog row T" + std::to_string(table) + "." + std::to_string(row));
  return *e;
}

/// In plain mode every verified generator of the primary reading must be a
/// symmetry; under --expected each must match its recorded verdict.
bool entry_ok(const EntryReport& r, bool expected) { return expected ? r.matches_expected() : r.verdict(); }

std::string entry_line(const EntryReport& r) {
  std::ostringstream os;
  os << r.id << " [" << variant_name(r.variant) << "] " << verdict_word(r.verdict()) << " (claim "
     << claim_word(r.claim) << ")";
  if (!r.matches_expected()) os << " UNEXPECTED";
  if (!r.routes_agree()) os << " ROUTE MISMATCH";
  return os.str();
}

int cmd_list(const Globals& g, int table) {
  Output out(g, "list");
  Catalog cat = load_catalog(g.catalog);
  out.result() = json::array();
  for (const auto& e : cat.entries) {
    if (table && e.table != table) continue;
    const Reading& rd = e.primary_reading();
    json j{{"id", e.id()}, {"reading", rd.name}, {"generators", json::array()}, {"claim", json::object()}};
    std::string names;
    for (const auto& gen : rd.generators) {
      j["generators"].push_back({{"name", gen.name}, {"op", gen.op}});
      names += (names.empty() ? "" : " ") + gen.name;
    }
    for (const auto& [v, c] : e.claim) j["claim"][variant_name(v)] = claim_word(c);
    out.result().push_back(j);
    out.text() << e.id() << " (" << rd.name << "): " << names << "\n";
  }
  return out.finish(kOk);
}

int cmd_verify_entry(const Globals& g, int table, int row) {
  Output out(g, "verify-entry");
  Catalog cat = load_catalog(g.catalog);
  const CatalogEntry& e = select_entry(cat, table, row);
  EntryReport r = verify_entry(e, g.parsed_variant(), g.zero_options());
  out.result() = r.to_json();
  out.text() << entry_line(r) << "\n";
  for (const auto& rd : r.readings) {
    for (const auto& go : rd.generators) out.text() << "  " << rd.name << " " << go.report.to_text() << "\n";
  }
  if (!r.routes_agree()) return out.finish(kInternal);
  return out.finish(entry_ok(r, g.expected) ? kOk : kMismatch);
}

int cmd_verify_all(const Globals& g, int table) {
  Output out(g, "verify-all");
  Catalog cat = load_catalog(g.catalog);
  if (table) {
    if (!cat.count(table)) throw UsageError("no catalog table " + std::to_string(table));
    std::erase_if(cat.entries, [&](const CatalogEntry& e) { return e.table != table; });
  }
  CatalogSummary s = verify_all(cat, g.parsed_variant(), g.zero_options(), g.threads);
  out.result() = s.to_json();
  bool ok = true;
  for (const auto& r : s.entries) {
    out.text() << entry_line(r) << "\n";
    ok = ok && entry_ok(r, g.expected);
  }
  out.text() << s.entries.size() << " rows, " << s.symmetric << " symmetric, " << s.claim_mismatches
             << " claim mismatches, " << s.entries.size() - s.matched << " unexpected, " << s.route_mismatches
             << " route mismatches\n";
  if (s.route_mismatches) return out.finish(kInternal);
  return out.finish(ok ? kOk : kMismatch);
}

int cmd_residual(const Globals& g, int table, int row, const std::string& generator, const std::string& potential,
                 const std::string& op) {
  Output out(g, "residual");
  Variant v = g.parsed_variant();
  out.result() = json::array();
  bool ok = true, routes = true;
  auto emit = [&](const VerificationReport& r, std::optional<bool> expected_pass) {
    json j = r.to_json();
    if (expected_pass) j["expected"] = verdict_word(*expected_pass);
    out.result().push_back(j);
    out.text() << r.to_text() << "\n  residual: " << j.at("residual").get<std::string>() << "\n";
    routes = routes && r.routes_agree;
    bool want = g.expected && expected_pass ? *expected_pass : true;
    ok = ok && r.symmetry == want;
  };
  if (!potential.empty()) {
    if (op.empty()) throw UsageError("--potential needs --op");
    PotentialConfig cfg = PotentialConfig::from_json(read_json(potential));
    ParseContext ctx = cfg.ctx;
    DiffOp Q = parse_generator(op, ctx);
    VerificationReport r = verify_candidate("custom", Q, cfg, v, g.zero_options());
    r.generator = op;
    emit(r, std::nullopt);
  } else {
    if (!table || !row) throw UsageError("residual needs --table and --row, or --potential and --op");
    Catalog cat = load_catalog(g.catalog);
    const CatalogEntry& e = select_entry(cat, table, row);
    if (!generator.empty()) {
      bool found = false;
      for (const auto& t : e.primary_reading().generators) found = found || t.name == generator;
      if (!found) throw UsageError("row " + e.id() + " has no generator " + generator);
    }
    EntryReport er = verify_entry(e, v, g.zero_options());
    for (const auto& go : er.readings.at(er.primary).generators) {
      if (!generator.empty() && go.spec.name != generator) continue;
      emit(go.report, go.expected_pass);
    }
  }
  if (!routes) return out.finish(kInternal);
  return out.finish(ok ? kOk : kMismatch);
}

int cmd_superintegrable(const Globals& g, const std::string& nu, const std::string& gg, const std::string& vecpot,
                        const std::string& exponent, const std::string& log_factor) {
  Output out(g, "superintegrable");
  SuperintegrableOptions so;
  ParseContext ctx;
  so.nu = parse_expr(nu, ctx);
  so.g = parse_expr(gg, ctx);
  so.vecpot = vecpot == "axial" ? VecPot::Axial : VecPot::Zero;
  if (!exponent.empty()) so.exponent = parse_expr(exponent, ctx);
  if (!log_factor.empty()) so.log_factor = parse_expr(log_factor, ctx);
  SuperintegrableReport r = verify_superintegrable(so, g.zero_options());
  out.result() = r.to_json();
  bool routes = true;
  for (const auto& [name, rep] : r.checks) {
    routes = routes && rep.routes_agree;
    bool claimed = r.claimed.count(name) > 0;
    out.text() << "[" << name << ", H] " << (rep.symmetry ? "= 0" : "!= 0") << " (claimed "
               << (claimed ? "= 0" : "!= 0") << ")" << (rep.symmetry == claimed ? "" : " MISMATCH") << "\n";
  }
  for (const auto& [name, ok] : r.relations) out.text() << name << ": " << (ok ? "holds" : "FAILS") << "\n";
  if (!routes) return out.finish(kInternal);
  return out.finish(r.matches_claim() ? kOk : kMismatch);
}

int cmd_closure(const Globals& g, const std::vector<std::string>& elements, const std::vector<std::string>& odd,
                const std::string& potential) {
  Output out(g, "closure");
  ParseContext ctx;
  if (!potential.empty()) ctx = PotentialConfig::from_json(read_json(potential)).ctx;
  std::vector<ClosureElement> els;
  for (const auto& spec : elements) {
    auto eq = spec.find('=');
    std::string name = eq == std::string::npos ? spec : spec.substr(0, eq);
    std::string text = eq == std::string::npos ? spec : spec.substr(eq + 1);
    if (name.empty()) throw UsageError("empty element name in '" + spec + "'");
    els.push_back({name, parse_generator(text, ctx), false});
  }
  for (const auto& n : odd) {
    auto it = std::find_if(els.begin(), els.end(), [&](const ClosureElement& e) { return e.name == n; });
    if (it == els.end()) throw UsageError("--odd names unknown element " + n);
    it->odd = true;
  }
  ClosureTable t = closure(els, g.zero_options());
  out.result() = t.to_json();
  for (const auto& rel : t.relations) out.text() << rel.text() << "\n";
  out.text() << (t.closed() ? "closed" : "not closed") << "\n";
  return out.finish(t.closed() ? kOk : kMismatch);
}

int cmd_gauge(const Globals& g, const std::string& potential, const std::string& phi_text) {
  Output out(g, "gauge");
  Variant v = g.parsed_variant();
  PotentialConfig cfg = PotentialConfig::from_json(read_json(potential));
  ParseContext ctx = cfg.ctx;
  Expr phi = parse_expr(phi_text, ctx);
  DiffOp transformed = gauge_transform(build_hamiltonian(cfg, v), phi);
  PotentialConfig shifted = gauge_shifted_config(cfg, phi);
  DiffOp rebuilt = build_hamiltonian(shifted, v);
  json res;
  res["shifted"] = shifted.to_json();
  if (v == Variant::H3) {
    // The p-form spin-orbit term adds a Pauli-like piece.
    Vec3 H = magnetic_field(cfg);
    Vec3 Hp = gauge_shifted_pauli_field(cfg, phi);
    rebuilt = rebuilt + DiffOp(PauliExpr::dot({cfg.g * (Hp[0] - H[0]), cfg.g * (Hp[1] - H[1]), cfg.g * (Hp[2] - H[2])}));
    res["pauli_field"] = {to_string(Hp[0]), to_string(Hp[1]), to_string(Hp[2])};
  }
  bool covariant = is_zero_op(transformed - rebuilt, g.zero_options()).zero;
  res["covariant"] = covariant;
  out.result() = res;
  out.text() << "shifted potential: " << shifted.to_json().dump() << "\n";
  if (res.contains("pauli_field")) out.text() << "Pauli field: " << res["pauli_field"].dump() << "\n";
  out.text() << "exp(-i phi) H exp(i phi) " << (covariant ? "matches" : "does not match")
             << " the shifted Hamiltonian\n";
  return out.finish(covariant ? kOk : kMismatch);
}

int cmd_evolve(const Globals& g, const std::string& config, const std::string& csv_path,
               const std::vector<std::string>& conserved, double budget) {
  RunConfig cfg = RunConfig::from_json(read_json(config));
  for (const auto& c : conserved) {
    bool found = std::any_of(cfg.track.begin(), cfg.track.end(), [&](const auto& t) { return t.first == c; });
    if (!found) throw UsageError("--conserved names untracked operator " + c);
  }
  RunResult r = run_conservation(cfg);
  std::string csv = r.trajectory.to_csv();
  if (csv_path.empty() || csv_path == "-") {
    std::cout << csv;
  } else {
    std::ofstream f(csv_path);
    if (!f) throw UsageError("cannot write " + csv_path);
    f << csv;
  }
  bool ok = !r.trajectory.boundary_contact || conserved.empty();
  for (const auto& d : r.drift) {
    if (std::find(conserved.begin(), conserved.end(), d.name) != conserved.end()) ok = ok && d.drift <= budget;
  }
  // The CSV owns stdout when no file is given, so the report goes to stderr.
  std::ostream& rep = csv_path.empty() || csv_path == "-" ? std::cerr : std::cout;
  if (g.json()) {
    json j = r.to_json();
    j["budget"] = budget;
    j["conserved"] = conserved;
    rep << j.dump(2) << "\n";
  } else {
    for (const auto& d : r.drift) rep << d.name << ": drift " << d.drift << " (scale " << d.scale << ")\n";
    rep << "max norm drift per step " << r.trajectory.max_step_norm_drift << ", "
        << (r.trajectory.boundary_contact ? "boundary contact" : "no boundary contact") << ", " << r.seconds
        << " s\n";
  }
  return ok ? kOk : kMismatch;
}

uint64_t default_seed() {
  const char* s = std::getenv("SPINSYM_SEED");
  if (!s || !*s) return kDefaultSeed;
  char* end = nullptr;
  unsigned long long v = std::strtoull(s, &end, 10);
  if (*end) throw UsageError("SPINSYM_SEED is not an unsigned integer");
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  Globals g;
  try {
    g.seed = default_seed();
  } catch (const std::exception& e) {
    std::cerr << "spinsym: " << e.what() << "\n";
    return kUsage;
  }

  CLI::App app{"Symmetry verification for spin-1/2 Hamiltonians"};
  app.require_subcommand(1);
  app.fallthrough();
  app.option_defaults()->always_capture_default();
  app.add_option("--variant", g.variant, "Hamiltonian variant")
      ->check(CLI::IsMember({"sp", "qrse-h3", "qrse-h3a"}));
  app.add_option("--seed", g.seed, "Master seed (default from SPINSYM_SEED)");
  app.add_option("--trials", g.trials, "Random trials per zero test")->check(CLI::PositiveNumber);
  app.add_option("--tol", g.tol, "Relative zero tolerance")->check(CLI::PositiveNumber);
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"text", "json"}));
  app.add_flag("--expected", g.expected, "Count recorded expected failures as passes");
  app.add_option("--catalog", g.catalog, "Catalog directory")->check(CLI::ExistingDirectory);
  app.add_option("--threads", g.threads, "Worker threads (0 = hardware)");

  int table = 0, row = 0;
  std::string generator, potential, op;

  auto* list = app.add_subcommand("list", "List catalog rows");
  list->add_option("--table", table)->check(CLI::Range(1, 4));

  auto* ve = app.add_subcommand("verify-entry", "Verify one catalog row");
  ve->add_option("--table", table)->required()->check(CLI::Range(1, 4));
  ve->add_option("--row", row)->required()->check(CLI::PositiveNumber);

  auto* va = app.add_subcommand("verify-all", "Verify every catalog row");
  va->add_option("--table", table)->check(CLI::Range(1, 4));

  auto* res = app.add_subcommand("residual", "Print the residual [Q, L] - alpha L");
  res->add_option("--table", table)->check(CLI::Range(1, 4));
  res->add_option("--row", row)->check(CLI::PositiveNumber);
  res->add_option("--generator", generator, "Generator name within the row");
  res->add_option("--potential", potential, "Potential JSON file")->check(CLI::ExistingFile);
  res->add_option("--op", op, "Generator expression");

  std::string nu = "1", gg = "1", vecpot = "zero", exponent, log_factor;
  auto* si = app.add_subcommand("superintegrable", "Integrals of the logarithmic potential");
  si->add_option("--nu", nu);
  si->add_option("--g", gg);
  si->add_option("--vecpot", vecpot)->check(CLI::IsMember({"zero", "axial"}));
  si->add_option("--exponent", exponent, "Radial exponent k of the axial vector potential");
  si->add_option("--log-factor", log_factor, "c in A0 = c ln r");

  std::vector<std::string> elements, odd;
  auto* cl = app.add_subcommand("closure", "Bracket table of a generator set");
  cl->add_option("--element", elements, "NAME=OP, repeatable")->required();
  cl->add_option("--odd", odd, "Elements bracketed with anticommutators among themselves");
  cl->add_option("--potential", potential, "Potential JSON file declaring symbols")->check(CLI::ExistingFile);

  std::string phi;
  auto* ga = app.add_subcommand("gauge", "Check a gauge transformation");
  ga->add_option("--potential", potential)->required()->check(CLI::ExistingFile);
  ga->add_option("--phi", phi, "Gauge function")->required();

  std::string config, csv;
  std::vector<std::string> conserved;
  double budget = 1e-4;
  auto* ev = app.add_subcommand("evolve", "Numeric conservation run");
  ev->add_option("--config", config, "Run JSON file")->required()->check(CLI::ExistingFile);
  ev->add_option("--csv", csv, "Trajectory CSV path ('-' for stdout)");
  ev->add_option("--conserved", conserved, "Tracked operators whose drift must stay within the budget");
  ev->add_option("--budget", budget, "Drift budget");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*list) return cmd_list(g, table);
    if (*ve) return cmd_verify_entry(g, table, row);
    if (*va) return cmd_verify_all(g, table);
    if (*res) return cmd_residual(g, table, row, generator, potential, op);
    if (*si) return cmd_superintegrable(g, nu, gg, vecpot, exponent, log_factor);
    if (*cl) return cmd_closure(g, elements, odd, potential);
    if (*ga) return cmd_gauge(g, potential, phi);
    if (*ev) return cmd_evolve(g, config, csv, conserved, budget);
  } catch (const UsageError& e) {
    std::cerr << "spinsym: " << e.what() << "\n";
    return kUsage;
  } catch (const ParseError& e) {
    std::cerr << "spinsym: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "spinsym: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "spinsym: internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kInternal;
}
