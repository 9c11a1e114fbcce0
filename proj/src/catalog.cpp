#include "spinsym/catalog.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace spinsym {

namespace {

DiffOp P0() { return DiffOp(Expr::imag_unit()) * DiffOp::d(0); }
DiffOp Pa(int a) { return DiffOp(-Expr::imag_unit()) * DiffOp::d(a); }
DiffOp X(int a) { return DiffOp(Expr::x(a)); }

DiffOp La(int a) {
  int b = a % 3 + 1, c = b % 3 + 1;
  return X(b) * Pa(c) - X(c) * Pa(b);
}

DiffOp Sigma(int a) { return DiffOp(PauliExpr::sigma(a)); }

Expr r2() { return Expr::x(1) * Expr::x(1) + Expr::x(2) * Expr::x(2) + Expr::x(3) * Expr::x(3); }

DiffOp Dil() {
  DiffOp xp;
  for (int a = 1; a <= 3; ++a) xp += X(a) * Pa(a);
  return DiffOp(Expr(2) * Expr::t()) * P0() - xp + DiffOp(Expr(Rational(3, 2)) * Expr::imag_unit());
}

DiffOp SigmaDotL() {
  DiffOp out;
  for (int a = 1; a <= 3; ++a) out += Sigma(a) * La(a);
  return out;
}

int axis(const Expr& e) {
  if (e.is_const() && e.constant().is_real() && e.constant().re.is_integer()) {
    int64_t a = e.constant().re.num();
    if (a >= 1 && a <= 3) return static_cast<int>(a);
  }
  throw std::invalid_argument("generator axis must be 1, 2 or 3");
}


Expect parse_expect(const nlohmann::json& j) {
  std::string s = j.get<std::string>();
  if (s == "pass") return Expect::Pass;
  if (s == "fail") return Expect::Fail;
  throw std::invalid_argument("expected verdict must be pass or fail, got '" + s + "'");
}

std::map<Variant, Expect> parse_expect_map(const nlohmann::json& j, std::map<Variant, Expect> base) {
  for (const auto& [k, v] : j.items()) base[parse_variant(k)] = parse_expect(v);
  return base;
}

nlohmann::json merge(nlohmann::json base, const nlohmann::json& over) {
  for (const auto& [k, v] : over.items()) {
    if (v.is_null()) {
      base.erase(k);
    } else if (v.is_object() && base.contains(k) && base[k].is_object()) {
      base[k] = merge(base[k], v);
    } else {
      base[k] = v;
    }
  }
  return base;
}

std::vector<GeneratorTemplate> parse_generators(const nlohmann::json& arr, const std::map<Variant, Expect>& row_expect) {
  std::vector<GeneratorTemplate> out;
  for (const auto& g : arr) {
    GeneratorTemplate t;
    nlohmann::json obj = g.is_string() ? nlohmann::json{{"op", g}} : g;
    t.op = obj.at("op").get<std::string>();
    t.name = obj.value("name", t.op);
    t.expect = parse_expect_map(obj.value("expect", nlohmann::json::object()), row_expect);
    for (const auto& v : obj.value("only", nlohmann::json::array())) t.only.insert(parse_variant(v.get<std::string>()));
    t.note = obj.value("note", "");
    out.push_back(std::move(t));
  }
  return out;
}

void override_expect(std::vector<GeneratorTemplate>& gens, const nlohmann::json& j) {
  for (auto& g : gens) {
    if (j.contains("*")) g.expect = parse_expect_map(j.at("*"), g.expect);
    if (j.contains(g.name)) g.expect = parse_expect_map(j.at(g.name), g.expect);
  }
}

void parse_table(const nlohmann::json& j, Catalog& cat) {
  if (j.value("schema", "") != kCatalogSchema) {
    throw std::invalid_argument("unsupported catalog schema " + j.value("schema", std::string("<missing>")));
  }
  int table = j.at("table").get<int>();
  cat.titles[table] = j.value("title", "");
  nlohmann::json defaults = j.value("defaults", nlohmann::json::object());
  std::map<Variant, Expect> all_pass{
      {Variant::SP, Expect::Pass}, {Variant::H3, Expect::Pass}, {Variant::H3a, Expect::Pass}};
  std::map<Variant, Expect> table_claim = parse_expect_map(j.value("claim", nlohmann::json::object()), all_pass);
  for (const auto& row : j.at("rows")) {
    CatalogEntry e;
    e.table = table;
    e.row = row.at("row").get<int>();
    e.claim = parse_expect_map(row.value("claim", nlohmann::json::object()), table_claim);
    e.note = row.value("note", "");
    auto row_expect = parse_expect_map(row.value("expect", nlohmann::json::object()), all_pass);
    Reading base;
    base.name = "as-printed";
    base.potential = merge(defaults, row.at("potential"));
    base.generators = parse_generators(row.at("generators"), row_expect);
    e.readings.push_back(base);
    if (row.contains("best_effort")) {
      const auto& be = row.at("best_effort");
      Reading r;
      r.name = "best-effort";
      r.potential = merge(base.potential, be.value("potential", nlohmann::json::object()));
      auto be_expect = parse_expect_map(be.value("expect", nlohmann::json::object()), row_expect);
      r.generators = parse_generators(be.contains("generators") ? be.at("generators") : row.at("generators"), be_expect);
      r.note = be.value("note", "");
      e.readings.push_back(r);
      e.primary = 1;
    }
    override_expect(e.readings[0].generators, row.value("as_printed_expect", nlohmann::json::object()));
    cat.entries.push_back(std::move(e));
  }
}

}  // namespace

std::optional<DiffOp> library_generator(const std::string& name, const std::vector<Expr>& args) {
  const Expr t = Expr::t();
  auto nargs = [&](size_t n) {
    if (args.size() != n) throw std::invalid_argument("generator " + name + " takes " + std::to_string(n) + " argument(s)");
  };
  if (name.size() == 2 && name[1] >= '0' && name[1] <= '3') {
    int a = name[1] - '0';
    if (name[0] == 'P') {
      nargs(0);
      return a == 0 ? P0() : Pa(a);
    }
    if (a == 0) return std::nullopt;
    if (name[0] == 'L') return nargs(0), La(a);
    if (name[0] == 'J') return nargs(0), La(a) + DiffOp(Expr(Rational(1, 2))) * Sigma(a);
    if (name[0] == 'G') return nargs(0), DiffOp(t) * Pa(a) - X(a);
    return std::nullopt;
  }
  if (name == "D") return nargs(0), Dil();
  if (name == "A") {
    nargs(0);
    return DiffOp(t) * Dil() - DiffOp(t * t) * P0() + DiffOp(r2() / Expr(2));
  }
  if (name == "Ap") {
    nargs(1);
    const Expr& w = args[0];
    DiffOp sym;
    for (int a = 1; a <= 3; ++a) sym += X(a) * Pa(a) + Pa(a) * X(a);
    return DiffOp(exp(Expr(2) * w * t)) * (P0() + DiffOp(w * w * r2()) - DiffOp(w / Expr(2)) * sym);
  }
  if (name == "Bp" || name == "Bm") {
    nargs(2);
    int a = axis(args[0]);
    const Expr& w = args[1];
    Expr s = name == "Bp" ? Expr(1) : Expr(-1);
    return DiffOp(exp(s * w * t)) * (Pa(a) - DiffOp(s * w) * X(a));
  }
  if (name == "Q") {
    nargs(2);
    Expr phase = Expr(2) * Expr::param("g") * args[0] * t;
    return Sigma(1) * DiffOp(cos(phase)) + Sigma(2) * DiffOp(sin(phase)) + DiffOp(args[1]) * Sigma(3);
  }
  if (name == "Qt") return nargs(0), Sigma(3);
  if (name == "Qhat") {
    nargs(0);
    Expr r = Expr::atom(Atom::R);
    return DiffOp(PauliExpr::dot({Expr::x(1) / r, Expr::x(2) / r, Expr::x(3) / r}));
  }
  if (name == "Qtil") return nargs(0), SigmaDotL() + DiffOp(1);
  if (name == "QP") return nargs(0), (SigmaDotL() + DiffOp(1)) * DiffOp::parity();
  return std::nullopt;
}

OpResolver generator_resolver() {
  return [](const std::string& name, const std::vector<Expr>& args) { return library_generator(name, args); };
}

DiffOp parse_generator(const std::string& text, ParseContext& ctx) { return parse_op(text, ctx, generator_resolver()); }

PotentialConfig Reading::config() const { return PotentialConfig::from_json(potential); }

const CatalogEntry* Catalog::find(int table, int row) const {
  for (const auto& e : entries) {
    if (e.table == table && e.row == row) return &e;
  }
  return nullptr;
}

size_t Catalog::count(int table) const {
  return static_cast<size_t>(std::count_if(entries.begin(), entries.end(), [&](const auto& e) { return e.table == table; }));
}

Catalog load_catalog_files(const std::vector<std::string>& files) {
  Catalog cat;
  for (const auto& f : files) {
    std::ifstream in(f);
    if (!in) throw std::runtime_error("cannot open catalog file " + f);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw std::runtime_error(f + ": " + e.what());
    }
    parse_table(j, cat);
  }
  std::stable_sort(cat.entries.begin(), cat.entries.end(),
                   [](const auto& a, const auto& b) { return std::tie(a.table, a.row) < std::tie(b.table, b.row); });
  return cat;
}

Catalog load_catalog(const std::string& dir) {
  std::vector<std::string> files;
  for (const auto& p : std::filesystem::directory_iterator(dir)) {
    if (p.path().extension() == ".json") files.push_back(p.path().string());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw std::runtime_error("no catalog files in " + dir);
  return load_catalog_files(files);
}

bool ReadingOutcome::all_symmetric() const {
  return std::all_of(generators.begin(), generators.end(), [](const auto& g) { return g.report.symmetry; });
}

bool ReadingOutcome::matches_expected() const {
  return std::all_of(generators.begin(), generators.end(), [](const auto& g) { return g.matches_expected(); });
}

bool EntryReport::routes_agree() const {
  for (const auto& r : readings) {
    for (const auto& g : r.generators) {
      if (!g.report.routes_agree) return false;
    }
  }
  return true;
}

nlohmann::json EntryReport::to_json() const {
  nlohmann::json j;
  j["id"] = id;
  j["variant"] = variant_name(variant);
  j["verdict"] = verdict() ? "symmetry" : "non-symmetry";
  j["matches_expected"] = matches_expected();
  if (claim) {
    j["table_claim"] = *claim == Expect::Pass ? "symmetry" : "non-symmetry";
    j["matches_claim"] = matches_claim();
  }
  j["routes_agree"] = routes_agree();
  j["readings"] = nlohmann::json::array();
  for (size_t k = 0; k < readings.size(); ++k) {
    nlohmann::json rj{{"name", readings[k].name}, {"primary", k == primary}, {"generators", nlohmann::json::array()}};
    for (const auto& g : readings[k].generators) {
      nlohmann::json gj = g.report.to_json();
      gj["expected"] = g.expected_pass ? "symmetry" : "non-symmetry";
      gj["matches_expected"] = g.matches_expected();
      if (!g.spec.note.empty()) gj["note"] = g.spec.note;
      rj["generators"].push_back(gj);
    }
    j["readings"].push_back(rj);
  }
  return j;
}

EntryReport verify_entry(const CatalogEntry& entry, Variant variant, const ZeroTestOptions& opt) {
  EntryReport rep;
  rep.id = entry.id();
  rep.variant = variant;
  rep.primary = entry.primary;
  auto claim = entry.claim.find(variant);
  if (claim != entry.claim.end()) rep.claim = claim->second;
  uint64_t stream = 0;
  for (const auto& reading : entry.readings) {
    ReadingOutcome ro;
    ro.name = reading.name;
    PotentialConfig cfg = reading.config();
    for (const auto& g : reading.generators) {
      if (!g.applies(variant)) continue;
      ParseContext ctx = cfg.ctx;
      DiffOp Q = parse_generator(g.op, ctx);
      ZeroTestOptions o = opt;
      o.stream = opt.stream + 0x632be59bd9b4e019ULL * (++stream) + 0x100000001b3ULL * static_cast<uint64_t>(entry.table * 100 + entry.row);
      GeneratorOutcome go;
      go.spec = g;
      go.report = verify_candidate(entry.id() + ":" + g.name, Q, cfg, variant, o);
      go.report.generator = g.op;
      auto it = g.expect.find(variant);
      go.expected_pass = it == g.expect.end() || it->second == Expect::Pass;
      ro.generators.push_back(std::move(go));
    }
    rep.readings.push_back(std::move(ro));
  }
  return rep;
}

nlohmann::json CatalogSummary::to_json() const {
  nlohmann::json j;
  j["schema"] = "spinsym.summary/1";
  j["variant"] = variant_name(variant);
  j["rows"] = entries.size();
  j["symmetric_rows"] = symmetric;
  j["matched_rows"] = matched;
  j["route_mismatches"] = route_mismatches;
  j["claim_mismatches"] = claim_mismatches;
  j["entries"] = nlohmann::json::array();
  for (const auto& e : entries) j["entries"].push_back(e.to_json());
  return j;
}

CatalogSummary verify_all(const Catalog& catalog, Variant variant, const ZeroTestOptions& opt, unsigned threads) {
  CatalogSummary s;
  s.variant = variant;
  size_t n = catalog.entries.size();
  s.entries.resize(n);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<size_t>(threads, std::max<size_t>(n, 1)));
  std::atomic<size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  auto worker = [&] {
    for (size_t k = next++; k < n; k = next++) {
      try {
        s.entries[k] = verify_entry(catalog.entries[k], variant, opt);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < threads; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  for (const auto& e : s.entries) {
    s.symmetric += e.verdict();
    s.matched += e.matches_expected();
    s.route_mismatches += !e.routes_agree();
    s.claim_mismatches += !e.matches_claim();
  }
  return s;
}

std::vector<TheoremCheck> theorem_check(const Catalog& catalog, const ZeroTestOptions& opt) {
  static const std::regex jre("\\bJ([123])\\b");
  std::vector<TheoremCheck> out;
  for (const auto& entry : catalog.entries) {
    const Reading& reading = entry.primary_reading();
    PotentialConfig cfg = reading.config();
    FieldSet f = fields(cfg);
    PauliExpr pauli = PauliExpr::dot({cfg.g * f.H[0], cfg.g * f.H[1], cfg.g * f.H[2]});
    DiffOp H = build_hamiltonian(cfg, Variant::SP);
    for (const auto& g : reading.generators) {
      if (!g.applies(Variant::SP)) continue;
      std::smatch m;
      if (!std::regex_search(g.op, m, jre)) continue;
      TheoremCheck tc;
      tc.id = entry.id();
      tc.generator = g.op;
      tc.replaced = std::regex_replace(g.op, jre, "L$1");
      // Active when some replaced axis does not commute with the Pauli term.
      for (auto it = std::sregex_iterator(g.op.begin(), g.op.end(), jre); it != std::sregex_iterator(); ++it) {
        int a = (*it)[1].str()[0] - '0';
        if (!is_zero(commutator(PauliExpr::sigma(a), pauli), opt).zero) tc.pauli_active = true;
      }
      ParseContext ctx = cfg.ctx;
      DiffOp Q = parse_generator(tc.replaced, ctx);
      tc.replaced_symmetric = is_zero_op(symmetry_residual(Q, H), opt).zero;
      out.push_back(tc);
    }
  }
  return out;
}

// ---- closure ----

namespace {

using cvec = std::vector<cplx>;

// Least squares by normal equations with partial pivoting.
std::optional<cvec> least_squares(const std::vector<cvec>& cols, const cvec& rhs) {
  size_t n = cols.size(), m = rhs.size();
  std::vector<cvec> a(n, cvec(n + 1));
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      cplx s = 0;
      for (size_t k = 0; k < m; ++k) s += std::conj(cols[i][k]) * cols[j][k];
      a[i][j] = s;
    }
    cplx s = 0;
    for (size_t k = 0; k < m; ++k) s += std::conj(cols[i][k]) * rhs[k];
    a[i][n] = s;
  }
  for (size_t c = 0; c < n; ++c) {
    size_t p = c;
    for (size_t i = c + 1; i < n; ++i) {
      if (std::abs(a[i][c]) > std::abs(a[p][c])) p = i;
    }
    if (std::abs(a[p][c]) < 1e-12) return std::nullopt;
    std::swap(a[p], a[c]);
    for (size_t i = 0; i < n; ++i) {
      if (i == c) continue;
      cplx f = a[i][c] / a[c][c];
      for (size_t j = c; j <= n; ++j) a[i][j] -= f * a[c][j];
    }
  }
  cvec x(n);
  for (size_t i = 0; i < n; ++i) x[i] = a[i][n] / a[i][i];
  return x;
}

std::optional<Rational> snap(double v) {
  for (int64_t q = 1; q <= 48; ++q) {
    double p = std::round(v * static_cast<double>(q));
    if (std::abs(p / static_cast<double>(q) - v) < 1e-7) return Rational(static_cast<int64_t>(p), q);
  }
  return std::nullopt;
}

}  // namespace

std::string ClosureRelation::text() const {
  std::ostringstream os;
  os << (anti ? "{" : "[") << left << ", " << right << (anti ? "}" : "]") << " = ";
  if (!closed) {
    os << "(not in span)";
    return os.str();
  }
  bool first = true;
  for (const auto& [n, c] : coefficients) {
    if (!first) os << " + ";
    first = false;
    os << "(" << c.real();
    if (c.imag() != 0) os << (c.imag() < 0 ? "-" : "+") << std::abs(c.imag()) << "i";
    os << ")*" << n;
  }
  if (first) os << "0";
  return os.str();
}

bool ClosureTable::closed() const {
  return std::all_of(relations.begin(), relations.end(), [](const auto& r) { return r.closed; });
}

nlohmann::json ClosureTable::to_json() const {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& r : relations) {
    nlohmann::json c = nlohmann::json::object();
    for (const auto& [n, v] : r.coefficients) c[n] = {v.real(), v.imag()};
    j.push_back({{"left", r.left}, {"right", r.right}, {"bracket", r.anti ? "anticommutator" : "commutator"},
                 {"closed", r.closed}, {"coefficients", c}, {"text", r.text()}});
  }
  return {{"relations", j}, {"closed", closed()}};
}

ClosureTable closure(const std::vector<ClosureElement>& elements, const ZeroTestOptions& opt) {
  ClosureTable table;
  std::vector<ClosureElement> basis = elements;
  basis.push_back({"1", DiffOp(1), false});

  std::vector<Expr> txyz{Expr::t(), Expr::x(1), Expr::x(2), Expr::x(3)};
  Spinor psi{Expr::opaque("_cpsi1", {0, 0, 0, 0}, txyz), Expr::opaque("_cpsi2", {0, 0, 0, 0}, txyz)};
  std::mt19937_64 rng = trial_rng(opt.seed, opt.stream ^ 0xc105e, 0);
  EvalEnv env;
  env.functions["_cpsi1"] = PolyGauss::random(4, rng);
  env.functions["_cpsi2"] = PolyGauss::random(4, rng);
  for (const auto& [k, v] : opt.functions) env.functions[k] = v;
  std::vector<Point> pts;
  for (int k = 0; k < 12; ++k) pts.push_back(sample_point(rng));

  auto sample = [&](const DiffOp& q) {
    FreeSymbols fs;
    Spinor s = spinsym::apply(q, psi);
    collect_free_symbols(s[0], fs);
    collect_free_symbols(s[1], fs);
    for (const auto& p : fs.params) {
      if (!env.params.count(p)) {
        auto it = opt.params.find(p);
        env.params[p] = it != opt.params.end() ? it->second : sample_param(rng);
      }
    }
    cvec out;
    for (const auto& pt : pts) {
      env.point = pt;
      out.push_back(evaluate(s[0], env));
      out.push_back(evaluate(s[1], env));
    }
    return out;
  };
  std::vector<cvec> cols;
  for (const auto& b : basis) cols.push_back(sample(b.op));

  for (size_t i = 0; i < elements.size(); ++i) {
    for (size_t j = i; j < elements.size(); ++j) {
      ClosureRelation rel;
      rel.left = elements[i].name;
      rel.right = elements[j].name;
      rel.anti = elements[i].odd && elements[j].odd;
      if (!rel.anti && i == j) continue;
      DiffOp target = rel.anti ? anticommutator(elements[i].op, elements[j].op) : commutator(elements[i].op, elements[j].op);
      auto x = least_squares(cols, sample(target));
      if (x) {
        DiffOp rest = target;
        bool ok = true;
        for (size_t k = 0; k < basis.size() && ok; ++k) {
          auto re = snap((*x)[k].real()), im = snap((*x)[k].imag());
          if (!re || !im) {
            ok = false;
            break;
          }
          CRational c(*re, *im);
          if (c.re.is_zero() && c.im.is_zero()) continue;
          rest = rest - DiffOp(Expr(c)) * basis[k].op;
          rel.coefficients[basis[k].name] = {re->to_double(), im->to_double()};
        }
        ZeroTestOptions o = opt;
        o.stream = opt.stream + 977 * (i * elements.size() + j + 1);
        rel.closed = ok && is_zero_op(rest, o).zero;
      }
      if (!rel.closed) rel.coefficients.clear();
      table.relations.push_back(rel);
    }
  }
  return table;
}

// ---- superintegrable system ----

bool SuperintegrableReport::matches_claim() const {
  for (const auto& [name, r] : checks) {
    if (r.symmetry != (claimed.count(name) > 0)) return false;
  }
  for (const auto& [name, ok] : relations) {
    if (!ok) return false;
  }
  return true;
}

nlohmann::json SuperintegrableReport::to_json() const {
  nlohmann::json j;
  j["potential"] = config.to_json();
  j["checks"] = nlohmann::json::array();
  for (const auto& [name, r] : checks) {
    nlohmann::json c = r.to_json();
    c["name"] = name;
    c["claimed"] = claimed.count(name) ? "symmetry" : "non-symmetry";
    j["checks"].push_back(c);
  }
  j["relations"] = nlohmann::json::array();
  for (const auto& [name, ok] : relations) j["relations"].push_back({{"relation", name}, {"holds", ok}});
  j["matches_claim"] = matches_claim();
  return j;
}

SuperintegrableReport verify_superintegrable(const SuperintegrableOptions& so, const ZeroTestOptions& opt) {
  SuperintegrableReport rep;
  PotentialConfig& cfg = rep.config;
  cfg.nu = so.nu;
  cfg.g = so.g;
  cfg.e = so.e;
  Expr r = Expr::atom(Atom::R);
  Expr c = so.log_factor ? *so.log_factor : Expr(1) / (Expr(2) * so.nu);
  cfg.A0 = c * ln(r);
  cfg.F = Expr();
  cfg.S = Expr();
  cfg.G = Expr();
  if (so.vecpot == VecPot::Axial) {
    Expr k = so.exponent ? *so.exponent : Expr(1) + so.nu + Expr(1) / so.g;
    // A = (-x2, x1, 0)/r^k from G(r) with G' = -r^(1-k).
    if (k.is_const() && k.constant() == CRational(Rational(2))) {
      cfg.G = -ln(r);
    } else {
      cfg.G = pow(r, Expr(2) - k) / (k - Expr(2));
    }
  }
  static const char* names[] = {"Qhat", "J1", "J2", "J3", "Qtil", "QP"};
  if (so.vecpot == VecPot::Zero) {
    rep.claimed = {std::begin(names), std::end(names)};
  } else {
    rep.claimed = {"Qhat", "J3"};
  }
  uint64_t s = 0;
  for (const char* n : names) {
    ZeroTestOptions o = opt;
    o.stream = opt.stream + 0x5851f42d4c957f2dULL * (++s);
    DiffOp Q = *library_generator(n, {});
    VerificationReport v = verify_candidate(n, Q, cfg, Variant::H3, o);
    v.generator = n;
    rep.checks.emplace_back(n, v);
  }
  auto gen = [](const char* n) { return *library_generator(n, {}); };
  DiffOp qhat = gen("Qhat"), qtil = gen("Qtil");
  DiffOp j2 = compose(gen("J1"), gen("J1")) + compose(gen("J2"), gen("J2")) + compose(gen("J3"), gen("J3"));
  auto zero = [&](const DiffOp& q) {
    ZeroTestOptions o = opt;
    o.stream = opt.stream + 0x5851f42d4c957f2dULL * (++s);
    return is_zero_op(q, o).zero;
  };
  rep.relations.emplace_back("{Qhat, Qtil} = 0", zero(anticommutator(qhat, qtil)));
  rep.relations.emplace_back("Qhat^2 = 1", zero(compose(qhat, qhat) - DiffOp(Expr(1))));
  rep.relations.emplace_back("Qtil^2 = J^2 + 1/4", zero(compose(qtil, qtil) - j2 - DiffOp(Expr(Rational(1, 4)))));
  rep.relations.emplace_back("[QP, Qhat] = 0", zero(commutator(gen("QP"), qhat)));
  return rep;
}

}  // namespace spinsym
