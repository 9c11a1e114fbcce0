#include "spinsym/expr.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace spinsym {

namespace {

uint64_t mix(uint64_t h, uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  h ^= h >> 31;
  h *= 0xbf58476d1ce4e5b9ULL;
  h ^= h >> 29;
  return h;
}

uint64_t hash_string(const std::string& s) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) h = (h ^ c) * 1099511628211ULL;
  return h;
}

uint64_t compute_hash(const Node& n) {
  uint64_t h = mix(static_cast<uint64_t>(n.kind) + 1, n.tag);
  if (n.kind == Kind::Const) {
    h = mix(h, static_cast<uint64_t>(n.value.re.num()));
    h = mix(h, static_cast<uint64_t>(n.value.re.den()));
    h = mix(h, static_cast<uint64_t>(n.value.im.num()));
    h = mix(h, static_cast<uint64_t>(n.value.im.den()));
  }
  if (!n.name.empty()) h = mix(h, hash_string(n.name));
  for (uint8_t k : n.index) h = mix(h, k + 17u);
  for (const Node* k : n.kids) h = mix(h, k->hash);
  return h;
}

struct NodeHash {
  size_t operator()(const Node* n) const { return n->hash; }
};

struct NodeEq {
  bool operator()(const Node* a, const Node* b) const {
    return a->kind == b->kind && a->tag == b->tag && a->value == b->value && a->name == b->name &&
           a->index == b->index && a->kids == b->kids;
  }
};

struct Arena {
  std::mutex mu;
  std::deque<Node> nodes;
  std::unordered_set<const Node*, NodeHash, NodeEq> table;
};

Arena& arena() {
  static Arena* a = new Arena();
  return *a;
}

const Node* intern(Node n) {
  n.hash = compute_hash(n);
  Arena& a = arena();
  std::lock_guard<std::mutex> lock(a.mu);
  auto it = a.table.find(&n);
  if (it != a.table.end()) return *it;
  n.id = static_cast<uint32_t>(a.nodes.size());
  a.nodes.push_back(std::move(n));
  const Node* p = &a.nodes.back();
  a.table.insert(p);
  return p;
}

Node leaf(Kind k, uint8_t tag = 0) {
  Node n;
  n.kind = k;
  n.tag = tag;
  return n;
}

void absorb_kids(Node& n) {
  for (const Node* k : n.kids) {
    n.deps |= k->deps;
    n.has_opaque = n.has_opaque || k->has_opaque;
  }
}

const Node* make_const(const CRational& c) {
  Node n = leaf(Kind::Const);
  n.value = c;
  return intern(std::move(n));
}

uint8_t atom_deps(Atom a) {
  if (a == Atom::R || a == Atom::Theta) return 0b1110;
  return 0b0110;
}

const Node* make_node(Kind k, uint8_t tag, std::vector<const Node*> kids) {
  Node n = leaf(k, tag);
  n.kids = std::move(kids);
  absorb_kids(n);
  return intern(std::move(n));
}

int compare_nodes(const Node* a, const Node* b);

int compare_rational(const Rational& a, const Rational& b) {
  if (a == b) return 0;
  return a < b ? -1 : 1;
}

int compare_nodes(const Node* a, const Node* b) {
  if (a == b) return 0;
  if (a->kind != b->kind) return a->kind < b->kind ? -1 : 1;
  if (a->hash != b->hash) return a->hash < b->hash ? -1 : 1;
  if (a->tag != b->tag) return a->tag < b->tag ? -1 : 1;
  if (int c = compare_rational(a->value.re, b->value.re)) return c;
  if (int c = compare_rational(a->value.im, b->value.im)) return c;
  if (a->name != b->name) return a->name < b->name ? -1 : 1;
  if (a->index != b->index) return a->index < b->index ? -1 : 1;
  if (a->kids.size() != b->kids.size()) return a->kids.size() < b->kids.size() ? -1 : 1;
  for (size_t k = 0; k < a->kids.size(); ++k) {
    if (int c = compare_nodes(a->kids[k], b->kids[k])) return c;
  }
  return 0;
}

bool less_node(const Node* a, const Node* b) { return compare_nodes(a, b) < 0; }

const Node* zero_node() {
  static const Node* z = make_const(CRational(0));
  return z;
}
const Node* one_node() {
  static const Node* o = make_const(CRational(1));
  return o;
}

// Splits a term into (numeric coefficient, remaining monomial).
std::pair<CRational, const Node*> split_coeff(const Node* t) {
  if (t->kind == Kind::Const) return {t->value, one_node()};
  if (t->kind == Kind::Mul && t->kids[0]->kind == Kind::Const) {
    std::vector<const Node*> rest(t->kids.begin() + 1, t->kids.end());
    const Node* r = rest.size() == 1 ? rest[0] : make_node(Kind::Mul, 0, rest);
    return {t->kids[0]->value, r};
  }
  return {CRational(1), t};
}

// c * m for a monomial m that carries no numeric factor.
const Node* scale_monomial(const CRational& c, const Node* m) {
  if (c.is_zero()) return zero_node();
  if (m == one_node()) return make_const(c);
  if (c.is_one()) return m;
  std::vector<const Node*> kids{make_const(c)};
  if (m->kind == Kind::Mul) {
    kids.insert(kids.end(), m->kids.begin(), m->kids.end());
  } else {
    kids.push_back(m);
  }
  return make_node(Kind::Mul, 0, std::move(kids));
}

bool is_square_of(const Node* f, Fn fn, const Node** arg) {
  if (f->kind != Kind::Pow) return false;
  const Node* b = f->kids[0];
  const Node* e = f->kids[1];
  if (b->kind != Kind::Func || static_cast<Fn>(b->tag) != fn) return false;
  if (e->kind != Kind::Const || !(e->value == CRational(2))) return false;
  *arg = b->kids[0];
  return true;
}

// Rebuilds monomial m with the factor at position k replaced (nullptr drops it).
const Node* replace_factor(const Node* m, size_t k, const Node* with) {
  if (m->kind != Kind::Mul) return with ? with : one_node();
  std::vector<Expr> fs;
  for (size_t j = 0; j < m->kids.size(); ++j) {
    if (j == k) {
      if (with) fs.emplace_back(with);
    } else {
      fs.emplace_back(m->kids[j]);
    }
  }
  return product(fs).node();
}

struct TermMap {
  std::unordered_map<const Node*, size_t> pos;
  std::vector<std::pair<const Node*, CRational>> items;

  void add(const Node* m, const CRational& c) {
    auto it = pos.find(m);
    if (it == pos.end()) {
      pos.emplace(m, items.size());
      items.emplace_back(m, c);
    } else {
      items[it->second].second = items[it->second].second + c;
    }
  }
};

// sin(u)^2 M and cos(u)^2 M with equal coefficients collapse to M.
bool pythagoras_pass(TermMap& tm) {
  for (size_t i = 0; i < tm.items.size(); ++i) {
    auto [m, c] = tm.items[i];
    if (c.is_zero()) continue;
    std::vector<const Node*> factors = m->kind == Kind::Mul ? m->kids : std::vector<const Node*>{m};
    for (size_t k = 0; k < factors.size(); ++k) {
      const Node* u = nullptr;
      if (!is_square_of(factors[k], Fn::Sin, &u)) continue;
      const Node* cos2 = pow(cos(Expr(u)), Expr(2)).node();
      const Node* partner = replace_factor(m, k, cos2);
      auto it = tm.pos.find(partner);
      if (it == tm.pos.end()) continue;
      CRational& pc = tm.items[it->second].second;
      if (pc.is_zero()) continue;
      CRational common = c;
      if (!(pc == c)) continue;
      tm.items[i].second = CRational(0);
      pc = CRational(0);
      tm.add(replace_factor(m, k, nullptr), common);
      return true;
    }
  }
  return false;
}

const Node* build_sum(std::vector<const Node*> terms) {
  std::vector<const Node*> flat;
  flat.reserve(terms.size());
  for (const Node* t : terms) {
    if (t->kind == Kind::Add) {
      flat.insert(flat.end(), t->kids.begin(), t->kids.end());
    } else {
      flat.push_back(t);
    }
  }
  TermMap tm;
  for (const Node* t : flat) {
    auto [c, m] = split_coeff(t);
    tm.add(m, c);
  }
  bool has_sin2 = false;
  for (auto& [m, c] : tm.items) {
    const Node* u;
    if (m->kind == Kind::Pow && is_square_of(m, Fn::Sin, &u)) has_sin2 = true;
    if (m->kind == Kind::Mul) {
      for (const Node* f : m->kids) {
        if (is_square_of(f, Fn::Sin, &u)) has_sin2 = true;
      }
    }
  }
  if (has_sin2) {
    while (pythagoras_pass(tm)) {
    }
  }
  std::vector<const Node*> out;
  for (auto& [m, c] : tm.items) {
    if (c.is_zero()) continue;
    out.push_back(scale_monomial(c, m));
  }
  if (out.empty()) return zero_node();
  if (out.size() == 1) return out[0];
  std::sort(out.begin(), out.end(), less_node);
  return make_node(Kind::Add, 0, std::move(out));
}

const Node* build_pow(const Node* b, const Node* e);

const Node* build_product(std::vector<const Node*> factors) {
  CRational coeff(1);
  std::vector<const Node*> flat;
  std::vector<const Node*> stack(factors.rbegin(), factors.rend());
  while (!stack.empty()) {
    const Node* f = stack.back();
    stack.pop_back();
    if (f->kind == Kind::Mul) {
      for (auto it = f->kids.rbegin(); it != f->kids.rend(); ++it) stack.push_back(*it);
    } else if (f->kind == Kind::Const) {
      coeff = coeff * f->value;
    } else {
      flat.push_back(f);
    }
  }
  if (coeff.is_zero()) return zero_node();

  std::vector<const Node*> exp_args;
  std::unordered_map<const Node*, size_t> base_pos;
  std::vector<std::pair<const Node*, std::vector<const Node*>>> bases;
  for (const Node* f : flat) {
    if (f->kind == Kind::Func && static_cast<Fn>(f->tag) == Fn::Exp) {
      exp_args.push_back(f->kids[0]);
      continue;
    }
    const Node* b = f;
    const Node* e = one_node();
    if (f->kind == Kind::Pow) {
      b = f->kids[0];
      e = f->kids[1];
    }
    auto it = base_pos.find(b);
    if (it == base_pos.end()) {
      base_pos.emplace(b, bases.size());
      bases.push_back({b, {e}});
    } else {
      bases[it->second].second.push_back(e);
    }
  }

  std::vector<const Node*> out;
  auto push_factor = [&](const Node* p) {
    if (p->kind == Kind::Const) {
      coeff = coeff * p->value;
    } else if (p->kind == Kind::Mul) {
      for (const Node* k : p->kids) {
        if (k->kind == Kind::Const) {
          coeff = coeff * k->value;
        } else {
          out.push_back(k);
        }
      }
    } else {
      out.push_back(p);
    }
  };
  for (auto& [b, es] : bases) {
    const Node* e = es.size() == 1 ? es[0] : build_sum(es);
    push_factor(es.size() == 1 && e == one_node() ? b : build_pow(b, e));
  }
  if (!exp_args.empty()) {
    const Node* arg = exp_args.size() == 1 ? exp_args[0] : build_sum(exp_args);
    push_factor(exp(Expr(arg)).node());
  }
  if (coeff.is_zero()) return zero_node();
  if (out.empty()) return make_const(coeff);
  if (out.size() == 1 && out[0]->kind == Kind::Add && !coeff.is_one()) {
    std::vector<const Node*> terms;
    for (const Node* t : out[0]->kids) terms.push_back(build_product({make_const(coeff), t}));
    return build_sum(std::move(terms));
  }
  std::sort(out.begin(), out.end(), less_node);
  if (!coeff.is_one()) out.insert(out.begin(), make_const(coeff));
  if (out.size() == 1) return out[0];
  return make_node(Kind::Mul, 0, std::move(out));
}

// Exact k-th root of a non-negative integer, if one exists.
bool exact_root(int64_t v, int64_t k, int64_t* root) {
  if (v < 0) return false;
  if (v == 0 || v == 1) {
    *root = v;
    return true;
  }
  double guess = std::pow(static_cast<double>(v), 1.0 / static_cast<double>(k));
  for (int64_t c = std::max<int64_t>(1, static_cast<int64_t>(guess) - 1); c <= static_cast<int64_t>(guess) + 1; ++c) {
    __int128 p = 1;
    for (int64_t j = 0; j < k && p <= v; ++j) p *= c;
    if (p == v) {
      *root = c;
      return true;
    }
  }
  return false;
}

const Node* build_pow(const Node* b, const Node* e) {
  if (e->kind == Kind::Const && e->value.is_zero()) return one_node();
  if (e == one_node()) return b;
  bool int_exp = e->kind == Kind::Const && e->value.is_real() && e->value.re.is_integer();
  if (b->kind == Kind::Const) {
    if (b->value.is_one()) return one_node();
    if (b->value.is_zero()) {
      if (e->kind == Kind::Const && e->value.is_real() && e->value.re.sign() > 0) return zero_node();
      throw std::domain_error("zero raised to a non-positive power");
    }
    if (int_exp) {
      int64_t n = e->value.re.num();
      if (n > -64 && n < 64) return make_const(b->value.pow(n));
    }
    if (e->kind == Kind::Const && e->value.is_real() && b->value.is_real() && b->value.re.sign() > 0) {
      // Exact rational roots such as 4^(1/2) = 2.
      Rational q = e->value.re;
      int64_t num_root, den_root;
      if (q.den() <= 12 && std::abs(q.num()) < 64 && exact_root(b->value.re.num(), q.den(), &num_root) &&
          exact_root(b->value.re.den(), q.den(), &den_root)) {
        return make_const(CRational(Rational(num_root, den_root)).pow(q.num()));
      }
    }
  }
  if (int_exp) {
    if (b->kind == Kind::Pow) {
      return build_pow(b->kids[0], (Expr(b->kids[1]) * Expr(e)).node());
    }
    if (b->kind == Kind::Mul) {
      std::vector<const Node*> fs;
      for (const Node* k : b->kids) fs.push_back(build_pow(k, e));
      return build_product(fs);
    }
    if (b->kind == Kind::Func && static_cast<Fn>(b->tag) == Fn::Exp) {
      return exp(Expr(b->kids[0]) * Expr(e)).node();
    }
  }
  return make_node(Kind::Pow, 0, {b, e});
}

}  // namespace

bool canonical_less(const Node* a, const Node* b) { return less_node(a, b); }

Expr::Expr() : node_(zero_node()) {}
Expr::Expr(int v) : node_(make_const(CRational(static_cast<int64_t>(v)))) {}
Expr::Expr(int64_t v) : node_(make_const(CRational(v))) {}
Expr::Expr(Rational v) : node_(make_const(CRational(v))) {}
Expr::Expr(CRational v) : node_(make_const(v)) {}

bool Expr::is_zero() const { return node_ == zero_node(); }
bool Expr::is_one() const { return node_ == one_node(); }

Expr Expr::var(Var v) {
  Node n = leaf(Kind::Sym, static_cast<uint8_t>(v));
  n.deps = static_cast<uint8_t>(1u << static_cast<int>(v));
  return Expr(intern(std::move(n)));
}

Expr Expr::x(int a) {
  if (a < 1 || a > 3) throw std::invalid_argument("coordinate index must be 1..3");
  return var(static_cast<Var>(a));
}

Expr Expr::param(const std::string& name) {
  Node n = leaf(Kind::Param);
  n.name = name;
  return Expr(intern(std::move(n)));
}

Expr Expr::atom(Atom a) {
  Node n = leaf(Kind::Derived, static_cast<uint8_t>(a));
  n.deps = atom_deps(a);
  return Expr(intern(std::move(n)));
}

Expr Expr::pi() { return Expr(intern(leaf(Kind::Pi))); }

Expr Expr::imag_unit() { return Expr(CRational(Rational(0), Rational(1))); }

Expr Expr::opaque(const std::string& name, std::vector<uint8_t> index, std::vector<Expr> args) {
  if (index.size() != args.size()) throw std::invalid_argument("opaque derivative index size must equal arity");
  Node n = leaf(Kind::Opaque);
  n.name = name;
  n.index = std::move(index);
  for (const Expr& a : args) n.kids.push_back(a.node());
  absorb_kids(n);
  n.has_opaque = true;
  return Expr(intern(std::move(n)));
}

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  return Expr(build_sum({a.node(), b.node()}));
}

Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_zero() || b.is_zero()) return Expr();
  if (a.is_one()) return b;
  if (b.is_one()) return a;
  return Expr(build_product({a.node(), b.node()}));
}

Expr operator/(const Expr& a, const Expr& b) {
  if (b.is_zero()) throw std::domain_error("division by the zero expression");
  return a * pow(b, Expr(-1));
}

Expr Expr::operator-() const {
  if (is_const()) return Expr(-constant());
  return Expr(build_product({make_const(CRational(-1)), node_}));
}

Expr sum(const std::vector<Expr>& terms) {
  std::vector<const Node*> ns;
  ns.reserve(terms.size());
  for (const Expr& t : terms) {
    if (!t.is_zero()) ns.push_back(t.node());
  }
  if (ns.empty()) return Expr();
  if (ns.size() == 1) return Expr(ns[0]);
  return Expr(build_sum(std::move(ns)));
}

Expr product(const std::vector<Expr>& factors) {
  std::vector<const Node*> ns;
  ns.reserve(factors.size());
  for (const Expr& f : factors) {
    if (f.is_zero()) return Expr();
    if (!f.is_one()) ns.push_back(f.node());
  }
  if (ns.empty()) return Expr(1);
  if (ns.size() == 1) return Expr(ns[0]);
  return Expr(build_product(std::move(ns)));
}

Expr pow(const Expr& base, const Expr& exponent) { return Expr(build_pow(base.node(), exponent.node())); }

Expr apply_fn(Fn f, const Expr& u) {
  const Node* n = u.node();
  switch (f) {
    case Fn::Exp:
      if (u.is_zero()) return Expr(1);
      if (n->kind == Kind::Func && static_cast<Fn>(n->tag) == Fn::Ln) return Expr(n->kids[0]);
      break;
    case Fn::Ln:
      if (u.is_one()) return Expr();
      if (n->kind == Kind::Func && static_cast<Fn>(n->tag) == Fn::Exp) return Expr(n->kids[0]);
      break;
    case Fn::Sin:
    case Fn::Atan:
      if (u.is_zero()) return Expr();
      break;
    case Fn::Cos:
      if (u.is_zero()) return Expr(1);
      break;
  }
  return Expr(make_node(Kind::Func, static_cast<uint8_t>(f), {n}));
}

Expr exp(const Expr& u) { return apply_fn(Fn::Exp, u); }
Expr ln(const Expr& u) { return apply_fn(Fn::Ln, u); }
Expr sin(const Expr& u) { return apply_fn(Fn::Sin, u); }
Expr cos(const Expr& u) { return apply_fn(Fn::Cos, u); }
Expr atan(const Expr& u) { return apply_fn(Fn::Atan, u); }
Expr sqrt(const Expr& u) { return pow(u, Expr(Rational(1, 2))); }

const char* fn_name(Fn f) {
  switch (f) {
    case Fn::Exp: return "exp";
    case Fn::Ln: return "ln";
    case Fn::Sin: return "sin";
    case Fn::Cos: return "cos";
    case Fn::Atan: return "arctan";
  }
  return "?";
}

const char* atom_name(Atom a) {
  switch (a) {
    case Atom::R: return "r";
    case Atom::Rt: return "rt";
    case Atom::Phi: return "phi";
    case Atom::Theta: return "theta";
    case Atom::Rho: return "rho";
  }
  return "?";
}

const char* var_name(Var v) {
  static const char* names[] = {"t", "x1", "x2", "x3", "u1", "u2", "u3", "u4"};
  return names[static_cast<int>(v)];
}

namespace {

template <class F>
Expr rebuild(const Expr& e, std::unordered_map<const Node*, Expr>& memo, F&& leaf_fn) {
  const Node* n = e.node();
  auto it = memo.find(n);
  if (it != memo.end()) return it->second;
  Expr out;
  if (auto r = leaf_fn(n)) {
    out = *r;
  } else {
    std::vector<Expr> kids;
    kids.reserve(n->kids.size());
    for (const Node* k : n->kids) kids.push_back(rebuild(Expr(k), memo, leaf_fn));
    switch (n->kind) {
      case Kind::Add: out = sum(kids); break;
      case Kind::Mul: out = product(kids); break;
      case Kind::Pow: out = pow(kids[0], kids[1]); break;
      case Kind::Func: out = apply_fn(static_cast<Fn>(n->tag), kids[0]); break;
      case Kind::Opaque: out = Expr::opaque(n->name, n->index, kids); break;
      default: out = e; break;
    }
  }
  memo.emplace(n, out);
  return out;
}

}  // namespace

Expr simplify(const Expr& e) {
  std::unordered_map<const Node*, Expr> memo;
  return rebuild(e, memo, [](const Node*) -> std::optional<Expr> { return std::nullopt; });
}

Expr substitute(const Expr& e, const std::map<const Node*, Expr>& repl) {
  std::unordered_map<const Node*, Expr> memo;
  return rebuild(e, memo, [&](const Node* n) -> std::optional<Expr> {
    auto it = repl.find(n);
    if (it != repl.end()) return it->second;
    return std::nullopt;
  });
}

Expr reflect(const Expr& e) {
  std::unordered_map<const Node*, Expr> memo;
  return rebuild(e, memo, [](const Node* n) -> std::optional<Expr> {
    if (n->kind == Kind::Sym && n->tag >= 1 && n->tag <= 3) return -Expr(n);
    if (n->kind == Kind::Derived && static_cast<Atom>(n->tag) == Atom::Theta) return Expr::pi() - Expr(n);
    if (n->kind == Kind::Derived && static_cast<Atom>(n->tag) == Atom::Phi) {
      // arctan(x2/x1) is invariant under x -> -x.
      return Expr(n);
    }
    return std::nullopt;
  });
}

Expr conj(const Expr& e) {
  std::unordered_map<const Node*, Expr> memo;
  return rebuild(e, memo, [](const Node* n) -> std::optional<Expr> {
    if (n->kind == Kind::Const) return Expr(n->value.conj());
    return std::nullopt;
  });
}

Expr expand_atoms(const Expr& e) {
  Expr x1 = Expr::x(1), x2 = Expr::x(2), x3 = Expr::x(3);
  Expr rt = sqrt(x1 * x1 + x2 * x2);
  std::map<const Node*, Expr> repl{
      {Expr::atom(Atom::R).node(), sqrt(x1 * x1 + x2 * x2 + x3 * x3)},
      {Expr::atom(Atom::Rt).node(), rt},
      {Expr::atom(Atom::Phi).node(), atan(x2 / x1)},
      {Expr::atom(Atom::Theta).node(), Expr::pi() / Expr(2) - atan(x3 / rt)},
      {Expr::atom(Atom::Rho).node(), ln(rt)},
  };
  return substitute(e, repl);
}

void collect_free_symbols(const Expr& e, FreeSymbols& out) {
  std::unordered_set<const Node*> seen;
  std::vector<const Node*> stack{e.node()};
  while (!stack.empty()) {
    const Node* n = stack.back();
    stack.pop_back();
    if (!seen.insert(n).second) continue;
    if (n->kind == Kind::Param) out.params.insert(n->name);
    if (n->kind == Kind::Opaque) {
      auto [it, inserted] = out.opaque.emplace(n->name, n->kids.size());
      if (!inserted && it->second != n->kids.size()) {
        throw std::invalid_argument("opaque function " + n->name + " used with inconsistent arity");
      }
    }
    for (const Node* k : n->kids) stack.push_back(k);
  }
}

FreeSymbols free_symbols(const Expr& e) {
  FreeSymbols out;
  collect_free_symbols(e, out);
  return out;
}

size_t dag_size(const Expr& e) {
  std::unordered_set<const Node*> seen;
  std::vector<const Node*> stack{e.node()};
  while (!stack.empty()) {
    const Node* n = stack.back();
    stack.pop_back();
    if (!seen.insert(n).second) continue;
    for (const Node* k : n->kids) stack.push_back(k);
  }
  return seen.size();
}

}  // namespace spinsym
