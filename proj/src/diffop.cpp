#include "spinsym/diffop.h"

#include <unordered_map>

namespace spinsym {

namespace {

int spatial_order(const MultiIndex& m) { return m[1] + m[2] + m[3]; }

int64_t binomial(int n, int k) {
  int64_t r = 1;
  for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
  return r;
}

PauliExpr derivative(const PauliExpr& c, const MultiIndex& k) {
  PauliExpr out = c;
  for (int v = 0; v < 4; ++v) {
    for (int j = 0; j < k[v]; ++j) out = differentiate(out, static_cast<Var>(v));
  }
  return out;
}

Expr derivative(const Expr& c, const MultiIndex& k) {
  Expr out = c;
  for (int v = 0; v < 4; ++v) {
    for (int j = 0; j < k[v]; ++j) out = differentiate(out, static_cast<Var>(v));
  }
  return out;
}

struct Accumulator {
  std::map<TermKey, std::array<std::vector<Expr>, 4>> parts;

  void add(const TermKey& k, const PauliExpr& c) {
    auto& slot = parts[k];
    for (int j = 0; j < 4; ++j) {
      if (!c.c[j].is_zero()) slot[j].push_back(c.c[j]);
    }
  }

  DiffOp finish() const {
    DiffOp out;
    for (const auto& [k, cs] : parts) {
      PauliExpr c(sum(cs[0]), sum(cs[1]), sum(cs[2]), sum(cs[3]));
      if (!c.is_zero()) out += DiffOp::term(c, k.d, k.reflected);
    }
    return out;
  }
};

}  // namespace

DiffOp::DiffOp(const PauliExpr& c) {
  if (!c.is_zero()) terms_.emplace(TermKey{}, c);
}

DiffOp DiffOp::d(int k) {
  if (k < 0 || k > 3) throw std::invalid_argument("derivative index must be 0..3");
  MultiIndex m{};
  m[k] = 1;
  return term(PauliExpr(Expr(1)), m);
}

DiffOp DiffOp::parity() { return term(PauliExpr(Expr(1)), {}, true); }

DiffOp DiffOp::term(const PauliExpr& c, MultiIndex m, bool reflected) {
  DiffOp out;
  if (!c.is_zero()) out.terms_.emplace(TermKey{m, reflected}, c);
  return out;
}

int DiffOp::order() const {
  int o = 0;
  for (const auto& [k, c] : terms_) o = std::max(o, k.d[0] + k.d[1] + k.d[2] + k.d[3]);
  return o;
}

bool DiffOp::has_parity() const {
  for (const auto& [k, c] : terms_) {
    if (k.reflected) return true;
  }
  return false;
}

PauliExpr DiffOp::coeff(MultiIndex m, bool reflected) const {
  auto it = terms_.find(TermKey{m, reflected});
  return it == terms_.end() ? PauliExpr() : it->second;
}

DiffOp DiffOp::map(const std::function<PauliExpr(const PauliExpr&)>& f) const {
  DiffOp out;
  for (const auto& [k, c] : terms_) out.add_term(k, f(c));
  return out;
}

void DiffOp::add_term(const TermKey& k, const PauliExpr& c) {
  auto it = terms_.find(k);
  if (it == terms_.end()) {
    if (!c.is_zero()) terms_.emplace(k, c);
    return;
  }
  it->second += c;
  if (it->second.is_zero()) terms_.erase(it);
}

DiffOp operator+(const DiffOp& a, const DiffOp& b) {
  DiffOp out = a;
  for (const auto& [k, c] : b.terms_) out.add_term(k, c);
  return out;
}

DiffOp operator-(const DiffOp& a, const DiffOp& b) { return a + (-b); }

DiffOp DiffOp::operator-() const {
  return map([](const PauliExpr& c) { return -c; });
}

DiffOp operator*(const DiffOp& a, const DiffOp& b) { return compose(a, b); }

DiffOp compose(const DiffOp& a, const DiffOp& b) {
  Accumulator acc;
  for (const auto& [ka, ca] : a.terms()) {
    for (const auto& [kb, cb_raw] : b.terms()) {
      // Move the parity of the left factor through the right factor.
      PauliExpr cb = ka.reflected ? reflect(cb_raw) : cb_raw;
      if (ka.reflected && spatial_order(kb.d) % 2) cb = -cb;
      MultiIndex k{};
      // Leibniz over all k <= ka.d.
      while (true) {
        int64_t coef = 1;
        MultiIndex rest{};
        for (int v = 0; v < 4; ++v) {
          coef *= binomial(ka.d[v], k[v]);
          rest[v] = static_cast<uint8_t>(ka.d[v] - k[v] + kb.d[v]);
        }
        PauliExpr dc = derivative(cb, k);
        if (!dc.is_zero()) {
          PauliExpr prod = mul(ca, dc);
          if (coef != 1) prod = prod.map([coef](const Expr& e) { return Expr(coef) * e; });
          acc.add(TermKey{rest, ka.reflected != kb.reflected}, prod);
        }
        int v = 0;
        while (v < 4 && k[v] == ka.d[v]) k[v++] = 0;
        if (v == 4) break;
        ++k[v];
      }
    }
  }
  return acc.finish();
}

DiffOp commutator(const DiffOp& a, const DiffOp& b) { return compose(a, b) - compose(b, a); }

DiffOp anticommutator(const DiffOp& a, const DiffOp& b) { return compose(a, b) + compose(b, a); }

DiffOp adjoint(const DiffOp& a) {
  DiffOp out;
  for (const auto& [k, c] : a.terms()) {
    int sign = (k.d[0] + k.d[1] + k.d[2] + k.d[3]) % 2 ? -1 : 1;
    DiffOp left = DiffOp::term(PauliExpr(Expr(sign)), k.d);
    if (k.reflected) left = DiffOp::parity() * left;
    out += left * DiffOp(adjoint(c));
  }
  return out;
}

DiffOp simplify(const DiffOp& a) {
  return a.map([](const PauliExpr& c) { return c.map([](const Expr& e) { return simplify(e); }); });
}

Spinor apply(const PauliExpr& c, const Spinor& psi) {
  const Expr I = Expr::imag_unit();
  return {sum({(c.c[0] + c.c[3]) * psi[0], (c.c[1] - I * c.c[2]) * psi[1]}),
          sum({(c.c[1] + I * c.c[2]) * psi[0], (c.c[0] - c.c[3]) * psi[1]})};
}

Spinor apply(const DiffOp& q, const Spinor& psi) {
  std::array<std::vector<Expr>, 2> parts;
  Spinor refl;
  bool have_refl = false;
  for (const auto& [k, c] : q.terms()) {
    Spinor src = psi;
    if (k.reflected) {
      if (!have_refl) refl = {reflect(psi[0]), reflect(psi[1])};
      have_refl = true;
      src = refl;
    }
    Spinor d{derivative(src[0], k.d), derivative(src[1], k.d)};
    Spinor out = spinsym::apply(c, d);
    parts[0].push_back(out[0]);
    parts[1].push_back(out[1]);
  }
  return {sum(parts[0]), sum(parts[1])};
}

OpVerdict is_zero_op(const DiffOp& q, const ZeroTestOptions& opt) {
  OpVerdict v;
  std::vector<Expr> coeffs;
  std::vector<std::pair<TermKey, int>> origin;
  for (const auto& [k, c] : q.terms()) {
    for (int j = 0; j < 4; ++j) {
      coeffs.push_back(c.c[j]);
      origin.push_back({k, j});
    }
  }
  v.coefficients = all_zero(coeffs, opt);
  if (v.coefficients.witness) {
    v.term = origin[v.coefficients.witness->root].first;
    v.component = origin[v.coefficients.witness->root].second;
  }
  std::vector<Expr> txyz{Expr::t(), Expr::x(1), Expr::x(2), Expr::x(3)};
  Spinor psi{Expr::opaque("_psi1", {0, 0, 0, 0}, txyz), Expr::opaque("_psi2", {0, 0, 0, 0}, txyz)};
  Spinor out = spinsym::apply(q, psi);
  ZeroTestOptions o2 = opt;
  o2.stream = opt.stream ^ 0x5bd1e995ULL;
  v.applied = all_zero({out[0], out[1]}, o2);
  if (v.coefficients.zero != v.applied.zero) {
    throw InternalConsistencyError("operator zero test: coefficient and application checks disagree");
  }
  v.zero = v.coefficients.zero;
  return v;
}

std::string monomial_name(const TermKey& k) {
  static const char* names[] = {"dt", "d1", "d2", "d3"};
  std::string s;
  for (int v = 0; v < 4; ++v) {
    if (!k.d[v]) continue;
    if (!s.empty()) s += "*";
    s += names[v];
    if (k.d[v] > 1) s += "^" + std::to_string(k.d[v]);
  }
  if (k.reflected) s += s.empty() ? "Par" : "*Par";
  return s.empty() ? "1" : s;
}

std::string to_string(const DiffOp& q) {
  if (q.empty()) return "0";
  std::string out;
  for (const auto& [k, c] : q.terms()) {
    if (!out.empty()) out += " + ";
    std::string coeff = c.is_scalar() ? "(" + to_string(c.c[0]) + ")" : "(" + to_string(c) + ")";
    std::string mono = monomial_name(k);
    out += mono == "1" ? coeff : coeff + "*" + mono;
  }
  return out;
}

namespace {

struct Value {
  bool scalar = true;
  Expr s;
  DiffOp op;
  DiffOp as_op() const { return scalar ? DiffOp(s) : op; }
};

Value scalar_value(const Expr& e) { return Value{true, e, {}}; }
Value op_value(const DiffOp& d) { return Value{false, Expr(), d}; }

Value eval_value(const Ast& ast, const ParseContext& ctx, const OpResolver& resolver) {
  auto kid = [&](size_t k) { return eval_value(*ast.kids[k], ctx, resolver); };
  switch (ast.type) {
    case Ast::Type::Number:
      return scalar_value(Expr(ast.number));
    case Ast::Type::Neg: {
      Value v = kid(0);
      return v.scalar ? scalar_value(-v.s) : op_value(-v.op);
    }
    case Ast::Type::Add:
    case Ast::Type::Sub: {
      Value a = kid(0), b = kid(1);
      bool add = ast.type == Ast::Type::Add;
      if (a.scalar && b.scalar) return scalar_value(add ? a.s + b.s : a.s - b.s);
      return op_value(add ? a.as_op() + b.as_op() : a.as_op() - b.as_op());
    }
    case Ast::Type::Mul: {
      Value a = kid(0), b = kid(1);
      if (a.scalar && b.scalar) return scalar_value(a.s * b.s);
      return op_value(compose(a.as_op(), b.as_op()));
    }
    case Ast::Type::Div: {
      Value a = kid(0), b = kid(1);
      if (!b.scalar) throw ParseError("division by an operator", ast.pos);
      if (b.s.is_zero()) throw ParseError("division by zero", ast.pos);
      if (a.scalar) return scalar_value(a.s / b.s);
      return op_value(compose(a.op, DiffOp(Expr(1) / b.s)));
    }
    case Ast::Type::Pow: {
      Value a = kid(0), b = kid(1);
      if (!b.scalar) throw ParseError("operator-valued exponent", ast.pos);
      if (a.scalar) return scalar_value(pow(a.s, b.s));
      if (!b.s.is_const() || !b.s.constant().is_real() || !b.s.constant().re.is_integer() ||
          b.s.constant().re.sign() < 0) {
        throw ParseError("operator powers must be non-negative integers", ast.pos);
      }
      DiffOp out(1);
      for (int64_t k = 0; k < b.s.constant().re.num(); ++k) out = compose(out, a.op);
      return op_value(out);
    }
    case Ast::Type::Ident: {
      const std::string& n = ast.name;
      if (n.size() == 2 && n[0] == 's' && n[1] >= '0' && n[1] <= '3') {
        return op_value(DiffOp(PauliExpr::sigma(n[1] - '0')));
      }
      if (n == "dt") return op_value(DiffOp::d(0));
      if (n == "d1" || n == "d2" || n == "d3") return op_value(DiffOp::d(n[1] - '0'));
      if (n == "Par") return op_value(DiffOp::parity());
      if (is_reserved_atom(n) || ctx.params.count(n)) return scalar_value(to_scalar(ast, ctx));
      if (resolver) {
        if (auto r = resolver(n, {})) return op_value(*r);
      }
      throw ParseError("unknown identifier '" + n + "'", ast.pos);
    }
    case Ast::Type::Call: {
      if (is_builtin_function(ast.name) || ctx.opaque.count(ast.name)) {
        for (const auto& k : ast.kids) {
          if (!eval_value(*k, ctx, resolver).scalar) throw ParseError("operator passed to a scalar function", k->pos);
        }
        return scalar_value(to_scalar(ast, ctx));
      }
      std::vector<Expr> args;
      for (const auto& k : ast.kids) {
        Value v = eval_value(*k, ctx, resolver);
        if (!v.scalar) throw ParseError("generator arguments must be scalars", k->pos);
        args.push_back(v.s);
      }
      if (resolver && !ast.has_index) {
        if (auto r = resolver(ast.name, args)) return op_value(*r);
      }
      throw ParseError("unknown function '" + ast.name + "'", ast.pos);
    }
  }
  throw ParseError("malformed operator expression", ast.pos);
}

}  // namespace

DiffOp to_op(const Ast& ast, const ParseContext& ctx, const OpResolver& resolver) {
  return eval_value(ast, ctx, resolver).as_op();
}

DiffOp parse_op(const std::string& text, ParseContext& ctx, const OpResolver& resolver) {
  AstPtr ast = parse_ast(text, ctx);
  return to_op(*ast, ctx, resolver);
}

}  // namespace spinsym
