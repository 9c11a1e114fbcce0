#include <mutex>
#include <stdexcept>
#include <unordered_map>

#include "spinsym/expr.h"

namespace spinsym {

namespace {

struct DiffMemo {
  std::mutex mu;
  std::unordered_map<uint64_t, const Node*> table;
};

DiffMemo& diff_memo() {
  static DiffMemo* m = new DiffMemo();
  return *m;
}

Expr atom_partial(Atom a, int axis) {
  Expr x1 = Expr::x(1), x2 = Expr::x(2), x3 = Expr::x(3);
  Expr r = Expr::atom(Atom::R), rt = Expr::atom(Atom::Rt);
  Expr xa = Expr::x(axis);
  switch (a) {
    case Atom::R:
      return xa / r;
    case Atom::Rt:
      return axis == 3 ? Expr() : xa / rt;
    case Atom::Phi:
      if (axis == 3) return Expr();
      return (axis == 1 ? -x2 : x1) / pow(rt, Expr(2));
    case Atom::Theta:
      if (axis == 3) return -rt / pow(r, Expr(2));
      return xa * x3 / (pow(r, Expr(2)) * rt);
    case Atom::Rho:
      return axis == 3 ? Expr() : xa / pow(rt, Expr(2));
  }
  return Expr();
}

Expr diff_uncached(const Node* n, Var v) {
  switch (n->kind) {
    case Kind::Const:
    case Kind::Pi:
    case Kind::Param:
      return Expr();
    case Kind::Sym:
      return static_cast<Var>(n->tag) == v ? Expr(1) : Expr();
    case Kind::Derived: {
      int axis = static_cast<int>(v);
      if (axis < 1 || axis > 3) return Expr();
      return atom_partial(static_cast<Atom>(n->tag), axis);
    }
    case Kind::Add: {
      std::vector<Expr> terms;
      for (const Node* k : n->kids) terms.push_back(differentiate(Expr(k), v));
      return sum(terms);
    }
    case Kind::Mul: {
      std::vector<Expr> terms;
      for (size_t i = 0; i < n->kids.size(); ++i) {
        Expr d = differentiate(Expr(n->kids[i]), v);
        if (d.is_zero()) continue;
        std::vector<Expr> fs{d};
        for (size_t j = 0; j < n->kids.size(); ++j) {
          if (j != i) fs.emplace_back(n->kids[j]);
        }
        terms.push_back(product(fs));
      }
      return sum(terms);
    }
    case Kind::Pow: {
      Expr b(n->kids[0]), e(n->kids[1]);
      Expr db = differentiate(b, v);
      if (!e.depends_on(v)) {
        if (db.is_zero()) return Expr();
        return e * pow(b, e - Expr(1)) * db;
      }
      Expr de = differentiate(e, v);
      return pow(b, e) * (de * ln(b) + e * db / b);
    }
    case Kind::Func: {
      Expr u(n->kids[0]);
      Expr du = differentiate(u, v);
      if (du.is_zero()) return Expr();
      switch (static_cast<Fn>(n->tag)) {
        case Fn::Exp: return Expr(n) * du;
        case Fn::Ln: return du / u;
        case Fn::Sin: return cos(u) * du;
        case Fn::Cos: return -sin(u) * du;
        case Fn::Atan: return du / (Expr(1) + u * u);
      }
      return Expr();
    }
    case Kind::Opaque: {
      std::vector<Expr> args;
      for (const Node* k : n->kids) args.emplace_back(k);
      std::vector<Expr> terms;
      for (size_t j = 0; j < args.size(); ++j) {
        Expr da = differentiate(args[j], v);
        if (da.is_zero()) continue;
        std::vector<uint8_t> idx = n->index;
        if (idx[j] == 255) throw std::overflow_error("opaque derivative order overflow");
        idx[j] += 1;
        terms.push_back(Expr::opaque(n->name, idx, args) * da);
      }
      return sum(terms);
    }
  }
  return Expr();
}

}  // namespace

Expr differentiate(const Expr& e, Var v) {
  if (!e.depends_on(v)) return Expr();
  const Node* n = e.node();
  uint64_t key = (static_cast<uint64_t>(n->id) << 3) | static_cast<uint64_t>(v);
  DiffMemo& memo = diff_memo();
  {
    std::lock_guard<std::mutex> lock(memo.mu);
    auto it = memo.table.find(key);
    if (it != memo.table.end()) return Expr(it->second);
  }
  Expr d = diff_uncached(n, v);
  std::lock_guard<std::mutex> lock(memo.mu);
  memo.table.emplace(key, d.node());
  return d;
}

Expr differentiate(const Expr& e, const std::array<int, 4>& index) {
  Expr out = e;
  for (int k = 0; k < 4; ++k) {
    for (int j = 0; j < index[k]; ++j) out = differentiate(out, static_cast<Var>(k));
  }
  return out;
}

}  // namespace spinsym
