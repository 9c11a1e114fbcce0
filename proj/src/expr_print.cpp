#include <sstream>

#include "spinsym/expr.h"

namespace spinsym {

namespace {

enum Prec { kSum = 1, kProduct = 2, kUnary = 3, kPower = 4, kAtom = 5 };

std::string print(const Node* n, int* prec);

std::string wrap(const Node* n, int min_prec) {
  int p;
  std::string s = print(n, &p);
  return p < min_prec ? "(" + s + ")" : s;
}

std::string print_const(const CRational& c, int* prec) {
  if (c.is_real()) {
    *prec = c.re.sign() < 0 ? kUnary : (c.re.is_integer() ? kAtom : kProduct);
    return c.re.str();
  }
  auto imag_part = [](const Rational& im) {
    if (im.is_one()) return std::string("i");
    if (im == Rational(-1)) return std::string("-i");
    return im.str() + "*i";
  };
  if (c.re.is_zero()) {
    *prec = c.im.sign() < 0 ? kUnary : (c.im.is_one() ? kAtom : kProduct);
    return imag_part(c.im);
  }
  *prec = kSum;
  std::string im = imag_part(c.im);
  if (c.im.sign() < 0) return c.re.str() + " - " + im.substr(1);
  return c.re.str() + " + " + im;
}

// Negative real numeric coefficient of a term, used to print "a - b".
bool negative_term(const Node* t) {
  const Node* c = nullptr;
  if (t->kind == Kind::Const) c = t;
  if (t->kind == Kind::Mul && t->kids[0]->kind == Kind::Const) c = t->kids[0];
  return c && c->value.is_real() && c->value.re.sign() < 0;
}

bool negative_rational_exponent(const Node* f) {
  return f->kind == Kind::Pow && f->kids[1]->kind == Kind::Const && f->kids[1]->value.is_real() &&
         f->kids[1]->value.re.sign() < 0;
}

std::string print_mul(const Node* n, int* prec) {
  CRational coeff(1);
  std::vector<const Node*> num, den;
  for (const Node* f : n->kids) {
    if (f->kind == Kind::Const) {
      coeff = f->value;
    } else if (negative_rational_exponent(f)) {
      den.push_back(pow(Expr(f->kids[0]), Expr(-f->kids[1]->value)).node());
    } else {
      num.push_back(f);
    }
  }
  std::string sign;
  if (coeff.is_real() && coeff.re.sign() < 0) {
    sign = "-";
    coeff = -coeff;
  }
  Rational den_coeff(1);
  std::string s;
  // Coefficient stays in the numerator over a lone summed denominator.
  bool lone_sum = den.size() == 1 && den[0]->kind == Kind::Add;
  if (coeff.is_real() && !lone_sum) {
    den_coeff = Rational(coeff.re.den());
    coeff = CRational(Rational(coeff.re.num()));
  }
  std::vector<std::string> parts;
  if (!coeff.is_one()) {
    int p;
    std::string c = print_const(coeff, &p);
    parts.push_back(p < kPower ? "(" + c + ")" : c);
  }
  for (const Node* f : num) parts.push_back(wrap(f, kPower));
  if (parts.empty()) parts.push_back("1");
  for (size_t k = 0; k < parts.size(); ++k) s += (k ? "*" : "") + parts[k];
  if (!den.empty() || !den_coeff.is_one()) {
    std::vector<std::string> dparts;
    if (!den_coeff.is_one()) dparts.push_back(den_coeff.str());
    for (const Node* f : den) dparts.push_back(wrap(f, kPower));
    std::string d;
    for (size_t k = 0; k < dparts.size(); ++k) d += (k ? "*" : "") + dparts[k];
    s += "/" + (dparts.size() > 1 ? "(" + d + ")" : d);
  }
  *prec = sign.empty() ? kProduct : kUnary;
  return sign + s;
}

std::string print(const Node* n, int* prec) {
  *prec = kAtom;
  switch (n->kind) {
    case Kind::Const:
      return print_const(n->value, prec);
    case Kind::Pi:
      return "pi";
    case Kind::Param:
      return n->name;
    case Kind::Sym:
      return var_name(static_cast<Var>(n->tag));
    case Kind::Derived:
      return atom_name(static_cast<Atom>(n->tag));
    case Kind::Add: {
      std::string s;
      for (size_t k = 0; k < n->kids.size(); ++k) {
        const Node* t = n->kids[k];
        if (k > 0 && negative_term(t)) {
          s += " - " + wrap((-Expr(t)).node(), kProduct);
        } else {
          s += (k ? " + " : "") + wrap(t, k ? kProduct : kUnary);
        }
      }
      *prec = kSum;
      return s;
    }
    case Kind::Mul:
      return print_mul(n, prec);
    case Kind::Pow: {
      const Node* e = n->kids[1];
      if (e->kind == Kind::Const && e->value == CRational(Rational(1, 2))) {
        int p;
        return "sqrt(" + print(n->kids[0], &p) + ")";
      }
      if (negative_rational_exponent(n)) {
        *prec = kProduct;
        return "1/" + wrap(pow(Expr(n->kids[0]), Expr(-e->value)).node(), kPower);
      }
      *prec = kPower;
      return wrap(n->kids[0], kAtom) + "^" + wrap(e, kAtom);
    }
    case Kind::Func: {
      int p;
      return std::string(fn_name(static_cast<Fn>(n->tag))) + "(" + print(n->kids[0], &p) + ")";
    }
    case Kind::Opaque: {
      std::string s = n->name;
      bool any = false;
      for (uint8_t k : n->index) any = any || k;
      if (any) {
        s += "[";
        for (size_t k = 0; k < n->index.size(); ++k) s += (k ? "," : "") + std::to_string(n->index[k]);
        s += "]";
      }
      s += "(";
      for (size_t k = 0; k < n->kids.size(); ++k) {
        int p;
        s += (k ? ", " : "") + print(n->kids[k], &p);
      }
      return s + ")";
    }
  }
  return "?";
}

}  // namespace

std::string to_string(const Expr& e) {
  int p;
  return print(e.node(), &p);
}

}  // namespace spinsym
