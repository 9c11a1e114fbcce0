#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "spinsym/rational.h"

namespace spinsym {

/// Differentiation variables. U1..U4 are the formal arguments used inside
/// opaque-function realizations.
enum class Var : uint8_t { T = 0, X1 = 1, X2 = 2, X3 = 3, U1 = 4, U2 = 5, U3 = 6, U4 = 7 };
inline constexpr int kNumVars = 8;

/// Derived coordinate atoms: r, r~ = sqrt(x1^2+x2^2), phi = arctan(x2/x1),
/// theta (polar angle), rho = ln r~.
enum class Atom : uint8_t { R, Rt, Phi, Theta, Rho };

enum class Fn : uint8_t { Exp, Ln, Sin, Cos, Atan };

enum class Kind : uint8_t { Const, Pi, Param, Sym, Derived, Add, Mul, Pow, Func, Opaque };

/// Interned, immutable expression node. Nodes live for the whole process and
/// structurally equal nodes are the same object.
struct Node {
  Kind kind;
  uint8_t tag = 0;    // Var, Atom or Fn depending on kind
  uint8_t deps = 0;   // bit k set iff the node depends on Var(k)
  bool has_opaque = false;
  uint32_t id = 0;
  uint64_t hash = 0;
  CRational value;                 // Const
  std::string name;                // Param, Opaque
  std::vector<uint8_t> index;      // Opaque: partial-derivative multi-index
  std::vector<const Node*> kids;   // Add terms, Mul factors, Pow {base, exp}, Func {arg}, Opaque args
};

class Expr {
 public:
  Expr();
  Expr(int v);
  Expr(int64_t v);
  Expr(Rational v);
  Expr(CRational v);
  explicit Expr(const Node* n) : node_(n) {}

  const Node* node() const { return node_; }
  Kind kind() const { return node_->kind; }
  size_t arity() const { return node_->kids.size(); }
  Expr operator[](size_t k) const { return Expr(node_->kids[k]); }

  bool is_zero() const;
  bool is_one() const;
  bool is_const() const { return node_->kind == Kind::Const; }
  const CRational& constant() const { return node_->value; }
  bool depends_on(Var v) const { return (node_->deps >> static_cast<int>(v)) & 1u; }
  bool is_time_free() const { return !depends_on(Var::T); }
  bool has_opaque() const { return node_->has_opaque; }

  static Expr var(Var v);
  static Expr t() { return var(Var::T); }
  static Expr x(int a);  // a = 1..3
  static Expr param(const std::string& name);
  static Expr atom(Atom a);
  static Expr pi();
  static Expr imag_unit();
  static Expr opaque(const std::string& name, std::vector<uint8_t> index, std::vector<Expr> args);

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  Expr operator-() const;
  Expr& operator+=(const Expr& b) { return *this = *this + b; }
  Expr& operator-=(const Expr& b) { return *this = *this - b; }
  Expr& operator*=(const Expr& b) { return *this = *this * b; }

  friend bool operator==(const Expr& a, const Expr& b) { return a.node_ == b.node_; }

 private:
  const Node* node_;
};

/// Strict weak ordering used for canonical term order.
bool canonical_less(const Node* a, const Node* b);

Expr sum(const std::vector<Expr>& terms);
Expr product(const std::vector<Expr>& factors);
Expr pow(const Expr& base, const Expr& exponent);
Expr exp(const Expr& u);
Expr ln(const Expr& u);
Expr sin(const Expr& u);
Expr cos(const Expr& u);
Expr atan(const Expr& u);
Expr sqrt(const Expr& u);
Expr apply_fn(Fn f, const Expr& u);

/// d e / d v with the chain rule through derived atoms and opaque arguments.
Expr differentiate(const Expr& e, Var v);
/// Mixed partial: index[k] derivatives with respect to Var(k) (k = 0..3).
Expr differentiate(const Expr& e, const std::array<int, 4>& index);

/// Rebuilds e bottom-up through the canonicalizing constructors.
Expr simplify(const Expr& e);

/// Replaces nodes found in `repl` (matched by identity) and rebuilds.
Expr substitute(const Expr& e, const std::map<const Node*, Expr>& repl);
/// Parity substitution x -> -x.
Expr reflect(const Expr& e);
/// Complex conjugate assuming real parameters, coordinates and opaque functions.
Expr conj(const Expr& e);
/// Replaces derived atoms by their coordinate definitions.
Expr expand_atoms(const Expr& e);

std::string to_string(const Expr& e);

struct FreeSymbols {
  std::set<std::string> params;
  std::map<std::string, size_t> opaque;  // name -> arity
};
FreeSymbols free_symbols(const Expr& e);
void collect_free_symbols(const Expr& e, FreeSymbols& out);

/// Number of distinct nodes reachable from e.
size_t dag_size(const Expr& e);

const char* fn_name(Fn f);
const char* atom_name(Atom a);
const char* var_name(Var v);

}  // namespace spinsym
