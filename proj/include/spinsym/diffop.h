#pragma once

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "spinsym/parse.h"
#include "spinsym/pauli.h"

namespace spinsym {

/// Derivative orders over (t, x1, x2, x3).
using MultiIndex = std::array<uint8_t, 4>;

struct TermKey {
  MultiIndex d{};
  bool reflected = false;
  friend bool operator<(const TermKey& a, const TermKey& b) {
    int da = a.d[0] + a.d[1] + a.d[2] + a.d[3];
    int db = b.d[0] + b.d[1] + b.d[2] + b.d[3];
    if (da != db) return da > db;
    if (a.d != b.d) return a.d > b.d;
    return a.reflected < b.reflected;
  }
  friend bool operator==(const TermKey& a, const TermKey& b) = default;
};

class InternalConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Finite sum of c(t,x) * d^m * P^r in normal form: coefficients left,
/// derivatives in the middle, parity right; equal keys merged, zeros dropped.
class DiffOp {
 public:
  DiffOp() = default;
  DiffOp(const PauliExpr& c);
  DiffOp(const Expr& c) : DiffOp(PauliExpr(c)) {}
  DiffOp(int c) : DiffOp(PauliExpr(Expr(c))) {}

  /// k = 0 for d/dt, 1..3 for d/dx_k.
  static DiffOp d(int k);
  static DiffOp parity();
  static DiffOp term(const PauliExpr& c, MultiIndex m, bool reflected = false);

  const std::map<TermKey, PauliExpr>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  /// Highest total derivative order (0 for multiplication operators).
  int order() const;
  bool has_parity() const;
  /// Coefficient of a given monomial (zero if absent).
  PauliExpr coeff(MultiIndex m, bool reflected = false) const;

  DiffOp map(const std::function<PauliExpr(const PauliExpr&)>& f) const;

  friend DiffOp operator+(const DiffOp& a, const DiffOp& b);
  friend DiffOp operator-(const DiffOp& a, const DiffOp& b);
  /// Composition a o b.
  friend DiffOp operator*(const DiffOp& a, const DiffOp& b);
  DiffOp operator-() const;
  DiffOp& operator+=(const DiffOp& b) { return *this = *this + b; }
  friend bool operator==(const DiffOp& a, const DiffOp& b) { return a.terms_ == b.terms_; }

 private:
  void add_term(const TermKey& k, const PauliExpr& c);
  std::map<TermKey, PauliExpr> terms_;
};

DiffOp compose(const DiffOp& a, const DiffOp& b);
DiffOp commutator(const DiffOp& a, const DiffOp& b);
DiffOp anticommutator(const DiffOp& a, const DiffOp& b);
/// Formal adjoint: conjugate-transpose coefficients and integrate by parts.
DiffOp adjoint(const DiffOp& a);
/// Rebuilds all coefficients through simplify().
DiffOp simplify(const DiffOp& a);

using Spinor = std::array<Expr, 2>;
Spinor apply(const DiffOp& q, const Spinor& psi);
/// psi = (c0 + c.s) acting on a spinor.
Spinor apply(const PauliExpr& c, const Spinor& psi);

struct OpVerdict {
  bool zero = true;
  ZeroVerdict coefficients;
  ZeroVerdict applied;
  /// Failing monomial, when the coefficient route found one.
  std::optional<TermKey> term;
  int component = -1;
};

/// Both the coefficient check and the application to a random opaque
/// spinor run; disagreement throws InternalConsistencyError.
OpVerdict is_zero_op(const DiffOp& q, const ZeroTestOptions& opt = {});

std::string to_string(const DiffOp& q);
std::string monomial_name(const TermKey& k);

/// Resolves named operators such as generator families; returns nullopt for
/// unknown names. Arguments are scalar expressions.
using OpResolver = std::function<std::optional<DiffOp>(const std::string& name, const std::vector<Expr>& args)>;

/// Operator DSL: scalar grammar plus s0..s3, dt d1 d2 d3 Par and names
/// supplied by the resolver. '*' composes.
DiffOp parse_op(const std::string& text, ParseContext& ctx, const OpResolver& resolver = nullptr);
DiffOp to_op(const Ast& ast, const ParseContext& ctx, const OpResolver& resolver = nullptr);

}  // namespace spinsym
