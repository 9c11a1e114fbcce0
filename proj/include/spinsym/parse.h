#pragma once

#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "spinsym/expr.h"

namespace spinsym {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, size_t pos)
      : std::runtime_error(msg + " at offset " + std::to_string(pos)), pos_(pos) {}
  size_t position() const { return pos_; }

 private:
  size_t pos_;
};

struct Ast {
  enum class Type { Number, Ident, Call, Neg, Add, Sub, Mul, Div, Pow };
  Type type;
  size_t pos = 0;
  Rational number;
  std::string name;
  bool has_index = false;
  std::vector<uint8_t> index;
  std::vector<std::shared_ptr<const Ast>> kids;
};
using AstPtr = std::shared_ptr<const Ast>;

/// Names known to the parser. Predeclared parameters are always present.
struct ParseContext {
  std::set<std::string> params;
  std::map<std::string, size_t> opaque;  // name -> arity

  ParseContext();
  void declare_param(const std::string& name) { params.insert(name); }
  void declare_opaque(const std::string& name, size_t arity) { opaque[name] = arity; }
};

/// Parses optional `opaque F/2` and `param name` header statements followed by
/// exactly one expression. Statements are separated by newlines or ';'.
/// Headers update ctx.
AstPtr parse_ast(const std::string& text, ParseContext& ctx);

/// Builds a scalar expression; unknown identifiers raise ParseError.
Expr to_scalar(const Ast& ast, const ParseContext& ctx);

Expr parse_expr(const std::string& text, ParseContext& ctx);
Expr parse_expr(const std::string& text);

/// True for names with fixed meaning in the scalar grammar.
bool is_reserved_atom(const std::string& name);
bool is_builtin_function(const std::string& name);

}  // namespace spinsym
