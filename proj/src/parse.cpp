#include "spinsym/parse.h"

#include <cctype>

namespace spinsym {

namespace {

struct Token {
  enum class Kind { Number, Ident, Op, Sep, End };
  Kind kind;
  std::string text;
  size_t pos;
};

std::vector<Token> lex(const std::string& s) {
  std::vector<Token> out;
  int depth = 0;
  size_t k = 0;
  while (k < s.size()) {
    char c = s[k];
    if (c == '\n' || c == ';') {
      if (depth == 0 || c == ';') out.push_back({Token::Kind::Sep, std::string(1, c), k});
      ++k;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++k;
    } else if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && k + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[k + 1])))) {
      size_t start = k;
      while (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) ++k;
      if (k < s.size() && s[k] == '.') {
        ++k;
        while (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) ++k;
      }
      out.push_back({Token::Kind::Number, s.substr(start, k - start), start});
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = k;
      while (k < s.size() && (std::isalnum(static_cast<unsigned char>(s[k])) || s[k] == '_')) ++k;
      out.push_back({Token::Kind::Ident, s.substr(start, k - start), start});
    } else if (std::string("+-*/^()[],").find(c) != std::string::npos) {
      if (c == '(' || c == '[') ++depth;
      if ((c == ')' || c == ']') && depth > 0) --depth;
      out.push_back({Token::Kind::Op, std::string(1, c), k});
      ++k;
    } else {
      throw ParseError(std::string("unexpected character '") + c + "'", k);
    }
  }
  out.push_back({Token::Kind::End, "", s.size()});
  return out;
}

class Parser {
 public:
  Parser(std::vector<Token> toks, ParseContext& ctx) : toks_(std::move(toks)), ctx_(ctx) {}

  AstPtr parse_program() {
    AstPtr result;
    while (true) {
      skip_separators();
      if (peek().kind == Token::Kind::End) break;
      if (peek().kind == Token::Kind::Ident && peek().text == "opaque" && peek(1).kind == Token::Kind::Ident) {
        parse_opaque_header();
        continue;
      }
      if (peek().kind == Token::Kind::Ident && peek().text == "param" && peek(1).kind == Token::Kind::Ident) {
        parse_param_header();
        continue;
      }
      if (result) throw ParseError("more than one expression statement", peek().pos);
      result = parse_sum();
      if (peek().kind != Token::Kind::Sep && peek().kind != Token::Kind::End) {
        throw ParseError("unexpected token '" + peek().text + "'", peek().pos);
      }
    }
    if (!result) throw ParseError("empty expression", toks_.back().pos);
    return result;
  }

 private:
  const Token& peek(size_t ahead = 0) const { return toks_[std::min(at_ + ahead, toks_.size() - 1)]; }
  const Token& next() { return toks_[at_ < toks_.size() - 1 ? at_++ : at_]; }
  bool accept(const char* op) {
    if (peek().kind == Token::Kind::Op && peek().text == op) {
      ++at_;
      return true;
    }
    return false;
  }
  void expect(const char* op) {
    if (!accept(op)) throw ParseError(std::string("expected '") + op + "'", peek().pos);
  }
  void skip_separators() {
    while (peek().kind == Token::Kind::Sep) ++at_;
  }

  void parse_opaque_header() {
    next();
    do {
      const Token& name = next();
      if (name.kind != Token::Kind::Ident) throw ParseError("expected function name", name.pos);
      expect("/");
      const Token& ar = next();
      if (ar.kind != Token::Kind::Number || ar.text.find('.') != std::string::npos) {
        throw ParseError("expected integer arity", ar.pos);
      }
      size_t arity = std::stoul(ar.text);
      if (arity < 1 || arity > 4) throw ParseError("opaque arity must be 1..4", ar.pos);
      if (is_reserved_atom(name.text) || is_builtin_function(name.text)) {
        throw ParseError("cannot redeclare reserved name '" + name.text + "'", name.pos);
      }
      ctx_.declare_opaque(name.text, arity);
    } while (accept(","));
  }

  void parse_param_header() {
    next();
    do {
      const Token& name = next();
      if (name.kind != Token::Kind::Ident) throw ParseError("expected parameter name", name.pos);
      if (is_reserved_atom(name.text) || is_builtin_function(name.text)) {
        throw ParseError("cannot redeclare reserved name '" + name.text + "'", name.pos);
      }
      ctx_.declare_param(name.text);
    } while (accept(","));
  }

  AstPtr binary(Ast::Type t, AstPtr a, AstPtr b, size_t pos) {
    auto n = std::make_shared<Ast>();
    n->type = t;
    n->pos = pos;
    n->kids = {std::move(a), std::move(b)};
    return n;
  }

  AstPtr parse_sum() {
    AstPtr lhs = parse_product();
    while (true) {
      size_t pos = peek().pos;
      if (accept("+")) {
        lhs = binary(Ast::Type::Add, lhs, parse_product(), pos);
      } else if (accept("-")) {
        lhs = binary(Ast::Type::Sub, lhs, parse_product(), pos);
      } else {
        return lhs;
      }
    }
  }

  AstPtr parse_product() {
    AstPtr lhs = parse_unary();
    while (true) {
      size_t pos = peek().pos;
      if (accept("*")) {
        lhs = binary(Ast::Type::Mul, lhs, parse_unary(), pos);
      } else if (accept("/")) {
        lhs = binary(Ast::Type::Div, lhs, parse_unary(), pos);
      } else {
        return lhs;
      }
    }
  }

  AstPtr parse_unary() {
    size_t pos = peek().pos;
    if (accept("-")) {
      auto n = std::make_shared<Ast>();
      n->type = Ast::Type::Neg;
      n->pos = pos;
      n->kids = {parse_unary()};
      return n;
    }
    if (accept("+")) return parse_unary();
    return parse_power();
  }

  AstPtr parse_power() {
    AstPtr base = parse_primary();
    size_t pos = peek().pos;
    if (accept("^")) return binary(Ast::Type::Pow, base, parse_unary(), pos);
    return base;
  }

  AstPtr parse_primary() {
    const Token& tok = next();
    if (tok.kind == Token::Kind::Number) {
      auto n = std::make_shared<Ast>();
      n->type = Ast::Type::Number;
      n->pos = tok.pos;
      n->number = Rational::parse(tok.text);
      return n;
    }
    if (tok.kind == Token::Kind::Ident) {
      auto n = std::make_shared<Ast>();
      n->type = Ast::Type::Ident;
      n->pos = tok.pos;
      n->name = tok.text;
      if (accept("[")) {
        n->has_index = true;
        do {
          const Token& d = next();
          if (d.kind != Token::Kind::Number || d.text.find('.') != std::string::npos) {
            throw ParseError("expected derivative order", d.pos);
          }
          unsigned long v = std::stoul(d.text);
          if (v > 16) throw ParseError("derivative order too large", d.pos);
          n->index.push_back(static_cast<uint8_t>(v));
        } while (accept(","));
        expect("]");
      }
      if (accept("(")) {
        n->type = Ast::Type::Call;
        if (!accept(")")) {
          do {
            n->kids.push_back(parse_sum());
          } while (accept(","));
          expect(")");
        }
      } else if (n->has_index) {
        throw ParseError("derivative index requires an argument list", tok.pos);
      }
      return n;
    }
    if (tok.kind == Token::Kind::Op && tok.text == "(") {
      AstPtr inner = parse_sum();
      expect(")");
      return inner;
    }
    if (tok.kind == Token::Kind::End) throw ParseError("unexpected end of input", tok.pos);
    throw ParseError("unexpected token '" + tok.text + "'", tok.pos);
  }

  std::vector<Token> toks_;
  size_t at_ = 0;
  ParseContext& ctx_;
};

Expr reserved_atom(const std::string& name) {
  if (name == "t") return Expr::t();
  if (name == "x1") return Expr::x(1);
  if (name == "x2") return Expr::x(2);
  if (name == "x3") return Expr::x(3);
  if (name == "r") return Expr::atom(Atom::R);
  if (name == "rt") return Expr::atom(Atom::Rt);
  if (name == "phi") return Expr::atom(Atom::Phi);
  if (name == "theta") return Expr::atom(Atom::Theta);
  if (name == "rho") return Expr::atom(Atom::Rho);
  if (name == "vkappa") return Expr::atom(Atom::Phi) - Expr::x(3);
  if (name == "i") return Expr::imag_unit();
  if (name == "pi") return Expr::pi();
  if (name == "u1") return Expr::var(Var::U1);
  if (name == "u2") return Expr::var(Var::U2);
  if (name == "u3") return Expr::var(Var::U3);
  if (name == "u4") return Expr::var(Var::U4);
  return Expr();
}

}  // namespace

ParseContext::ParseContext()
    : params{"g", "nu", "mu", "e", "kappa", "omega", "alpha", "lambda", "q", "c1", "c2", "c3", "c4"} {}

bool is_reserved_atom(const std::string& name) {
  static const std::set<std::string> names{"t",  "x1",  "x2",     "x3", "r",  "rt", "phi", "theta", "rho",
                                           "i",  "pi",  "vkappa", "u1", "u2", "u3", "u4"};
  return names.count(name) > 0;
}

bool is_builtin_function(const std::string& name) {
  static const std::set<std::string> names{"exp", "ln", "sin", "cos", "arctan", "sqrt"};
  return names.count(name) > 0;
}

AstPtr parse_ast(const std::string& text, ParseContext& ctx) { return Parser(lex(text), ctx).parse_program(); }

namespace {

// Flattens a chain of *, / and unary minus so the product is built in one step.
void collect_factors(const Ast& ast, const ParseContext& ctx, std::vector<Expr>& out) {
  switch (ast.type) {
    case Ast::Type::Neg:
      out.emplace_back(-1);
      collect_factors(*ast.kids[0], ctx, out);
      return;
    case Ast::Type::Mul:
      collect_factors(*ast.kids[0], ctx, out);
      collect_factors(*ast.kids[1], ctx, out);
      return;
    case Ast::Type::Div: {
      collect_factors(*ast.kids[0], ctx, out);
      Expr d = to_scalar(*ast.kids[1], ctx);
      if (d.is_zero()) throw ParseError("division by zero", ast.pos);
      out.push_back(pow(d, Expr(-1)));
      return;
    }
    default:
      out.push_back(to_scalar(ast, ctx));
  }
}

}  // namespace

Expr to_scalar(const Ast& ast, const ParseContext& ctx) {
  auto kid = [&](size_t k) { return to_scalar(*ast.kids[k], ctx); };
  switch (ast.type) {
    case Ast::Type::Number:
      return Expr(ast.number);
    case Ast::Type::Neg:
    case Ast::Type::Mul:
    case Ast::Type::Div: {
      std::vector<Expr> fs;
      collect_factors(ast, ctx, fs);
      return product(fs);
    }
    case Ast::Type::Add:
      return kid(0) + kid(1);
    case Ast::Type::Sub:
      return kid(0) - kid(1);
    case Ast::Type::Pow:
      return pow(kid(0), kid(1));
    case Ast::Type::Ident:
      if (is_reserved_atom(ast.name)) return reserved_atom(ast.name);
      if (ctx.params.count(ast.name)) return Expr::param(ast.name);
      if (ctx.opaque.count(ast.name)) throw ParseError("opaque function '" + ast.name + "' needs arguments", ast.pos);
      throw ParseError("unknown identifier '" + ast.name + "'", ast.pos);
    case Ast::Type::Call: {
      std::vector<Expr> args;
      for (size_t k = 0; k < ast.kids.size(); ++k) args.push_back(kid(k));
      if (is_builtin_function(ast.name)) {
        if (ast.has_index) throw ParseError("derivative index on builtin '" + ast.name + "'", ast.pos);
        if (args.size() != 1) throw ParseError("'" + ast.name + "' takes one argument", ast.pos);
        if (ast.name == "exp") return exp(args[0]);
        if (ast.name == "ln") return ln(args[0]);
        if (ast.name == "sin") return sin(args[0]);
        if (ast.name == "cos") return cos(args[0]);
        if (ast.name == "arctan") return atan(args[0]);
        return sqrt(args[0]);
      }
      auto it = ctx.opaque.find(ast.name);
      if (it == ctx.opaque.end()) throw ParseError("unknown function '" + ast.name + "'", ast.pos);
      if (args.size() != it->second) {
        throw ParseError("'" + ast.name + "' expects " + std::to_string(it->second) + " arguments", ast.pos);
      }
      std::vector<uint8_t> idx = ast.has_index ? ast.index : std::vector<uint8_t>(args.size(), 0);
      if (idx.size() != args.size()) throw ParseError("derivative index length must equal arity", ast.pos);
      return Expr::opaque(ast.name, idx, args);
    }
  }
  throw ParseError("malformed expression", ast.pos);
}

Expr parse_expr(const std::string& text, ParseContext& ctx) { return to_scalar(*parse_ast(text, ctx), ctx); }

Expr parse_expr(const std::string& text) {
  ParseContext ctx;
  return parse_expr(text, ctx);
}

}  // namespace spinsym
