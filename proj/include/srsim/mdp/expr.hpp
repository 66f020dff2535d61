/**
 * @file expr.hpp
 * @brief Integer/boolean expressions for guarded-command models: AST,
 *        evaluator, canonical printer and recursive-descent parser.
 *
 * Expressions range over bounded integer variables.  The printer emits a
 * canonical form (minimal parentheses, fixed spacing) and the parser accepts
 * exactly the printed grammar plus conveniences found in hand-written models
 * (named constants and formulas, which are inlined during parsing).  Printing
 * then re-parsing an expression therefore reproduces the same tree, which
 * makes whole-model round trips idempotent.
 */
#pragma once

#include <cctype>
#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace srsim::mdp {

/// Expression node kinds.
enum class Op {
  IntConst,
  BoolConst,
  Var,
  Neg,
  Add,
  Sub,
  Mul,
  Mod,
  Not,
  And,
  Or,
  Eq,
  Ne,
  Lt,
  Le,
  Gt,
  Ge,
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Immutable expression node.  Variable slots are bound once per model.
struct Expr {
  Op op;
  long long value = 0;     ///< IntConst value or BoolConst (0/1)
  std::string name;        ///< Var name
  ExprPtr lhs, rhs;
  mutable int slot = -1;   ///< Var: index into the valuation vector

  explicit Expr(Op o) : op(o) {}
};

inline ExprPtr make_int(long long v) {
  auto e = std::make_shared<Expr>(Op::IntConst);
  e->value = v;
  return e;
}
inline ExprPtr make_bool(bool v) {
  auto e = std::make_shared<Expr>(Op::BoolConst);
  e->value = v ? 1 : 0;
  return e;
}
inline ExprPtr make_var(const std::string& name) {
  auto e = std::make_shared<Expr>(Op::Var);
  e->name = name;
  return e;
}
inline ExprPtr make_unary(Op op, ExprPtr a) {
  auto e = std::make_shared<Expr>(op);
  e->lhs = std::move(a);
  return e;
}
inline ExprPtr make_binary(Op op, ExprPtr a, ExprPtr b) {
  auto e = std::make_shared<Expr>(op);
  e->lhs = std::move(a);
  e->rhs = std::move(b);
  return e;
}

// Convenience builders for programmatic model construction.
inline ExprPtr operator+(ExprPtr a, ExprPtr b) { return make_binary(Op::Add, a, b); }
inline ExprPtr operator-(ExprPtr a, ExprPtr b) { return make_binary(Op::Sub, a, b); }
inline ExprPtr operator&&(ExprPtr a, ExprPtr b) { return make_binary(Op::And, a, b); }
inline ExprPtr operator||(ExprPtr a, ExprPtr b) { return make_binary(Op::Or, a, b); }
inline ExprPtr operator!(ExprPtr a) { return make_unary(Op::Not, a); }
inline ExprPtr eq(ExprPtr a, ExprPtr b) { return make_binary(Op::Eq, a, b); }
inline ExprPtr ne(ExprPtr a, ExprPtr b) { return make_binary(Op::Ne, a, b); }
inline ExprPtr lt(ExprPtr a, ExprPtr b) { return make_binary(Op::Lt, a, b); }
inline ExprPtr le(ExprPtr a, ExprPtr b) { return make_binary(Op::Le, a, b); }
inline ExprPtr gt(ExprPtr a, ExprPtr b) { return make_binary(Op::Gt, a, b); }
inline ExprPtr ge(ExprPtr a, ExprPtr b) { return make_binary(Op::Ge, a, b); }

/// Bind every variable reference to its valuation slot.  Throws on unknowns.
inline void bind_slots(const ExprPtr& e,
                       const std::map<std::string, int>& index) {
  // NB: "!e" would build a Not node via the DSL overload (which also leaks
  // into shared_ptr's nullptr comparisons through ADL), so the null check
  // must be spelled on the raw pointer.
  if (e.get() == nullptr) return;
  if (e->op == Op::Var) {
    auto it = index.find(e->name);
    if (it == index.end()) {
      throw std::runtime_error("unknown variable: " + e->name);
    }
    e->slot = it->second;
  }
  bind_slots(e->lhs, index);
  bind_slots(e->rhs, index);
}

/// Evaluate a bound expression over a valuation.
inline long long eval(const Expr& e, const std::vector<int>& vals) {
  switch (e.op) {
    case Op::IntConst:
    case Op::BoolConst: return e.value;
    case Op::Var: return vals[static_cast<std::size_t>(e.slot)];
    case Op::Neg: return -eval(*e.lhs, vals);
    case Op::Add: return eval(*e.lhs, vals) + eval(*e.rhs, vals);
    case Op::Sub: return eval(*e.lhs, vals) - eval(*e.rhs, vals);
    case Op::Mul: return eval(*e.lhs, vals) * eval(*e.rhs, vals);
    case Op::Mod: {
      const long long a = eval(*e.lhs, vals), b = eval(*e.rhs, vals);
      if (b == 0) throw std::runtime_error("mod by zero");
      long long r = a % b;
      if (r < 0) r += (b > 0 ? b : -b);  // mathematical remainder
      return r;
    }
    case Op::Not: return eval(*e.lhs, vals) ? 0 : 1;
    case Op::And: return (eval(*e.lhs, vals) && eval(*e.rhs, vals)) ? 1 : 0;
    case Op::Or: return (eval(*e.lhs, vals) || eval(*e.rhs, vals)) ? 1 : 0;
    case Op::Eq: return (eval(*e.lhs, vals) == eval(*e.rhs, vals)) ? 1 : 0;
    case Op::Ne: return (eval(*e.lhs, vals) != eval(*e.rhs, vals)) ? 1 : 0;
    case Op::Lt: return (eval(*e.lhs, vals) < eval(*e.rhs, vals)) ? 1 : 0;
    case Op::Le: return (eval(*e.lhs, vals) <= eval(*e.rhs, vals)) ? 1 : 0;
    case Op::Gt: return (eval(*e.lhs, vals) > eval(*e.rhs, vals)) ? 1 : 0;
    case Op::Ge: return (eval(*e.lhs, vals) >= eval(*e.rhs, vals)) ? 1 : 0;
  }
  throw std::runtime_error("bad expression node");
}

namespace detail {

inline int precedence(Op op) {
  switch (op) {
    case Op::Or: return 1;
    case Op::And: return 2;
    case Op::Not: return 3;
    case Op::Eq:
    case Op::Ne:
    case Op::Lt:
    case Op::Le:
    case Op::Gt:
    case Op::Ge: return 4;
    case Op::Add:
    case Op::Sub: return 5;
    case Op::Mul: return 6;
    case Op::Neg: return 7;
    default: return 8;  // atoms and mod() never need parentheses
  }
}

inline const char* op_token(Op op) {
  switch (op) {
    case Op::Add: return "+";
    case Op::Sub: return "-";
    case Op::Mul: return "*";
    case Op::And: return "&";
    case Op::Or: return "|";
    case Op::Eq: return "=";
    case Op::Ne: return "!=";
    case Op::Lt: return "<";
    case Op::Le: return "<=";
    case Op::Gt: return ">";
    case Op::Ge: return ">=";
    default: return "?";
  }
}

}  // namespace detail

/// Canonical text form with minimal parentheses.
inline std::string print(const Expr& e) {
  using detail::precedence;
  const int prec = precedence(e.op);
  auto child = [&](const Expr& c, bool right) {
    const int cp = precedence(c.op);
    // Left-associative operators: the right child needs parentheses when its
    // precedence ties the parent's; either child does when strictly looser.
    const bool parens = cp < prec || (right && cp == prec);
    std::string s = print(c);
    return parens ? "(" + s + ")" : s;
  };
  switch (e.op) {
    case Op::IntConst: return std::to_string(e.value);
    case Op::BoolConst: return e.value ? "true" : "false";
    case Op::Var: return e.name;
    case Op::Neg: return "-" + child(*e.lhs, false);
    case Op::Not: return "!" + child(*e.lhs, false);
    case Op::Mod: return "mod(" + print(*e.lhs) + "," + print(*e.rhs) + ")";
    default:
      return child(*e.lhs, false) + detail::op_token(e.op) + child(*e.rhs, true);
  }
}

// --- Tokenizer and parser -------------------------------------------------

/// Token stream over guarded-command source text.
class Lexer {
 public:
  struct Token {
    enum Kind { Ident, Number, String, Symbol, End } kind = End;
    std::string text;  ///< String tokens hold the unquoted content
    std::size_t pos = 0;
  };

  explicit Lexer(std::string src) : src_(std::move(src)) { advance(); }

  const Token& peek() const { return tok_; }

  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

  bool accept(const std::string& text) {
    if (tok_.text == text && tok_.kind != Token::End) {
      advance();
      return true;
    }
    return false;
  }

  void expect(const std::string& text) {
    if (!accept(text)) {
      throw std::runtime_error("parse error at offset " +
                               std::to_string(tok_.pos) + ": expected '" +
                               text + "', found '" + tok_.text + "'");
    }
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw std::runtime_error("parse error at offset " +
                             std::to_string(tok_.pos) + ": " + what +
                             " (found '" + tok_.text + "')");
  }

 private:
  void advance() {
    while (pos_ < src_.size()) {
      if (std::isspace(static_cast<unsigned char>(src_[pos_]))) {
        ++pos_;
      } else if (src_[pos_] == '/' && pos_ + 1 < src_.size() &&
                 src_[pos_ + 1] == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
    tok_.pos = pos_;
    if (pos_ >= src_.size()) {
      tok_ = {Token::End, "", pos_};
      return;
    }
    const char c = src_[pos_];
    if (c == '"') {
      const std::size_t b = ++pos_;
      while (pos_ < src_.size() && src_[pos_] != '"') ++pos_;
      if (pos_ >= src_.size()) {
        throw std::runtime_error("parse error: unterminated string at offset " +
                                 std::to_string(b - 1));
      }
      tok_ = {Token::String, src_.substr(b, pos_ - b), b - 1};
      ++pos_;
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t b = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
              src_[pos_] == '_')) {
        ++pos_;
      }
      tok_ = {Token::Ident, src_.substr(b, pos_ - b), b};
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && pos_ + 1 < src_.size() &&
         std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
      std::size_t b = pos_;
      // A '.' belongs to the literal only when it is not the start of the
      // range operator "..", so [0..13] lexes as 0, .., 13.
      auto literal_dot = [&] {
        return src_[pos_] == '.' &&
               !(pos_ + 1 < src_.size() && src_[pos_ + 1] == '.');
      };
      while (pos_ < src_.size() &&
             (std::isdigit(static_cast<unsigned char>(src_[pos_])) ||
              literal_dot() || src_[pos_] == 'e' || src_[pos_] == 'E' ||
              ((src_[pos_] == '+' || src_[pos_] == '-') && pos_ > b &&
               (src_[pos_ - 1] == 'e' || src_[pos_ - 1] == 'E')))) {
        ++pos_;
      }
      tok_ = {Token::Number, src_.substr(b, pos_ - b), b};
      return;
    }
    // Multi-character symbols first.
    static const char* two[] = {"!=", "<=", ">=", "->", "..", "'="};
    for (const char* s : two) {
      if (src_.compare(pos_, 2, s) == 0) {
        tok_ = {Token::Symbol, s, pos_};
        pos_ += 2;
        return;
      }
    }
    tok_ = {Token::Symbol, std::string(1, c), pos_};
    ++pos_;
  }

  std::string src_;
  std::size_t pos_ = 0;
  Token tok_;
};

/// Named integer constants and boolean formulas available while parsing.
struct ParseContext {
  std::map<std::string, long long> constants;
  std::map<std::string, double> double_constants;
  std::map<std::string, ExprPtr> formulas;
};

/// Recursive-descent expression parser (lowest precedence entry point).
inline ExprPtr parse_expr(Lexer& lx, const ParseContext& ctx);

namespace detail {

inline ExprPtr parse_atom(Lexer& lx, const ParseContext& ctx) {
  using Token = Lexer::Token;
  const Token t = lx.peek();
  if (lx.accept("(")) {
    ExprPtr e = parse_expr(lx, ctx);
    lx.expect(")");
    return e;
  }
  if (lx.accept("-")) return make_unary(Op::Neg, parse_atom(lx, ctx));
  if (t.kind == Token::Number) {
    lx.take();
    if (t.text.find_first_of(".eE") != std::string::npos) {
      lx.fail("unexpected non-integer literal '" + t.text + "'");
    }
    return make_int(std::stoll(t.text));
  }
  if (t.kind == Token::Ident) {
    lx.take();
    if (t.text == "true") return make_bool(true);
    if (t.text == "false") return make_bool(false);
    if (t.text == "mod") {
      lx.expect("(");
      ExprPtr a = parse_expr(lx, ctx);
      lx.expect(",");
      ExprPtr b = parse_expr(lx, ctx);
      lx.expect(")");
      return make_binary(Op::Mod, a, b);
    }
    if (auto it = ctx.constants.find(t.text); it != ctx.constants.end()) {
      return make_int(it->second);
    }
    if (auto it = ctx.formulas.find(t.text); it != ctx.formulas.end()) {
      return it->second;
    }
    return make_var(t.text);
  }
  lx.fail("expected expression");
}

inline ExprPtr parse_mul(Lexer& lx, const ParseContext& ctx) {
  ExprPtr e = parse_atom(lx, ctx);
  while (lx.peek().text == "*" && lx.accept("*")) {
    e = make_binary(Op::Mul, e, parse_atom(lx, ctx));
  }
  return e;
}

inline ExprPtr parse_add(Lexer& lx, const ParseContext& ctx) {
  ExprPtr e = parse_mul(lx, ctx);
  for (;;) {
    if (lx.accept("+")) {
      e = make_binary(Op::Add, e, parse_mul(lx, ctx));
    } else if (lx.accept("-")) {
      e = make_binary(Op::Sub, e, parse_mul(lx, ctx));
    } else {
      return e;
    }
  }
}

inline ExprPtr parse_rel(Lexer& lx, const ParseContext& ctx) {
  ExprPtr e = parse_add(lx, ctx);
  if (lx.accept("=")) return make_binary(Op::Eq, e, parse_add(lx, ctx));
  if (lx.accept("!=")) return make_binary(Op::Ne, e, parse_add(lx, ctx));
  if (lx.accept("<=")) return make_binary(Op::Le, e, parse_add(lx, ctx));
  if (lx.accept(">=")) return make_binary(Op::Ge, e, parse_add(lx, ctx));
  if (lx.accept("<")) return make_binary(Op::Lt, e, parse_add(lx, ctx));
  if (lx.accept(">")) return make_binary(Op::Gt, e, parse_add(lx, ctx));
  return e;
}

inline ExprPtr parse_not(Lexer& lx, const ParseContext& ctx) {
  if (lx.accept("!")) return make_unary(Op::Not, parse_not(lx, ctx));
  return parse_rel(lx, ctx);
}

inline ExprPtr parse_and(Lexer& lx, const ParseContext& ctx) {
  ExprPtr e = parse_not(lx, ctx);
  while (lx.accept("&")) e = make_binary(Op::And, e, parse_not(lx, ctx));
  return e;
}

}  // namespace detail

inline ExprPtr parse_expr(Lexer& lx, const ParseContext& ctx) {
  ExprPtr e = detail::parse_and(lx, ctx);
  while (lx.accept("|")) e = make_binary(Op::Or, e, detail::parse_and(lx, ctx));
  return e;
}

/// Parse a standalone expression string (for tests and labels).
inline ExprPtr parse_expr_text(const std::string& text,
                               const ParseContext& ctx = {}) {
  Lexer lx(text);
  ExprPtr e = parse_expr(lx, ctx);
  if (lx.peek().kind != Lexer::Token::End) {
    lx.fail("trailing input after expression");
  }
  return e;
}

}  // namespace srsim::mdp
