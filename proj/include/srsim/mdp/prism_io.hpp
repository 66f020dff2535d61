/**
 * @file prism_io.hpp
 * @brief Text form of guarded-command models: canonical exporter and parser.
 *
 * The exporter writes a self-contained model — constants and formulas are
 * already inlined, probabilities appear as shortest round-tripping decimal
 * literals — so exporting, parsing and exporting again reproduces the text
 * byte for byte.  The parser additionally accepts the conveniences common in
 * hand-written models: `const int`, `const double` and `formula` declarations
 * (all inlined while reading), `//` comments, and single updates without an
 * explicit probability.
 */
#pragma once

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "srsim/format.hpp"
#include "srsim/mdp/expr.hpp"
#include "srsim/mdp/model.hpp"

namespace srsim::mdp {

// --- Export -----------------------------------------------------------------

namespace detail {

inline std::string update_text(const Update& u) {
  if (u.assignments.empty()) return "true";
  std::string s;
  for (std::size_t i = 0; i < u.assignments.size(); ++i) {
    if (i) s += "&";
    s += "(" + u.assignments[i].first + "'=" + print(*u.assignments[i].second) +
         ")";
  }
  return s;
}

}  // namespace detail

/// Render the model in guarded-command text form.
inline std::string export_prism(const GuardedCommandModel& model) {
  std::string out = "mdp\n";
  for (const auto& mod : model.modules) {
    out += "\nmodule " + mod.name + "\n";
    for (const auto& v : mod.variables) {
      out += "  " + v.name + " : [" + std::to_string(v.low) + ".." +
             std::to_string(v.high) + "] init " + std::to_string(v.init) +
             ";\n";
    }
    for (const auto& c : mod.commands) {
      out += "  [" + c.action + "] " + print(*c.guard) + " -> ";
      for (std::size_t i = 0; i < c.updates.size(); ++i) {
        if (i) out += " + ";
        out += srsim::format_double(c.updates[i].probability) + ":" +
               detail::update_text(c.updates[i]);
      }
      out += ";\n";
    }
    out += "endmodule\n";
  }
  if (!model.labels.empty()) out += "\n";
  for (const auto& [name, expr] : model.labels) {
    out += "label \"" + name + "\" = " + print(*expr) + ";\n";
  }
  if (!model.rewards.empty()) {
    out += "\nrewards \"" + model.reward_name + "\"\n";
    for (const auto& item : model.rewards) {
      out += "  [" + item.action + "] " + print(*item.guard) + " : " +
             srsim::format_double(item.value) + ";\n";
    }
    out += "endrewards\n";
  }
  return out;
}

/// The standard queries checked against this model family.
inline std::string export_properties(const std::string& reward_name = "time") {
  std::string out;
  out += "Pmin=? [ F \"MissionSuccessful\" ];\n";
  out += "Pmax=? [ F \"MissionSuccessful\" ];\n";
  out += "Pmin=? [ F \"fault\" ];\n";
  out += "Pmax=? [ F \"fault\" ];\n";
  out += "R{\"" + reward_name + "\"}min=? [ F \"done\" ];\n";
  out += "R{\"" + reward_name + "\"}max=? [ F \"done\" ];\n";
  return out;
}

// --- Parse ------------------------------------------------------------------

namespace detail {

/// Constant arithmetic for probabilities and reward values: + - * / and
/// parentheses over numeric literals and declared constants.
inline double parse_number_expr(Lexer& lx, const ParseContext& ctx);

inline double parse_number_factor(Lexer& lx, const ParseContext& ctx) {
  using Token = Lexer::Token;
  if (lx.accept("(")) {
    const double v = parse_number_expr(lx, ctx);
    lx.expect(")");
    return v;
  }
  if (lx.accept("-")) return -parse_number_factor(lx, ctx);
  const Token t = lx.peek();
  if (t.kind == Token::Number) {
    lx.take();
    return std::stod(t.text);
  }
  if (t.kind == Token::Ident) {
    if (auto it = ctx.double_constants.find(t.text);
        it != ctx.double_constants.end()) {
      lx.take();
      return it->second;
    }
    if (auto it = ctx.constants.find(t.text); it != ctx.constants.end()) {
      lx.take();
      return static_cast<double>(it->second);
    }
  }
  lx.fail("expected a numeric constant");
}

inline double parse_number_term(Lexer& lx, const ParseContext& ctx) {
  double v = parse_number_factor(lx, ctx);
  for (;;) {
    if (lx.accept("*")) {
      v *= parse_number_factor(lx, ctx);
    } else if (lx.accept("/")) {
      v /= parse_number_factor(lx, ctx);
    } else {
      return v;
    }
  }
}

inline double parse_number_expr(Lexer& lx, const ParseContext& ctx) {
  double v = parse_number_term(lx, ctx);
  for (;;) {
    if (lx.accept("+")) {
      v += parse_number_term(lx, ctx);
    } else if (lx.accept("-")) {
      v -= parse_number_term(lx, ctx);
    } else {
      return v;
    }
  }
}

/// Evaluate an expression that must not reference variables.
inline long long eval_const(const ExprPtr& e) {
  bind_slots(e, {});  // throws on any variable reference
  return eval(*e, {});
}

/// One update: `true` or `(x'=e)` groups joined by `&`.
inline Update parse_update(Lexer& lx, const ParseContext& ctx) {
  Update u;
  if (lx.accept("true")) return u;
  for (;;) {
    lx.expect("(");
    const Lexer::Token name = lx.take();
    if (name.kind != Lexer::Token::Ident) lx.fail("expected a variable name");
    lx.expect("'=");
    u.assignments.emplace_back(name.text, parse_expr(lx, ctx));
    lx.expect(")");
    if (!lx.accept("&")) return u;
  }
}

inline Command parse_command(Lexer& lx, const ParseContext& ctx) {
  Command c;
  // "[action]" or "[]" has already consumed the "[".
  if (!lx.accept("]")) {
    const Lexer::Token a = lx.take();
    if (a.kind != Lexer::Token::Ident) lx.fail("expected an action name");
    c.action = a.text;
    lx.expect("]");
  }
  c.guard = parse_expr(lx, ctx);
  lx.expect("->");
  for (;;) {
    Update u;
    // Either "prob : update" or a bare update (probability one).  A bare
    // update starts with `true` or `(` ident `'=`, which the probability
    // grammar cannot consume past, so backtracking on failure is unambiguous.
    Lexer saved = lx;
    bool saw_prob = false;
    try {
      const double p = parse_number_expr(lx, ctx);
      if (lx.accept(":")) {
        u.probability = p;
        saw_prob = true;
      }
    } catch (const std::runtime_error&) {
      // fall through to the bare-update form
    }
    if (!saw_prob) {
      lx = saved;
      u.probability = 1.0;
    }
    const Update parsed = parse_update(lx, ctx);
    u.assignments = parsed.assignments;
    c.updates.push_back(std::move(u));
    if (!lx.accept("+")) break;
  }
  lx.expect(";");
  return c;
}

inline Variable parse_variable(Lexer& lx, const ParseContext& ctx,
                               const std::string& name) {
  // "name :" has been consumed.
  Variable v;
  v.name = name;
  lx.expect("[");
  v.low = static_cast<int>(eval_const(parse_expr(lx, ctx)));
  lx.expect("..");
  v.high = static_cast<int>(eval_const(parse_expr(lx, ctx)));
  lx.expect("]");
  if (lx.accept("init")) {
    v.init = static_cast<int>(eval_const(parse_expr(lx, ctx)));
  } else {
    v.init = v.low;
  }
  lx.expect(";");
  return v;
}

}  // namespace detail

/**
 * @brief Parse a guarded-command model from text.
 *
 * Accepts the exporter's canonical output plus `const int`, `const double`
 * and `formula` declarations, which are inlined while reading (the parsed
 * model therefore re-exports without them).
 */
inline GuardedCommandModel parse_prism(const std::string& text) {
  using Token = Lexer::Token;
  Lexer lx(text);
  ParseContext ctx;
  GuardedCommandModel model;
  bool header = false;

  while (lx.peek().kind != Token::End) {
    if (lx.accept("mdp")) {
      header = true;
      continue;
    }
    if (lx.accept("const")) {
      const bool is_double = lx.accept("double");
      if (!is_double) lx.accept("int");  // "const name" defaults to int
      const Token name = lx.take();
      if (name.kind != Token::Ident) lx.fail("expected a constant name");
      lx.expect("=");
      if (is_double) {
        ctx.double_constants[name.text] = detail::parse_number_expr(lx, ctx);
      } else {
        ctx.constants[name.text] = detail::eval_const(parse_expr(lx, ctx));
      }
      lx.expect(";");
      continue;
    }
    if (lx.accept("formula")) {
      const Token name = lx.take();
      if (name.kind != Token::Ident) lx.fail("expected a formula name");
      lx.expect("=");
      ctx.formulas[name.text] = parse_expr(lx, ctx);
      lx.expect(";");
      continue;
    }
    if (lx.accept("module")) {
      Module mod;
      const Token name = lx.take();
      if (name.kind != Token::Ident) lx.fail("expected a module name");
      mod.name = name.text;
      while (!lx.accept("endmodule")) {
        if (lx.accept("[")) {
          mod.commands.push_back(detail::parse_command(lx, ctx));
          continue;
        }
        const Token vn = lx.take();
        if (vn.kind != Token::Ident) {
          lx.fail("expected a variable declaration or command");
        }
        lx.expect(":");
        mod.variables.push_back(detail::parse_variable(lx, ctx, vn.text));
      }
      model.modules.push_back(std::move(mod));
      continue;
    }
    if (lx.accept("label")) {
      const Token name = lx.take();
      if (name.kind != Token::String) lx.fail("expected a label name string");
      lx.expect("=");
      ExprPtr e = parse_expr(lx, ctx);
      lx.expect(";");
      model.labels.emplace_back(name.text, std::move(e));
      continue;
    }
    if (lx.accept("rewards")) {
      const Token name = lx.take();
      if (name.kind != Token::String) lx.fail("expected a reward name string");
      model.reward_name = name.text;
      while (!lx.accept("endrewards")) {
        RewardItem item;
        lx.expect("[");
        if (!lx.accept("]")) {
          const Token a = lx.take();
          if (a.kind != Token::Ident) lx.fail("expected an action name");
          item.action = a.text;
          lx.expect("]");
        }
        item.guard = parse_expr(lx, ctx);
        lx.expect(":");
        item.value = detail::parse_number_expr(lx, ctx);
        lx.expect(";");
        model.rewards.push_back(std::move(item));
      }
      continue;
    }
    lx.fail("expected a top-level declaration");
  }
  if (!header) throw std::runtime_error("missing 'mdp' model type header");
  if (model.modules.empty()) throw std::runtime_error("model has no modules");
  return model;
}

}  // namespace srsim::mdp
