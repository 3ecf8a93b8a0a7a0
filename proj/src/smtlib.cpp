#include "chcstr/smtlib.hpp"

#include <cctype>
#include <sstream>

namespace chcstr {

std::string SExpr::str() const {
  if (atom) return text;
  std::string s = "(";
  for (std::size_t i = 0; i < list.size(); ++i) s += (i ? " " : "") + list[i].str();
  return s + ")";
}

std::vector<SExpr> parse_sexprs(const std::string& text) {
  std::size_t i = 0;
  int line = 1, col = 1;
  auto advance = [&] {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++i;
  };
  auto skip = [&] {
    while (i < text.size()) {
      if (std::isspace(static_cast<unsigned char>(text[i]))) {
        advance();
      } else if (text[i] == ';') {
        while (i < text.size() && text[i] != '\n') advance();
      } else {
        break;
      }
    }
  };
  std::vector<std::vector<SExpr>> stack{{}};
  for (skip(); i < text.size(); skip()) {
    char c = text[i];
    if (c == '(') {
      stack.emplace_back();
      advance();
    } else if (c == ')') {
      if (stack.size() == 1) throw ParseError("unbalanced ')'", line, col);
      SExpr e;
      e.atom = false;
      e.list = std::move(stack.back());
      stack.pop_back();
      stack.back().push_back(std::move(e));
      advance();
    } else if (c == '|') {
      advance();
      std::string s;
      while (i < text.size() && text[i] != '|') {
        s += text[i];
        advance();
      }
      if (i >= text.size()) throw ParseError("unterminated quoted symbol", line, col);
      advance();
      stack.back().push_back(SExpr{true, s, {}});
    } else if (c == '"') {
      std::string s(1, c);
      advance();
      while (i < text.size() && text[i] != '"') {
        s += text[i];
        advance();
      }
      if (i >= text.size()) throw ParseError("unterminated string", line, col);
      s += '"';
      advance();
      stack.back().push_back(SExpr{true, s, {}});
    } else {
      std::string s;
      while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])) && text[i] != '(' &&
             text[i] != ')' && text[i] != ';') {
        s += text[i];
        advance();
      }
      stack.back().push_back(SExpr{true, s, {}});
    }
  }
  if (stack.size() != 1) throw ParseError("unbalanced '('", line, col);
  return std::move(stack[0]);
}

std::string smt_symbol(const std::string& name) {
  bool simple = !name.empty() && !std::isdigit(static_cast<unsigned char>(name[0]));
  for (char c : name) simple &= std::isalnum(static_cast<unsigned char>(c)) || std::string("_~!@$%^&*+-=<>.?/").find(c) != std::string::npos;
  return simple ? name : "|" + name + "|";
}

std::string smt_sort(const Sort& s) {
  if (s.is_bool()) return "Bool";
  if (s.is_int()) return "Int";
  return s.adt;
}

namespace {

std::string int_lit(std::int64_t v) { return v < 0 ? "(- " + std::to_string(-v) + ")" : std::to_string(v); }

std::string app(const std::string& f, const std::vector<Expr>& kids) {
  std::string s = "(" + f;
  for (const auto& k : kids) s += " " + to_smt(k);
  return s + ")";
}

const char* op_name(Op op) {
  switch (op) {
    case Op::Add: return "+";
    case Op::Sub: return "-";
    case Op::Neg: return "-";
    case Op::Mul: return "*";
    case Op::Eq: return "=";
    case Op::Le: return "<=";
    case Op::Lt: return "<";
    case Op::Ge: return ">=";
    case Op::Gt: return ">";
    case Op::Not: return "not";
    case Op::And: return "and";
    case Op::Or: return "or";
    case Op::Implies: return "=>";
    case Op::Ite: return "ite";
    default: return "?";
  }
}

}  // namespace

std::string to_smt(const Expr& e) {
  switch (e.op()) {
    case Op::Var:
      return smt_symbol(e.name());
    case Op::IntLit:
      return int_lit(e.value());
    case Op::BoolLit:
      return e.value() ? "true" : "false";
    case Op::Ne:
      return "(not " + app("=", e.kids()) + ")";
    case Op::Eq:
      if (e.kid(0).is_var() && e.kid(1).op() == Op::BoolLit)
        return e.kid(1).is_true() ? smt_symbol(e.kid(0).name()) : "(not " + smt_symbol(e.kid(0).name()) + ")";
      return app("=", e.kids());
    case Op::And:
    case Op::Or:
      if (e.kids().empty()) return e.op() == Op::And ? "true" : "false";
      if (e.kids().size() == 1) return to_smt(e.kid(0));
      return app(op_name(e.op()), e.kids());
    default:
      return app(op_name(e.op()), e.kids());
  }
}

std::string to_smt(const Term& t) {
  switch (t.kind) {
    case Term::Kind::Var: return smt_symbol(t.name);
    case Term::Kind::Int: return int_lit(t.value);
    case Term::Kind::Bool: return t.value ? "true" : "false";
    case Term::Kind::Ctor: {
      if (t.args.empty()) return smt_symbol(t.name);
      std::string s = "(" + smt_symbol(t.name);
      for (const auto& a : t.args) s += " " + to_smt(a);
      return s + ")";
    }
  }
  return "?";
}

std::string var_from_smt(const std::string& symbol) {
  std::string s;
  for (char c : symbol) s += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
  if (s.empty()) return "V_";
  if (std::islower(static_cast<unsigned char>(s[0]))) {
    s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  } else if (!std::isupper(static_cast<unsigned char>(s[0])) && s[0] != '_') {
    s = "V_" + s;
  }
  return s;
}

namespace {

struct Converter {
  std::vector<std::map<std::string, Expr>> lets;
  const SmtScope& scope;

  [[noreturn]] void fail(const std::string& msg, const SExpr& s) const {
    throw ParseError(msg + ": " + s.str().substr(0, 120), 0, 0);
  }

  std::optional<std::int64_t> constant(const Expr& e) const {
    if (e.op() == Op::IntLit) return e.value();
    if (e.op() == Op::Neg)
      if (auto v = constant(e.kid(0))) return -*v;
    return std::nullopt;
  }

  Expr var_use(const Expr& v, bool formula) const {
    return formula && v.is_var() && v.sort().is_bool() ? mk_holds(v.name()) : v;
  }

  // `formula`: the term sits where a proposition is expected, so a bare Boolean
  // variable becomes `V = true`.
  Expr convert(const SExpr& s, bool formula) {
    if (s.atom) {
      if (s.text == "true") return Expr::boolean(true);
      if (s.text == "false") return Expr::boolean(false);
      if (!s.text.empty() && std::isdigit(static_cast<unsigned char>(s.text[0]))) {
        try {
          return Expr::integer(std::stoll(s.text));
        } catch (const std::exception&) {
          fail("integer literal out of range", s);
        }
      }
      for (auto it = lets.rbegin(); it != lets.rend(); ++it) {
        auto f = it->find(s.text);
        if (f != it->end()) return var_use(f->second, formula);
      }
      auto f = scope.find(s.text);
      if (f == scope.end()) fail("unknown symbol", s);
      return var_use(Expr::var(var_from_smt(s.text), f->second), formula);
    }
    if (s.list.empty() || !s.list[0].atom) fail("unsupported term", s);
    const std::string& f = s.list[0].text;
    if (f == "let") {
      if (s.list.size() != 3 || s.list[1].atom) fail("malformed let", s);
      std::map<std::string, Expr> frame;
      for (const auto& b : s.list[1].list) {
        if (b.atom || b.list.size() != 2 || !b.list[0].atom) fail("malformed let binding", b);
        frame.emplace(b.list[0].text, convert(b.list[1], false));
      }
      lets.push_back(std::move(frame));
      Expr body = convert(s.list[2], formula);
      lets.pop_back();
      return body;
    }
    bool logical = f == "and" || f == "or" || f == "not" || f == "=>";
    std::vector<Expr> k;
    for (std::size_t i = 1; i < s.list.size(); ++i)
      k.push_back(convert(s.list[i], logical || (f == "ite" && (i == 1 || formula))));
    auto need = [&](std::size_t n) {
      if (k.size() != n) fail("wrong number of arguments", s);
    };
    if (f == "and") return mk_and(k);
    if (f == "or") return mk_or(k);
    if (f == "not") {
      need(1);
      return mk_not(k[0]);
    }
    if (f == "=>") {
      if (k.size() < 2) fail("wrong number of arguments", s);
      Expr r = k.back();
      for (std::size_t i = k.size() - 1; i-- > 0;) r = mk_implies(k[i], r);
      return r;
    }
    if (f == "ite") {
      need(3);
      return mk_ite(k[0], k[1], k[2]);
    }
    if (f == "=" || f == "<=" || f == "<" || f == ">=" || f == ">") {
      if (k.size() < 2) fail("wrong number of arguments", s);
      Op op = f == "=" ? Op::Eq : f == "<=" ? Op::Le : f == "<" ? Op::Lt : f == ">=" ? Op::Ge : Op::Gt;
      std::vector<Expr> parts;
      for (std::size_t i = 0; i + 1 < k.size(); ++i)
        parts.push_back(op == Op::Eq ? mk_eq(k[i], k[i + 1]) : Expr::make(op, {k[i], k[i + 1]}));
      return mk_and(parts);
    }
    if (f == "distinct") {
      need(2);
      return Expr::make(Op::Ne, k);
    }
    if (f == "+") {
      if (k.empty()) fail("wrong number of arguments", s);
      Expr r = k[0];
      for (std::size_t i = 1; i < k.size(); ++i) r = Expr::make(Op::Add, {r, k[i]});
      return r;
    }
    if (f == "-") {
      if (k.size() == 1) {
        if (auto v = constant(k[0])) return Expr::integer(-*v);
        return Expr::make(Op::Neg, k);
      }
      if (k.empty()) fail("wrong number of arguments", s);
      Expr r = k[0];
      for (std::size_t i = 1; i < k.size(); ++i) r = Expr::make(Op::Sub, {r, k[i]});
      return r;
    }
    if (f == "*") {
      std::int64_t factor = 1;
      std::optional<Expr> rest;
      for (const auto& x : k) {
        if (auto v = constant(x)) {
          factor *= *v;
        } else if (rest) {
          fail("nonlinear multiplication", s);
        } else {
          rest = x;
        }
      }
      if (!rest) return Expr::integer(factor);
      return Expr::make(Op::Mul, {Expr::integer(factor), *rest});
    }
    fail("unsupported operator", s);
  }
};

}  // namespace

Expr expr_from_smt(const SExpr& s, const SmtScope& scope) {
  Converter c{{}, scope};
  return c.convert(s, true);
}

}  // namespace chcstr
