#include "chcstr/chc_text.hpp"

#include <cctype>
#include <functional>
#include <sstream>
#include <unordered_map>

namespace chcstr {

namespace {

// ---------------------------------------------------------------------------
// Lexer

enum class Tok { Ident, Var, Int, Sym, End };

struct Token {
  Tok kind;
  std::string text;
  std::int64_t value = 0;
  int line = 1;
  int col = 1;
};

std::vector<Token> lex(const std::string& src) {
  static const char* kSyms[] = {"::=", "<=>", ":-", "=>", "=<", "<=", ">=", "!=", "=", "<", ">",
                                "~",   "&",   "|",  "+",  "-",  "*",  "(",  ")",  "[", "]", ",",
                                ".",   ":"};
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (src.compare(i, 2, "//") == 0) {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (src.compare(i, 2, "/*") == 0) {
      int l0 = line, c0 = col;
      auto end = src.find("*/", i + 2);
      if (end == std::string::npos) throw ParseError("unterminated comment", l0, c0);
      advance(end + 2 - i);
      continue;
    }
    Token t;
    t.line = line;
    t.col = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      t.text = src.substr(i, j - i);
      t.kind = (std::isupper(static_cast<unsigned char>(c)) || c == '_') ? Tok::Var : Tok::Ident;
      advance(j - i);
      out.push_back(t);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      t.kind = Tok::Int;
      t.text = src.substr(i, j - i);
      try {
        t.value = std::stoll(t.text);
      } catch (const std::exception&) {
        throw ParseError("integer literal out of range", line, col);
      }
      advance(j - i);
      out.push_back(t);
      continue;
    }
    bool matched = false;
    for (const char* s : kSyms) {
      std::size_t n = std::char_traits<char>::length(s);
      if (src.compare(i, n, s) == 0) {
        t.kind = Tok::Sym;
        t.text = s;
        advance(n);
        out.push_back(t);
        matched = true;
        break;
      }
    }
    if (!matched) throw ParseError(std::string("unexpected character '") + c + "'", line, col);
  }
  Token end;
  end.kind = Tok::End;
  end.line = line;
  end.col = col;
  out.push_back(end);
  return out;
}

// ---------------------------------------------------------------------------
// Sort inference: union-find over unknown sorts.

class SortSolver {
 public:
  int fresh() {
    parent_.push_back(static_cast<int>(parent_.size()));
    bound_.emplace_back();
    return static_cast<int>(parent_.size()) - 1;
  }
  int find(int x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void bind(int x, const Sort& s, const std::string& where) {
    x = find(x);
    if (bound_[x] && *bound_[x] != s)
      throw SortError(where + ": sort " + bound_[x]->str() + " conflicts with " + s.str());
    bound_[x] = s;
  }
  void merge(int a, int b, const std::string& where) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (bound_[a] && bound_[b] && *bound_[a] != *bound_[b])
      throw SortError(where + ": sort " + bound_[a]->str() + " conflicts with " + bound_[b]->str());
    parent_[a] = b;
    if (!bound_[b]) bound_[b] = bound_[a];
  }
  Sort resolve(int x) {
    x = find(x);
    return bound_[x] ? *bound_[x] : Sort::integer();
  }
  bool resolved(int x) { return bound_[find(x)].has_value(); }

 private:
  std::vector<int> parent_;
  std::vector<std::optional<Sort>> bound_;
};

// Parsed clause before sorts are known: variables carry placeholder sorts.
struct RawClause {
  Clause clause;
  std::map<std::string, int> var_sort;
};

class Parser {
 public:
  Parser(const std::string& text, SortSolver& solver) : toks_(lex(text)), solver_(solver) {}

  // Parses a whole file into raw clauses plus predicate sort variables.
  void parse_file() {
    while (peek().kind != Tok::End) {
      if (is_sym(":-")) {
        parse_directive();
      } else {
        parse_clause();
      }
    }
  }

  Expr parse_single_formula(std::map<std::string, int>& vars) {
    cur_vars_ = &vars;
    where_ = "constraint";
    Expr e = formula();
    if (peek().kind != Tok::End) fail("trailing input after formula");
    return e;
  }

  std::vector<RawClause> clauses;
  std::vector<std::string> pred_order;
  std::map<std::string, std::vector<int>> pred_sorts;
  std::map<std::string, bool> pred_declared;
  std::vector<AdtDecl> adts{list_adt()};
  long max_suffix = 0;

 private:
  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  Token next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  bool is_sym(const char* s, std::size_t k = 0) const {
    return peek(k).kind == Tok::Sym && peek(k).text == s;
  }
  bool is_ident(const char* s) const { return peek().kind == Tok::Ident && peek().text == s; }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg + (peek().kind == Tok::End ? " at end of input" : " near '" + peek().text + "'"),
                     peek().line, peek().col);
  }
  void expect(const char* s) {
    if (!is_sym(s)) fail(std::string("expected '") + s + "'");
    next();
  }

  std::vector<int>& pred_slots(const std::string& name, std::size_t arity) {
    auto it = pred_sorts.find(name);
    if (it == pred_sorts.end()) {
      std::vector<int> slots;
      for (std::size_t i = 0; i < arity; ++i) slots.push_back(solver_.fresh());
      pred_order.push_back(name);
      it = pred_sorts.emplace(name, std::move(slots)).first;
    }
    if (it->second.size() != arity)
      throw SortError("atom " + name + ": arity " + std::to_string(arity) + " but " + name + " has arity " +
                      std::to_string(it->second.size()));
    return it->second;
  }

  Sort parse_sort_name() {
    Token t = next();
    if (t.kind != Tok::Ident && t.kind != Tok::Var) fail("expected a sort");
    if (t.text == "Int") return Sort::integer();
    if (t.text == "Bool") return Sort::boolean();
    return Sort::adt_named(t.text);
  }

  void parse_directive() {
    expect(":-");
    if (is_ident("pred")) {
      next();
      Token name = next();
      if (name.kind != Tok::Ident) fail("expected predicate name");
      std::vector<Sort> sorts;
      if (is_sym("(")) {
        next();
        sorts.push_back(parse_sort_name());
        while (is_sym(",")) {
          next();
          sorts.push_back(parse_sort_name());
        }
        expect(")");
      }
      expect(".");
      auto& slots = pred_slots(name.text, sorts.size());
      for (std::size_t i = 0; i < sorts.size(); ++i) solver_.bind(slots[i], sorts[i], "declaration of " + name.text);
      pred_declared[name.text] = true;
      return;
    }
    if (is_ident("data")) {
      next();
      Token name = next();
      if (name.kind != Tok::Var) fail("expected data type name");
      expect("::=");
      AdtDecl d{name.text, {}};
      do {
        if (is_sym("|")) next();
        Token c = next();
        if (c.kind != Tok::Ident) fail("expected constructor name");
        Constructor ctor{c.text, {}};
        if (is_sym("(")) {
          next();
          ctor.args.push_back(parse_sort_name());
          while (is_sym(",")) {
            next();
            ctor.args.push_back(parse_sort_name());
          }
          expect(")");
        }
        d.ctors.push_back(std::move(ctor));
      } while (is_sym("|"));
      expect(".");
      adts.push_back(std::move(d));
      return;
    }
    fail("unknown directive");
  }

  int var_slot(const std::string& name) {
    auto it = cur_vars_->find(name);
    if (it != cur_vars_->end()) return it->second;
    int s = solver_.fresh();
    cur_vars_->emplace(name, s);
    auto us = name.find_last_of('_');
    if (us != std::string::npos && us + 1 < name.size()) {
      bool digits = true;
      for (std::size_t k = us + 1; k < name.size(); ++k) digits &= std::isdigit(static_cast<unsigned char>(name[k])) != 0;
      if (digits) max_suffix = std::max(max_suffix, std::stol(name.substr(us + 1)));
    }
    return s;
  }

  const AdtDecl* adt_of_ctor(const std::string& ctor) const {
    for (const auto& a : adts)
      if (a.find(ctor)) return &a;
    return nullptr;
  }

  // A term and its sort slot.
  std::pair<Term, int> term() {
    const Token& t = peek();
    if (t.kind == Tok::Var) {
      next();
      int slot = var_slot(t.text);
      return {Term::var(t.text, Sort::integer()), slot};
    }
    if (t.kind == Tok::Int || (is_sym("-") && peek(1).kind == Tok::Int)) {
      bool neg = false;
      if (is_sym("-")) {
        next();
        neg = true;
      }
      std::int64_t v = next().value;
      int slot = solver_.fresh();
      solver_.bind(slot, Sort::integer(), where_);
      return {Term::integer(neg ? -v : v), slot};
    }
    if (t.kind == Tok::Ident && (t.text == "true" || t.text == "false")) {
      next();
      int slot = solver_.fresh();
      solver_.bind(slot, Sort::boolean(), where_);
      return {Term::boolean(t.text == "true"), slot};
    }
    if (is_sym("[")) return list_term();
    if (t.kind == Tok::Ident) {
      std::string name = next().text;
      const AdtDecl* adt = adt_of_ctor(name);
      if (!adt) fail("unknown constructor '" + name + "'");
      const Constructor* c = adt->find(name);
      std::vector<Term> args;
      if (is_sym("(")) {
        next();
        std::size_t k = 0;
        while (true) {
          auto [a, slot] = term();
          if (k >= c->args.size()) fail("too many arguments to constructor " + name);
          solver_.bind(slot, c->args[k], where_);
          args.push_back(std::move(a));
          ++k;
          if (!is_sym(",")) break;
          next();
        }
        expect(")");
      }
      if (args.size() != c->args.size()) fail("constructor " + name + " expects " + std::to_string(c->args.size()) + " arguments");
      int slot = solver_.fresh();
      solver_.bind(slot, Sort::adt_named(adt->name), where_);
      return {Term::ctor(name, Sort::adt_named(adt->name), std::move(args)), slot};
    }
    fail("expected a term");
  }

  std::pair<Term, int> list_term() {
    expect("[");
    int slot = solver_.fresh();
    solver_.bind(slot, Sort::list(), where_);
    if (is_sym("]")) {
      next();
      return {Term::nil(), slot};
    }
    std::vector<Term> elems;
    while (true) {
      auto [e, es] = term();
      solver_.bind(es, Sort::integer(), where_);
      elems.push_back(std::move(e));
      if (!is_sym(",")) break;
      next();
    }
    Term tail = Term::nil();
    if (is_sym("|")) {
      next();
      auto [t, ts] = term();
      solver_.bind(ts, Sort::list(), where_);
      tail = std::move(t);
    }
    expect("]");
    for (auto it = elems.rbegin(); it != elems.rend(); ++it) tail = Term::cons(*it, tail);
    return {tail, slot};
  }

  Atom atom() {
    Token name = next();
    Atom a{name.text, {}};
    where_ = "atom " + name.text;
    std::vector<int> slots;
    if (is_sym("(")) {
      next();
      while (true) {
        auto [t, s] = term();
        a.args.push_back(std::move(t));
        slots.push_back(s);
        if (!is_sym(",")) break;
        next();
      }
      expect(")");
    }
    auto& ps = pred_slots(a.pred, a.args.size());
    for (std::size_t i = 0; i < slots.size(); ++i) solver_.merge(slots[i], ps[i], where_);
    where_ = "constraint";
    return a;
  }

  // --- formulas -----------------------------------------------------------
  // Each expression carries a sort slot; `as_formula` turns a bare variable into `V=true`.
  struct PE {
    Expr e;
    int slot;
    bool bare_var = false;
  };

  int fixed(const Sort& s) {
    int k = solver_.fresh();
    solver_.bind(k, s, where_);
    return k;
  }

  Expr as_formula(const PE& p) {
    solver_.bind(p.slot, Sort::boolean(), where_);
    if (p.bare_var) return mk_holds(p.e.name());
    return p.e;
  }

  Expr formula() { return as_formula(iff()); }

  PE iff() {
    PE a = imp();
    while (is_sym("<=>")) {
      next();
      PE b = imp();
      solver_.bind(a.slot, Sort::boolean(), where_);
      solver_.bind(b.slot, Sort::boolean(), where_);
      a = PE{mk_eq(a.e, b.e), fixed(Sort::boolean())};
    }
    return a;
  }

  PE imp() {
    PE a = disj();
    if (is_sym("=>")) {
      next();
      PE b = imp();
      return PE{mk_implies(as_formula(a), as_formula(b)), fixed(Sort::boolean())};
    }
    return a;
  }

  PE disj() {
    PE a = conj();
    if (!is_sym("|")) return a;
    std::vector<Expr> kids{as_formula(a)};
    while (is_sym("|")) {
      next();
      kids.push_back(as_formula(conj()));
    }
    return PE{mk_or(std::move(kids)), fixed(Sort::boolean())};
  }

  PE conj() {
    PE a = unary();
    if (!is_sym("&")) return a;
    std::vector<Expr> kids{as_formula(a)};
    while (is_sym("&")) {
      next();
      kids.push_back(as_formula(unary()));
    }
    return PE{mk_and(std::move(kids)), fixed(Sort::boolean())};
  }

  PE unary() {
    if (is_sym("~")) {
      next();
      PE a = unary();
      return PE{mk_not(as_formula(a)), fixed(Sort::boolean())};
    }
    return cmp();
  }

  PE cmp() {
    PE a = sum();
    static const std::pair<const char*, Op> kOps[] = {{"=", Op::Eq},  {"!=", Op::Ne}, {"=<", Op::Le}, {"<=", Op::Le},
                                                      {">=", Op::Ge}, {"<", Op::Lt},  {">", Op::Gt}};
    for (const auto& [s, op] : kOps) {
      if (is_sym(s)) {
        next();
        PE b = sum();
        if (op == Op::Eq || op == Op::Ne) {
          solver_.merge(a.slot, b.slot, where_);
        } else {
          solver_.bind(a.slot, Sort::integer(), where_);
          solver_.bind(b.slot, Sort::integer(), where_);
        }
        return PE{Expr::make(op, {a.e, b.e}), fixed(Sort::boolean())};
      }
    }
    return a;
  }

  PE sum() {
    PE a = prod();
    while (is_sym("+") || is_sym("-")) {
      Op op = next().text == "+" ? Op::Add : Op::Sub;
      PE b = prod();
      solver_.bind(a.slot, Sort::integer(), where_);
      solver_.bind(b.slot, Sort::integer(), where_);
      a = PE{Expr::make(op, {a.e, b.e}), fixed(Sort::integer())};
    }
    return a;
  }

  PE prod() {
    PE a = neg();
    while (is_sym("*")) {
      next();
      PE b = neg();
      solver_.bind(a.slot, Sort::integer(), where_);
      solver_.bind(b.slot, Sort::integer(), where_);
      if (a.e.op() == Op::IntLit) {
        a = PE{Expr::make(Op::Mul, {a.e, b.e}), fixed(Sort::integer())};
      } else if (b.e.op() == Op::IntLit) {
        a = PE{Expr::make(Op::Mul, {b.e, a.e}), fixed(Sort::integer())};
      } else {
        fail("non-linear multiplication");
      }
    }
    return a;
  }

  PE neg() {
    if (is_sym("-")) {
      next();
      if (peek().kind == Tok::Int) return PE{Expr::integer(-next().value), fixed(Sort::integer())};
      PE a = neg();
      solver_.bind(a.slot, Sort::integer(), where_);
      return PE{Expr::make(Op::Neg, {a.e}), fixed(Sort::integer())};
    }
    return primary();
  }

  PE primary() {
    const Token& t = peek();
    if (t.kind == Tok::Int) return PE{Expr::integer(next().value), fixed(Sort::integer())};
    if (t.kind == Tok::Var) {
      std::string name = next().text;
      return PE{Expr::var(name, Sort::integer()), var_slot(name), true};
    }
    if (t.kind == Tok::Ident && (t.text == "true" || t.text == "false")) {
      bool b = next().text == "true";
      return PE{Expr::boolean(b), fixed(Sort::boolean())};
    }
    if (t.kind == Tok::Ident && t.text == "ite") {
      next();
      expect("(");
      Expr c = formula();
      expect(",");
      PE a = iff();
      expect(",");
      PE b = iff();
      expect(")");
      solver_.merge(a.slot, b.slot, where_);
      bool is_bool = solver_.resolved(a.slot) && solver_.resolve(a.slot).is_bool();
      Expr ta = is_bool ? as_formula(a) : a.e;
      Expr tb = is_bool ? as_formula(b) : b.e;
      return PE{mk_ite(c, ta, tb), a.slot};
    }
    if (is_sym("(")) {
      next();
      PE a = iff();
      expect(")");
      a.bare_var = a.bare_var && false;
      if (a.e.is_var()) a.bare_var = true;
      return a;
    }
    fail("expected a formula");
  }

  bool item_is_atom() const {
    const Token& t = peek();
    if (t.kind != Tok::Ident) return false;
    return t.text != "true" && t.text != "false" && t.text != "ite";
  }

  void parse_clause() {
    RawClause rc;
    cur_vars_ = &rc.var_sort;
    if (is_ident("false")) {
      next();
    } else {
      if (peek().kind != Tok::Ident) fail("expected clause head");
      rc.clause.head = atom();
    }
    std::vector<Expr> cons;
    if (is_sym(":-")) {
      next();
      while (true) {
        if (item_is_atom()) {
          rc.clause.body.push_back(atom());
        } else {
          where_ = "constraint";
          cons.push_back(formula());
        }
        if (!is_sym(",")) break;
        next();
      }
    }
    expect(".");
    rc.clause.constraint = mk_and(std::move(cons));
    clauses.push_back(std::move(rc));
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  SortSolver& solver_;
  std::map<std::string, int>* cur_vars_ = nullptr;
  std::string where_ = "constraint";
};

// Rebuilds variable sorts after inference.
Term resort(const Term& t, const std::map<std::string, Sort>& s) {
  if (t.is_var()) return Term::var(t.name, s.at(t.name));
  if (t.args.empty()) return t;
  Term r = t;
  for (auto& a : r.args) a = resort(a, s);
  return r;
}

Expr resort(const Expr& e, const std::map<std::string, Sort>& s) {
  if (e.is_var()) return Expr::var(e.name(), s.at(e.name()));
  if (e.kids().empty()) return e;
  std::vector<Expr> k;
  for (const auto& c : e.kids()) k.push_back(resort(c, s));
  // Bool branches whose sort was unknown when the ite was read.
  if (e.op() == Op::Ite)
    for (std::size_t i = 1; i < 3; ++i)
      if (k[i].is_var() && k[i].sort().is_bool()) k[i] = mk_holds(k[i].name());
  return Expr::make(e.op(), std::move(k));
}

}  // namespace

ChcSystem parse_chc(const std::string& text) {
  SortSolver solver;
  Parser p(text, solver);
  p.parse_file();
  ChcSystem sys;
  sys.adts = p.adts;
  for (const auto& name : p.pred_order) {
    PredDecl d{name, {}};
    for (int slot : p.pred_sorts.at(name)) d.args.push_back(solver.resolve(slot));
    sys.preds.push_back(std::move(d));
  }
  for (auto& rc : p.clauses) {
    std::map<std::string, Sort> sorts;
    for (const auto& [n, slot] : rc.var_sort) sorts[n] = solver.resolve(slot);
    Clause c;
    if (rc.clause.head) {
      c.head = Atom{rc.clause.head->pred, {}};
      for (const auto& t : rc.clause.head->args) c.head->args.push_back(resort(t, sorts));
    }
    c.constraint = resort(rc.clause.constraint, sorts);
    for (const auto& a : rc.clause.body) {
      Atom r{a.pred, {}};
      for (const auto& t : a.args) r.args.push_back(resort(t, sorts));
      c.body.push_back(std::move(r));
    }
    sys.add(std::move(c));
  }
  sys.reserve_fresh(p.max_suffix);
  sys.check();
  return sys;
}

Expr parse_constraint(const std::string& text, const std::map<std::string, Sort>& sorts) {
  SortSolver solver;
  Parser p(text, solver);
  std::map<std::string, int> vars;
  for (const auto& [n, s] : sorts) {
    int slot = solver.fresh();
    solver.bind(slot, s, "declaration of " + n);
    vars[n] = slot;
  }
  Expr e = p.parse_single_formula(vars);
  std::map<std::string, Sort> resolved;
  for (const auto& [n, slot] : vars) resolved[n] = solver.resolve(slot);
  return resort(e, resolved);
}

// ---------------------------------------------------------------------------
// Printing

std::string print_term(const Term& t) {
  switch (t.kind) {
    case Term::Kind::Var:
      return t.name;
    case Term::Kind::Int:
      return std::to_string(t.value);
    case Term::Kind::Bool:
      return t.value ? "true" : "false";
    case Term::Kind::Ctor:
      break;
  }
  if (t.sort == Sort::list()) {
    if (t.name == kNil) return "[]";
    std::string out = "[";
    const Term* cur = &t;
    bool first = true;
    while (cur->is_ctor() && cur->name == kCons) {
      if (!first) out += ",";
      out += print_term(cur->args[0]);
      first = false;
      cur = &cur->args[1];
    }
    if (!(cur->is_ctor() && cur->name == kNil)) out += "|" + print_term(*cur);
    return out + "]";
  }
  if (t.args.empty()) return t.name;
  std::string out = t.name + "(";
  for (std::size_t i = 0; i < t.args.size(); ++i) out += (i ? "," : "") + print_term(t.args[i]);
  return out + ")";
}

std::string print_atom(const Atom& a) {
  if (a.args.empty()) return a.pred;
  std::string out = a.pred + "(";
  for (std::size_t i = 0; i < a.args.size(); ++i) out += (i ? "," : "") + print_term(a.args[i]);
  return out + ")";
}

namespace {

// Binding strength used for parenthesization.
int level(const Expr& e) {
  switch (e.op()) {
    case Op::Implies:
      return 1;
    case Op::Or:
      return 2;
    case Op::And:
      return 3;
    case Op::Not:
      return 4;
    case Op::Eq:
      if (e.kid(0).is_var() && e.kid(0).sort().is_bool() && e.kid(1).op() == Op::BoolLit)
        return e.kid(1).value() ? 9 : 4;
      return 5;
    case Op::Ne:
    case Op::Le:
    case Op::Lt:
    case Op::Ge:
    case Op::Gt:
      return 5;
    case Op::Add:
    case Op::Sub:
      return 6;
    case Op::Mul:
      return 7;
    case Op::Neg:
      return 8;
    default:
      return 9;
  }
}

std::string pc(const Expr& e);

std::string wrap(const Expr& e, bool paren) { return paren ? "(" + pc(e) + ")" : pc(e); }

std::string pc(const Expr& e) {
  switch (e.op()) {
    case Op::Var:
      return e.name();
    case Op::IntLit:
      return std::to_string(e.value());
    case Op::BoolLit:
      return e.value() ? "true" : "false";
    case Op::Add:
    case Op::Sub:
      return wrap(e.kid(0), level(e.kid(0)) < 6) + (e.op() == Op::Add ? "+" : "-") +
             wrap(e.kid(1), level(e.kid(1)) <= 6 || e.kid(1).op() == Op::Neg ||
                                (e.kid(1).op() == Op::IntLit && e.kid(1).value() < 0));
    case Op::Mul:
      return wrap(e.kid(0), e.kid(0).value() < 0) + "*" + wrap(e.kid(1), level(e.kid(1)) < 8);
    case Op::Neg:
      return "-" + wrap(e.kid(0), level(e.kid(0)) < 9 || e.kid(0).op() == Op::IntLit);
    case Op::Eq:
      if (level(e) == 9) return e.kid(0).name();
      if (level(e) == 4) return "~" + e.kid(0).name();
      [[fallthrough]];
    case Op::Ne:
    case Op::Le:
    case Op::Lt:
    case Op::Ge:
    case Op::Gt: {
      static const std::map<Op, const char*> sym{{Op::Eq, "="}, {Op::Ne, "!="}, {Op::Le, "=<"},
                                                 {Op::Lt, "<"}, {Op::Ge, ">="}, {Op::Gt, ">"}};
      bool pa = level(e.kid(0)) <= 5, pb = level(e.kid(1)) <= 5;
      std::string op = sym.at(e.op());
      if (pa || pb) op = " " + op + " ";
      return wrap(e.kid(0), pa) + op + wrap(e.kid(1), pb);
    }
    case Op::Not:
      return "~" + wrap(e.kid(0), level(e.kid(0)) < 9);
    case Op::And:
    case Op::Or: {
      std::string out;
      const char* sep = e.op() == Op::And ? " & " : " | ";
      for (std::size_t i = 0; i < e.kids().size(); ++i) {
        if (i) out += sep;
        out += wrap(e.kid(i), level(e.kid(i)) <= 3);
      }
      return out;
    }
    case Op::Implies:
      return wrap(e.kid(0), level(e.kid(0)) <= 3) + " => " + wrap(e.kid(1), level(e.kid(1)) <= 3);
    case Op::Ite:
      return "ite(" + pc(e.kid(0)) + ", " + pc(e.kid(1)) + ", " + pc(e.kid(2)) + ")";
  }
  return "?";
}

}  // namespace

std::string print_constraint(const Expr& e) { return pc(e); }

std::string print_clause(const Clause& c) {
  std::string out = c.head ? print_atom(*c.head) : "false";
  std::vector<std::string> items;
  if (!c.constraint.is_true()) {
    // Top-level disjunctions and implications need no parentheses as a body item.
    items.push_back(pc(c.constraint));
  }
  for (const auto& a : c.body) items.push_back(print_atom(a));
  if (!items.empty()) {
    out += " :- ";
    for (std::size_t i = 0; i < items.size(); ++i) out += (i ? ", " : "") + items[i];
  }
  return out + ".";
}

namespace {

std::string print_decl(const PredDecl& d) {
  std::string out = ":- pred " + d.name;
  if (!d.args.empty()) {
    out += "(";
    for (std::size_t i = 0; i < d.args.size(); ++i) out += (i ? ", " : "") + d.args[i].str();
    out += ")";
  }
  return out + ".";
}

std::string print_adt(const AdtDecl& a) {
  std::string out = ":- data " + a.name + " ::= ";
  for (std::size_t i = 0; i < a.ctors.size(); ++i) {
    if (i) out += " | ";
    out += a.ctors[i].name;
    if (!a.ctors[i].args.empty()) {
      out += "(";
      for (std::size_t k = 0; k < a.ctors[i].args.size(); ++k) out += (k ? ", " : "") + a.ctors[i].args[k].str();
      out += ")";
    }
  }
  return out + ".";
}

}  // namespace

std::string print_chc(const ChcSystem& sys, PrintOptions opts) {
  std::string adt_text, body;
  for (const auto& a : sys.adts)
    if (a.name != "List") adt_text += print_adt(a) + "\n";
  for (const auto& c : sys.clauses) body += print_clause(c) + "\n";
  for (const auto& g : sys.goals) body += print_clause(g) + "\n";

  std::vector<const PredDecl*> needed;
  if (opts.explicit_decls) {
    for (const auto& p : sys.preds) needed.push_back(&p);
  } else {
    // Declare only what inference from the clause text alone would get wrong.
    std::map<std::string, std::vector<Sort>> inferred;
    try {
      ChcSystem back = parse_chc(adt_text + body);
      for (const auto& p : back.preds) inferred[p.name] = p.args;
    } catch (const Error&) {
      inferred.clear();
    }
    for (const auto& p : sys.preds) {
      auto it = inferred.find(p.name);
      if (it == inferred.end() || it->second != p.args) needed.push_back(&p);
    }
  }
  std::string decls;
  for (const auto* p : needed) decls += print_decl(*p) + "\n";
  return adt_text + decls + body;
}

}  // namespace chcstr
