#include "chcstr/chc.hpp"

#include <algorithm>
#include <functional>

namespace chcstr {

std::string Sort::str() const {
  switch (kind) {
    case Kind::Bool:
      return "Bool";
    case Kind::Int:
      return "Int";
    case Kind::Adt:
      return adt;
  }
  return "?";
}

const Constructor* AdtDecl::find(const std::string& ctor) const {
  for (const auto& c : ctors)
    if (c.name == ctor) return &c;
  return nullptr;
}

AdtDecl list_adt() {
  return AdtDecl{"List", {{kNil, {}}, {kCons, {Sort::integer(), Sort::list()}}}};
}

// ---------------------------------------------------------------------------
// Terms

Term Term::var(std::string name, Sort sort) {
  Term t;
  t.kind = Kind::Var;
  t.sort = std::move(sort);
  t.name = std::move(name);
  return t;
}

Term Term::integer(std::int64_t v) {
  Term t;
  t.kind = Kind::Int;
  t.sort = Sort::integer();
  t.value = v;
  return t;
}

Term Term::boolean(bool b) {
  Term t;
  t.kind = Kind::Bool;
  t.sort = Sort::boolean();
  t.value = b ? 1 : 0;
  return t;
}

Term Term::ctor(std::string name, Sort sort, std::vector<Term> args) {
  Term t;
  t.kind = Kind::Ctor;
  t.sort = std::move(sort);
  t.name = std::move(name);
  t.args = std::move(args);
  return t;
}

Term Term::nil() { return ctor(kNil, Sort::list(), {}); }

Term Term::cons(Term head, Term tail) {
  return ctor(kCons, Sort::list(), {std::move(head), std::move(tail)});
}

bool Term::is_ground() const {
  if (kind == Kind::Var) return false;
  return std::all_of(args.begin(), args.end(), [](const Term& a) { return a.is_ground(); });
}

int Term::depth() const {
  if (kind != Kind::Ctor || args.empty()) return 0;
  int d = 0;
  for (const auto& a : args)
    if (a.kind == Kind::Ctor || (a.kind == Kind::Var && a.sort.is_adt())) d = std::max(d, a.depth());
  return d + 1;
}

int Term::compare(const Term& a, const Term& b) {
  if (a.kind != b.kind) return a.kind < b.kind ? -1 : 1;
  if (a.sort != b.sort) return a.sort < b.sort ? -1 : 1;
  if (a.name != b.name) return a.name < b.name ? -1 : 1;
  if (a.value != b.value) return a.value < b.value ? -1 : 1;
  if (a.args.size() != b.args.size()) return a.args.size() < b.args.size() ? -1 : 1;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (int c = compare(a.args[i], b.args[i])) return c;
  return 0;
}

bool operator<(const Atom& a, const Atom& b) {
  if (a.pred != b.pred) return a.pred < b.pred;
  return a.args < b.args;
}

std::size_t hash_term(const Term& t) {
  std::size_t h = std::hash<int>()(static_cast<int>(t.kind));
  auto mix = [&h](std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
  mix(std::hash<std::string>()(t.name));
  mix(std::hash<std::int64_t>()(t.value));
  for (const auto& a : t.args) mix(hash_term(a));
  return h;
}

// ---------------------------------------------------------------------------
// Expressions

Expr::Expr() : Expr(boolean(true)) {}

Expr Expr::var(std::string name, Sort sort) {
  return Expr(std::make_shared<const Node>(Node{Op::Var, std::move(sort), std::move(name), 0, {}}));
}

Expr Expr::integer(std::int64_t v) {
  return Expr(std::make_shared<const Node>(Node{Op::IntLit, Sort::integer(), {}, v, {}}));
}

Expr Expr::boolean(bool b) {
  return Expr(std::make_shared<const Node>(Node{Op::BoolLit, Sort::boolean(), {}, b ? 1 : 0, {}}));
}

Expr Expr::make(Op op, std::vector<Expr> kids) {
  Sort s = Sort::boolean();
  switch (op) {
    case Op::Add:
    case Op::Sub:
    case Op::Neg:
    case Op::Mul:
      s = Sort::integer();
      break;
    case Op::Ite:
      s = kids.at(1).sort();
      break;
    default:
      break;
  }
  return Expr(std::make_shared<const Node>(Node{op, s, {}, 0, std::move(kids)}));
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  if (a.op() != b.op() || a.value() != b.value() || a.name() != b.name() || a.sort() != b.sort())
    return false;
  return a.kids() == b.kids();
}

bool operator<(const Expr& a, const Expr& b) {
  if (a.op() != b.op()) return a.op() < b.op();
  if (a.value() != b.value()) return a.value() < b.value();
  if (a.name() != b.name()) return a.name() < b.name();
  if (a.sort() != b.sort()) return a.sort() < b.sort();
  return std::lexicographical_compare(a.kids().begin(), a.kids().end(), b.kids().begin(),
                                      b.kids().end());
}

Expr mk_and(std::vector<Expr> kids) {
  std::vector<Expr> flat;
  for (auto& k : kids) {
    if (k.is_true()) continue;
    if (k.is_false()) return Expr::boolean(false);
    if (k.op() == Op::And) {
      for (const auto& kk : k.kids()) flat.push_back(kk);
    } else {
      flat.push_back(std::move(k));
    }
  }
  if (flat.empty()) return Expr::boolean(true);
  if (flat.size() == 1) return flat.front();
  return Expr::make(Op::And, std::move(flat));
}

Expr mk_or(std::vector<Expr> kids) {
  std::vector<Expr> flat;
  for (auto& k : kids) {
    if (k.is_false()) continue;
    if (k.is_true()) return Expr::boolean(true);
    if (k.op() == Op::Or) {
      for (const auto& kk : k.kids()) flat.push_back(kk);
    } else {
      flat.push_back(std::move(k));
    }
  }
  if (flat.empty()) return Expr::boolean(false);
  if (flat.size() == 1) return flat.front();
  return Expr::make(Op::Or, std::move(flat));
}

namespace {

bool is_bool_var_test(const Expr& e) {
  return e.op() == Op::Eq && e.kid(0).is_var() && e.kid(0).sort().is_bool() &&
         e.kid(1).op() == Op::BoolLit;
}

}  // namespace

Expr mk_not(const Expr& e) {
  if (e.op() == Op::BoolLit) return Expr::boolean(!e.value());
  if (e.op() == Op::Not) return e.kid(0);
  if (is_bool_var_test(e)) return Expr::make(Op::Eq, {e.kid(0), Expr::boolean(!e.kid(1).value())});
  return Expr::make(Op::Not, {e});
}

Expr mk_implies(const Expr& a, const Expr& b) { return Expr::make(Op::Implies, {a, b}); }

Expr mk_eq(const Expr& a, const Expr& b) { return Expr::make(Op::Eq, {a, b}); }

Expr mk_ite(const Expr& c, const Expr& t, const Expr& e) { return Expr::make(Op::Ite, {c, t, e}); }

Expr mk_holds(const std::string& var) {
  return Expr::make(Op::Eq, {Expr::var(var, Sort::boolean()), Expr::boolean(true)});
}

Expr mk_cmp(Op op, const Expr& a, const Expr& b) { return Expr::make(op, {a, b}); }

std::vector<Expr> conjuncts(const Expr& e) {
  if (e.is_true()) return {};
  if (e.op() == Op::And) {
    std::vector<Expr> out;
    for (const auto& k : e.kids()) {
      auto sub = conjuncts(k);
      out.insert(out.end(), sub.begin(), sub.end());
    }
    return out;
  }
  return {e};
}

namespace {

std::optional<Expr> negate_cmp(const Expr& e) {
  auto flip = [&](Op op) { return Expr::make(op, {e.kid(0), e.kid(1)}); };
  switch (e.op()) {
    case Op::Gt:
      return flip(Op::Le);
    case Op::Lt:
      return flip(Op::Ge);
    case Op::Le:
      return flip(Op::Gt);
    case Op::Ge:
      return flip(Op::Lt);
    case Op::Ne:
      return flip(Op::Eq);
    case Op::Eq:
      if (e.kid(0).sort().is_int()) return flip(Op::Ne);
      if (is_bool_var_test(e)) return mk_not(e);
      return std::nullopt;
    default:
      return std::nullopt;
  }
}

Expr negate(const Expr& e) {
  if (auto n = negate_cmp(e)) return *n;
  return mk_not(e);
}

bool is_negative_form(const Expr& e) {
  return e.op() == Op::Not || (is_bool_var_test(e) && !e.kid(1).value());
}

}  // namespace

Expr simplify(const Expr& e) {
  if (e.kids().empty()) return e;
  std::vector<Expr> k;
  k.reserve(e.kids().size());
  for (const auto& c : e.kids()) k.push_back(simplify(c));
  switch (e.op()) {
    case Op::And:
      return mk_and(std::move(k));
    case Op::Or: {
      Expr r = mk_or(std::move(k));
      if (r.op() == Op::Or && r.kids().size() == 2 && is_negative_form(r.kid(0)) &&
          !is_negative_form(r.kid(1)))
        return mk_implies(mk_not(r.kid(0)), r.kid(1));
      return r;
    }
    case Op::Not:
      return negate(k[0]);
    case Op::Implies:
      if (k[0].is_true()) return k[1];
      if (k[0].is_false() || k[1].is_true()) return Expr::boolean(true);
      if (k[1].is_false()) return negate(k[0]);
      return mk_implies(k[0], k[1]);
    case Op::Ite: {
      const Expr &c = k[0], &t = k[1], &f = k[2];
      if (c.is_true()) return t;
      if (c.is_false()) return f;
      if (t.sort().is_bool()) {
        if (t.is_true() && f.is_false()) return c;
        if (t.is_false() && f.is_true()) return negate(c);
        if (t.is_false()) return mk_and({negate(c), f});
        if (t.is_true()) return mk_or({c, f});
        if (f.is_false()) return mk_and({c, t});
        if (f.is_true()) return mk_implies(c, t);
      }
      return mk_ite(c, t, f);
    }
    case Op::Eq:
      if (k[0].sort().is_bool()) {
        if (k[0].op() == Op::BoolLit && k[1].op() != Op::BoolLit) std::swap(k[0], k[1]);
        if (k[1].op() == Op::BoolLit && !k[0].is_var()) {
          if (k[0].op() == Op::BoolLit) return Expr::boolean(k[0].value() == k[1].value());
          return k[1].value() ? k[0] : negate(k[0]);
        }
      } else if (k[0].op() == Op::IntLit && k[1].op() == Op::IntLit) {
        return Expr::boolean(k[0].value() == k[1].value());
      }
      return mk_eq(k[0], k[1]);
    case Op::Add:
      if (k[0].op() == Op::IntLit && k[1].op() == Op::IntLit)
        return Expr::integer(k[0].value() + k[1].value());
      break;
    case Op::Sub:
      if (k[0].op() == Op::IntLit && k[1].op() == Op::IntLit)
        return Expr::integer(k[0].value() - k[1].value());
      break;
    case Op::Mul:
      if (k[0].op() == Op::IntLit && k[1].op() == Op::IntLit)
        return Expr::integer(k[0].value() * k[1].value());
      break;
    case Op::Neg:
      if (k[0].op() == Op::IntLit) return Expr::integer(-k[0].value());
      break;
    case Op::Ne:
    case Op::Le:
    case Op::Lt:
    case Op::Ge:
    case Op::Gt:
      if (k[0].op() == Op::IntLit && k[1].op() == Op::IntLit) {
        std::int64_t a = k[0].value(), b = k[1].value();
        switch (e.op()) {
          case Op::Ne: return Expr::boolean(a != b);
          case Op::Le: return Expr::boolean(a <= b);
          case Op::Lt: return Expr::boolean(a < b);
          case Op::Ge: return Expr::boolean(a >= b);
          default: return Expr::boolean(a > b);
        }
      }
      break;
    default:
      break;
  }
  return Expr::make(e.op(), std::move(k));
}

Expr term_to_expr(const Term& t) {
  switch (t.kind) {
    case Term::Kind::Var:
      if (!t.sort.is_basic()) throw SortError("ADT variable " + t.name + " inside a constraint");
      return Expr::var(t.name, t.sort);
    case Term::Kind::Int:
      return Expr::integer(t.value);
    case Term::Kind::Bool:
      return Expr::boolean(t.value != 0);
    case Term::Kind::Ctor:
      break;
  }
  throw SortError("constructor term " + t.name + " inside a constraint");
}

std::optional<Term> expr_to_term(const Expr& e) {
  switch (e.op()) {
    case Op::Var:
      return Term::var(e.name(), e.sort());
    case Op::IntLit:
      return Term::integer(e.value());
    case Op::BoolLit:
      return Term::boolean(e.value() != 0);
    case Op::Neg:
      if (e.kid(0).op() == Op::IntLit) return Term::integer(-e.kid(0).value());
      return std::nullopt;
    default:
      return std::nullopt;
  }
}

void collect_vars(const Expr& e, std::map<std::string, Sort>& out) {
  if (e.is_var()) {
    out.emplace(e.name(), e.sort());
    return;
  }
  for (const auto& k : e.kids()) collect_vars(k, out);
}

void collect_vars(const Term& t, std::map<std::string, Sort>& out) {
  if (t.is_var()) {
    out.emplace(t.name, t.sort);
    return;
  }
  for (const auto& a : t.args) collect_vars(a, out);
}

std::map<std::string, Sort> Clause::vars() const {
  std::map<std::string, Sort> out;
  if (head)
    for (const auto& a : head->args) collect_vars(a, out);
  collect_vars(constraint, out);
  for (const auto& atom : body)
    for (const auto& a : atom.args) collect_vars(a, out);
  return out;
}

// ---------------------------------------------------------------------------
// Substitution and unification

Term substitute(const Term& t, const Binding& b) {
  if (t.is_var()) {
    auto it = b.find(t.name);
    return it == b.end() ? t : it->second;
  }
  if (t.args.empty()) return t;
  Term r = t;
  for (auto& a : r.args) a = substitute(a, b);
  return r;
}

Expr substitute(const Expr& e, const Binding& b) {
  if (e.is_var()) {
    auto it = b.find(e.name());
    return it == b.end() ? e : term_to_expr(it->second);
  }
  if (e.kids().empty()) return e;
  std::vector<Expr> k;
  k.reserve(e.kids().size());
  for (const auto& c : e.kids()) k.push_back(substitute(c, b));
  switch (e.op()) {
    case Op::And:
      return mk_and(std::move(k));
    case Op::Not:
      return mk_not(k[0]);
    default:
      return Expr::make(e.op(), std::move(k));
  }
}

Atom substitute(const Atom& a, const Binding& b) {
  Atom r{a.pred, {}};
  r.args.reserve(a.args.size());
  for (const auto& t : a.args) r.args.push_back(substitute(t, b));
  return r;
}

Clause substitute(const Clause& c, const Binding& b) {
  auto vars = c.vars();
  for (const auto& [name, term] : b) {
    auto it = vars.find(name);
    if (it != vars.end() && it->second != term.sort)
      throw SortError("binding " + name + " : " + it->second.str() + " to a term of sort " +
                      term.sort.str());
  }
  Clause r;
  if (c.head) r.head = substitute(*c.head, b);
  r.constraint = substitute(c.constraint, b);
  for (const auto& a : c.body) r.body.push_back(substitute(a, b));
  return r;
}

Term resolve(const Term& t, const Binding& mgu) {
  if (t.is_var()) {
    auto it = mgu.find(t.name);
    if (it == mgu.end()) return t;
    return resolve(it->second, mgu);
  }
  if (t.args.empty()) return t;
  Term r = t;
  for (auto& a : r.args) a = resolve(a, mgu);
  return r;
}

namespace {

bool occurs(const std::string& v, const Term& t, const Binding& mgu) {
  if (t.is_var()) {
    if (t.name == v) return true;
    auto it = mgu.find(t.name);
    return it != mgu.end() && occurs(v, it->second, mgu);
  }
  return std::any_of(t.args.begin(), t.args.end(),
                     [&](const Term& a) { return occurs(v, a, mgu); });
}

Term walk(const Term& t, const Binding& mgu) {
  Term cur = t;
  while (cur.is_var()) {
    auto it = mgu.find(cur.name);
    if (it == mgu.end()) break;
    cur = it->second;
  }
  return cur;
}

}  // namespace

bool unify(const Term& a0, const Term& b0, Binding& mgu) {
  Term a = walk(a0, mgu);
  Term b = walk(b0, mgu);
  if (a.sort != b.sort) return false;
  if (a.is_var() && b.is_var() && a.name == b.name) return true;
  if (a.is_var()) {
    if (occurs(a.name, b, mgu)) return false;
    mgu[a.name] = b;
    return true;
  }
  if (b.is_var()) {
    if (occurs(b.name, a, mgu)) return false;
    mgu[b.name] = a;
    return true;
  }
  if (a.kind != b.kind || a.name != b.name || a.value != b.value || a.args.size() != b.args.size())
    return false;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!unify(a.args[i], b.args[i], mgu)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Systems

ChcSystem::ChcSystem() { adts.push_back(list_adt()); }

const PredDecl* ChcSystem::find_pred(const std::string& name) const {
  for (const auto& p : preds)
    if (p.name == name) return &p;
  return nullptr;
}

const AdtDecl* ChcSystem::find_adt(const std::string& name) const {
  for (const auto& a : adts)
    if (a.name == name) return &a;
  return nullptr;
}

void ChcSystem::declare(PredDecl d) {
  if (const auto* existing = find_pred(d.name)) {
    if (*existing != d) throw SortError("conflicting declarations for predicate " + d.name);
    return;
  }
  preds.push_back(std::move(d));
}

void ChcSystem::add(Clause c) {
  if (c.is_goal())
    goals.push_back(std::move(c));
  else
    clauses.push_back(std::move(c));
}

std::vector<const Clause*> ChcSystem::clauses_of(const std::string& pred) const {
  std::vector<const Clause*> out;
  for (const auto& c : clauses)
    if (c.head->pred == pred) out.push_back(&c);
  return out;
}

std::string ChcSystem::fresh_name(const std::string& stem) {
  std::string base = stem;
  auto us = base.find_last_of('_');
  if (us != std::string::npos && us + 1 < base.size() && us > 0 &&
      std::all_of(base.begin() + static_cast<long>(us) + 1, base.end(), [](char ch) { return ch >= '0' && ch <= '9'; }))
    base.resize(us);
  return base + "_" + std::to_string(++fresh_);
}

namespace {

void check_term_sort(const ChcSystem& sys, const Term& t, const Sort& expected, const Atom& atom) {
  auto fail = [&](const std::string& why) {
    throw SortError("atom " + atom.pred + ": " + why);
  };
  if (t.sort != expected) fail("argument of sort " + t.sort.str() + ", expected " + expected.str());
  if (t.kind == Term::Kind::Ctor) {
    const AdtDecl* adt = sys.find_adt(t.sort.adt);
    if (!adt) fail("undeclared data type " + t.sort.adt);
    const Constructor* c = adt->find(t.name);
    if (!c) fail("unknown constructor " + t.name);
    if (c->args.size() != t.args.size()) fail("constructor " + t.name + " arity mismatch");
    for (std::size_t i = 0; i < t.args.size(); ++i) check_term_sort(sys, t.args[i], c->args[i], atom);
  }
}

void check_atom(const ChcSystem& sys, const Atom& a) {
  const PredDecl* d = sys.find_pred(a.pred);
  if (!d) throw SortError("undeclared predicate in atom " + a.pred);
  if (d->args.size() != a.args.size())
    throw SortError("atom " + a.pred + ": arity " + std::to_string(a.args.size()) + ", declared " +
                    std::to_string(d->args.size()));
  for (std::size_t i = 0; i < a.args.size(); ++i) check_term_sort(sys, a.args[i], d->args[i], a);
}

void check_clause(const ChcSystem& sys, const Clause& c) {
  if (c.head) check_atom(sys, *c.head);
  for (const auto& a : c.body) check_atom(sys, a);
  std::map<std::string, Sort> cv;
  collect_vars(c.constraint, cv);
  for (const auto& [n, s] : cv)
    if (!s.is_basic()) throw SortError("constraint variable " + n + " has non-basic sort");
  // A variable must carry one sort throughout the clause.
  std::map<std::string, Sort> seen;
  std::function<void(const Term&)> visit = [&](const Term& t) {
    if (t.is_var()) {
      auto [it, inserted] = seen.emplace(t.name, t.sort);
      if (!inserted && it->second != t.sort) throw SortError("variable " + t.name + " used with two sorts");
    }
    for (const auto& a : t.args) visit(a);
  };
  if (c.head)
    for (const auto& t : c.head->args) visit(t);
  for (const auto& a : c.body)
    for (const auto& t : a.args) visit(t);
  for (const auto& [n, s] : cv) visit(Term::var(n, s));
}

}  // namespace

void ChcSystem::check() const {
  for (const auto& p : preds)
    for (const auto& s : p.args)
      if (s.is_adt() && !find_adt(s.adt)) throw SortError("predicate " + p.name + " uses undeclared sort " + s.adt);
  for (const auto& c : clauses) check_clause(*this, c);
  for (const auto& g : goals) check_clause(*this, g);
}

bool ChcSystem::has_adt_vars() const {
  auto any_adt = [](const Clause& c) {
    for (const auto& [n, s] : c.vars())
      if (s.is_adt()) return true;
    return false;
  };
  return std::any_of(clauses.begin(), clauses.end(), any_adt) ||
         std::any_of(goals.begin(), goals.end(), any_adt);
}

Clause rename_apart(const Clause& c, ChcSystem& sys, const std::string& stem) {
  Binding b;
  for (const auto& [name, sort] : c.vars())
    b[name] = Term::var(sys.fresh_name(stem.empty() ? name : stem), sort);
  return substitute(c, b);
}

}  // namespace chcstr
