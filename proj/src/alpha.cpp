#include "chcstr/alpha.hpp"

#include <functional>

namespace chcstr {

namespace {

struct State {
  std::map<std::string, std::string> fwd, bwd;
  std::map<std::string, std::string> pfwd, pbwd;
};

using K = std::function<bool(State&)>;

bool bind(std::map<std::string, std::string>& fwd, std::map<std::string, std::string>& bwd, const std::string& a,
          const std::string& b) {
  auto f = fwd.find(a);
  auto g = bwd.find(b);
  if (f != fwd.end() || g != bwd.end()) return f != fwd.end() && g != bwd.end() && f->second == b && g->second == a;
  fwd[a] = b;
  bwd[b] = a;
  return true;
}

// Rewrites `a >= b` to `b =< a` and `a > b` to `b < a`; flattens nested and/or.
Expr canon(const Expr& e) {
  if (e.kids().empty()) return e;
  std::vector<Expr> ks;
  for (const auto& k : e.kids()) {
    Expr c = canon(k);
    if ((e.op() == Op::And || e.op() == Op::Or) && c.op() == e.op()) {
      for (const auto& g : c.kids()) ks.push_back(g);
    } else {
      ks.push_back(c);
    }
  }
  if (e.op() == Op::Ge) return Expr::make(Op::Le, {ks[1], ks[0]});
  if (e.op() == Op::Gt) return Expr::make(Op::Lt, {ks[1], ks[0]});
  return Expr::make(e.op(), std::move(ks));
}

bool match(const Expr& a, const Expr& b, State s, const K& k);

bool match_list(const std::vector<Expr>& as, const std::vector<Expr>& bs, std::size_t i, State s, const K& k) {
  if (i == as.size()) return k(s);
  return match(as[i], bs[i], std::move(s), [&](State& t) { return match_list(as, bs, i + 1, t, k); });
}

// Multiset matching: as[i..] against the unused elements of bs.
bool match_bag(const std::vector<Expr>& as, const std::vector<Expr>& bs, std::vector<bool>& used, std::size_t i,
               State s, const K& k) {
  if (i == as.size()) return k(s);
  for (std::size_t j = 0; j < bs.size(); ++j) {
    if (used[j] || bs[j].op() != as[i].op()) continue;
    used[j] = true;
    bool ok = match(as[i], bs[j], s, [&](State& t) { return match_bag(as, bs, used, i + 1, t, k); });
    used[j] = false;
    if (ok) return true;
  }
  return false;
}

bool match(const Expr& a, const Expr& b, State s, const K& k) {
  if (a.op() != b.op() || a.kids().size() != b.kids().size()) return false;
  switch (a.op()) {
    case Op::Var:
      if (!(a.sort() == b.sort()) || !bind(s.fwd, s.bwd, a.name(), b.name())) return false;
      return k(s);
    case Op::IntLit:
    case Op::BoolLit:
      return a.value() == b.value() && k(s);
    case Op::And:
    case Op::Or: {
      std::vector<bool> used(b.kids().size(), false);
      return match_bag(a.kids(), b.kids(), used, 0, std::move(s), k);
    }
    case Op::Eq:
    case Op::Ne:
    case Op::Add:
      if (match_list(a.kids(), b.kids(), 0, s, k)) return true;
      return match_list(a.kids(), {b.kid(1), b.kid(0)}, 0, std::move(s), k);
    default:
      return match_list(a.kids(), b.kids(), 0, std::move(s), k);
  }
}

bool match_term(const Term& a, const Term& b, State& s) {
  if (a.kind != b.kind || !(a.sort == b.sort) || a.args.size() != b.args.size()) return false;
  switch (a.kind) {
    case Term::Kind::Var:
      return bind(s.fwd, s.bwd, a.name, b.name);
    case Term::Kind::Int:
    case Term::Kind::Bool:
      return a.value == b.value;
    case Term::Kind::Ctor:
      if (a.name != b.name) return false;
      for (std::size_t i = 0; i < a.args.size(); ++i)
        if (!match_term(a.args[i], b.args[i], s)) return false;
      return true;
  }
  return false;
}

bool match_atom(const Atom& a, const Atom& b, State& s, const AlphaOptions& o) {
  if (a.args.size() != b.args.size()) return false;
  if (o.rename_preds) {
    if (!bind(s.pfwd, s.pbwd, a.pred, b.pred)) return false;
  } else if (a.pred != b.pred) {
    return false;
  }
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!match_term(a.args[i], b.args[i], s)) return false;
  return true;
}

bool match_body(const Clause& a, const Clause& b, std::vector<bool>& used, std::size_t i, State s,
                const AlphaOptions& o, const K& k) {
  if (i == a.body.size()) return k(s);
  for (std::size_t j = 0; j < b.body.size(); ++j) {
    if (used[j]) continue;
    State t = s;
    if (!match_atom(a.body[i], b.body[j], t, o)) continue;
    used[j] = true;
    bool ok = match_body(a, b, used, i + 1, t, o, k);
    used[j] = false;
    if (ok) return true;
  }
  return false;
}

bool match_clause(const Clause& a, const Clause& b, State s, const AlphaOptions& o, const K& k) {
  if (a.is_goal() != b.is_goal() || a.body.size() != b.body.size()) return false;
  if (a.head && !match_atom(*a.head, *b.head, s, o)) return false;
  Expr ca = canon(simplify(a.constraint));
  Expr cb = canon(simplify(b.constraint));
  std::vector<bool> used(b.body.size(), false);
  return match_body(a, b, used, 0, std::move(s), o, [&](State& t) { return match(ca, cb, t, k); });
}

// Variables are local to a clause; only the predicate bijection carries over.
State clause_local(const State& s) {
  State t;
  t.pfwd = s.pfwd;
  t.pbwd = s.pbwd;
  return t;
}

bool match_clauses(const std::vector<Clause>& as, const std::vector<Clause>& bs, std::vector<bool>& used,
                   std::size_t i, State s, const AlphaOptions& o) {
  if (i == as.size()) return true;
  for (std::size_t j = 0; j < bs.size(); ++j) {
    if (used[j]) continue;
    used[j] = true;
    bool ok = match_clause(as[i], bs[j], clause_local(s), o, [&](State& t) {
      State next = s;
      next.pfwd = t.pfwd;
      next.pbwd = t.pbwd;
      return match_clauses(as, bs, used, i + 1, next, o);
    });
    used[j] = false;
    if (ok) return true;
  }
  return false;
}

}  // namespace

bool alpha_equivalent(const Expr& a, const Expr& b) {
  return match(canon(a), canon(b), State{}, [](State&) { return true; });
}

bool alpha_match(const Clause& a, const Clause& b, const AlphaOptions& o, Renaming& out) {
  return match_clause(a, b, State{}, o, [&](State& t) {
    out.vars = t.fwd;
    out.preds = t.pfwd;
    return true;
  });
}

bool alpha_equivalent(const Clause& a, const Clause& b, const AlphaOptions& o) {
  Renaming r;
  return alpha_match(a, b, o, r);
}

bool alpha_equivalent(const std::vector<Clause>& a, const std::vector<Clause>& b, const AlphaOptions& o) {
  if (a.size() != b.size()) return false;
  std::vector<bool> used(b.size(), false);
  return match_clauses(a, b, used, 0, State{}, o);
}

bool alpha_equivalent(const ChcSystem& a, const ChcSystem& b, const AlphaOptions& o) {
  std::vector<Clause> as = a.clauses, bs = b.clauses;
  for (const auto& g : a.goals) as.push_back(g);
  for (const auto& g : b.goals) bs.push_back(g);
  return alpha_equivalent(as, bs, o);
}

}  // namespace chcstr
