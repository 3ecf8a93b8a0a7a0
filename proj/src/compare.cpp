#include "chcstr/compare.hpp"

#include "chcstr/alpha.hpp"

namespace chcstr {

namespace {

Op negated(Op op) {
  switch (op) {
    case Op::Eq: return Op::Ne;
    case Op::Ne: return Op::Eq;
    case Op::Le: return Op::Gt;
    case Op::Lt: return Op::Ge;
    case Op::Ge: return Op::Lt;
    case Op::Gt: return Op::Le;
    default: return op;
  }
}

Expr junction(Op op, const std::vector<Expr>& parts) {
  std::vector<Expr> flat;
  for (const auto& p : parts) {
    if (p.op() == op) {
      flat.insert(flat.end(), p.kids().begin(), p.kids().end());
    } else {
      flat.push_back(p);
    }
  }
  if (flat.size() == 1) return flat[0];
  return Expr::make(op, std::move(flat));
}

bool is_bool_lit(const Expr& e) { return e.op() == Op::BoolLit; }

Expr nnf(const Expr& e, bool pos) {
  switch (e.op()) {
    case Op::BoolLit:
      return pos ? e : Expr::boolean(e.is_false());
    case Op::Not:
      return nnf(e.kid(0), !pos);
    case Op::And:
    case Op::Or: {
      std::vector<Expr> ks;
      for (const auto& k : e.kids()) ks.push_back(nnf(k, pos));
      Op op = (e.op() == Op::And) == pos ? Op::And : Op::Or;
      return junction(op, ks);
    }
    case Op::Implies:
      if (pos) return junction(Op::Or, {nnf(e.kid(0), false), nnf(e.kid(1), true)});
      return junction(Op::And, {nnf(e.kid(0), true), nnf(e.kid(1), false)});
    case Op::Ite:
      return Expr::make(Op::Ite, {nnf(e.kid(0), true), nnf(e.kid(1), pos), nnf(e.kid(2), pos)});
    case Op::Eq:
    case Op::Ne:
      if (e.kid(0).sort().is_bool()) {
        bool eq = (e.op() == Op::Eq) == pos;
        const Expr& a = e.kid(0);
        const Expr& b = e.kid(1);
        if (is_bool_lit(b) && a.is_var()) return Expr::make(Op::Eq, {a, Expr::boolean(b.is_true() == eq)});
        if (is_bool_lit(a) && b.is_var()) return Expr::make(Op::Eq, {b, Expr::boolean(a.is_true() == eq)});
        return Expr::make(Op::Eq, {nnf(a, true), nnf(b, eq)});
      }
      return Expr::make(pos ? e.op() : negated(e.op()), e.kids());
    case Op::Le:
    case Op::Lt:
    case Op::Ge:
    case Op::Gt:
      return Expr::make(pos ? e.op() : negated(e.op()), e.kids());
    case Op::Var:
      if (e.sort().is_bool()) return Expr::make(Op::Eq, {e, Expr::boolean(pos)});
      return e;
    default:
      return e;
  }
}

}  // namespace

Expr normal_form(const Expr& e) { return nnf(simplify(e), true); }

Clause normal_form(const Clause& c) {
  Clause cur = c;
  for (bool again = true; again;) {
    again = false;
    for (const auto& k : conjuncts(cur.constraint)) {
      if (k.op() != Op::Eq || !k.kid(0).is_var() || !k.kid(1).is_var()) continue;
      if (k.kid(0).sort() != k.kid(1).sort() || k.kid(0).name() == k.kid(1).name()) continue;
      Binding b{{k.kid(1).name(), Term::var(k.kid(0).name(), k.kid(0).sort())}};
      cur = substitute(cur, b);
      std::vector<Expr> rest;
      for (const auto& x : conjuncts(cur.constraint))
        if (!(x.op() == Op::Eq && x.kid(0) == x.kid(1))) rest.push_back(x);
      cur.constraint = simplify(mk_and(rest));
      again = true;
      break;
    }
  }
  cur.constraint = normal_form(cur.constraint);
  return cur;
}

std::optional<std::vector<std::size_t>> head_permutation(const Clause& ours, const Clause& theirs) {
  if (!ours.head || !theirs.head || ours.head->args.size() != theirs.head->args.size()) return std::nullopt;
  Clause a = ours, b = theirs;
  a.head.reset();
  b.head.reset();
  Renaming r;
  if (!alpha_match(a, b, {}, r)) return std::nullopt;
  std::size_t n = ours.head->args.size();
  std::vector<std::size_t> perm(n);
  std::vector<bool> used(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    const Term& t = theirs.head->args[i];
    bool found = false;
    for (std::size_t j = 0; j < n && !found; ++j) {
      const Term& s = ours.head->args[j];
      if (used[j] || !s.is_var() || !t.is_var()) continue;
      auto it = r.vars.find(s.name);
      if (it == r.vars.end() || it->second != t.name) continue;
      perm[i] = j;
      used[j] = true;
      found = true;
    }
    if (!found) return std::nullopt;
  }
  return perm;
}

Clause apply_correspondence(const Clause& c, const std::vector<PredCorrespondence>& m) {
  Clause out = c;
  auto fix = [&](Atom& a) {
    for (const auto& pc : m) {
      if (a.pred != pc.ours) continue;
      std::vector<Term> args;
      for (std::size_t p : pc.perm) args.push_back(a.args.at(p));
      a.pred = pc.theirs;
      a.args = std::move(args);
      return;
    }
  };
  if (out.head) fix(*out.head);
  for (auto& a : out.body) fix(a);
  return out;
}

bool structurally_equivalent(const std::vector<Clause>& ours, const std::vector<Clause>& theirs,
                             const std::vector<PredCorrespondence>& m) {
  std::vector<Clause> a, b;
  for (const auto& c : ours) a.push_back(normal_form(apply_correspondence(c, m)));
  for (const auto& c : theirs) b.push_back(normal_form(c));
  return alpha_equivalent(a, b);
}

}  // namespace chcstr
