#include "chcstr/strengthen.hpp"

#include <algorithm>
#include <optional>
#include <set>
#include <sstream>

namespace chcstr {

using mf::BinOp;
using mf::Node;
using mf::NodePtr;
using K = mf::Node::Kind;

namespace {

NodePtr make_node(K kind, std::vector<NodePtr> kids) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->kids = std::move(kids);
  return n;
}

bool is_bool_lit(const NodePtr& n, bool v) { return n->kind == K::Bool && (n->value != 0) == v; }

bool is_op(const NodePtr& n, BinOp op) { return n->kind == K::Bin && n->op == op; }

// Constant folding of the Boolean connectives.
NodePtr tidy(const NodePtr& n) {
  if (n->kind == K::Not) {
    NodePtr k = tidy(n->kids[0]);
    if (k->kind == K::Bool) return mf::bool_lit(k->value == 0);
    if (k->kind == K::Not) return k->kids[0];
    return mf::not_(k);
  }
  if (n->kind == K::Forall) {
    NodePtr b = tidy(n->kids[0]);
    if (b->kind == K::Bool) return b;
    return mf::forall(n->name, n->binder_type, b);
  }
  if (n->kind != K::Bin || !(n->op == BinOp::And || n->op == BinOp::Or || n->op == BinOp::Implies)) return n;
  NodePtr a = tidy(n->kids[0]);
  NodePtr b = tidy(n->kids[1]);
  switch (n->op) {
    case BinOp::And:
      if (is_bool_lit(a, true)) return b;
      if (is_bool_lit(b, true)) return a;
      if (is_bool_lit(a, false) || is_bool_lit(b, false)) return mf::bool_lit(false);
      break;
    case BinOp::Or:
      if (is_bool_lit(a, false)) return b;
      if (is_bool_lit(b, false)) return a;
      if (is_bool_lit(a, true) || is_bool_lit(b, true)) return mf::bool_lit(true);
      break;
    case BinOp::Implies:
      if (is_bool_lit(a, true)) return b;
      if (is_bool_lit(a, false) || is_bool_lit(b, true)) return mf::bool_lit(true);
      if (is_bool_lit(b, false)) return tidy(mf::not_(a));
      break;
    default:
      break;
  }
  return mf::bin(n->op, a, b);
}

void free_vars(const NodePtr& n, std::set<std::string>& bound, std::set<std::string>& out) {
  if (n->kind == K::Var) {
    if (!bound.count(n->name)) out.insert(n->name);
    return;
  }
  if (n->kind == K::Forall) {
    bool fresh = bound.insert(n->name).second;
    free_vars(n->kids[0], bound, out);
    if (fresh) bound.erase(n->name);
    return;
  }
  for (const auto& k : n->kids) free_vars(k, bound, out);
  for (const auto& c : n->cases) {
    std::set<std::string> inner = bound;
    inner.insert(c.head);
    inner.insert(c.tail);
    free_vars(c.body, inner, out);
  }
}

std::set<std::string> free_vars(const NodePtr& n) {
  std::set<std::string> bound, out;
  free_vars(n, bound, out);
  return out;
}

// Replaces free occurrences of variable `from` by variable `to`; `to` must not be
// bound inside `n`.
NodePtr rename_var(const NodePtr& n, const std::string& from, const std::string& to) {
  if (n->kind == K::Var) return n->name == from ? mf::var(to) : n;
  if (n->kind == K::Forall && n->name == from) return n;
  if (n->kids.empty()) return n;
  auto c = std::make_shared<Node>(*n);
  for (auto& k : c->kids) k = rename_var(k, from, to);
  return c;
}

bool contains(const std::vector<NodePtr>& xs, const NodePtr& x) {
  for (const auto& y : xs)
    if (mf::alpha_equal(x, y)) return true;
  return false;
}

}  // namespace

std::vector<NodePtr> surface_conjuncts(const NodePtr& e) {
  if (!e) return {};
  if (is_op(e, BinOp::And)) {
    auto a = surface_conjuncts(e->kids[0]);
    auto b = surface_conjuncts(e->kids[1]);
    a.insert(a.end(), b.begin(), b.end());
    return a;
  }
  if (is_bool_lit(e, true)) return {};
  return {e};
}

NodePtr surface_and(const std::vector<NodePtr>& parts) {
  NodePtr out;
  for (const auto& p : parts) {
    if (!p || is_bool_lit(p, true)) continue;
    out = out ? mf::bin(BinOp::And, out, p) : p;
  }
  return out ? out : mf::bool_lit(true);
}

NodePtr StrengthenedContract::combined() const {
  std::vector<NodePtr> parts;
  if (original) parts.push_back(original);
  parts.insert(parts.end(), added.begin(), added.end());
  return surface_and(parts);
}

// Back-translation ------------------------------------------------------------------

namespace {

class Reader {
 public:
  Reader(const mf::Program& prog, const SourceMap& sm, const FunctionInfo& fi, const mf::FunctionDef& fd,
         const DefinitionClause& d, const BacktranslateOptions& o, std::set<std::string>& used)
      : sm_(sm), fi_(fi), fd_(fd), d_(d), o_(o), used_(used) {
    (void)prog;
    if (o.use_precondition) pre_ = surface_conjuncts(fd.contract.pre);
  }

  // Surface reading of a definition variable.
  NodePtr surface(const std::string& v) {
    if (auto it = memo_.find(v); it != memo_.end()) return it->second;
    NodePtr r = compute(v);
    memo_[v] = r;
    return r;
  }

  const std::vector<std::pair<std::string, mf::Type>>& quantified() const { return quantified_; }
  const std::map<std::string, std::string>& binder_of() const { return binder_of_; }

 private:
  NodePtr subject_arg(std::size_t k) const {
    if (k < fi_.params.size()) return mf::var(fi_.params[k]);
    NodePtr res = mf::var(fd_.contract.binder);
    if (!fi_.tuple_result) return res;
    return mf::proj(res, static_cast<int>(k - fi_.params.size() + 1));
  }

  NodePtr compute(const std::string& v) {
    if (d_.subject) {
      const Atom& s = d_.body.at(0);
      for (std::size_t k = 0; k < s.args.size(); ++k)
        if (s.args[k].is_var() && s.args[k].name == v) return subject_arg(k);
    }
    Sort sort = Sort::integer();
    for (std::size_t i = d_.subject ? 1 : 0; i < d_.body.size(); ++i) {
      const Atom& a = d_.body[i];
      const FunctionInfo* ci = sm_.find(a.pred);
      if (!ci) throw BacktranslateError("no surface function for " + a.pred);
      for (std::size_t k = 0; k < a.args.size(); ++k) {
        if (!a.args[k].is_var() || a.args[k].name != v) continue;
        sort = a.args[k].sort;
        if (k < ci->params.size()) continue;
        std::vector<NodePtr> args;
        for (std::size_t p = 0; p < ci->params.size(); ++p) {
          const Term& t = a.args[p];
          if (!t.is_var()) throw BacktranslateError("non-variable argument of " + a.pred);
          if (t.sort.is_adt()) {
            NodePtr l = list_surface(t.name);
            if (!l) throw BacktranslateError("list variable " + t.name + " of " + a.pred + " has no surface reading");
            args.push_back(l);
          } else {
            args.push_back(surface(t.name));
          }
        }
        NodePtr c = mf::call(a.pred, args);
        NodePtr r = ci->tuple_result ? mf::proj(c, static_cast<int>(k - ci->params.size() + 1)) : c;
        if (sort.is_bool() && contains(pre_, r)) return mf::bool_lit(true);
        return r;
      }
    }
    // Neither an input nor an output of the function: quantified.
    std::string name = fresh(sort.is_bool() ? "b" : "n");
    quantified_.emplace_back(name, sort.is_bool() ? mf::Type::boolean() : mf::Type::integer());
    binder_of_[v] = name;
    return mf::var(name);
  }

  NodePtr list_surface(const std::string& v) const {
    if (!d_.subject) return nullptr;
    const Atom& s = d_.body.at(0);
    for (std::size_t k = 0; k < s.args.size(); ++k)
      if (s.args[k].is_var() && s.args[k].name == v) return subject_arg(k);
    return nullptr;
  }

  std::string fresh(const std::string& stem) {
    std::set<std::string> taken(used_);
    for (const auto& p : fi_.params) taken.insert(p);
    taken.insert(fd_.contract.binder);
    for (const auto& f : sm_.functions) taken.insert(f.name);
    std::string name = stem;
    for (int i = 1; taken.count(name); ++i) name = stem + std::to_string(i);
    used_.insert(name);
    return name;
  }

  const SourceMap& sm_;
  const FunctionInfo& fi_;
  const mf::FunctionDef& fd_;
  const DefinitionClause& d_;
  BacktranslateOptions o_;
  std::set<std::string>& used_;
  std::vector<NodePtr> pre_;
  std::map<std::string, NodePtr> memo_;
  std::vector<std::pair<std::string, mf::Type>> quantified_;
  std::map<std::string, std::string> binder_of_;
};

BinOp bin_of(Op op) {
  switch (op) {
    case Op::Add: return BinOp::Add;
    case Op::Sub: return BinOp::Sub;
    case Op::Mul: return BinOp::Mul;
    case Op::Eq: return BinOp::Eq;
    case Op::Ne: return BinOp::Ne;
    case Op::Le: return BinOp::Le;
    case Op::Lt: return BinOp::Lt;
    case Op::Ge: return BinOp::Ge;
    case Op::Gt: return BinOp::Gt;
    case Op::And: return BinOp::And;
    case Op::Or: return BinOp::Or;
    case Op::Implies: return BinOp::Implies;
    default: throw BacktranslateError("operator has no surface form");
  }
}

NodePtr to_surface(const Expr& e, const std::map<std::string, NodePtr>& vars) {
  switch (e.op()) {
    case Op::Var: {
      auto it = vars.find(e.name());
      if (it == vars.end()) throw BacktranslateError("model variable " + e.name() + " is not a parameter");
      return it->second;
    }
    case Op::IntLit:
      return mf::int_lit(e.value());
    case Op::BoolLit:
      return mf::bool_lit(e.value() != 0);
    case Op::Not:
      return mf::not_(to_surface(e.kid(0), vars));
    case Op::Neg: {
      auto n = make_node(K::Neg, {to_surface(e.kid(0), vars)});
      return n;
    }
    case Op::Ite:
      return make_node(K::If, {to_surface(e.kid(0), vars), to_surface(e.kid(1), vars), to_surface(e.kid(2), vars)});
    case Op::Eq:
      if (e.kid(1).op() == Op::BoolLit) {
        NodePtr a = to_surface(e.kid(0), vars);
        return e.kid(1).is_true() ? a : mf::not_(a);
      }
      [[fallthrough]];
    default: {
      if (e.kids().empty()) throw BacktranslateError("unexpected constraint form");
      NodePtr acc = to_surface(e.kid(0), vars);
      for (std::size_t i = 1; i < e.kids().size(); ++i) acc = mf::bin(bin_of(e.op()), acc, to_surface(e.kid(i), vars));
      if (e.op() == Op::Implies && e.kids().size() != 2) throw BacktranslateError("malformed implication");
      return acc;
    }
  }
}

}  // namespace

StrengthenedContract backtranslate(const mf::Program& prog, const PredicateModel& model, const DefinitionMap& defs,
                                   const SourceMap& sm, const std::string& fn, const BacktranslateOptions& o) {
  const FunctionInfo* fi = sm.find(fn);
  const mf::FunctionDef* fd = prog.find(fn);
  if (!fi || !fd) throw BacktranslateError("unknown function " + fn);
  StrengthenedContract sc;
  sc.function = fn;
  sc.original = fd->contract.post;

  std::optional<std::size_t> ctx;
  for (const auto& d : defs.defs)
    if (d.subject == fn && (!ctx || d.context < *ctx)) ctx = d.context;
  std::set<std::string> used;
  for (const auto& d : defs.defs) {
    if (d.subject != fn || (!o.all_contexts && d.context != *ctx)) continue;
    const auto* entry = model.find(d.name);
    if (!entry) throw BacktranslateError("model does not define " + d.name);
    if (entry->params.size() != d.head.args.size())
      throw BacktranslateError("model of " + d.name + " has the wrong arity");
    Reader rd(prog, sm, *fi, *fd, d, o, used);
    std::map<std::string, NodePtr> vars;
    std::map<std::string, std::string> param_var;
    for (std::size_t i = 0; i < d.head.args.size(); ++i) {
      const Term& t = d.head.args[i];
      if (!t.is_var()) throw BacktranslateError("definition head of " + d.name + " is not a variable list");
      vars[entry->params[i].first] = rd.surface(t.name);
    }
    for (const auto& c : conjuncts(entry->body)) {
      NodePtr f = tidy(to_surface(c, vars));
      if (is_bool_lit(f, true)) continue;
      auto fv = free_vars(f);
      const auto& q = rd.quantified();
      for (auto it = q.rbegin(); it != q.rend(); ++it)
        if (fv.count(it->first)) f = mf::forall(it->first, it->second, f);
      sc.added.push_back(f);
    }
  }
  sc.post = sc.combined();
  return sc;
}

// Simplification ---------------------------------------------------------------------

namespace {

class Equivalence {
 public:
  Equivalence(const mf::Program& prog, const mf::FunctionDef& fd, const NodePtr& assumption, const SurfaceBounds& b)
      : prog_(prog) {
    opts_.forall_lo = b.forall_lo;
    opts_.forall_hi = b.forall_hi;
    std::vector<std::pair<std::string, std::vector<mf::Value>>> doms;
    for (const auto& p : fd.params) doms.emplace_back(p.name, mf::enumerate_values(p.type, b.max_len, b.lo, b.hi));
    doms.emplace_back(fd.contract.binder, mf::enumerate_values(fd.ret, b.max_len, b.lo, b.hi));
    std::map<std::string, mf::Value> env;
    std::function<void(std::size_t)> go = [&](std::size_t k) {
      if (k < doms.size()) {
        for (const auto& v : doms[k].second) {
          env[doms[k].first] = v;
          go(k + 1);
        }
        return;
      }
      if (assumption) {
        auto r = mf::eval_expr(prog_, assumption, env, opts_);
        if (r.diverged || !r.value.truthy()) return;
      }
      envs_.push_back(env);
    };
    go(0);
  }

  std::optional<bool> value(const NodePtr& f, const std::map<std::string, mf::Value>& env) const {
    try {
      auto r = mf::eval_expr(prog_, f, env, opts_);
      if (r.diverged) return std::nullopt;
      return r.value.truthy();
    } catch (const Error&) {
      return std::nullopt;
    }
  }

  bool same(const NodePtr& a, const NodePtr& b) const {
    for (const auto& env : envs_)
      if (value(a, env) != value(b, env)) return false;
    return true;
  }

  /// rest implies c everywhere.
  bool implies(const NodePtr& rest, const NodePtr& c) const {
    for (const auto& env : envs_) {
      auto r = value(rest, env);
      if (!r) return false;
      if (*r && value(c, env) != std::optional<bool>(true)) return false;
    }
    return true;
  }

 private:
  const mf::Program& prog_;
  mf::EvalOptions opts_;
  std::vector<std::map<std::string, mf::Value>> envs_;
};

// Implications lose antecedent conjuncts that are facts; consequent conjuncts that
// are facts are dropped.
NodePtr use_facts(const NodePtr& n, const std::vector<NodePtr>& facts, const std::vector<NodePtr>& self) {
  if (n->kind == K::Forall) return mf::forall(n->name, n->binder_type, use_facts(n->kids[0], facts, self));
  if (is_op(n, BinOp::And)) {
    std::vector<NodePtr> parts;
    for (const auto& c : surface_conjuncts(n)) parts.push_back(use_facts(c, facts, self));
    return surface_and(parts);
  }
  if (is_op(n, BinOp::Implies)) {
    std::vector<NodePtr> ante, cons;
    for (const auto& a : surface_conjuncts(n->kids[0]))
      if (!contains(facts, a)) ante.push_back(a);
    for (const auto& c : surface_conjuncts(n->kids[1]))
      if (!contains(facts, c) || contains(self, c)) cons.push_back(use_facts(c, facts, self));
    return tidy(mf::bin(BinOp::Implies, surface_and(ante), surface_and(cons)));
  }
  return n;
}

// forall x. (A && B) with x not free in A becomes A && forall x. B.
std::vector<NodePtr> pull_out(const NodePtr& n) {
  if (n->kind != K::Forall) return {n};
  std::vector<NodePtr> out, kept;
  for (const auto& c : surface_conjuncts(n->kids[0])) {
    for (const auto& p : pull_out(c)) {
      if (free_vars(p).count(n->name)) {
        kept.push_back(p);
      } else {
        out.push_back(p);
      }
    }
  }
  if (!kept.empty()) out.push_back(mf::forall(n->name, n->binder_type, surface_and(kept)));
  return out;
}

std::vector<NodePtr> dedupe(const std::vector<NodePtr>& xs) {
  std::vector<NodePtr> out;
  for (const auto& x : xs)
    if (!contains(out, x)) out.push_back(x);
  return out;
}

// Top-level foralls over the same binder type are merged into the first one.
std::vector<NodePtr> merge_foralls(const std::vector<NodePtr>& xs) {
  std::vector<NodePtr> out;
  for (const auto& x : xs) {
    bool merged = false;
    if (x->kind == K::Forall) {
      for (auto& o : out) {
        if (o->kind != K::Forall || o->binder_type != x->binder_type) continue;
        std::string b = o->name;
        NodePtr body = x->kids[0];
        if (x->name != b) {
          if (free_vars(body).count(b)) continue;
          body = rename_var(body, x->name, b);
        }
        std::vector<NodePtr> parts = surface_conjuncts(o->kids[0]);
        auto more = surface_conjuncts(body);
        parts.insert(parts.end(), more.begin(), more.end());
        o = mf::forall(b, o->binder_type, surface_and(dedupe(parts)));
        merged = true;
        break;
      }
    }
    if (!merged) out.push_back(x);
  }
  return out;
}


bool mentions(const NodePtr& n, const std::string& v) { return free_vars(n).count(v) > 0; }

std::optional<std::int64_t> int_value(const NodePtr& n) {
  if (n->kind == K::Int) return n->value;
  if (n->kind == K::Neg && n->kids[0]->kind == K::Int) return -n->kids[0]->value;
  return std::nullopt;
}

// a + (-1 * b) as a - b.
NodePtr arith(const NodePtr& n) {
  if (n->kind != K::Bin || !(n->op == BinOp::Add || n->op == BinOp::Sub)) return n;
  NodePtr a = arith(n->kids[0]), b = arith(n->kids[1]);
  if (n->op == BinOp::Add && is_op(b, BinOp::Mul) && int_value(b->kids[0]) == -1)
    return mf::bin(BinOp::Sub, a, b->kids[1]);
  return mf::bin(n->op, a, b);
}

BinOp negated(BinOp op) {
  switch (op) {
    case BinOp::Lt: return BinOp::Ge;
    case BinOp::Le: return BinOp::Gt;
    case BinOp::Gt: return BinOp::Le;
    case BinOp::Ge: return BinOp::Lt;
    case BinOp::Eq: return BinOp::Ne;
    default: return BinOp::Eq;
  }
}

bool is_comparison(const NodePtr& n) {
  return n->kind == K::Bin && (n->op == BinOp::Lt || n->op == BinOp::Le || n->op == BinOp::Gt ||
                               n->op == BinOp::Ge || n->op == BinOp::Eq || n->op == BinOp::Ne);
}

// (a - b) >= 0 as a >= b, (a - b) <= -1 as a < b.
NodePtr comparison(BinOp op, NodePtr a, NodePtr b) {
  a = arith(a);
  b = arith(b);
  if (is_op(a, BinOp::Sub) && int_value(b)) {
    std::int64_t k = *int_value(b);
    if (k == 0) return mf::bin(op, a->kids[0], a->kids[1]);
    if (k == -1 && op == BinOp::Le) return mf::bin(BinOp::Lt, a->kids[0], a->kids[1]);
    if (k == 1 && op == BinOp::Ge) return mf::bin(BinOp::Gt, a->kids[0], a->kids[1]);
  }
  return mf::bin(op, a, b);
}

NodePtr negate(const NodePtr& n) {
  if (n->kind == K::Not) return n->kids[0];
  if (is_comparison(n) && n->op != BinOp::Ne) return mf::bin(negated(n->op), n->kids[0], n->kids[1]);
  if (is_op(n, BinOp::Ne)) return mf::bin(BinOp::Eq, n->kids[0], n->kids[1]);
  return mf::not_(n);
}

std::vector<NodePtr> disjuncts(const NodePtr& n) {
  if (!is_op(n, BinOp::Or)) return {n};
  auto a = disjuncts(n->kids[0]);
  auto b = disjuncts(n->kids[1]);
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

// Comparisons over differences become plain comparisons, negated comparisons flip,
// and a disjunction with exactly one disjunct about `binder` becomes an implication
// from the negated other disjuncts.
NodePtr readable(const NodePtr& n, const std::string& binder) {
  switch (n->kind) {
    case K::Forall:
      return mf::forall(n->name, n->binder_type, readable(n->kids[0], binder));
    case K::Not: {
      NodePtr k = readable(n->kids[0], binder);
      return is_comparison(k) ? negate(k) : mf::not_(k);
    }
    case K::Bin: {
      if (is_comparison(n)) return comparison(n->op, n->kids[0], n->kids[1]);
      if (n->op == BinOp::Or) {
        std::vector<NodePtr> ds;
        for (const auto& d : disjuncts(n)) ds.push_back(readable(d, binder));
        std::vector<NodePtr> about, others;
        for (const auto& d : ds) (mentions(d, binder) ? about : others).push_back(d);
        if (about.size() == 1 && !others.empty()) {
          std::vector<NodePtr> ante;
          for (const auto& o : others) ante.push_back(negate(o));
          return mf::bin(BinOp::Implies, surface_and(ante), about[0]);
        }
        NodePtr acc = ds[0];
        for (std::size_t i = 1; i < ds.size(); ++i) acc = mf::bin(BinOp::Or, acc, ds[i]);
        return acc;
      }
      if (n->op == BinOp::And || n->op == BinOp::Implies)
        return mf::bin(n->op, readable(n->kids[0], binder), readable(n->kids[1], binder));
      return arith(n);
    }
    default:
      return n;
  }
}

}  // namespace

NodePtr simplify_formula(const mf::Program& prog, const std::string& fn, const NodePtr& f, const NodePtr& assumption,
                         const SurfaceBounds& b) {
  const mf::FunctionDef* fd = prog.find(fn);
  if (!fd) throw BacktranslateError("unknown function " + fn);
  Equivalence eq(prog, *fd, assumption, b);
  const std::vector<NodePtr> known = surface_conjuncts(assumption);

  std::vector<NodePtr> cur = surface_conjuncts(tidy(f));
  auto step = [&](const std::vector<NodePtr>& next) {
    NodePtr a = surface_and(cur), c = surface_and(next);
    if (mf::alpha_equal(a, c)) return;
    if (eq.same(a, c)) cur = next;
  };
  {
    std::vector<NodePtr> next;
    for (const auto& c : cur) next.push_back(tidy(readable(c, fd->contract.binder)));
    step(next);
  }
  for (int round = 0; round < 2; ++round) {
    {
      std::vector<NodePtr> next;
      for (const auto& c : cur)
        for (const auto& p : surface_conjuncts(tidy(use_facts(c, known, {})))) next.push_back(p);
      step(next);
    }
    {
      std::vector<NodePtr> next;
      for (const auto& c : cur)
        for (const auto& p : pull_out(c)) next.push_back(p);
      step(dedupe(next));
    }
    {
      std::vector<NodePtr> facts = known;
      for (const auto& c : cur)
        if (c->kind != K::Forall && !is_op(c, BinOp::Implies)) facts.push_back(c);
      std::vector<NodePtr> next;
      for (const auto& c : cur) {
        if (contains(facts, c)) {
          next.push_back(c);
          continue;
        }
        for (const auto& p : surface_conjuncts(tidy(use_facts(c, facts, {c})))) next.push_back(p);
      }
      step(dedupe(next));
    }
    step(merge_foralls(cur));
  }
  // Conjuncts implied by the assumption and the other conjuncts.
  for (std::size_t i = cur.size(); i-- > 0;) {
    std::vector<NodePtr> rest = cur;
    rest.erase(rest.begin() + static_cast<long>(i));
    if (eq.implies(surface_and(rest), cur[i])) cur = rest;
  }
  return surface_and(cur);
}

void simplify_contract(const mf::Program& prog, StrengthenedContract& c, const SurfaceBounds& b) {
  const mf::FunctionDef* fd = prog.find(c.function);
  if (!fd) throw BacktranslateError("unknown function " + c.function);
  c.post = simplify_formula(prog, c.function, c.combined(), fd->contract.pre, b);
}

StrengthenedContract partial_strengthen(const StrengthenedContract& c, const std::vector<std::size_t>& keep) {
  StrengthenedContract out = c;
  out.added.clear();
  for (std::size_t i = 0; i < c.added.size(); ++i)
    if (std::find(keep.begin(), keep.end(), i) != keep.end()) out.added.push_back(c.added[i]);
  out.post = out.combined();
  return out;
}

std::vector<StrengthenedContract> partial_minimize(
    const std::vector<StrengthenedContract>& cs,
    const std::function<bool(const std::vector<StrengthenedContract>&)>& recheck) {
  std::vector<StrengthenedContract> cur = cs;
  for (std::size_t i = 0; i < cur.size(); ++i) {
    for (std::size_t j = 0; j < cur[i].added.size();) {
      auto trial = cur;
      trial[i].added.erase(trial[i].added.begin() + static_cast<long>(j));
      trial[i].post = trial[i].combined();
      if (recheck(trial)) {
        cur = std::move(trial);
      } else {
        ++j;
      }
    }
  }
  return cur;
}

mf::Program with_contracts(const mf::Program& prog, const std::vector<StrengthenedContract>& cs) {
  mf::Program out = prog;
  for (const auto& c : cs) {
    for (auto& f : out.functions) {
      if (f.name != c.function) continue;
      std::map<std::string, mf::Type> scope;
      for (const auto& p : f.params) scope[p.name] = p.type;
      scope[f.contract.binder] = f.ret;
      NodePtr post = c.post ? c.post : c.combined();
      mf::typecheck_formula(out, post, scope);
      f.contract.post = post;
    }
  }
  return out;
}

std::string emit_annotated_program(const mf::Program& prog, const std::vector<StrengthenedContract>& cs) {
  struct Edit {
    std::size_t begin, end;
    std::string text;
  };
  std::vector<Edit> edits;
  mf::Program typed = with_contracts(prog, cs);
  for (const auto& c : cs) {
    const mf::FunctionDef* f = typed.find(c.function);
    if (!f) throw BacktranslateError("unknown function " + c.function);
    std::string text = "ensuring { " + f->contract.binder + " => " + mf::print_expr(f->contract.post) + " }";
    if (f->ensuring.end > f->ensuring.begin) {
      edits.push_back({f->ensuring.begin, f->ensuring.end, text});
    } else {
      edits.push_back({f->body_end, f->body_end, " " + text});
    }
  }
  std::sort(edits.begin(), edits.end(), [](const Edit& a, const Edit& b) { return a.begin > b.begin; });
  std::string out = prog.source;
  for (const auto& e : edits) out.replace(e.begin, e.end - e.begin, e.text);
  return out;
}

std::string contract_diff(const std::vector<StrengthenedContract>& cs) {
  std::ostringstream out;
  for (const auto& c : cs) {
    out << "function " << c.function << "\n";
    out << "- " << (c.original ? mf::print_expr(c.original) : "true") << "\n";
    out << "+ " << mf::print_expr(c.post ? c.post : c.combined()) << "\n";
  }
  return out.str();
}

}  // namespace chcstr
