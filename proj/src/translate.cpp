#include "chcstr/translate.hpp"

#include <cctype>
#include <set>
#include <sstream>

#include "chcstr/chc_text.hpp"

namespace chcstr {

using mf::FrontendError;
using mf::Node;
using mf::NodePtr;

std::string FunctionInfo::surface(std::size_t pos, const std::string& binder) const {
  if (pos < params.size()) return params[pos];
  if (!tuple_result) return binder;
  return binder + "._" + std::to_string(pos - params.size() + 1);
}

const FunctionInfo* SourceMap::find(const std::string& name) const {
  for (const auto& f : functions)
    if (f.name == name) return &f;
  return nullptr;
}

std::string SourceMap::serialize() const {
  std::ostringstream out;
  for (const auto& f : functions) {
    out << "function\t" << f.name << "\t" << (f.tuple_result ? "tuple" : "single");
    for (std::size_t i = 0; i < f.params.size(); ++i) out << "\tparam " << f.params[i] << " " << f.param_sorts[i].str();
    for (const auto& s : f.result_sorts) out << "\tresult " << s.str();
    out << "\n";
  }
  for (const auto& g : goals) {
    out << "goal\t" << g.function;
    for (const auto& [v, s] : g.vars) out << "\t" << v << "=" << s;
    out << "\n";
  }
  return out.str();
}

namespace {

Sort sort_named(const std::string& s) {
  if (s == "Int") return Sort::integer();
  if (s == "Bool") return Sort::boolean();
  return Sort::adt_named(s);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

SourceMap SourceMap::parse(const std::string& text) {
  SourceMap sm;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto fields = split(line, '\t');
    if (fields[0] == "function" && fields.size() >= 3) {
      FunctionInfo f;
      f.name = fields[1];
      f.tuple_result = fields[2] == "tuple";
      for (std::size_t i = 3; i < fields.size(); ++i) {
        auto parts = split(fields[i], ' ');
        if (parts[0] == "param" && parts.size() == 3) {
          f.params.push_back(parts[1]);
          f.param_sorts.push_back(sort_named(parts[2]));
        } else if (parts[0] == "result" && parts.size() == 2) {
          f.result_sorts.push_back(sort_named(parts[1]));
        } else {
          throw ParseError("malformed function entry", lineno, 1);
        }
      }
      sm.functions.push_back(std::move(f));
    } else if (fields[0] == "goal" && fields.size() >= 2) {
      GoalInfo g;
      g.function = fields[1];
      for (std::size_t i = 2; i < fields.size(); ++i) {
        auto eq = fields[i].find('=');
        if (eq == std::string::npos) throw ParseError("malformed goal entry", lineno, 1);
        g.vars[fields[i].substr(0, eq)] = fields[i].substr(eq + 1);
      }
      sm.goals.push_back(std::move(g));
    } else {
      throw ParseError("unknown source map entry", lineno, 1);
    }
  }
  return sm;
}

namespace {

using EK = FrontendError::Kind;

// Value of a translated surface expression.
struct Val {
  enum class K { Basic, Adt, Tuple };
  K k = K::Basic;
  Expr e;
  Term t;
  std::vector<Val> elems;
  std::string surface;  // set for call results inside contracts

  static Val basic(Expr x) { return {K::Basic, std::move(x), {}, {}, {}}; }
  static Val adt(Term x) { return {K::Adt, {}, std::move(x), {}, {}}; }
};

class Namer {
 public:
  std::string fresh(const std::string& stem) {
    std::string s = stem;
    for (int k = 1; used_.count(s); ++k) s = stem + std::to_string(k);
    used_.insert(s);
    return s;
  }

 private:
  std::set<std::string> used_;
};

struct Path {
  std::vector<Expr> cons;
  std::vector<Atom> atoms;
  Binding subst;
  std::map<std::string, Val> memo;
  Namer names;
};

using Env = std::map<std::string, Val>;
using Results = std::vector<std::pair<Path, Val>>;

std::string capitalize(const std::string& s) {
  if (s.empty() || s == "_") return "U";
  std::string r = s;
  if (r[0] != '_') r[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(r[0])));
  return r;
}

Val var_val(const std::string& name, const Sort& s) {
  if (s.is_adt()) return Val::adt(Term::var(name, s));
  if (s.is_bool()) return Val::basic(mk_holds(name));
  return Val::basic(Expr::var(name, s));
}

// The variable denoted by a basic value, if it is a plain variable.
std::optional<std::string> plain_var(const Expr& e) {
  if (e.is_var()) return e.name();
  if (e.op() == Op::Eq && e.kid(0).is_var() && e.kid(0).sort().is_bool() && e.kid(1).is_true())
    return e.kid(0).name();
  return std::nullopt;
}

Sort expr_sort(const Expr& e) {
  switch (e.op()) {
    case Op::Var:
      return e.sort();
    case Op::IntLit:
    case Op::Add:
    case Op::Sub:
    case Op::Neg:
    case Op::Mul:
      return Sort::integer();
    case Op::Ite:
      return expr_sort(e.kid(1));
    default:
      return Sort::boolean();
  }
}

Expr var_expr(const std::string& name, const Sort& s) { return Expr::var(name, s); }

class Translator {
 public:
  explicit Translator(const mf::Program& p) : prog_(p) {}

  Translation run() {
    Translation out;
    for (const auto& f : prog_.functions) {
      FunctionInfo info;
      info.name = f.name;
      for (const auto& prm : f.params) {
        if (prm.type.kind == mf::Type::Kind::Tuple)
          throw FrontendError(EK::Type, "tuple-typed parameter " + prm.name + " of " + f.name +
                                            " is not supported by the clause translation",
                              f.span.line, f.span.col);
        info.params.push_back(prm.name);
        info.param_sorts.push_back(prm.type.sorts().front());
      }
      info.result_sorts = f.ret.sorts();
      info.tuple_result = f.ret.kind == mf::Type::Kind::Tuple;
      PredDecl d{f.name, info.param_sorts};
      for (const auto& s : info.result_sorts) d.args.push_back(s);
      out.system.declare(std::move(d));
      out.source_map.functions.push_back(std::move(info));
    }
    for (const auto& f : prog_.functions) function_clauses(f, out.system);
    for (const auto& f : prog_.functions) goal(f, out);
    out.system.check();
    return out;
  }

 private:
  [[noreturn]] void fail(EK k, const std::string& msg, const NodePtr& at) const {
    throw FrontendError(k, msg, at->span.line, at->span.col);
  }

  Term as_term(const Val& v, Path& p) {
    if (v.k == Val::K::Adt) return v.t;
    if (auto name = plain_var(v.e)) return Term::var(*name, expr_sort(v.e));
    if (v.e.op() == Op::IntLit) return Term::integer(v.e.value());
    if (v.e.op() == Op::BoolLit) return Term::boolean(v.e.value() != 0);
    Sort s = expr_sort(v.e);
    std::string n = p.names.fresh("V");
    p.cons.push_back(mk_eq(var_expr(n, s), v.e));
    return Term::var(n, s);
  }

  Val shape(const mf::Type& t, Path& p, const std::string& stem) {
    if (t.kind == mf::Type::Kind::Tuple) {
      Val v;
      v.k = Val::K::Tuple;
      for (const auto& e : t.elems) v.elems.push_back(shape(e, p, stem));
      return v;
    }
    return var_val(p.names.fresh(stem), t.sorts().front());
  }

  static void flatten(const Val& v, std::vector<const Val*>& out) {
    if (v.k == Val::K::Tuple) {
      for (const auto& e : v.elems) flatten(e, out);
    } else {
      out.push_back(&v);
    }
  }

  Results tr(const NodePtr& n, Path p, const Env& env) {
    using K = Node::Kind;
    switch (n->kind) {
      case K::Int:
        return {{std::move(p), Val::basic(Expr::integer(n->value))}};
      case K::Bool:
        return {{std::move(p), Val::basic(Expr::boolean(n->value != 0))}};
      case K::Var: {
        auto it = env.find(n->name);
        if (it == env.end()) fail(EK::UnknownIdentifier, "unknown identifier '" + n->name + "'", n);
        return {{std::move(p), it->second}};
      }
      case K::Nil:
        return {{std::move(p), Val::adt(Term::nil())}};
      case K::Cons:
        return lift2(n, std::move(p), env, [this](Path& q, const Val& h, const Val& t) {
          return Val::adt(Term::cons(as_term(h, q), t.t));
        });
      case K::Tuple: {
        Results acc{{std::move(p), Val{Val::K::Tuple, {}, {}, {}, {}}}};
        for (const auto& kid : n->kids) {
          Results next;
          for (auto& [q, v] : acc)
            for (auto& [q2, kv] : tr(kid, q, env)) {
              Val w = v;
              w.elems.push_back(kv);
              next.emplace_back(std::move(q2), std::move(w));
            }
          acc = std::move(next);
        }
        return acc;
      }
      case K::Proj: {
        Results out;
        for (auto& [q, v] : tr(n->kids[0], std::move(p), env)) out.emplace_back(std::move(q), v.elems.at(n->index - 1));
        return out;
      }
      case K::Not: {
        Results out;
        for (auto& [q, v] : tr(n->kids[0], std::move(p), env)) out.emplace_back(std::move(q), Val::basic(mk_not(v.e)));
        return out;
      }
      case K::Neg: {
        Results out;
        for (auto& [q, v] : tr(n->kids[0], std::move(p), env))
          out.emplace_back(std::move(q), Val::basic(Expr::make(Op::Neg, {v.e})));
        return out;
      }
      case K::Bin:
        return binary(n, std::move(p), env);
      case K::If:
        return ite(n, std::move(p), env);
      case K::Match:
        return match(n, std::move(p), env);
      case K::Call:
        return call(n, std::move(p), env);
      case K::Forall:
        fail(EK::UnsupportedContract, "quantifiers are not supported by the clause translation", n);
    }
    fail(EK::Type, "unsupported expression", n);
  }

  template <class F>
  Results lift2(const NodePtr& n, Path p, const Env& env, F combine) {
    Results out;
    for (auto& [q, a] : tr(n->kids[0], std::move(p), env))
      for (auto& [q2, b] : tr(n->kids[1], q, env)) {
        Val r = combine(q2, a, b);
        out.emplace_back(std::move(q2), std::move(r));
      }
    return out;
  }

  Results binary(const NodePtr& n, Path p, const Env& env) {
    using mf::BinOp;
    BinOp op = n->op;
    if ((op == BinOp::Eq || op == BinOp::Ne) && !n->kids[0]->type.is_basic())
      fail(EK::Type, "equality on " + n->kids[0]->type.str() + " is not supported by the clause translation", n);
    return lift2(n, std::move(p), env, [&](Path&, const Val& a, const Val& b) -> Val {
      switch (op) {
        case BinOp::Add:
          return Val::basic(Expr::make(Op::Add, {a.e, b.e}));
        case BinOp::Sub:
          return Val::basic(Expr::make(Op::Sub, {a.e, b.e}));
        case BinOp::Mul:
          if (a.e.op() == Op::IntLit) return Val::basic(Expr::make(Op::Mul, {a.e, b.e}));
          if (b.e.op() == Op::IntLit) return Val::basic(Expr::make(Op::Mul, {b.e, a.e}));
          fail(EK::Type, "non-linear multiplication is not supported by the clause translation", n);
        case BinOp::Lt:
          return Val::basic(mk_cmp(Op::Lt, a.e, b.e));
        case BinOp::Le:
          return Val::basic(mk_cmp(Op::Le, a.e, b.e));
        case BinOp::Gt:
          return Val::basic(mk_cmp(Op::Gt, a.e, b.e));
        case BinOp::Ge:
          return Val::basic(mk_cmp(Op::Ge, a.e, b.e));
        case BinOp::Eq:
          return Val::basic(mk_eq(a.e, b.e));
        case BinOp::Ne:
          if (n->kids[0]->type.kind == mf::Type::Kind::Bool) return Val::basic(mk_not(mk_eq(a.e, b.e)));
          return Val::basic(mk_cmp(Op::Ne, a.e, b.e));
        case BinOp::And:
          return Val::basic(mk_and({a.e, b.e}));
        case BinOp::Or:
          return Val::basic(mk_or({a.e, b.e}));
        case BinOp::Implies:
          return Val::basic(mk_implies(a.e, b.e));
      }
      fail(EK::Type, "unsupported operator", n);
    });
  }

  // Basic-typed conditionals are translated strictly (both branches' calls are kept,
  // the value is an ite); other conditionals split the path.
  Results ite(const NodePtr& n, Path p, const Env& env) {
    Results out;
    for (auto& [q, c] : tr(n->kids[0], std::move(p), env)) {
      if (n->type.is_basic()) {
        for (auto& [qa, a] : tr(n->kids[1], q, env))
          for (auto& [qb, b] : tr(n->kids[2], qa, env)) out.emplace_back(std::move(qb), Val::basic(mk_ite(c.e, a.e, b.e)));
      } else {
        Path yes = q;
        yes.cons.push_back(c.e);
        for (auto& r : tr(n->kids[1], std::move(yes), env)) out.push_back(std::move(r));
        Path no = q;
        no.cons.push_back(mk_not(c.e));
        for (auto& r : tr(n->kids[2], std::move(no), env)) out.push_back(std::move(r));
      }
    }
    return out;
  }

  Results match(const NodePtr& n, Path p, const Env& env) {
    Results out;
    for (auto& [q, s] : tr(n->kids[0], std::move(p), env)) {
      for (const auto& c : n->cases) {
        Path qc = q;
        Env inner = env;
        Term pat = Term::nil();
        if (c.pat == mf::Case::Pat::Cons) {
          std::string h = qc.names.fresh(capitalize(c.head));
          std::string t = qc.names.fresh(capitalize(c.tail));
          pat = Term::cons(Term::var(h, Sort::integer()), Term::var(t, Sort::list()));
          if (c.head != "_") inner[c.head] = var_val(h, Sort::integer());
          if (c.tail != "_") inner[c.tail] = var_val(t, Sort::list());
        } else if (c.pat == mf::Case::Pat::Wild) {
          // A wildcard after Nil covers the cons case and vice versa.
          bool nil_seen = false;
          for (const auto& o : n->cases) nil_seen |= o.pat == mf::Case::Pat::Nil;
          if (nil_seen) {
            pat = Term::cons(Term::var(qc.names.fresh("U"), Sort::integer()),
                             Term::var(qc.names.fresh("U"), Sort::list()));
          }
          bool cons_seen = false;
          for (const auto& o : n->cases) cons_seen |= o.pat == mf::Case::Pat::Cons;
          if (!nil_seen && !cons_seen) {
            for (auto& r : tr(c.body, qc, inner)) out.push_back(std::move(r));
            continue;
          }
        }
        if (!unify(resolve(s.t, qc.subst), pat, qc.subst)) continue;
        for (auto& r : tr(c.body, std::move(qc), inner)) out.push_back(std::move(r));
      }
    }
    return out;
  }

  Results call(const NodePtr& n, Path p, const Env& env) {
    const mf::FunctionDef* f = prog_.find(n->name);
    if (!f) fail(EK::UnknownIdentifier, "unknown identifier '" + n->name + "'", n);
    if (contract_mode_ && !f->ret.is_basic() && f->ret.kind != mf::Type::Kind::Tuple)
      fail(EK::UnsupportedContract,
           "contract calls " + n->name + ", whose result is not of basic sort; only basic-valued functions may be used in contracts",
           n);
    Results acc{{std::move(p), Val{Val::K::Tuple, {}, {}, {}, {}}}};
    for (const auto& kid : n->kids) {
      Results next;
      for (auto& [q, v] : acc)
        for (auto& [q2, kv] : tr(kid, q, env)) {
          Val w = v;
          w.elems.push_back(kv);
          next.emplace_back(std::move(q2), std::move(w));
        }
      acc = std::move(next);
    }
    Results out;
    for (auto& [q, args] : acc) {
      Atom atom{f->name, {}};
      for (const auto& a : args.elems) atom.args.push_back(as_term(a, q));
      std::string key = f->name + "(";
      for (const auto& t : atom.args) key += print_term(resolve(t, q.subst)) + ",";
      auto it = q.memo.find(key);
      if (it != q.memo.end()) {
        Val v = it->second;
        out.emplace_back(std::move(q), std::move(v));
        continue;
      }
      Val res = shape(f->ret, q, "R");
      std::vector<const Val*> comps;
      flatten(res, comps);
      for (const Val* c : comps) atom.args.push_back(as_term(*c, q));
      q.atoms.push_back(std::move(atom));
      if (contract_mode_) label(res, mf::print_expr(n));
      q.memo.emplace(key, res);
      out.emplace_back(std::move(q), std::move(res));
    }
    return out;
  }

  void label(Val& v, const std::string& surface) {
    if (v.k == Val::K::Tuple) {
      for (std::size_t i = 0; i < v.elems.size(); ++i) label(v.elems[i], surface + "._" + std::to_string(i + 1));
    } else {
      v.surface = surface;
    }
  }

  static Clause finish(Clause c, const Binding& subst) {
    Binding full;
    for (const auto& [v, t] : subst) full[v] = resolve(t, subst);
    c = substitute(c, full);
    c.constraint = simplify(c.constraint);
    return c;
  }

  void function_clauses(const mf::FunctionDef& f, ChcSystem& sys) {
    Path p;
    Env env;
    std::vector<Term> params;
    for (const auto& prm : f.params) {
      std::string name = p.names.fresh(capitalize(prm.name));
      Sort s = prm.type.sorts().front();
      env[prm.name] = var_val(name, s);
      params.push_back(Term::var(name, s));
    }
    contract_mode_ = false;
    for (auto& [q, v] : tr(f.body, p, env)) {
      Atom head{f.name, params};
      if (f.ret.kind == mf::Type::Kind::Tuple) {
        std::vector<const Val*> comps;
        flatten(v, comps);
        for (std::size_t i = 0; i < comps.size(); ++i) {
          const Val& c = *comps[i];
          if (c.k == Val::K::Adt) {
            head.args.push_back(c.t);
            continue;
          }
          Sort s = expr_sort(c.e);
          std::string r = q.names.fresh("Res" + std::to_string(i + 1));
          q.cons.push_back(mk_eq(var_expr(r, s), c.e));
          head.args.push_back(Term::var(r, s));
        }
      } else if (v.k == Val::K::Adt) {
        head.args.push_back(v.t);
      } else if (auto name = plain_var(v.e)) {
        head.args.push_back(Term::var(*name, expr_sort(v.e)));
      } else {
        Sort s = expr_sort(v.e);
        std::string r = q.names.fresh("Res");
        q.cons.push_back(mk_eq(var_expr(r, s), v.e));
        head.args.push_back(Term::var(r, s));
      }
      Clause c;
      c.head = std::move(head);
      c.constraint = mk_and(q.cons);
      c.body = q.atoms;
      sys.add(finish(std::move(c), q.subst));
    }
  }

  static bool trivial(const NodePtr& e) { return !e || (e->kind == Node::Kind::Bool && e->value); }

  Expr single(const NodePtr& e, Path& p, const Env& env, const char* what) {
    auto rs = tr(e, p, env);
    if (rs.size() != 1 || !rs[0].first.subst.empty())
      fail(EK::UnsupportedContract, std::string(what) + " must not branch on list structure", e);
    p = std::move(rs[0].first);
    return rs[0].second.e;
  }

  void collect_labels(const Env& env, const Path& p, GoalInfo& gi) {
    for (const auto& [name, v] : env) {
      std::vector<const Val*> comps;
      flatten(v, comps);
      for (std::size_t i = 0; i < comps.size(); ++i) {
        const Val& c = *comps[i];
        std::string surf = comps.size() > 1 ? name + "._" + std::to_string(i + 1) : name;
        if (c.k == Val::K::Adt && c.t.is_var()) gi.vars[c.t.name] = surf;
        if (c.k == Val::K::Basic)
          if (auto n = plain_var(c.e)) gi.vars[*n] = surf;
      }
    }
    for (const auto& [key, v] : p.memo) {
      std::vector<const Val*> comps;
      flatten(v, comps);
      for (const Val* c : comps)
        if (auto n = plain_var(c->e)) gi.vars[*n] = c->surface;
    }
  }

  void goal(const mf::FunctionDef& f, Translation& out) {
    if (trivial(f.contract.post)) return;
    Path p;
    Env env;
    std::vector<Term> args;
    for (const auto& prm : f.params) {
      std::string name = p.names.fresh(capitalize(prm.name));
      Sort s = prm.type.sorts().front();
      env[prm.name] = var_val(name, s);
      args.push_back(Term::var(name, s));
    }
    Val res = shape(f.ret, p, "Res");
    std::vector<const Val*> comps;
    flatten(res, comps);
    for (const Val* c : comps) args.push_back(as_term(*c, p));
    p.atoms.push_back(Atom{f.name, args});
    Env post_env = env;
    post_env[f.contract.binder] = res;

    contract_mode_ = true;
    Expr pre = trivial(f.contract.pre) ? Expr::boolean(true) : single(f.contract.pre, p, env, "precondition");
    Expr post = single(f.contract.post, p, post_env, "postcondition");
    contract_mode_ = false;

    Clause g;
    g.constraint = simplify(mk_and({pre, mk_not(post)}));
    g.body = p.atoms;
    out.system.add(std::move(g));

    GoalInfo gi;
    gi.function = f.name;
    collect_labels(post_env, p, gi);
    out.source_map.goals.push_back(std::move(gi));
  }

  const mf::Program& prog_;
  bool contract_mode_ = false;
};

}  // namespace

Translation translate_to_chcs(const mf::Program& p) { return Translator(p).run(); }

}  // namespace chcstr
