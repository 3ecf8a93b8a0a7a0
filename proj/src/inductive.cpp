#include <map>
#include <set>

#include "chcstr/strengthen.hpp"

namespace chcstr {

using mf::Node;
using mf::NodePtr;
using mf::Value;

namespace {

using Values = std::vector<Value>;
using Env = std::map<std::string, Value>;

void add_unique(Values& out, const Value& v) {
  for (const auto& w : out)
    if (w == v) return;
  out.push_back(v);
}

bool nontrivial(const NodePtr& post) { return post && !(post->kind == Node::Kind::Bool && post->value != 0); }

struct NeedsContract {};

// Evaluates a body to the set of results it can produce when every call to a function
// with a postcondition may return any bounded value satisfying it. Calls made by the
// checked body are unfolded once; deeper calls that end in a base case without such
// calls are evaluated directly. Depth -1 marks that base-case evaluation.
class Modular {
 public:
  Modular(const mf::Program& p, const SurfaceBounds& b) : prog_(p), b_(b) {
    opts_.forall_lo = b.forall_lo;
    opts_.forall_hi = b.forall_hi;
  }

  // Failing callee preconditions of the top-level body are appended to `failures`.
  Values body(const mf::FunctionDef& f, const std::vector<Value>& args, std::vector<std::string>& failures) {
    failures_ = &failures;
    Env env;
    for (std::size_t k = 0; k < f.params.size(); ++k) env[f.params[k].name] = args[k];
    return ev(f.body, env, 0);
  }

  bool holds(const NodePtr& e, const Env& env) const {
    if (!e) return true;
    auto r = mf::eval_expr(prog_, e, env, opts_);
    return !r.diverged && r.value.truthy();
  }

 private:
  Env params_env(const mf::FunctionDef& g, const std::vector<Value>& args) const {
    Env env;
    for (std::size_t k = 0; k < g.params.size(); ++k) env[g.params[k].name] = args[k];
    return env;
  }

  const Values& candidates(const mf::Type& t) {
    std::string key = t.str();
    auto it = domains_.find(key);
    if (it == domains_.end())
      it = domains_.emplace(key, mf::enumerate_values(t, b_.max_len + 1, b_.lo, b_.hi)).first;
    return it->second;
  }

  Values call(const mf::FunctionDef& g, const std::vector<Value>& args, int depth) {
    if (!holds(g.contract.pre, params_env(g, args))) {
      failures_->push_back("precondition of " + g.name);
      return {};
    }
    if (!nontrivial(g.contract.post)) {
      auto r = mf::eval(prog_, g.name, args, opts_);
      if (r.diverged) {
        failures_->push_back("call to " + g.name + " diverged");
        return {};
      }
      return {r.value};
    }
    if (depth < 0) throw NeedsContract{};
    if (depth > 0) return results(g, args);
    // Calls of the checked body itself are unfolded once.
    Env env = params_env(g, args);
    Env scope = env;
    Values out;
    for (const auto& v : ev(g.body, scope, 1)) {
      env[g.contract.binder] = v;
      if (holds(g.contract.post, env)) add_unique(out, v);
    }
    return out;
  }

  // Results of a call to a function with a postcondition: the value of the body when
  // it reaches a base case without further such calls, else any bounded value
  // satisfying the postcondition.
  const Values& results(const mf::FunctionDef& g, const std::vector<Value>& args) {
    std::string key = g.name;
    for (const auto& a : args) key += " " + a.str();
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    Env env = params_env(g, args);
    Values out;
    try {
      Env scope = env;
      for (const auto& v : ev(g.body, scope, -1)) {
        env[g.contract.binder] = v;
        if (holds(g.contract.post, env)) add_unique(out, v);
      }
    } catch (const NeedsContract&) {
      out.clear();
      for (const auto& v : candidates(g.ret)) {
        env[g.contract.binder] = v;
        if (holds(g.contract.post, env)) out.push_back(v);
      }
    }
    return memo_.emplace(key, std::move(out)).first->second;
  }

  Values ev(const NodePtr& n, Env& env, int depth) {
    using K = Node::Kind;
    switch (n->kind) {
      case K::Int:
      case K::Bool:
      case K::Var:
      case K::Nil:
      case K::Forall:
        return {concrete(n, env)};
      case K::Cons: {
        Values out;
        for (const auto& h : ev(n->kids[0], env, depth))
          for (auto t : ev(n->kids[1], env, depth)) {
            t.list.insert(t.list.begin(), h.i);
            add_unique(out, t);
          }
        return out;
      }
      case K::Tuple: {
        Values out;
        for (const auto& vs : product(n->kids, env, depth)) add_unique(out, Value::of_tuple(vs));
        return out;
      }
      case K::Proj: {
        Values out;
        for (const auto& v : ev(n->kids[0], env, depth)) add_unique(out, v.tuple.at(n->index - 1));
        return out;
      }
      case K::Not: {
        Values out;
        for (const auto& v : ev(n->kids[0], env, depth)) add_unique(out, Value::boolean(!v.truthy()));
        return out;
      }
      case K::Neg: {
        Values out;
        for (const auto& v : ev(n->kids[0], env, depth)) add_unique(out, Value::integer(-v.i));
        return out;
      }
      case K::Bin:
        return binary(n, env, depth);
      case K::If: {
        Values out;
        for (const auto& c : ev(n->kids[0], env, depth))
          for (const auto& v : ev(n->kids[c.truthy() ? 1 : 2], env, depth)) add_unique(out, v);
        return out;
      }
      case K::Match: {
        Values out;
        for (const auto& s : ev(n->kids[0], env, depth)) {
          for (const auto& c : n->cases) {
            if (c.pat == mf::Case::Pat::Nil && !s.list.empty()) continue;
            if (c.pat == mf::Case::Pat::Cons && s.list.empty()) continue;
            Env inner = env;
            if (c.pat == mf::Case::Pat::Cons) {
              if (c.head != "_") inner[c.head] = Value::integer(s.list.front());
              if (c.tail != "_")
                inner[c.tail] = Value::of_list(std::vector<std::int64_t>(s.list.begin() + 1, s.list.end()));
            }
            for (const auto& v : ev(c.body, inner, depth)) add_unique(out, v);
            break;
          }
        }
        return out;
      }
      case K::Call: {
        const mf::FunctionDef* g = prog_.find(n->name);
        if (!g) throw Error("unknown function " + n->name);
        Values out;
        for (const auto& args : product(n->kids, env, depth))
          for (const auto& v : call(*g, args, depth)) add_unique(out, v);
        return out;
      }
    }
    throw Error("unsupported expression");
  }

  Value concrete(const NodePtr& n, Env& env) const {
    auto r = mf::eval_expr(prog_, n, env, opts_);
    if (r.diverged) throw Error("evaluation diverged");
    return r.value;
  }

  std::vector<std::vector<Value>> product(const std::vector<NodePtr>& kids, Env& env, int depth) {
    std::vector<std::vector<Value>> acc{{}};
    for (const auto& k : kids) {
      Values vs = ev(k, env, depth);
      std::vector<std::vector<Value>> next;
      for (const auto& prefix : acc)
        for (const auto& v : vs) {
          auto m = prefix;
          m.push_back(v);
          next.push_back(std::move(m));
        }
      acc = std::move(next);
    }
    return acc;
  }

  Values binary(const NodePtr& n, Env& env, int depth) {
    using mf::BinOp;
    Values out;
    for (const auto& a : ev(n->kids[0], env, depth)) {
      if ((n->op == BinOp::And && !a.truthy()) || (n->op == BinOp::Implies && !a.truthy())) {
        add_unique(out, Value::boolean(n->op == BinOp::Implies));
        continue;
      }
      if (n->op == BinOp::Or && a.truthy()) {
        add_unique(out, Value::boolean(true));
        continue;
      }
      for (const auto& b : ev(n->kids[1], env, depth)) {
        switch (n->op) {
          case BinOp::And:
          case BinOp::Or:
          case BinOp::Implies: add_unique(out, Value::boolean(b.truthy())); break;
          case BinOp::Add: add_unique(out, Value::integer(a.i + b.i)); break;
          case BinOp::Sub: add_unique(out, Value::integer(a.i - b.i)); break;
          case BinOp::Mul: add_unique(out, Value::integer(a.i * b.i)); break;
          case BinOp::Lt: add_unique(out, Value::boolean(a.i < b.i)); break;
          case BinOp::Le: add_unique(out, Value::boolean(a.i <= b.i)); break;
          case BinOp::Gt: add_unique(out, Value::boolean(a.i > b.i)); break;
          case BinOp::Ge: add_unique(out, Value::boolean(a.i >= b.i)); break;
          case BinOp::Eq: add_unique(out, Value::boolean(a == b)); break;
          case BinOp::Ne: add_unique(out, Value::boolean(!(a == b))); break;
        }
      }
    }
    return out;
  }

  const mf::Program& prog_;
  SurfaceBounds b_;
  mf::EvalOptions opts_;
  std::vector<std::string>* failures_ = nullptr;
  std::map<std::string, Values> memo_;
  std::map<std::string, Values> domains_;
};

}  // namespace

InductiveReport check_inductive_bounded(const mf::Program& prog, const SurfaceBounds& b) {
  InductiveReport rep;
  Modular m(prog, b);
  for (const auto& f : prog.functions) {
    if (!nontrivial(f.contract.post)) continue;
    std::vector<std::vector<Value>> inputs{{}};
    for (const auto& p : f.params) {
      std::vector<std::vector<Value>> next;
      for (const auto& prefix : inputs)
        for (const auto& v : mf::enumerate_values(p.type, b.max_len, b.lo, b.hi)) {
          auto a = prefix;
          a.push_back(v);
          next.push_back(std::move(a));
        }
      inputs = std::move(next);
    }
    for (const auto& args : inputs) {
      Env env;
      for (std::size_t k = 0; k < f.params.size(); ++k) env[f.params[k].name] = args[k];
      if (!m.holds(f.contract.pre, env)) continue;
      ++rep.checked;
      std::vector<std::string> reasons;
      Values results = m.body(f, args, reasons);
      for (const auto& r : results) {
        env[f.contract.binder] = r;
        if (!m.holds(f.contract.post, env)) {
          reasons.push_back("postcondition");
          break;
        }
      }
      std::set<std::string> seen;
      for (const auto& r : reasons)
        if (seen.insert(r).second) rep.failures.push_back({f.name, args, r});
    }
  }
  return rep;
}

}  // namespace chcstr
