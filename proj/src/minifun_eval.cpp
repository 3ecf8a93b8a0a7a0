#include <pthread.h>

#include <functional>

#include "chcstr/minifun.hpp"

namespace chcstr::mf {

std::string Value::str() const {
  switch (kind) {
    case Kind::Int:
      return std::to_string(i);
    case Kind::Bool:
      return i ? "true" : "false";
    case Kind::List: {
      std::string s = "[";
      for (std::size_t k = 0; k < list.size(); ++k) s += (k ? "," : "") + std::to_string(list[k]);
      return s + "]";
    }
    case Kind::Tuple: {
      std::string s = "(";
      for (std::size_t k = 0; k < tuple.size(); ++k) s += (k ? ", " : "") + tuple[k].str();
      return s + ")";
    }
  }
  return "?";
}

std::vector<Term> Value::to_terms() const {
  switch (kind) {
    case Kind::Int:
      return {Term::integer(i)};
    case Kind::Bool:
      return {Term::boolean(i != 0)};
    case Kind::List: {
      Term t = Term::nil();
      for (auto it = list.rbegin(); it != list.rend(); ++it) t = Term::cons(Term::integer(*it), t);
      return {t};
    }
    case Kind::Tuple: {
      std::vector<Term> out;
      for (const auto& v : tuple)
        for (auto& t : v.to_terms()) out.push_back(std::move(t));
      return out;
    }
  }
  return {};
}

namespace {

struct OutOfFuel {};

constexpr std::size_t kMaxCallDepth = 20000;
constexpr std::size_t kStackReserve = 512 * 1024;

// Lowest usable stack address of the calling thread, or 0 when unknown.
std::uintptr_t query_stack_floor() {
  pthread_attr_t attr;
  if (pthread_getattr_np(pthread_self(), &attr) != 0) return 0;
  void* addr = nullptr;
  std::size_t size = 0;
  int rc = pthread_attr_getstack(&attr, &addr, &size);
  pthread_attr_destroy(&attr);
  if (rc != 0 || size <= kStackReserve) return 0;
  return reinterpret_cast<std::uintptr_t>(addr) + kStackReserve;
}

// The query reads /proc on the main thread, so it runs once per thread.
std::uintptr_t stack_floor() {
  thread_local const std::uintptr_t floor = query_stack_floor();
  return floor;
}

class Interp {
 public:
  Interp(const Program& p, const EvalOptions& o) : prog_(p), opts_(o), floor_(stack_floor()) {}

  using Env = std::map<std::string, Value>;

  Value call(const FunctionDef& f, std::vector<Value> args) {
    char probe;
    if (fuel_used_++ >= opts_.fuel || depth_ >= kMaxCallDepth || reinterpret_cast<std::uintptr_t>(&probe) < floor_)
      throw OutOfFuel{};
    Env env;
    for (std::size_t k = 0; k < f.params.size(); ++k) env[f.params[k].name] = std::move(args[k]);
    ++depth_;
    Value v = ev(f.body, env);
    --depth_;
    return v;
  }

  Value ev(const NodePtr& n, Env& env) {
    using K = Node::Kind;
    switch (n->kind) {
      case K::Int:
        return Value::integer(n->value);
      case K::Bool:
        return Value::boolean(n->value != 0);
      case K::Var: {
        auto it = env.find(n->name);
        if (it == env.end()) throw Error("unbound variable " + n->name);
        return it->second;
      }
      case K::Nil:
        return Value::of_list({});
      case K::Cons: {
        Value h = ev(n->kids[0], env);
        Value t = ev(n->kids[1], env);
        t.list.insert(t.list.begin(), h.i);
        return t;
      }
      case K::Tuple: {
        std::vector<Value> vs;
        for (const auto& k : n->kids) vs.push_back(ev(k, env));
        return Value::of_tuple(std::move(vs));
      }
      case K::Proj:
        return ev(n->kids[0], env).tuple.at(n->index - 1);
      case K::Not:
        return Value::boolean(!ev(n->kids[0], env).truthy());
      case K::Neg:
        return Value::integer(-ev(n->kids[0], env).i);
      case K::Bin:
        return binary(n, env);
      case K::If:
        return ev(n->kids[0], env).truthy() ? ev(n->kids[1], env) : ev(n->kids[2], env);
      case K::Match: {
        Value s = ev(n->kids[0], env);
        for (const auto& c : n->cases) {
          if (c.pat == Case::Pat::Nil && !s.list.empty()) continue;
          if (c.pat == Case::Pat::Cons && s.list.empty()) continue;
          if (c.pat != Case::Pat::Cons) return ev(c.body, env);
          Env inner = env;
          if (c.head != "_") inner[c.head] = Value::integer(s.list.front());
          if (c.tail != "_") inner[c.tail] = Value::of_list(std::vector<std::int64_t>(s.list.begin() + 1, s.list.end()));
          return ev(c.body, inner);
        }
        throw Error("no match case applies");
      }
      case K::Call: {
        const FunctionDef* f = prog_.find(n->name);
        if (!f) throw Error("unknown function " + n->name);
        std::vector<Value> args;
        for (const auto& k : n->kids) args.push_back(ev(k, env));
        return call(*f, std::move(args));
      }
      case K::Forall: {
        std::int64_t lo = n->binder_type.kind == Type::Kind::Bool ? 0 : opts_.forall_lo;
        std::int64_t hi = n->binder_type.kind == Type::Kind::Bool ? 1 : opts_.forall_hi;
        Env inner = env;
        for (std::int64_t v = lo; v <= hi; ++v) {
          inner[n->name] = n->binder_type.kind == Type::Kind::Bool ? Value::boolean(v != 0) : Value::integer(v);
          if (!ev(n->kids[0], inner).truthy()) return Value::boolean(false);
        }
        return Value::boolean(true);
      }
    }
    throw Error("unsupported expression");
  }

  Value binary(const NodePtr& n, Env& env) {
    switch (n->op) {
      case BinOp::And:
        return Value::boolean(ev(n->kids[0], env).truthy() && ev(n->kids[1], env).truthy());
      case BinOp::Or:
        return Value::boolean(ev(n->kids[0], env).truthy() || ev(n->kids[1], env).truthy());
      case BinOp::Implies:
        return Value::boolean(!ev(n->kids[0], env).truthy() || ev(n->kids[1], env).truthy());
      default:
        break;
    }
    Value a = ev(n->kids[0], env);
    Value b = ev(n->kids[1], env);
    switch (n->op) {
      case BinOp::Add:
        return Value::integer(a.i + b.i);
      case BinOp::Sub:
        return Value::integer(a.i - b.i);
      case BinOp::Mul:
        return Value::integer(a.i * b.i);
      case BinOp::Lt:
        return Value::boolean(a.i < b.i);
      case BinOp::Le:
        return Value::boolean(a.i <= b.i);
      case BinOp::Gt:
        return Value::boolean(a.i > b.i);
      case BinOp::Ge:
        return Value::boolean(a.i >= b.i);
      case BinOp::Eq:
        return Value::boolean(a == b);
      case BinOp::Ne:
        return Value::boolean(!(a == b));
      default:
        break;
    }
    throw Error("unsupported operator");
  }

 private:
  const Program& prog_;
  EvalOptions opts_;
  std::uint64_t fuel_used_ = 0;
  std::size_t depth_ = 0;
  std::uintptr_t floor_;  // running below this address counts as divergence
};

bool has_type(const Value& v, const Type& t) {
  switch (t.kind) {
    case Type::Kind::Int:
      return v.kind == Value::Kind::Int;
    case Type::Kind::Bool:
      return v.kind == Value::Kind::Bool;
    case Type::Kind::List:
      return v.kind == Value::Kind::List;
    case Type::Kind::Tuple:
      if (v.kind != Value::Kind::Tuple || v.tuple.size() != t.elems.size()) return false;
      for (std::size_t k = 0; k < t.elems.size(); ++k)
        if (!has_type(v.tuple[k], t.elems[k])) return false;
      return true;
  }
  return false;
}

}  // namespace

EvalResult eval(const Program& p, const std::string& fname, const std::vector<Value>& args, EvalOptions opts) {
  const FunctionDef* f = p.find(fname);
  if (!f) throw Error("missing function " + fname);
  if (args.size() != f->params.size()) throw Error("wrong number of arguments for " + fname);
  for (std::size_t k = 0; k < args.size(); ++k)
    if (!has_type(args[k], f->params[k].type))
      throw Error("argument " + std::to_string(k + 1) + " of " + fname + " is not a " + f->params[k].type.str());
  Interp in(p, opts);
  try {
    return {false, in.call(*f, args)};
  } catch (const OutOfFuel&) {
    return {true, {}};
  }
}

EvalResult eval_expr(const Program& p, const NodePtr& e, const std::map<std::string, Value>& env, EvalOptions opts) {
  Interp in(p, opts);
  auto scope = env;
  try {
    return {false, in.ev(e, scope)};
  } catch (const OutOfFuel&) {
    return {true, {}};
  }
}

std::vector<Value> enumerate_values(const Type& t, int max_len, std::int64_t lo, std::int64_t hi) {
  std::vector<Value> out;
  switch (t.kind) {
    case Type::Kind::Int:
      for (std::int64_t v = lo; v <= hi; ++v) out.push_back(Value::integer(v));
      break;
    case Type::Kind::Bool:
      out = {Value::boolean(false), Value::boolean(true)};
      break;
    case Type::Kind::List: {
      std::vector<std::vector<std::int64_t>> layer{{}};
      out.push_back(Value::of_list({}));
      for (int len = 1; len <= max_len; ++len) {
        std::vector<std::vector<std::int64_t>> nextl;
        for (const auto& l : layer)
          for (std::int64_t v = lo; v <= hi; ++v) {
            auto m = l;
            m.push_back(v);
            nextl.push_back(m);
          }
        for (const auto& l : nextl) out.push_back(Value::of_list(l));
        layer = std::move(nextl);
      }
      break;
    }
    case Type::Kind::Tuple: {
      std::vector<std::vector<Value>> acc{{}};
      for (const auto& e : t.elems) {
        std::vector<std::vector<Value>> nacc;
        for (const auto& prefix : acc)
          for (const auto& v : enumerate_values(e, max_len, lo, hi)) {
            auto m = prefix;
            m.push_back(v);
            nacc.push_back(std::move(m));
          }
        acc = std::move(nacc);
      }
      for (auto& a : acc) out.push_back(Value::of_tuple(std::move(a)));
      break;
    }
  }
  return out;
}

bool ContractReport::ok() const {
  for (const auto& [f, cs] : counterexamples)
    if (!cs.empty()) return false;
  return true;
}

ContractReport check_contracts_bounded(const Program& p, const ContractBounds& b) {
  ContractReport rep;
  EvalOptions opts;
  opts.fuel = b.fuel;
  opts.forall_lo = b.lo;
  opts.forall_hi = b.hi;
  for (const auto& f : p.functions) {
    const auto& post = f.contract.post;
    if (!post || (post->kind == Node::Kind::Bool && post->value)) continue;
    auto& cex = rep.counterexamples[f.name];
    std::vector<std::vector<Value>> domains;
    for (const auto& prm : f.params) domains.push_back(enumerate_values(prm.type, b.max_len, b.lo, b.hi));
    std::vector<Value> args(f.params.size());
    std::function<void(std::size_t)> go = [&](std::size_t k) {
      if (k < args.size()) {
        for (const auto& v : domains[k]) {
          args[k] = v;
          go(k + 1);
        }
        return;
      }
      std::map<std::string, Value> env;
      for (std::size_t i = 0; i < args.size(); ++i) env[f.params[i].name] = args[i];
      if (f.contract.pre) {
        auto pre = eval_expr(p, f.contract.pre, env, opts);
        if (pre.diverged || !pre.value.truthy()) return;
      }
      auto r = eval(p, f.name, args, opts);
      if (r.diverged) return;
      ++rep.checked;
      env[f.contract.binder] = r.value;
      auto ok = eval_expr(p, post, env, opts);
      if (ok.diverged) return;
      if (!ok.value.truthy()) cex.push_back({args, r.value});
    };
    go(0);
  }
  return rep;
}

}  // namespace chcstr::mf
