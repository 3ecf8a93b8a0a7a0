#include "chcstr/eval.hpp"

namespace chcstr {

namespace {

std::int64_t eval_any(const Expr& e, const Valuation& env) {
  auto k = [&](std::size_t i) { return eval_any(e.kid(i), env); };
  switch (e.op()) {
    case Op::Var: {
      auto it = env.find(e.name());
      if (it == env.end()) throw Error("unbound variable " + e.name());
      return it->second;
    }
    case Op::IntLit:
    case Op::BoolLit:
      return e.value();
    case Op::Add:
      return k(0) + k(1);
    case Op::Sub:
      return k(0) - k(1);
    case Op::Neg:
      return -k(0);
    case Op::Mul:
      return k(0) * k(1);
    case Op::Eq:
      return k(0) == k(1);
    case Op::Ne:
      return k(0) != k(1);
    case Op::Le:
      return k(0) <= k(1);
    case Op::Lt:
      return k(0) < k(1);
    case Op::Ge:
      return k(0) >= k(1);
    case Op::Gt:
      return k(0) > k(1);
    case Op::Not:
      return !k(0);
    case Op::And:
      for (const auto& c : e.kids())
        if (!eval_any(c, env)) return 0;
      return 1;
    case Op::Or:
      for (const auto& c : e.kids())
        if (eval_any(c, env)) return 1;
      return 0;
    case Op::Implies:
      return !k(0) || k(1);
    case Op::Ite:
      return k(0) ? k(1) : k(2);
  }
  return 0;
}

}  // namespace

bool eval_constraint(const Expr& c, const Valuation& env) { return eval_any(c, env) != 0; }
std::int64_t eval_int(const Expr& e, const Valuation& env) { return eval_any(e, env); }

BoundedSearch::BoundedSearch(const Expr& c, std::vector<std::pair<std::string, Sort>> vars) : vars_(std::move(vars)) {
  std::map<std::string, int> slots;
  for (std::size_t i = 0; i < vars_.size(); ++i) slots[vars_[i].first] = static_cast<int>(i);
  root_ = compile(c, slots);
  for (const auto& conj : conjuncts(c)) {
    if (conj.op() != Op::Eq) continue;
    for (int side = 0; side < 2; ++side) {
      const Expr& v = conj.kid(side);
      if (v.is_var()) {
        defs_.emplace_back(slots.at(v.name()), compile(conj.kid(1 - side), slots));
      }
    }
  }
}

int BoundedSearch::slot(const std::string& name) const {
  for (std::size_t i = 0; i < vars_.size(); ++i)
    if (vars_[i].first == name) return static_cast<int>(i);
  return -1;
}

int BoundedSearch::compile(const Expr& e, const std::map<std::string, int>& slots) {
  Node n;
  n.op = e.op();
  if (e.is_var()) {
    auto it = slots.find(e.name());
    if (it == slots.end()) throw Error("unbound variable " + e.name());
    n.slot = it->second;
  }
  n.value = e.value();
  for (const auto& k : e.kids()) n.kids.push_back(compile(k, slots));
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size()) - 1;
}

std::optional<std::int64_t> BoundedSearch::eval(int idx, const Assignment& a) const {
  const Node& n = nodes_[idx];
  using R = std::optional<std::int64_t>;
  auto k = [&](std::size_t i) { return eval(n.kids[i], a); };
  switch (n.op) {
    case Op::Var:
      return a[n.slot];
    case Op::IntLit:
    case Op::BoolLit:
      return n.value;
    case Op::And: {
      bool unknown = false;
      for (int c : n.kids) {
        R v = eval(c, a);
        if (!v) {
          unknown = true;
        } else if (!*v) {
          return 0;
        }
      }
      return unknown ? R{} : R{1};
    }
    case Op::Or: {
      bool unknown = false;
      for (int c : n.kids) {
        R v = eval(c, a);
        if (!v) {
          unknown = true;
        } else if (*v) {
          return 1;
        }
      }
      return unknown ? R{} : R{0};
    }
    case Op::Implies: {
      R x = k(0);
      if (x && !*x) return 1;
      R y = k(1);
      if (y && *y) return 1;
      if (x && y) return 0;
      return {};
    }
    case Op::Ite: {
      R c = k(0);
      if (c) return *c ? k(1) : k(2);
      R x = k(1), y = k(2);
      if (x && y && *x == *y) return x;
      return {};
    }
    case Op::Not: {
      R x = k(0);
      if (!x) return {};
      return !*x;
    }
    default:
      break;
  }
  R x = k(0);
  if (!x) return {};
  if (n.op == Op::Neg) return -*x;
  R y = k(1);
  if (!y) return {};
  switch (n.op) {
    case Op::Add:
      return *x + *y;
    case Op::Sub:
      return *x - *y;
    case Op::Mul:
      return *x * *y;
    case Op::Eq:
      return *x == *y;
    case Op::Ne:
      return *x != *y;
    case Op::Le:
      return *x <= *y;
    case Op::Lt:
      return *x < *y;
    case Op::Ge:
      return *x >= *y;
    case Op::Gt:
      return *x > *y;
    default:
      return {};
  }
}

bool BoundedSearch::propagate(Assignment& a) const {
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& [s, rhs] : defs_) {
      if (a[s]) continue;
      auto v = eval(rhs, a);
      if (!v) continue;
      if (vars_[s].second.is_bool() && *v != 0 && *v != 1) return false;
      a[s] = *v;
      changed = true;
    }
  }
  return true;
}

SearchStatus BoundedSearch::run(Assignment init, const SearchOptions& opts,
                                const std::function<bool(const std::vector<std::int64_t>&)>& visit) const {
  std::uint64_t nodes = 0;
  bool stopped = false, exhausted = false;
  std::vector<std::int64_t> full(vars_.size());

  std::function<void(Assignment&)> dfs = [&](Assignment& a) {
    if (stopped || exhausted) return;
    if (opts.node_budget && ++nodes > opts.node_budget) {
      exhausted = true;
      return;
    }
    if (!propagate(a)) return;
    auto v = eval(root_, a);
    if (v && !*v) return;
    int pick = -1;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (!a[i]) {
        pick = static_cast<int>(i);
        break;
      }
    if (pick < 0) {
      for (std::size_t i = 0; i < a.size(); ++i) full[i] = *a[i];
      if (!visit(full)) stopped = true;
      return;
    }
    std::int64_t lo = vars_[pick].second.is_bool() ? 0 : opts.lo;
    std::int64_t hi = vars_[pick].second.is_bool() ? 1 : opts.hi;
    for (std::int64_t x = lo; x <= hi && !stopped && !exhausted; ++x) {
      Assignment b = a;
      b[pick] = x;
      dfs(b);
    }
  };
  init.resize(vars_.size());
  dfs(init);
  if (stopped) return SearchStatus::Stopped;
  if (exhausted) return SearchStatus::BudgetExceeded;
  return SearchStatus::Complete;
}

}  // namespace chcstr
