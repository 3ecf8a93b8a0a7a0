#include "chcstr/cata.hpp"

#include <set>
#include <sstream>

#include "chcstr/eval.hpp"

namespace chcstr {

const char* reason_text(NotACatamorphism::Reason r) {
  using R = NotACatamorphism::Reason;
  switch (r) {
    case R::Undeclared:
      return "undeclared predicate";
    case R::NoListArgument:
      return "no list argument split into [] and [H|T]";
    case R::AdtResult:
      return "ADT-sorted result";
    case R::WrongClauseCount:
      return "wrong clause count";
    case R::NonVariableArgument:
      return "non-variable argument";
    case R::BodyShape:
      return "body does not match the schema";
    case R::RecursionOnNonTail:
      return "recursion on a non-tail argument";
    case R::AuxNotCatamorphism:
      return "auxiliary predicate is not a catamorphism";
  }
  return "?";
}

namespace {

using Reason = NotACatamorphism::Reason;

NotACatamorphism reject(Reason r, std::string detail) { return {r, std::move(detail)}; }

bool is_nil(const Term& t) { return t.is_ctor() && t.name == "nil"; }
bool is_cons(const Term& t) { return t.is_ctor() && t.name == "cons"; }

// Replaces non-variable or repeated head arguments (other than `skip`) by fresh
// variables tied by equalities.
Clause normalize_head(const Clause& c, std::size_t skip, int& counter) {
  Clause out = c;
  std::set<std::string> seen;
  std::vector<Expr> eqs{c.constraint};
  auto vars = c.vars();
  for (std::size_t i = 0; i < out.head->args.size(); ++i) {
    if (i == skip) continue;
    Term& t = out.head->args[i];
    if (t.is_var() && seen.insert(t.name).second) continue;
    std::string n;
    do {
      n = "C" + std::to_string(++counter);
    } while (vars.count(n));
    eqs.push_back(mk_eq(Expr::var(n, t.sort), term_to_expr(t)));
    t = Term::var(n, t.sort);
    seen.insert(n);
  }
  out.constraint = mk_and(eqs);
  return out;
}

class Recognizer {
 public:
  explicit Recognizer(const ChcSystem& s) : sys_(s) {}

  Recognition run(const std::string& pred) {
    auto memo = done_.find(pred);
    if (memo != done_.end()) return memo->second;
    if (active_.count(pred)) return reject(Reason::AuxNotCatamorphism, "cyclic dependency through " + pred);
    active_.insert(pred);
    Recognition r = attempt(pred);
    active_.erase(pred);
    done_.emplace(pred, r);
    return r;
  }

 private:
  Recognition attempt(const std::string& pred) {
    const PredDecl* d = sys_.find_pred(pred);
    if (!d) return reject(Reason::Undeclared, pred);
    auto cls = sys_.clauses_of(pred);
    std::vector<std::size_t> adt;
    for (std::size_t i = 0; i < d->args.size(); ++i)
      if (d->args[i].is_adt()) adt.push_back(i);
    if (adt.empty()) return reject(Reason::NoListArgument, pred + " has no ADT-sorted argument");

    // The list argument is the one split into [] and [H|T] by the two heads.
    std::optional<std::size_t> list_pos;
    if (cls.size() == 2) {
      for (std::size_t p : adt) {
        const Term& a = cls[0]->head->args[p];
        const Term& b = cls[1]->head->args[p];
        if ((is_nil(a) && is_cons(b)) || (is_cons(a) && is_nil(b))) {
          list_pos = p;
          break;
        }
      }
    }
    std::size_t lp = list_pos.value_or(adt.front());
    for (std::size_t p : adt)
      if (p != lp)
        return reject(Reason::AdtResult, "argument " + std::to_string(p + 1) + " of " + pred + " has sort " +
                                             d->args[p].str());
    if (d->args[lp].adt != "List") return reject(Reason::NoListArgument, "argument sort is not List");
    if (cls.size() != 2)
      return reject(Reason::WrongClauseCount, pred + " has " + std::to_string(cls.size()) + " clauses, expected 2");
    if (!list_pos) return reject(Reason::NoListArgument, "heads of " + pred + " do not split on [] and [H|T]");

    CatamorphismInfo info;
    info.pred = pred;
    info.list_pos = lp;
    int counter = 0;
    bool nil_first = is_nil(cls[0]->head->args[lp]);
    info.nil_clause = normalize_head(*cls[nil_first ? 0 : 1], lp, counter);
    info.cons_clause = normalize_head(*cls[nil_first ? 1 : 0], lp, counter);
    const Clause& nc = info.nil_clause;
    const Clause& cc = info.cons_clause;
    if (!nc.body.empty()) return reject(Reason::BodyShape, "the [] clause of " + pred + " has body atoms");

    const Term& cell = cc.head->args[lp];
    const Term& h = cell.args[0];
    const Term& t = cell.args[1];
    if (!h.is_var() || !t.is_var() || h.name == t.name)
      return reject(Reason::NonVariableArgument, "the [H|T] pattern of " + pred + " must use two distinct variables");
    std::set<std::string> head_vars;
    for (std::size_t i = 0; i < cc.head->args.size(); ++i)
      if (i != lp) head_vars.insert(cc.head->args[i].name);
    if (head_vars.count(h.name) || head_vars.count(t.name))
      return reject(Reason::NonVariableArgument, "list components of " + pred + " reappear in the head");

    if (cc.body.size() > 2) return reject(Reason::BodyShape, "too many atoms in the [H|T] clause of " + pred);
    for (const auto& a : cc.body) {
      if (a.pred == pred) {
        if (info.recursive) return reject(Reason::BodyShape, "two recursive atoms in " + pred);
        info.recursive = a;
      } else {
        if (info.aux) return reject(Reason::BodyShape, "two auxiliary atoms in " + pred);
        info.aux = a;
      }
    }

    std::set<std::string> fresh;  // result variables of body atoms
    auto fresh_var = [&](const Term& x) {
      return x.is_var() && !head_vars.count(x.name) && x.name != h.name && x.name != t.name &&
             fresh.insert(x.name).second;
    };

    for (std::size_t i = 0; i < cc.head->args.size(); ++i) {
      if (i == lp) continue;
      bool extra = info.recursive ? info.recursive->args[i] == cc.head->args[i] : false;
      if (!info.recursive && info.aux)
        for (const auto& x : info.aux->args) extra |= x == cc.head->args[i];
      (extra ? info.extra_pos : info.result_pos).push_back(i);
    }

    if (info.recursive) {
      const Atom& r = *info.recursive;
      if (!(r.args[lp] == t)) return reject(Reason::RecursionOnNonTail, pred + " recurses on a non-tail argument");
      for (std::size_t i : info.result_pos)
        if (!fresh_var(r.args[i]))
          return reject(Reason::NonVariableArgument, "recursive results of " + pred + " must be fresh variables");
    }

    if (info.aux) {
      const Atom& a = *info.aux;
      auto sub = run(a.pred);
      if (auto* bad = std::get_if<NotACatamorphism>(&sub))
        return reject(Reason::AuxNotCatamorphism, a.pred + ": " + reason_text(bad->reason));
      const auto& ai = std::get<CatamorphismInfo>(sub);
      if (!(a.args[ai.list_pos] == t))
        return reject(Reason::RecursionOnNonTail, pred + " applies " + a.pred + " to a non-tail argument");
      for (std::size_t i : ai.extra_pos) {
        const Term& x = a.args[i];
        bool ok = false;
        for (std::size_t j : info.extra_pos) ok |= cc.head->args[j] == x;
        if (!ok) return reject(Reason::BodyShape, "extra arguments of " + a.pred + " must be extra arguments of " + pred);
      }
      for (std::size_t i : ai.result_pos)
        if (!fresh_var(a.args[i]))
          return reject(Reason::NonVariableArgument, "results of " + a.pred + " must be fresh variables");
    }

    info.base_constraint = nc.constraint;
    info.step_constraint = cc.constraint;
    return info;
  }

  const ChcSystem& sys_;
  std::map<std::string, Recognition> done_;
  std::set<std::string> active_;
};

// Counts result tuples of `c` for every valuation of `inputs`; reports the first
// valuation with a count other than one.
TotalityResult check_functional(const Expr& c, const std::vector<std::pair<std::string, Sort>>& inputs,
                                const std::vector<std::pair<std::string, Sort>>& results, const TotalityBounds& b) {
  std::map<std::string, Sort> all;
  collect_vars(c, all);
  std::vector<std::pair<std::string, Sort>> order = inputs;
  std::set<std::string> listed;
  for (const auto& [n, s] : inputs) listed.insert(n);
  for (const auto& [n, s] : results)
    if (listed.insert(n).second) order.emplace_back(n, s);
  for (const auto& [n, s] : all)
    if (listed.insert(n).second) order.emplace_back(n, s);
  BoundedSearch search(c, order);
  SearchOptions so{b.lo, b.hi, 0};

  std::vector<std::int64_t> cur(inputs.size());
  auto lo_of = [&](const Sort& s) { return s.is_bool() ? 0 : b.lo; };
  auto hi_of = [&](const Sort& s) { return s.is_bool() ? 1 : b.hi; };
  for (std::size_t i = 0; i < inputs.size(); ++i) cur[i] = lo_of(inputs[i].second);
  while (true) {
    BoundedSearch::Assignment init(order.size());
    for (std::size_t i = 0; i < inputs.size(); ++i) init[i] = cur[i];
    std::set<std::vector<std::int64_t>> seen;
    search.run(init, so, [&](const std::vector<std::int64_t>& v) {
      seen.insert(std::vector<std::int64_t>(v.begin() + inputs.size(), v.begin() + inputs.size() + results.size()));
      return seen.size() < 2;
    });
    if (seen.size() != 1) {
      TotalityResult r;
      r.ok = false;
      for (std::size_t i = 0; i < inputs.size(); ++i) r.inputs[inputs[i].first] = cur[i];
      r.results.assign(seen.begin(), seen.end());
      return r;
    }
    std::size_t k = 0;
    while (k < inputs.size() && cur[k] == hi_of(inputs[k].second)) {
      cur[k] = lo_of(inputs[k].second);
      ++k;
    }
    if (k == inputs.size()) break;
    ++cur[k];
  }
  return {};
}

std::pair<std::string, Sort> var_of(const Term& t) { return {t.name, t.sort}; }

}  // namespace

Recognition recognize(const ChcSystem& sys, const std::string& pred) { return Recognizer(sys).run(pred); }

std::map<std::string, CatamorphismInfo> recognize_all(const ChcSystem& sys) {
  Recognizer r(sys);
  std::map<std::string, CatamorphismInfo> out;
  for (const auto& d : sys.preds) {
    auto res = r.run(d.name);
    if (auto* info = std::get_if<CatamorphismInfo>(&res)) out.emplace(d.name, *info);
  }
  return out;
}

std::string TotalityResult::describe() const {
  if (ok) return "ok";
  std::ostringstream out;
  out << (in_base ? "base" : "step") << " constraint has " << results.size() << " result tuples for";
  for (const auto& [n, v] : inputs) out << " " << n << "=" << v;
  for (const auto& r : results) {
    out << " (";
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i];
    out << ")";
  }
  return out.str();
}

TotalityResult totality_check(const CatamorphismInfo& info, const TotalityBounds& b) {
  std::vector<std::pair<std::string, Sort>> in, res;
  const Atom& nh = *info.nil_clause.head;
  for (std::size_t i : info.extra_pos) in.push_back(var_of(nh.args[i]));
  for (std::size_t i : info.result_pos) res.push_back(var_of(nh.args[i]));
  TotalityResult r = check_functional(info.base_constraint, in, res, b);
  if (!r.ok) {
    r.in_base = true;
    return r;
  }

  in.clear();
  res.clear();
  const Atom& ch = *info.cons_clause.head;
  for (std::size_t i : info.extra_pos) in.push_back(var_of(ch.args[i]));
  in.push_back(var_of(ch.args[info.list_pos].args[0]));
  auto add_results = [&](const Atom& a) {
    for (const auto& t : a.args)
      if (t.is_var() && t.sort.is_basic()) {
        bool dup = false;
        for (const auto& [n, s] : in) dup |= n == t.name;
        if (!dup) in.push_back(var_of(t));
      }
  };
  if (info.aux) add_results(*info.aux);
  if (info.recursive) add_results(*info.recursive);
  for (std::size_t i : info.result_pos) res.push_back(var_of(ch.args[i]));
  return check_functional(info.step_constraint, in, res, b);
}

}  // namespace chcstr
