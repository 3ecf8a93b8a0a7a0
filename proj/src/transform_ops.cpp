#include <algorithm>
#include <functional>
#include <set>

#include "chcstr/chc_text.hpp"
#include "chcstr/transform.hpp"

namespace chcstr {

const char* step_name(TraceStep::Kind k) {
  switch (k) {
    case TraceStep::Kind::Define:
      return "define";
    case TraceStep::Kind::Unfold:
      return "unfold";
    case TraceStep::Kind::AddCata:
      return "add-cata";
    case TraceStep::Kind::Assume:
      return "assume";
    case TraceStep::Kind::Fold:
      return "fold";
    case TraceStep::Kind::Drop:
      return "drop";
    case TraceStep::Kind::Prune:
      return "prune";
  }
  return "?";
}

Clause DefinitionClause::clause() const {
  Clause c;
  c.head = head;
  c.constraint = constraint;
  c.body = body;
  return c;
}

Clause DefinitionClause::instrumented() const {
  Clause c = clause();
  for (const auto& t : hidden) c.head->args.push_back(t);
  return c;
}

std::string DefinitionClause::skeleton() const {
  // Variables are named by their first position in the body, so that skeletons of
  // variants coincide.
  std::map<std::string, std::string> names;
  std::string out = subject.value_or("@");
  for (const auto& a : body) {
    out += " " + a.pred + "(";
    for (std::size_t i = 0; i < a.args.size(); ++i) {
      const Term& t = a.args[i];
      if (i) out += ",";
      if (t.is_var()) {
        auto it = names.find(t.name);
        if (it == names.end()) it = names.emplace(t.name, "_" + std::to_string(names.size())).first;
        out += it->second;
      } else {
        out += print_term(t);
      }
    }
    out += ")";
  }
  if (!constraint.is_true()) out += " | " + print_constraint(constraint);
  return out;
}

const DefinitionClause* DefinitionMap::find(const std::string& name) const {
  for (const auto& d : defs)
    if (d.name == name) return &d;
  return nullptr;
}

std::vector<Clause> unfold(const Clause& c, std::size_t atom_index, ChcSystem& sys) {
  if (atom_index >= c.body.size()) throw Error("unfold: atom index out of range");
  const Atom& a = c.body[atom_index];
  std::vector<Clause> out;
  for (const Clause* d : sys.clauses_of(a.pred)) {
    Clause r = rename_apart(*d, sys, "");
    Binding mgu;
    bool ok = r.head->args.size() == a.args.size();
    for (std::size_t i = 0; ok && i < a.args.size(); ++i) ok = unify(a.args[i], r.head->args[i], mgu);
    if (!ok) continue;
    Binding full;
    for (const auto& [v, t] : mgu) full[v] = resolve(t, mgu);
    Clause n;
    n.head = c.head;
    n.constraint = mk_and({c.constraint, r.constraint});
    for (std::size_t i = 0; i < c.body.size(); ++i)
      if (i != atom_index) n.body.push_back(c.body[i]);
    for (const auto& b : r.body) n.body.push_back(b);
    n = substitute(n, full);
    n.constraint = simplify(n.constraint);
    if (n.constraint.is_false()) continue;
    out.push_back(std::move(n));
  }
  return out;
}

namespace {

// One-way matching of a pattern term against a clause term.
bool match_term(const Term& pat, const Term& t, Binding& theta) {
  if (pat.is_var()) {
    if (!(pat.sort == t.sort)) return false;
    auto it = theta.find(pat.name);
    if (it != theta.end()) return it->second == t;
    theta[pat.name] = t;
    return true;
  }
  if (pat.kind != t.kind || pat.name != t.name || pat.value != t.value || pat.args.size() != t.args.size())
    return false;
  for (std::size_t i = 0; i < pat.args.size(); ++i)
    if (!match_term(pat.args[i], t.args[i], theta)) return false;
  return true;
}

bool match_atom(const Atom& pat, const Atom& a, Binding& theta) {
  if (pat.pred != a.pred || pat.args.size() != a.args.size()) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!match_term(pat.args[i], a.args[i], theta)) return false;
  return true;
}

bool occurs(const std::string& v, const Term& t) {
  if (t.is_var()) return t.name == v;
  for (const auto& a : t.args)
    if (occurs(v, a)) return true;
  return false;
}

bool occurs(const std::string& v, const Atom& a) {
  for (const auto& t : a.args)
    if (occurs(v, t)) return true;
  return false;
}

}  // namespace

std::optional<Clause> fold(const Clause& c, const DefinitionClause& def, const FoldOptions& o) {
  std::set<std::string> cata_preds;
  for (const auto& a : def.body)
    if (!def.subject || a.pred != *def.subject) cata_preds.insert(a.pred);
  std::vector<Expr> required = conjuncts(def.constraint);
  std::vector<Expr> have = conjuncts(c.constraint);

  std::vector<int> used(c.body.size(), -1);
  std::optional<Clause> result;
  std::function<bool(std::size_t, Binding)> go = [&](std::size_t i, Binding theta) -> bool {
    if (i == def.body.size()) {
      // Hidden variables must map to distinct ADT variables.
      std::set<std::string> seen;
      for (const auto& h : def.hidden) {
        auto it = theta.find(h.name);
        if (it == theta.end() || !it->second.is_var() || !seen.insert(it->second.name).second) return false;
      }
      for (const auto& r : required) {
        Expr inst = substitute(r, theta);
        if (std::find(have.begin(), have.end(), inst) == have.end()) return false;
      }
      Atom head{def.name, {}};
      for (const auto& t : def.head.args) {
        if (t.is_var() && !theta.count(t.name)) return false;
        head.args.push_back(substitute(t, theta));
      }
      if (o.instrumented)
        for (const auto& t : def.hidden) head.args.push_back(substitute(t, theta));

      Clause n;
      n.head = c.head;
      n.constraint = c.constraint;
      std::vector<Atom> residual;
      for (std::size_t k = 0; k < c.body.size(); ++k)
        if (used[k] < 0) residual.push_back(c.body[k]);
      auto alive = [&](const std::string& v) {
        for (const auto& a : residual)
          if (!cata_preds.count(a.pred) && !o.transparent.count(a.pred) && occurs(v, a)) return true;
        return false;
      };
      for (std::size_t k = 0; k < c.body.size(); ++k) {
        if (used[k] < 0) {
          n.body.push_back(c.body[k]);
          continue;
        }
        const Atom& pat = def.body[static_cast<std::size_t>(used[k])];
        bool is_subject = def.subject && pat.pred == *def.subject && used[k] == 0;
        if (is_subject) {
          n.body.push_back(head);
          continue;
        }
        // Keep catamorphism atoms whose list variable is still needed elsewhere.
        bool keep = false;
        for (const auto& h : def.hidden)
          if (occurs(h.name, pat)) keep |= alive(theta.at(h.name).name);
        if (keep) n.body.push_back(c.body[k]);
      }
      if (!def.subject) n.body.insert(n.body.begin(), head);
      result = std::move(n);
      return true;
    }
    for (std::size_t k = 0; k < c.body.size(); ++k) {
      if (used[k] >= 0) continue;
      Binding t2 = theta;
      if (!match_atom(def.body[i], c.body[k], t2)) continue;
      used[k] = static_cast<int>(i);
      if (go(i + 1, t2)) return true;
      used[k] = -1;
    }
    return false;
  };
  if (!go(0, {})) return std::nullopt;
  return result;
}

namespace {

using Catas = std::map<std::string, CatamorphismInfo>;

// Links of an auxiliary catamorphism expressed through the links of its parent.
RoleCata aux_role(const RoleCata& parent, const CatamorphismInfo& pi, const CatamorphismInfo& ai) {
  RoleCata r{ai.pred, {}};
  const Atom& aux = *pi.aux;
  const Atom& head = *pi.cons_clause.head;
  for (std::size_t e : ai.extra_pos) {
    std::optional<std::size_t> link;
    for (std::size_t j = 0; j < pi.extra_pos.size(); ++j)
      if (head.args[pi.extra_pos[j]] == aux.args[e]) link = parent.links[j];
    r.links.push_back(link);
  }
  return r;
}

std::vector<RoleCata> aux_closure(std::vector<RoleCata> s, const Catas& catas) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto& ci = catas.at(s[i].pred);
    if (!ci.aux) continue;
    RoleCata r = aux_role(s[i], ci, catas.at(ci.aux->pred));
    bool present = false;
    for (const auto& x : s) present |= x.pred == r.pred;
    if (!present) s.push_back(r);
  }
  return s;
}

// Re-expresses links relative to another atom sharing some arguments.
RoleCata remap(const RoleCata& rc, const Atom& from, const Atom& to) {
  RoleCata r{rc.pred, {}};
  for (const auto& l : rc.links) {
    std::optional<std::size_t> m;
    if (l) {
      const Term& x = from.args[*l];
      if (x.is_var())
        for (std::size_t k = 0; k < to.args.size() && !m; ++k)
          if (to.args[k] == x) m = k;
    }
    r.links.push_back(m);
  }
  return r;
}

bool add_role(RoleMap& roles, const std::pair<std::string, std::size_t>& key, const RoleCata& rc) {
  auto& v = roles[key];
  for (auto& e : v) {
    if (e.pred != rc.pred) continue;
    bool changed = false;
    for (std::size_t i = 0; i < e.links.size(); ++i)
      if (!e.links[i] && rc.links[i]) {
        e.links[i] = rc.links[i];
        changed = true;
      }
    return changed;
  }
  v.push_back(rc);
  std::sort(v.begin(), v.end(), [](const RoleCata& a, const RoleCata& b) { return a.pred < b.pred; });
  return true;
}

// Catamorphism atoms of `c` on the ADT arguments of its function atoms.
void seed(const Clause& c, const Catas& catas, RoleMap& roles, const std::string* only = nullptr) {
  for (const auto& s : c.body) {
    if (catas.count(s.pred) || (only && s.pred != *only)) continue;
    for (std::size_t p = 0; p < s.args.size(); ++p) {
      if (!s.args[p].sort.is_adt() || !s.args[p].is_var()) continue;
      for (const auto& a : c.body) {
        auto it = catas.find(a.pred);
        if (it == catas.end() || !(a.args[it->second.list_pos] == s.args[p])) continue;
        RoleCata rc{a.pred, {}};
        for (std::size_t e : it->second.extra_pos) {
          std::optional<std::size_t> link;
          for (std::size_t k = 0; k < s.args.size() && !link; ++k)
            if (s.args[k].sort.is_basic() && s.args[k].is_var() && s.args[k] == a.args[e]) link = k;
          rc.links.push_back(link);
        }
        add_role(roles, {s.pred, p}, rc);
      }
    }
  }
}

void collect_adt_vars(const Term& t, std::vector<std::string>& out) {
  if (t.is_var()) {
    if (t.sort.is_adt()) out.push_back(t.name);
    return;
  }
  for (const auto& a : t.args) collect_adt_vars(a, out);
}

}  // namespace

RoleMap contract_roles(const ChcSystem& sys, const Catas& catas) {
  RoleMap out;
  for (const auto& g : sys.goals) {
    const Atom* subject = nullptr;
    std::size_t n = 0;
    for (const auto& a : g.body)
      if (!catas.count(a.pred)) {
        subject = &a;
        ++n;
      }
    if (n == 1) seed(g, catas, out, &subject->pred);
  }
  return out;
}

RoleMap compute_roles(const ChcSystem& sys, const Clause& goal, const Catas& catas) {
  RoleMap contracts = contract_roles(sys, catas);
  RoleMap roles;
  seed(goal, catas, roles);

  std::set<std::string> reach;
  std::vector<std::string> todo;
  for (const auto& a : goal.body)
    if (!catas.count(a.pred) && reach.insert(a.pred).second) todo.push_back(a.pred);
  while (!todo.empty()) {
    std::string p = todo.back();
    todo.pop_back();
    for (const Clause* c : sys.clauses_of(p))
      for (const auto& a : c->body)
        if (!catas.count(a.pred) && reach.insert(a.pred).second) todo.push_back(a.pred);
  }
  for (const auto& [key, v] : contracts)
    if (reach.count(key.first))
      for (const auto& rc : v) add_role(roles, key, rc);

  auto body_flows = [&](const Clause& c) {
    bool changed = false;
    for (std::size_t i = 0; i < c.body.size(); ++i) {
      const Atom& b1 = c.body[i];
      if (catas.count(b1.pred)) continue;
      for (std::size_t k = 0; k < c.body.size(); ++k) {
        const Atom& b2 = c.body[k];
        if (k == i || catas.count(b2.pred)) continue;
        for (std::size_t j1 = 0; j1 < b1.args.size(); ++j1) {
          if (!b1.args[j1].sort.is_adt() || !b1.args[j1].is_var()) continue;
          for (std::size_t j2 = 0; j2 < b2.args.size(); ++j2) {
            if (!(b2.args[j2] == b1.args[j1])) continue;
            auto it = contracts.find({b2.pred, j2});
            if (it == contracts.end()) continue;
            for (const auto& rc : it->second) changed |= add_role(roles, {b1.pred, j1}, remap(rc, b2, b1));
          }
        }
      }
    }
    return changed;
  };

  bool changed = true;
  while (changed) {
    changed = body_flows(goal);
    for (const auto& p : reach) {
      for (const Clause* c : sys.clauses_of(p)) {
        const Atom& head = *c->head;
        for (std::size_t pos = 0; pos < head.args.size(); ++pos) {
          if (!head.args[pos].sort.is_adt()) continue;
          auto rit = roles.find({p, pos});
          if (rit == roles.end()) continue;
          std::vector<RoleCata> s = rit->second;
          std::vector<std::string> vars;
          if (head.args[pos].is_var()) {
            vars.push_back(head.args[pos].name);
          } else {
            collect_adt_vars(head.args[pos], vars);
            s = aux_closure(s, catas);
          }
          for (const auto& v : vars)
            for (const auto& b : c->body) {
              if (catas.count(b.pred)) continue;
              for (std::size_t j = 0; j < b.args.size(); ++j)
                if (b.args[j].is_var() && b.args[j].name == v)
                  for (const auto& rc : s) changed |= add_role(roles, {b.pred, j}, remap(rc, head, b));
            }
        }
        changed |= body_flows(*c);
      }
    }
  }
  return roles;
}

DefinitionClause introduce_definition(const Clause& c, std::size_t subject, const RoleMap& roles, const Catas& catas,
                                      const std::string& name) {
  const Atom& b = c.body.at(subject);
  DefinitionClause d;
  d.name = name;
  d.subject = b.pred;
  Atom s{b.pred, {}};
  for (std::size_t k = 0; k < b.args.size(); ++k) {
    const Sort& so = b.args[k].sort;
    std::string v = (so.is_adt() ? "L" : "X") + std::to_string(k + 1);
    s.args.push_back(Term::var(v, so));
    if (so.is_adt()) d.hidden.push_back(s.args.back());
  }
  bool any_adt = !d.hidden.empty();
  if (!any_adt) throw TransformError("introduce_definition: " + b.pred + " has no ADT-sorted argument");
  d.body.push_back(s);
  int fresh = 0;
  for (std::size_t k = 0; k < b.args.size(); ++k) {
    if (!b.args[k].sort.is_adt()) continue;
    auto it = roles.find({b.pred, k});
    if (it == roles.end()) continue;
    for (const auto& rc : it->second) {
      const auto& ci = catas.at(rc.pred);
      const PredDecl* decl = nullptr;
      Atom a{rc.pred, std::vector<Term>(ci.arity())};
      a.args[ci.list_pos] = s.args[k];
      for (std::size_t e = 0; e < ci.extra_pos.size(); ++e) {
        std::size_t pos = ci.extra_pos[e];
        if (rc.links[e]) {
          a.args[pos] = s.args[*rc.links[e]];
        } else {
          a.args[pos] = Term::var("E" + std::to_string(++fresh), ci.nil_clause.head->args[pos].sort);
        }
      }
      for (std::size_t pos : ci.result_pos)
        a.args[pos] = Term::var("R" + std::to_string(++fresh), ci.nil_clause.head->args[pos].sort);
      (void)decl;
      d.body.push_back(std::move(a));
    }
  }
  d.head = Atom{name, {}};
  for (const auto& a : d.body)
    for (const auto& t : a.args)
      if (t.sort.is_basic()) d.head.args.push_back(t);
  return d;
}

std::variant<DefinitionClause, Incomparable> generalize(const DefinitionClause& d1, const DefinitionClause& d2) {
  if (d1.subject != d2.subject || d1.body.size() != d2.body.size()) return Incomparable{};
  auto strip = [](DefinitionClause d) {
    d.constraint = Expr::boolean(true);
    return d;
  };
  DefinitionClause g1 = strip(d1), g2 = strip(d2);
  // d1 is at least as general when its constraint-free body matches d2's body.
  Clause target = g2.instrumented();
  if (fold(target, g1).has_value() || g1.skeleton() == g2.skeleton()) return g1;
  return Incomparable{};
}

}  // namespace chcstr
