#include "chcstr/transform.hpp"

#include <deque>
#include <set>
#include <sstream>

#include "chcstr/chc_text.hpp"

namespace chcstr {

namespace {

using Catas = std::map<std::string, CatamorphismInfo>;
using Kind = TraceStep::Kind;

bool occurs_in(const std::string& v, const Term& t) {
  if (t.is_var()) return t.name == v;
  for (const auto& a : t.args)
    if (occurs_in(v, a)) return true;
  return false;
}

bool occurs_in(const std::string& v, const Atom& a) {
  for (const auto& t : a.args)
    if (occurs_in(v, t)) return true;
  return false;
}

bool has_adt_var(const Term& t) {
  if (t.is_var()) return t.sort.is_adt();
  for (const auto& a : t.args)
    if (has_adt_var(a)) return true;
  return false;
}

bool has_adt_arg(const Atom& a) {
  for (const auto& t : a.args)
    if (t.sort.is_adt()) return true;
  return false;
}

bool clause_has_adt_vars(const Clause& c) {
  for (const auto& [v, s] : c.vars())
    if (s.is_adt()) return true;
  return false;
}

class Transformer {
 public:
  Transformer(const ChcSystem& in, const Catas& catas, const TransformOptions& o)
      : in_(in), catas_(catas), opts_(o), work_(in) {
    next_id_ = in.clauses.size() + in.goals.size();
    for (const auto& g : in.goals) {
      std::size_t n = 0;
      const Atom* s = nullptr;
      for (const auto& a : g.body)
        if (!catas.count(a.pred)) {
          ++n;
          s = &a;
        }
      if (n == 1) contracts_[s->pred].push_back(&g);
    }
  }

  TransformResult run() {
    std::vector<std::optional<Clause>> goals(in_.goals.size());
    for (std::size_t gi = 0; gi < in_.goals.size(); ++gi) {
      const Clause& g = in_.goals[gi];
      check_goal(g, gi);
      roles_.push_back(compute_roles(in_, g, catas_));
      std::size_t id = in_.clauses.size() + gi;
      if (!clause_has_adt_vars(g)) {
        goals[gi] = g;
        continue;
      }
      used_.clear();
      auto r = process(g, id, gi, true, "goal " + std::to_string(gi));
      goals[gi] = r ? std::optional<Clause>(r->second) : std::nullopt;
      res_.defs.provenance.push_back({"goal " + std::to_string(gi), "goal " + std::to_string(gi), used_});
      drain();
    }
    res_.roles.assign(roles_.begin(), roles_.begin() + static_cast<long>(in_.goals.size()));
    include_basic(goals);
    assemble(goals);
    return std::move(res_);
  }

 private:
  void check_goal(const Clause& g, std::size_t gi) {
    const Atom* subject = nullptr;
    for (const auto& a : g.body) {
      if (catas_.count(a.pred)) continue;
      if (!has_adt_arg(a)) continue;
      if (!subject) {
        subject = &a;
        continue;
      }
      auto r = recognize(in_, a.pred);
      std::string why = std::holds_alternative<NotACatamorphism>(r)
                            ? reason_text(std::get<NotACatamorphism>(r).reason)
                            : "not recognized";
      throw TransformError("goal " + std::to_string(gi) + " uses " + a.pred + " as a contract predicate, but " +
                           a.pred + " is not a catamorphism (" + why + ")");
    }
  }

  bool is_new(const std::string& p) const { return by_name_.count(p) > 0; }
  bool is_other(const Atom& a) const { return !catas_.count(a.pred) && !is_new(a.pred); }

  std::size_t record(Kind k, const std::string& target, std::vector<std::size_t> removed,
                     const std::vector<Clause>& added, std::vector<std::size_t>* ids = nullptr) {
    TraceStep s{k, target, std::move(removed), {}};
    std::size_t last = 0;
    for (const auto& c : added) {
      last = next_id_++;
      if (ids) ids->push_back(last);
      if (opts_.record_trace) s.added.emplace_back(last, c);
    }
    if (opts_.record_trace) res_.trace.push_back(std::move(s));
    return last;
  }

  Term fresh_var(const std::string& stem, const Sort& s) { return Term::var(work_.fresh_name(stem), s); }

  const std::vector<RoleCata>& role(std::size_t ctx, const std::string& pred, std::size_t pos) const {
    static const std::vector<RoleCata> none;
    auto it = roles_[ctx].find({pred, pos});
    return it == roles_[ctx].end() ? none : it->second;
  }

  Atom cata_atom(const RoleCata& rc, const Atom& b, const Term& list) {
    const auto& ci = catas_.at(rc.pred);
    Atom a{rc.pred, std::vector<Term>(ci.arity())};
    a.args[ci.list_pos] = list;
    for (std::size_t e = 0; e < ci.extra_pos.size(); ++e) {
      std::size_t pos = ci.extra_pos[e];
      a.args[pos] = rc.links[e] ? b.args[*rc.links[e]] : fresh_var("E", ci.nil_clause.head->args[pos].sort);
    }
    for (std::size_t pos : ci.result_pos) a.args[pos] = fresh_var("R", ci.nil_clause.head->args[pos].sort);
    return a;
  }

  bool fits(const Atom& a, const RoleCata& rc, const Atom& b, const Term& list) const {
    if (a.pred != rc.pred) return false;
    const auto& ci = catas_.at(rc.pred);
    if (!(a.args[ci.list_pos] == list)) return false;
    for (std::size_t e = 0; e < ci.extra_pos.size(); ++e)
      if (rc.links[e] && !(a.args[ci.extra_pos[e]] == b.args[*rc.links[e]])) return false;
    return true;
  }

  // The contract of `b`'s function instantiated on the catamorphism atoms of `c`.
  std::optional<Expr> instantiate(const Clause& goal, const Atom& b, const Clause& c) {
    Clause g = rename_apart(goal, work_, "");
    Binding theta;
    const Atom* s = nullptr;
    for (const auto& a : g.body)
      if (!catas_.count(a.pred)) s = &a;
    if (!s || s->pred != b.pred) return std::nullopt;
    for (std::size_t k = 0; k < s->args.size(); ++k) {
      if (!s->args[k].is_var()) return std::nullopt;
      auto [it, fresh] = theta.emplace(s->args[k].name, b.args[k]);
      if (!fresh && !(it->second == b.args[k])) return std::nullopt;
    }
    for (const auto& ga : g.body) {
      auto cit = catas_.find(ga.pred);
      if (cit == catas_.end()) continue;
      const auto& ci = cit->second;
      bool found = false;
      for (const auto& ca : c.body) {
        if (ca.pred != ga.pred) continue;
        Binding t2 = theta;
        bool ok = true;
        for (std::size_t i = 0; ok && i < ga.args.size(); ++i) {
          const Term& p = ga.args[i];
          if (!p.is_var()) {
            ok = p == ca.args[i];
            continue;
          }
          auto [it, fresh] = t2.emplace(p.name, ca.args[i]);
          ok = fresh || it->second == ca.args[i];
        }
        (void)ci;
        if (ok) {
          theta = std::move(t2);
          found = true;
          break;
        }
      }
      if (!found) return std::nullopt;
    }
    std::map<std::string, Sort> vs;
    collect_vars(g.constraint, vs);
    for (const auto& [v, so] : vs)
      if (!theta.count(v)) return std::nullopt;
    return mk_not(substitute(g.constraint, theta));
  }

  DefinitionClause& definition(DefinitionClause d, std::size_t ctx) {
    std::string key = d.skeleton();
    auto it = by_skeleton_.find(key);
    if (it != by_skeleton_.end()) return res_.defs.defs[it->second];
    if (res_.defs.defs.size() >= opts_.max_definitions) {
      std::string chain;
      for (const auto& x : res_.defs.defs) chain += " " + x.name + "[" + x.skeleton() + "]";
      throw TransformError("definition budget of " + std::to_string(opts_.max_definitions) +
                           " exceeded; definitions:" + chain);
    }
    std::string name = "new" + std::to_string(++counter_);
    d.name = name;
    d.head.pred = name;
    d.context = ctx;
    std::size_t idx = res_.defs.defs.size();
    res_.defs.defs.push_back(d);
    by_skeleton_[key] = idx;
    by_name_[name] = idx;
    ++res_.stats.definitions;

    PredDecl basic{name, {}}, inst{name, {}};
    for (const auto& t : d.head.args) basic.args.push_back(t.sort);
    inst.args = basic.args;
    for (const auto& t : d.hidden) inst.args.push_back(t.sort);
    decls_.push_back(basic);
    res_.instrumented_decls.push_back(inst);
    transparent_.insert(name);

    def_ids_[name] = record(Kind::Define, name, {}, {d.instrumented()});
    worklist_.push_back(idx);
    return res_.defs.defs[idx];
  }

  DefinitionClause cata_only_definition(const std::vector<Atom>& atoms) {
    std::vector<RoleCata> s;
    for (const auto& a : atoms) {
      bool dup = false;
      for (const auto& x : s) dup |= x.pred == a.pred;
      if (!dup) s.push_back({a.pred, std::vector<std::optional<std::size_t>>(catas_.at(a.pred).extra_pos.size())});
    }
    for (std::size_t i = 0; i < s.size(); ++i) {
      const auto& ci = catas_.at(s[i].pred);
      if (!ci.aux) continue;
      bool dup = false;
      for (const auto& x : s) dup |= x.pred == ci.aux->pred;
      if (!dup) s.push_back({ci.aux->pred, std::vector<std::optional<std::size_t>>(catas_.at(ci.aux->pred).extra_pos.size())});
    }
    std::sort(s.begin(), s.end(), [](const RoleCata& a, const RoleCata& b) { return a.pred < b.pred; });
    DefinitionClause d;
    Term l = Term::var("L1", Sort::list());
    d.hidden.push_back(l);
    int fresh = 0;
    for (const auto& rc : s) {
      const auto& ci = catas_.at(rc.pred);
      Atom a{rc.pred, std::vector<Term>(ci.arity())};
      a.args[ci.list_pos] = l;
      for (std::size_t pos : ci.extra_pos)
        a.args[pos] = Term::var("E" + std::to_string(++fresh), ci.nil_clause.head->args[pos].sort);
      for (std::size_t pos : ci.result_pos)
        a.args[pos] = Term::var("R" + std::to_string(++fresh), ci.nil_clause.head->args[pos].sort);
      d.body.push_back(a);
    }
    d.head = Atom{"", {}};
    for (const auto& a : d.body)
      for (const auto& t : a.args)
        if (t.sort.is_basic()) d.head.args.push_back(t);
    return d;
  }

  // Records whether a fold used a proper instance of its definition.
  void note_instance(const Clause& folded, const DefinitionClause& def, const std::string& target) {
    for (const auto& a : folded.body) {
      if (a.pred != def.name) continue;
      std::map<std::string, std::string> inst;
      bool renaming = true;
      for (std::size_t i = 0; i < def.head.args.size() && renaming; ++i) {
        const Term& p = def.head.args[i];
        const Term& t = a.args[i];
        if (!t.is_var()) {
          renaming = false;
          break;
        }
        auto [it, fresh] = inst.emplace(p.name, t.name);
        renaming = fresh ? true : it->second == t.name;
      }
      std::set<std::string> images;
      for (const auto& [p, t] : inst) renaming &= images.insert(t).second;
      if (!renaming) {
        ++res_.stats.generalizations;
        res_.defs.links.emplace_back(target, def.name);
      }
    }
  }

  std::optional<std::pair<std::size_t, Clause>> process(Clause c, std::size_t id, std::size_t ctx, bool is_goal,
                                                         const std::string& target) {
    auto replace = [&](Kind k, Clause next) {
      id = record(k, target, {id}, {next});
      c = std::move(next);
    };

    // Unfold catamorphisms on constructor terms; generalize constructor arguments of
    // function atoms.
    for (bool again = true; again;) {
      again = false;
      for (std::size_t i = 0; i < c.body.size() && !again; ++i) {
        auto cit = catas_.find(c.body[i].pred);
        if (cit == catas_.end() || c.body[i].args[cit->second.list_pos].is_var()) continue;
        auto us = unfold(c, i, work_);
        ++res_.stats.unfold_steps;
        if (us.empty()) {
          record(Kind::Prune, target, {id}, {});
          return std::nullopt;
        }
        if (us.size() > 1) throw TransformError("catamorphism " + c.body[i].pred + " unfolds to several clauses");
        replace(Kind::Unfold, us[0]);
        again = true;
      }
      for (std::size_t i = 0; i < c.body.size() && !again; ++i) {
        const Atom& b = c.body[i];
        if (!is_other(b)) continue;
        for (std::size_t j = 0; j < b.args.size() && !again; ++j) {
          if (!b.args[j].sort.is_adt() || b.args[j].is_var()) continue;
          Clause next = c;
          Term v = fresh_var("L", b.args[j].sort);
          for (const auto& rc : role(ctx, b.pred, j)) {
            Atom on_var = cata_atom(rc, b, v);
            Atom on_term = on_var;
            on_term.args[catas_.at(rc.pred).list_pos] = b.args[j];
            next.body.push_back(on_var);
            next.body.push_back(on_term);
            ++res_.stats.added_catas;
          }
          next.body[i].args[j] = v;
          replace(Kind::AddCata, next);
          again = true;
        }
      }
    }

    // Catamorphism atoms required by the roles; linked ones first so that free ones
    // can reuse them.
    {
      Clause next = c;
      bool added = false;
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t i = 0; i < c.body.size(); ++i) {
          const Atom& b = c.body[i];
          if (!is_other(b)) continue;
          for (std::size_t j = 0; j < b.args.size(); ++j) {
            if (!b.args[j].sort.is_adt()) continue;
            for (const auto& rc : role(ctx, b.pred, j)) {
              bool linked = false;
              for (const auto& l : rc.links) linked |= l.has_value();
              if (linked != (pass == 0)) continue;
              bool found = false;
              for (const auto& a : next.body) found |= fits(a, rc, b, b.args[j]);
              if (found) continue;
              next.body.push_back(cata_atom(rc, b, b.args[j]));
              ++res_.stats.added_catas;
              added = true;
            }
          }
        }
      }
      if (added) replace(Kind::AddCata, next);
    }

    if (!is_goal && opts_.contract_assumptions) {
      std::vector<Expr> parts{c.constraint};
      for (const auto& b : c.body) {
        if (!is_other(b)) continue;
        auto it = contracts_.find(b.pred);
        if (it == contracts_.end()) continue;
        for (const Clause* g : it->second)
          if (auto e = instantiate(*g, b, c)) parts.push_back(*e);
      }
      if (parts.size() > 1) {
        res_.stats.assumptions += parts.size() - 1;
        Clause next = c;
        next.constraint = simplify(mk_and(parts));
        replace(Kind::Assume, next);
      }
    }

    FoldOptions fo{true, transparent_};
    for (bool again = true; again;) {
      again = false;
      for (std::size_t i = 0; i < c.body.size(); ++i) {
        const Atom& b = c.body[i];
        if (!is_other(b) || !has_adt_arg(b)) continue;
        DefinitionClause cand = introduce_definition(c, i, roles_[ctx], catas_, "");
        const DefinitionClause& def = definition(std::move(cand), ctx);
        fo.transparent = transparent_;
        auto f = fold(c, def, fo);
        if (!f) throw TransformError("no instance of " + def.name + " in a clause derived for " + target);
        ++res_.stats.fold_steps;
        note_instance(erase_hidden(*f, res_.defs), def, target);
        used_.push_back(def.name);
        replace(Kind::Fold, *f);
        again = true;
        break;
      }
    }

    // Remaining catamorphism atoms: drop those on variables already hidden in new
    // atoms, package the others into catamorphism-only definitions.
    for (bool again = true; again;) {
      again = false;
      std::map<std::string, std::vector<std::size_t>> groups;
      for (std::size_t i = 0; i < c.body.size(); ++i) {
        auto cit = catas_.find(c.body[i].pred);
        if (cit == catas_.end()) continue;
        const Term& l = c.body[i].args[cit->second.list_pos];
        if (l.is_var()) groups[l.name].push_back(i);
      }
      for (const auto& [v, idxs] : groups) {
        bool hidden = false;
        for (const auto& a : c.body) hidden |= is_new(a.pred) && occurs_in(v, a);
        if (hidden) {
          Clause next = c;
          for (auto it = idxs.rbegin(); it != idxs.rend(); ++it) next.body.erase(next.body.begin() + static_cast<long>(*it));
          res_.stats.dropped_atoms += idxs.size();
          replace(Kind::Drop, next);
        } else {
          std::vector<Atom> atoms;
          for (std::size_t i : idxs) atoms.push_back(c.body[i]);
          const DefinitionClause& def = definition(cata_only_definition(atoms), ctx);
          fo.transparent = transparent_;
          auto f = fold(c, def, fo);
          if (!f) throw TransformError("no instance of " + def.name + " in a clause derived for " + target);
          ++res_.stats.fold_steps;
          used_.push_back(def.name);
          replace(Kind::Fold, *f);
        }
        again = true;
        break;
      }
    }

    for (const auto& a : c.body)
      if (!is_new(a.pred))
        for (const auto& t : a.args)
          if (has_adt_var(t)) throw TransformError("ADT variable left in " + a.pred + " in a clause derived for " + target);

    Clause done = c;
    done.constraint = simplify(c.constraint);
    if (done.constraint.is_false()) {
      record(Kind::Prune, target, {id}, {});
      return std::nullopt;
    }
    return std::make_pair(id, done);
  }

  void drain() {
    while (!worklist_.empty()) {
      std::size_t idx = worklist_.front();
      worklist_.pop_front();
      DefinitionClause d = res_.defs.defs[idx];
      Clause c0 = d.instrumented();
      auto us = unfold(c0, 0, work_);
      ++res_.stats.unfold_steps;
      std::vector<std::size_t> ids;
      record(Kind::Unfold, d.name, {def_ids_.at(d.name)}, us, &ids);
      for (std::size_t k = 0; k < us.size(); ++k) {
        used_.clear();
        std::string target = d.name + "/" + std::to_string(k + 1);
        std::size_t id = opts_.record_trace ? ids[k] : 0;
        auto r = process(us[k], id, d.context, false, target);
        if (!r) continue;
        res_.defs.provenance.push_back({target, d.name, used_});
        out_.push_back(r->second);
      }
    }
  }

  // Basic-sort predicates referenced by the output keep their clauses (transformed
  // when they mention ADT variables).
  void include_basic(std::vector<std::optional<Clause>>& goals) {
    std::deque<std::string> todo;
    auto note = [&](const Clause& c) {
      for (const auto& a : c.body)
        if (!is_new(a.pred) && !catas_.count(a.pred) && basic_.insert(a.pred).second) todo.push_back(a.pred);
    };
    for (const auto& g : goals)
      if (g) note(*g);
    for (const auto& c : out_) note(c);
    while (!todo.empty()) {
      std::string p = todo.front();
      todo.pop_front();
      for (std::size_t ci = 0; ci < in_.clauses.size(); ++ci) {
        const Clause& c = in_.clauses[ci];
        if (c.head->pred != p) continue;
        if (!clause_has_adt_vars(c)) {
          out_.push_back(c);
          note(c);
          continue;
        }
        Clause as_goal = c;
        as_goal.head.reset();
        roles_.push_back(compute_roles(in_, as_goal, catas_));
        used_.clear();
        std::string target = p + " clause " + std::to_string(ci + 1);
        auto r = process(c, ci, roles_.size() - 1, false, target);
        drain();
        if (r) {
          res_.defs.provenance.push_back({target, p, used_});
          out_.push_back(r->second);
          note(r->second);
        }
      }
    }
  }

  void assemble(const std::vector<std::optional<Clause>>& goals) {
    ChcSystem& o = res_.output;
    for (const auto& p : basic_)
      if (const PredDecl* d = in_.find_pred(p)) o.declare(*d);
    for (const auto& d : decls_) o.declare(d);
    for (const auto& c : out_) o.add(rename_canonical(erase_hidden(c, res_.defs)));
    for (const auto& g : goals) {
      if (g) {
        o.add(rename_canonical(erase_hidden(*g, res_.defs)));
      } else {
        Clause f;
        f.constraint = Expr::boolean(false);
        o.add(f);
      }
    }
    o.check();
  }

  const ChcSystem& in_;
  const Catas& catas_;
  TransformOptions opts_;
  ChcSystem work_;
  TransformResult res_;
  std::map<std::string, std::vector<const Clause*>> contracts_;
  std::vector<RoleMap> roles_;
  std::map<std::string, std::size_t> by_skeleton_;
  std::map<std::string, std::size_t> by_name_;
  std::map<std::string, std::size_t> def_ids_;
  std::set<std::string> transparent_;
  std::deque<std::size_t> worklist_;
  std::vector<PredDecl> decls_;
  std::vector<Clause> out_;
  std::set<std::string> basic_;
  std::vector<std::string> used_;
  std::size_t next_id_ = 0;
  std::size_t counter_ = 0;
};

std::string var_name(std::size_t i) {
  std::string s(1, static_cast<char>('A' + i % 26));
  if (i >= 26) s += std::to_string(i / 26);
  return s;
}

}  // namespace

TransformResult t_cata(const ChcSystem& sys, const Catas& catas, const TransformOptions& opts) {
  return Transformer(sys, catas, opts).run();
}

Clause erase_hidden(const Clause& c, const DefinitionMap& defs) {
  Clause out = c;
  auto cut = [&](Atom& a) {
    if (const DefinitionClause* d = defs.find(a.pred)) a.args.resize(d->head.args.size());
  };
  if (out.head) cut(*out.head);
  for (auto& a : out.body) cut(a);
  return out;
}

Clause rename_canonical(const Clause& c) {
  std::vector<std::string> order;
  std::set<std::string> seen;
  std::map<std::string, Sort> sorts;
  auto visit_term = [&](const Term& t, auto&& self) -> void {
    if (t.is_var()) {
      if (seen.insert(t.name).second) order.push_back(t.name);
      sorts[t.name] = t.sort;
      return;
    }
    for (const auto& a : t.args) self(a, self);
  };
  if (c.head)
    for (const auto& t : c.head->args) visit_term(t, visit_term);
  // Constraint variables in printed order.
  std::map<std::string, Sort> cv;
  collect_vars(c.constraint, cv);
  std::string text = print_constraint(c.constraint);
  std::vector<std::pair<std::size_t, std::string>> positions;
  for (const auto& [v, s] : cv) {
    sorts[v] = s;
    std::size_t pos = std::string::npos;
    for (std::size_t at = text.find(v); at != std::string::npos; at = text.find(v, at + 1)) {
      bool left = at == 0 || !(std::isalnum(static_cast<unsigned char>(text[at - 1])) || text[at - 1] == '_');
      std::size_t end = at + v.size();
      bool right = end >= text.size() || !(std::isalnum(static_cast<unsigned char>(text[end])) || text[end] == '_');
      if (left && right) {
        pos = at;
        break;
      }
    }
    positions.emplace_back(pos, v);
  }
  std::sort(positions.begin(), positions.end());
  for (const auto& [p, v] : positions)
    if (seen.insert(v).second) order.push_back(v);
  for (const auto& a : c.body)
    for (const auto& t : a.args) visit_term(t, visit_term);
  Binding b;
  for (std::size_t i = 0; i < order.size(); ++i) b[order[i]] = Term::var(var_name(i), sorts.at(order[i]));
  return substitute(c, b);
}

// Bundles ------------------------------------------------------------------------

std::string serialize_bundle(const ChcSystem& input, const TransformResult& r) {
  std::ostringstream out;
  PrintOptions po;
  po.explicit_decls = true;
  out << "//@ input\n" << print_chc(input, po);
  out << "//@ output\n" << print_chc(r.output, po);
  out << "//@ definitions\n";
  for (const auto& d : r.defs.defs) out << print_clause(d.clause()) << "\n";
  out << "//@ meta\n";
  for (const auto& d : r.defs.defs) {
    out << d.name << "\tsubject=" << d.subject.value_or("") << "\tcontext=" << d.context << "\thidden=";
    for (std::size_t i = 0; i < d.hidden.size(); ++i) out << (i ? "," : "") << d.hidden[i].name;
    out << "\n";
  }
  out << "//@ links\n";
  for (const auto& [a, b] : r.defs.links) out << a << "\t" << b << "\n";
  out << "//@ provenance\n";
  for (const auto& p : r.defs.provenance) {
    out << p.clause << "\t" << p.source << "\t";
    for (std::size_t i = 0; i < p.defs.size(); ++i) out << (i ? "," : "") << p.defs[i];
    out << "\n";
  }
  const auto& s = r.stats;
  out << "//@ stats\n"
      << "definitions=" << s.definitions << "\nunfold_steps=" << s.unfold_steps << "\nfold_steps=" << s.fold_steps
      << "\ngeneralizations=" << s.generalizations << "\nadded_catas=" << s.added_catas
      << "\nassumptions=" << s.assumptions << "\ndropped_atoms=" << s.dropped_atoms << "\n";
  return out.str();
}

namespace {

std::vector<std::string> split_tabs(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == '\t') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  if (s.empty()) return out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
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

Bundle parse_bundle(const std::string& text) {
  std::map<std::string, std::string> sec;
  std::string current;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("//@ ", 0) == 0) {
      current = line.substr(4);
      sec[current];
      continue;
    }
    if (current.empty()) continue;
    sec[current] += line + "\n";
  }
  for (const char* need : {"input", "output", "definitions", "meta"})
    if (!sec.count(need)) throw ParseError(std::string("bundle lacks section ") + need, 0, 0);

  Bundle b;
  b.input = parse_chc(sec["input"]);
  b.output = parse_chc(sec["output"]);
  ChcSystem both = parse_chc(sec["input"] + "\n" + sec["definitions"]);

  std::istringstream meta(sec["meta"]);
  while (std::getline(meta, line)) {
    if (line.empty()) continue;
    auto f = split_tabs(line);
    DefinitionClause d;
    d.name = f[0];
    std::vector<std::string> hidden;
    for (std::size_t i = 1; i < f.size(); ++i) {
      auto eq = f[i].find('=');
      std::string k = f[i].substr(0, eq), v = f[i].substr(eq + 1);
      if (k == "subject" && !v.empty()) d.subject = v;
      if (k == "context") d.context = std::stoul(v);
      if (k == "hidden") hidden = split_commas(v);
    }
    const Clause* c = nullptr;
    for (const auto& x : both.clauses)
      if (x.head->pred == d.name) c = &x;
    if (!c) throw ParseError("bundle lacks the definition of " + d.name, 0, 0);
    d.head = *c->head;
    d.body = c->body;
    d.constraint = c->constraint;
    auto vars = c->vars();
    for (const auto& h : hidden) d.hidden.push_back(Term::var(h, vars.count(h) ? vars.at(h) : Sort::list()));
    b.defs.defs.push_back(std::move(d));
  }
  std::istringstream links(sec["links"]);
  while (std::getline(links, line)) {
    if (line.empty()) continue;
    auto f = split_tabs(line);
    if (f.size() == 2) b.defs.links.emplace_back(f[0], f[1]);
  }
  std::istringstream prov(sec["provenance"]);
  while (std::getline(prov, line)) {
    if (line.empty()) continue;
    auto f = split_tabs(line);
    if (f.size() == 3) b.defs.provenance.push_back({f[0], f[1], split_commas(f[2])});
  }
  std::istringstream st(sec["stats"]);
  while (std::getline(st, line)) {
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string k = line.substr(0, eq);
    std::size_t v = std::stoul(line.substr(eq + 1));
    auto& s = b.stats;
    if (k == "definitions") s.definitions = v;
    if (k == "unfold_steps") s.unfold_steps = v;
    if (k == "fold_steps") s.fold_steps = v;
    if (k == "generalizations") s.generalizations = v;
    if (k == "added_catas") s.added_catas = v;
    if (k == "assumptions") s.assumptions = v;
    if (k == "dropped_atoms") s.dropped_atoms = v;
  }
  return b;
}

}  // namespace chcstr
