#include "chcstr/lfp.hpp"

#include <functional>

namespace chcstr {

std::size_t TupleHash::operator()(const std::vector<Term>& v) const {
  std::size_t h = v.size();
  for (const auto& t : v) h ^= hash_term(t) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

bool GroundAtomSet::insert(const Atom& a) {
  Rel& r = rels_[a.pred];
  if (!r.members.insert(a.args).second) return false;
  if (r.index.size() < a.args.size()) r.index.resize(a.args.size());
  for (std::size_t i = 0; i < a.args.size(); ++i) r.index[i][a.args[i]].push_back(r.rows.size());
  r.rows.push_back(a.args);
  ++size_;
  return true;
}

bool GroundAtomSet::contains(const Atom& a) const {
  auto it = rels_.find(a.pred);
  return it != rels_.end() && it->second.members.count(a.args) > 0;
}

const std::vector<std::vector<Term>>& GroundAtomSet::tuples(const std::string& pred) const {
  static const std::vector<std::vector<Term>> kEmpty;
  auto it = rels_.find(pred);
  return it == rels_.end() ? kEmpty : it->second.rows;
}

const std::vector<std::size_t>& GroundAtomSet::lookup(const std::string& pred, std::size_t pos, const Term& t) const {
  static const std::vector<std::size_t> kEmpty;
  auto it = rels_.find(pred);
  if (it == rels_.end() || pos >= it->second.index.size()) return kEmpty;
  auto jt = it->second.index[pos].find(t);
  return jt == it->second.index[pos].end() ? kEmpty : jt->second;
}

std::set<Atom> GroundAtomSet::atoms() const {
  std::set<Atom> out;
  for (const auto& [p, r] : rels_)
    for (const auto& row : r.rows) out.insert(Atom{p, row});
  return out;
}

std::vector<std::string> GroundAtomSet::predicates() const {
  std::vector<std::string> out;
  for (const auto& [p, r] : rels_)
    if (!r.rows.empty()) out.push_back(p);
  return out;
}

bool GroundAtomSet::subset_of(const GroundAtomSet& other) const {
  for (const auto& [p, r] : rels_)
    for (const auto& row : r.rows)
      if (!other.contains(Atom{p, row})) return false;
  return true;
}

bool in_universe(const Term& t, const Bounds& b) {
  if (t.kind == Term::Kind::Int) return t.value >= b.lo && t.value <= b.hi;
  if (t.kind != Term::Kind::Ctor) return true;
  if (t.depth() > b.depth) return false;
  for (const auto& a : t.args)
    if (!in_universe(a, b)) return false;
  return true;
}

namespace {

std::vector<Term> basic_values(const Sort& s, const Bounds& b) {
  std::vector<Term> out;
  if (s.is_bool()) {
    out = {Term::boolean(false), Term::boolean(true)};
  } else {
    for (std::int64_t v = b.lo; v <= b.hi; ++v) out.push_back(Term::integer(v));
  }
  return out;
}

}  // namespace

std::vector<Term> universe_terms(const ChcSystem& sys, const Sort& sort, const Bounds& b) {
  if (sort.is_basic()) return basic_values(sort, b);
  // levels[d][adt] = terms of exactly depth d
  std::vector<std::map<std::string, std::vector<Term>>> levels;
  auto upto = [&](const std::string& adt, int d) {
    std::vector<const Term*> out;
    for (int k = 0; k <= d && k < static_cast<int>(levels.size()); ++k) {
      auto it = levels[k].find(adt);
      if (it != levels[k].end())
        for (const auto& t : it->second) out.push_back(&t);
    }
    return out;
  };
  std::size_t total = 0;
  for (int d = 0; d <= b.depth; ++d) {
    levels.emplace_back();
    for (const auto& adt : sys.adts) {
      std::vector<Constructor> ctors = adt.ctors;
      std::sort(ctors.begin(), ctors.end(), [](const auto& x, const auto& y) { return x.name < y.name; });
      auto& bucket = levels[d][adt.name];
      for (const auto& c : ctors) {
        bool has_adt = std::any_of(c.args.begin(), c.args.end(), [](const Sort& s) { return s.is_adt(); });
        if (d == 0 && has_adt) continue;
        if (d > 0 && !has_adt) continue;
        // Cartesian product over argument choices; at least one ADT argument has depth d-1.
        std::vector<std::vector<Term>> choices;
        for (const auto& s : c.args) {
          if (s.is_basic()) {
            choices.push_back(basic_values(s, b));
          } else {
            std::vector<Term> ts;
            for (const Term* t : upto(s.adt, d - 1)) ts.push_back(*t);
            choices.push_back(std::move(ts));
          }
        }
        std::vector<Term> args(c.args.size());
        std::function<void(std::size_t)> go = [&](std::size_t i) {
          if (i == c.args.size()) {
            Term t = Term::ctor(c.name, Sort::adt_named(adt.name), args);
            if (t.depth() == d) {
              bucket.push_back(std::move(t));
              if (++total > b.max_atoms) throw ResourceError("ground universe exceeds the configured cap");
            }
            return;
          }
          for (const auto& v : choices[i]) {
            args[i] = v;
            go(i + 1);
          }
        };
        go(0);
      }
    }
  }
  std::vector<Term> out;
  for (const Term* t : upto(sort.adt, b.depth)) out.push_back(*t);
  return out;
}

namespace {

// One-way matching of a pattern against a ground term.
bool match(const Term& pat, const Term& g, Binding& b) {
  switch (pat.kind) {
    case Term::Kind::Var: {
      auto it = b.find(pat.name);
      if (it != b.end()) return it->second == g;
      b.emplace(pat.name, g);
      return true;
    }
    case Term::Kind::Int:
    case Term::Kind::Bool:
      return g.kind == pat.kind && g.value == pat.value;
    case Term::Kind::Ctor:
      if (g.kind != Term::Kind::Ctor || g.name != pat.name || g.args.size() != pat.args.size()) return false;
      for (std::size_t i = 0; i < pat.args.size(); ++i)
        if (!match(pat.args[i], g.args[i], b)) return false;
      return true;
  }
  return false;
}

bool ground_under(const Term& t, const Binding& b) {
  if (t.is_var()) return b.count(t.name) > 0;
  for (const auto& a : t.args)
    if (!ground_under(a, b)) return false;
  return true;
}

struct UniverseCache {
  const ChcSystem& sys;
  const Bounds& bounds;
  std::map<Sort, std::vector<Term>> cache;
  const std::vector<Term>& get(const Sort& s) {
    auto it = cache.find(s);
    if (it == cache.end()) it = cache.emplace(s, universe_terms(sys, s, bounds)).first;
    return it->second;
  }
};

void instances_impl(const ChcSystem&, const Clause& c, const GroundAtomSet& facts, UniverseCache& uc,
                    const std::function<bool(const Binding&)>& visit) {
  auto vars = c.vars();
  std::vector<std::pair<std::string, Sort>> basic;
  for (const auto& [n, s] : vars)
    if (s.is_basic()) basic.emplace_back(n, s);
  BoundedSearch search(c.constraint, basic);
  SearchOptions so;
  so.lo = facts.bounds().lo;
  so.hi = facts.bounds().hi;
  bool stop = false;

  auto finish = [&](const Binding& b) {
    // Unbound ADT variables range over the universe.
    std::vector<std::pair<std::string, Sort>> free_adt;
    for (const auto& [n, s] : vars)
      if (s.is_adt() && !b.count(n)) free_adt.emplace_back(n, s);
    Binding cur = b;
    std::function<void(std::size_t)> adt = [&](std::size_t i) {
      if (stop) return;
      if (i < free_adt.size()) {
        for (const auto& t : uc.get(free_adt[i].second)) {
          cur[free_adt[i].first] = t;
          adt(i + 1);
          if (stop) return;
        }
        cur.erase(free_adt[i].first);
        return;
      }
      BoundedSearch::Assignment init(basic.size());
      for (std::size_t k = 0; k < basic.size(); ++k) {
        auto it = cur.find(basic[k].first);
        if (it != cur.end()) init[k] = it->second.value;
      }
      search.run(init, so, [&](const std::vector<std::int64_t>& vals) {
        Binding full = cur;
        for (std::size_t k = 0; k < basic.size(); ++k)
          full[basic[k].first] = basic[k].second.is_bool() ? Term::boolean(vals[k] != 0) : Term::integer(vals[k]);
        if (!visit(full)) stop = true;
        return !stop;
      });
    };
    adt(0);
  };

  std::vector<bool> done(c.body.size(), false);
  std::function<void(Binding&, std::size_t)> join = [&](Binding& b, std::size_t n_done) {
    if (stop) return;
    if (n_done == c.body.size()) {
      finish(b);
      return;
    }
    // Pick the atom with the most ground arguments.
    std::size_t best = c.body.size();
    int best_ground = -1;
    for (std::size_t i = 0; i < c.body.size(); ++i) {
      if (done[i]) continue;
      int g = 0;
      for (const auto& a : c.body[i].args) g += ground_under(a, b) ? 1 : 0;
      if (g > best_ground) {
        best_ground = g;
        best = i;
      }
    }
    const Atom& atom = c.body[best];
    const auto& rows = facts.tuples(atom.pred);
    const std::vector<std::size_t>* cands = nullptr;
    for (std::size_t p = 0; p < atom.args.size(); ++p) {
      if (!ground_under(atom.args[p], b)) continue;
      const auto& l = facts.lookup(atom.pred, p, substitute(atom.args[p], b));
      if (!cands || l.size() < cands->size()) cands = &l;
    }
    done[best] = true;
    auto try_row = [&](const std::vector<Term>& row) {
      Binding nb = b;
      for (std::size_t p = 0; p < row.size(); ++p)
        if (!match(atom.args[p], row[p], nb)) return;
      join(nb, n_done + 1);
    };
    if (cands) {
      std::vector<std::size_t> snapshot = *cands;
      for (std::size_t r : snapshot) {
        try_row(rows[r]);
        if (stop) break;
      }
    } else {
      std::size_t n = rows.size();
      for (std::size_t r = 0; r < n && !stop; ++r) try_row(rows[r]);
    }
    done[best] = false;
  };
  Binding b;
  join(b, 0);
}

}  // namespace

void instances(const ChcSystem& sys, const Clause& c, const GroundAtomSet& facts,
               const std::function<bool(const Binding&)>& visit) {
  UniverseCache uc{sys, facts.bounds(), {}};
  instances_impl(sys, c, facts, uc, visit);
}

namespace {

std::vector<Atom> derive(const ChcSystem& sys, const Clause& c, const GroundAtomSet& facts, UniverseCache& uc) {
  std::vector<Atom> out;
  instances_impl(sys, c, facts, uc, [&](const Binding& b) {
    Atom h = substitute(*c.head, b);
    bool ok = true;
    for (const auto& a : h.args) ok = ok && in_universe(a, facts.bounds());
    if (ok && !facts.contains(h)) out.push_back(std::move(h));
    return true;
  });
  return out;
}

}  // namespace

GroundAtomSet bounded_lfp(const ChcSystem& sys, const Bounds& b) {
  if (b.depth < 0 || b.lo > b.hi) throw Error("invalid bounds");
  GroundAtomSet facts(b);
  UniverseCache uc{sys, b, {}};
  for (int iter = 0; iter < b.max_iters; ++iter) {
    bool changed = false;
    for (const auto& c : sys.clauses) {
      for (auto& a : derive(sys, c, facts, uc)) {
        if (facts.insert(a)) changed = true;
        if (facts.size() > b.max_atoms) throw ResourceError("bounded least model exceeds the configured atom cap");
      }
    }
    if (!changed) return facts;
  }
  throw ResourceError("bounded least model did not converge within the iteration limit");
}

std::set<Atom> immediate_consequences(const ChcSystem& sys, const GroundAtomSet& facts) {
  std::set<Atom> out;
  UniverseCache uc{sys, facts.bounds(), {}};
  for (const auto& c : sys.clauses) {
    instances_impl(sys, c, facts, uc, [&](const Binding& b) {
      Atom h = substitute(*c.head, b);
      bool ok = true;
      for (const auto& a : h.args) ok = ok && in_universe(a, facts.bounds());
      if (ok) out.insert(std::move(h));
      return true;
    });
  }
  return out;
}

std::vector<GoalViolation> check_goals(const ChcSystem& sys, const GroundAtomSet& ground, std::size_t limit) {
  std::vector<GoalViolation> out;
  UniverseCache uc{sys, ground.bounds(), {}};
  for (std::size_t g = 0; g < sys.goals.size(); ++g) {
    const Clause& goal = sys.goals[g];
    instances_impl(sys, goal, ground, uc, [&](const Binding& b) {
      GoalViolation v;
      v.goal_index = g;
      v.witness = b;
      for (const auto& a : goal.body) v.body.push_back(substitute(a, b));
      out.push_back(std::move(v));
      return limit == 0 || out.size() < limit;
    });
    if (limit && out.size() >= limit) break;
  }
  return out;
}

}  // namespace chcstr
