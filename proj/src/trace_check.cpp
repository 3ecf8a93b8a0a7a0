#include <map>
#include <sstream>

#include "chcstr/chc_text.hpp"
#include "chcstr/transform.hpp"

namespace chcstr {

namespace {

ChcSystem state_system(const ChcSystem& input, const std::vector<PredDecl>& decls,
                       const std::map<std::size_t, Clause>& state) {
  ChcSystem s;
  s.adts = input.adts;
  s.preds = input.preds;
  for (const auto& d : decls) s.declare(d);
  for (const auto& [id, c] : state) s.add(c);
  return s;
}

std::string first_difference(const GroundAtomSet& a, const GroundAtomSet& b, const std::set<std::string>& preds) {
  for (const auto& p : preds) {
    for (const auto& t : a.tuples(p))
      if (!b.contains(Atom{p, t})) return "lost " + print_atom(Atom{p, t});
    for (const auto& t : b.tuples(p))
      if (!a.contains(Atom{p, t})) return "gained " + print_atom(Atom{p, t});
  }
  return {};
}

}  // namespace

TraceCheckResult check_trace_bounded(const ChcSystem& input, const TransformResult& r, const Bounds& b) {
  TraceCheckResult res;
  std::map<std::size_t, Clause> state;
  std::size_t id = 0;
  for (const auto& c : input.clauses) state.emplace(id++, c);
  for (const auto& g : input.goals) state.emplace(id++, g);

  std::vector<PredDecl> decls;
  ChcSystem sys = state_system(input, decls, state);
  GroundAtomSet before = bounded_lfp(sys, b);
  bool violated = !check_goals(sys, before, 1).empty();

  for (std::size_t i = 0; i < r.trace.size(); ++i) {
    const TraceStep& st = r.trace[i];
    std::set<std::string> old_preds;
    for (const auto& d : sys.preds) old_preds.insert(d.name);
    for (std::size_t k : st.removed) state.erase(k);
    for (const auto& [k, c] : st.added) {
      state[k] = c;
      if (st.kind == TraceStep::Kind::Define)
        for (const auto& d : r.instrumented_decls)
          if (d.name == c.head->pred) decls.push_back(d);
    }
    sys = state_system(input, decls, state);
    GroundAtomSet after = bounded_lfp(sys, b);
    std::set<std::string> preds;
    for (const auto& d : sys.preds)
      if (st.kind != TraceStep::Kind::Define || old_preds.count(d.name)) preds.insert(d.name);
    std::string diff = first_difference(before, after, preds);
    bool now = !check_goals(sys, after, 1).empty();
    if (diff.empty() && now != violated)
      diff = now ? "goal violation appeared" : "goal violation disappeared";
    ++res.steps;
    if (!diff.empty()) {
      std::ostringstream os;
      os << step_name(st.kind) << " for " << st.target << ": " << diff;
      res.ok = false;
      res.failed_step = i;
      res.detail = os.str();
      return res;
    }
    before = std::move(after);
  }
  return res;
}

}  // namespace chcstr
