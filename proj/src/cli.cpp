#include "chcstr/cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "chcstr/cata.hpp"
#include "chcstr/chc_text.hpp"
#include "chcstr/compare.hpp"
#include "chcstr/transform.hpp"
#include "chcstr/translate.hpp"

namespace chcstr::cli {

namespace {

class FileError : public Error {
 public:
  using Error::Error;
};

class ToolFailure : public Error {
 public:
  using Error::Error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream o(path, std::ios::binary);
  if (!o) throw FileError("cannot write " + path);
  o << text;
  if (!o) throw FileError("cannot write " + path);
}

// Writes to `path`, or to `out` when the path is empty or "-".
void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    write_file(path, text);
  }
}

int exit_for(const std::exception& e) {
  if (dynamic_cast<const FileError*>(&e)) return kUsage;
  if (dynamic_cast<const ToolFailure*>(&e)) return kToolFailure;
  if (dynamic_cast<const ResourceError*>(&e)) return kToolFailure;
  if (dynamic_cast<const Error*>(&e)) return kNegative;
  return kToolFailure;
}

int guarded(std::ostream& out, std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    int code = exit_for(e);
    out << "error=" << e.what() << "\n";
    out << "VERDICT: " << (code == kNegative ? "rejected" : code == kUsage ? "usage error" : "tool failure") << "\n";
    return code;
  }
}

class Stage {
 public:
  Stage(std::ostream& out, const CommonOptions& c, std::string name)
      : out_(out), timing_(c.timing), name_(std::move(name)), t0_(std::chrono::steady_clock::now()) {}

  void done(const std::string& status, const std::string& extra = "") {
    out_ << "stage=" << name_ << " status=" << status;
    if (!extra.empty()) out_ << " " << extra;
    if (timing_) {
      double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
      std::ostringstream t;
      t.precision(3);
      t << std::fixed << s;
      out_ << " seconds=" << t.str();
    }
    out_ << "\n";
  }

 private:
  std::ostream& out_;
  bool timing_;
  std::string name_;
  std::chrono::steady_clock::time_point t0_;
};

mf::Program load_program(const std::string& path) {
  mf::Program prog = mf::parse_program(read_file(path));
  if (prog.functions.empty()) throw mf::FrontendError(mf::FrontendError::Kind::Syntax, "no functions in " + path, 1, 1);
  return prog;
}

CheckOptions check_options(const CommonOptions& c) {
  CheckOptions o;
  if (c.int_range) std::tie(o.lo, o.hi) = *c.int_range;
  if (c.seed) o.seed = *c.seed;
  return o;
}

mf::ContractBounds contract_bounds(const CommonOptions& c) {
  mf::ContractBounds b;
  if (c.depth) b.max_len = *c.depth;
  if (c.int_range) std::tie(b.lo, b.hi) = *c.int_range;
  return b;
}

SurfaceBounds surface_bounds(const CommonOptions& c) {
  SurfaceBounds b;
  if (c.depth) b.max_len = *c.depth;
  if (c.int_range) std::tie(b.lo, b.hi) = *c.int_range;
  return b;
}

std::string counterexample_text(const mf::ContractReport& rep) {
  for (const auto& [fn, cexs] : rep.counterexamples) {
    if (cexs.empty()) continue;
    std::string s = fn + "(";
    for (std::size_t i = 0; i < cexs[0].args.size(); ++i) s += (i ? ", " : "") + cexs[0].args[i].str();
    return s + ") = " + cexs[0].result.str();
  }
  return "";
}

std::string witness_text(const std::map<std::string, std::int64_t>& w) {
  std::string s;
  for (const auto& [k, v] : w) s += (s.empty() ? "" : ",") + k + "=" + std::to_string(v);
  return s;
}

SolverConfig solver_config(const SolveOptions& s) {
  SolverConfig cfg = SolverConfig::from_env();
  if (!s.solver.empty()) cfg.path = s.solver;
  cfg.timeout = s.timeout;
  return cfg;
}

struct Solved {
  PredicateModel model;
  bool from_solver = false;
  std::string verdict;  // sat, unsat, unknown, timeout
  std::string model_text;
};

// Either reads the given model or runs the solver; a tool error throws ToolFailure.
Solved obtain_model(const Bundle& b, const SolveOptions& s, std::ostream& out, const CommonOptions& c) {
  Solved r;
  Stage st(out, c, "solve");
  if (!s.model_in.empty()) {
    std::string defs = s.model_defs.empty() ? "" : read_file(s.model_defs);
    r.model = load_model(read_file(s.model_in), b.input, b.output, b.defs, defs);
    r.verdict = "sat";
    st.done("ok", "source=" + s.model_in);
    return r;
  }
  SolverConfig cfg = solver_config(s);
  if (cfg.path.empty()) {
    st.done("failed", "detail=no_solver");
    throw ToolFailure("no solver configured (set CHCSTR_SOLVER, pass --solver, or give --model-in)");
  }
  SolverResult res = invoke(emit_horn(b.output), cfg);
  r.from_solver = true;
  r.verdict = result_name(res.kind);
  if (res.kind == SolverResult::Kind::ToolError) {
    st.done("failed", "solver_result=" + r.verdict);
    throw ToolFailure("solver failed: " + res.detail);
  }
  st.done(res.kind == SolverResult::Kind::Sat ? "ok" : "negative", "solver_result=" + r.verdict);
  if (res.kind == SolverResult::Kind::Sat) {
    r.model = parse_model(res.detail, b.output);
    r.model_text = res.detail;
  }
  return r;
}

bool validate_model(const Bundle& b, const Solved& m, std::optional<CheckMode> mode, const SolveOptions& s,
                    const CommonOptions& c, std::ostream& out) {
  Stage st(out, c, "check_model");
  CheckMode cm = mode ? *mode : (m.from_solver ? CheckMode::Exact : CheckMode::Bounded);
  CheckOptions o = check_options(c);
  SolverConfig cfg = solver_config(s);
  o.solver = &cfg;
  if (cm == CheckMode::Exact && cfg.path.empty()) throw ToolFailure("exact model check needs a solver");
  ModelCheck mc = check_model(b.output, m.model, cm, o);
  std::string extra = std::string("mode=") + (cm == CheckMode::Exact ? "exact" : "bounded");
  if (cm == CheckMode::Bounded) extra += std::string(" exhaustive=") + (mc.exhaustive ? "yes" : "no");
  if (!mc.ok) {
    extra += std::string(" failed_") + (mc.goal ? "goal=" : "clause=") +
             std::to_string(mc.goal ? mc.clause - b.output.clauses.size() : mc.clause);
    if (!mc.witness.empty()) extra += " witness=" + witness_text(mc.witness);
  }
  st.done(mc.ok ? "ok" : "negative", extra);
  return mc.ok;
}

Bundle make_bundle(const ChcSystem& sys, std::string* text) {
  auto catas = recognize_all(sys);
  TransformResult r = t_cata(sys, catas);
  std::string s = serialize_bundle(sys, r);
  if (text) *text = s;
  return parse_bundle(s);
}

std::vector<std::size_t> parse_indices(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw Error("bad conjunct index '" + item + "'");
    out.push_back(v);
  }
  return out;
}

}  // namespace

std::pair<std::int64_t, std::int64_t> parse_int_range(const std::string& text) {
  auto colon = text.find(':', 1);
  if (colon == std::string::npos) throw Error("integer range must be lo:hi");
  try {
    std::size_t a = 0, b = 0;
    std::int64_t lo = std::stoll(text.substr(0, colon), &a);
    std::int64_t hi = std::stoll(text.substr(colon + 1), &b);
    if (a != colon || b != text.size() - colon - 1) throw Error("");
    if (lo > hi) throw Error("");
    return {lo, hi};
  } catch (const std::exception&) {
    throw Error("integer range must be lo:hi with lo <= hi");
  }
}

PartialSpec parse_partial(const std::string& text) {
  PartialSpec p;
  p.enabled = true;
  if (text.empty() || text == "min") {
    p.minimize = true;
    return p;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    if (item.empty()) continue;
    auto colon = item.find(':');
    if (colon == std::string::npos || colon == 0) throw Error("partial selection must be 'min' or fn:i,j;...");
    p.keep[item.substr(0, colon)] = parse_indices(item.substr(colon + 1));
  }
  return p;
}

PredicateModel load_model(const std::string& text, const ChcSystem& input, const ChcSystem& output,
                          const DefinitionMap& defs, const std::string& defs_text) {
  if (defs_text.empty()) return parse_model(text, output);
  PredicateModel theirs = parse_model(text);
  PrintOptions po;
  po.explicit_decls = true;
  ChcSystem named = parse_chc(print_chc(input, po) + "\n" + defs_text);
  std::set<std::string> base;
  for (const auto& p : input.preds) base.insert(p.name);
  std::vector<PredCorrespondence> corr;
  std::set<std::string> matched;
  for (const auto& d : defs.defs) {
    for (const auto& c : named.clauses) {
      if (!c.head || base.count(c.head->pred) || matched.count(c.head->pred)) continue;
      if (auto p = head_permutation(d.clause(), c)) {
        corr.push_back({d.name, c.head->pred, *p});
        matched.insert(c.head->pred);
        break;
      }
    }
  }
  for (const auto& [name, e] : theirs.preds)
    if (!matched.count(name) && !output.find_pred(name))
      throw ModelError("model predicate " + name + " matches no definition");
  PredicateModel m = transport_model(theirs, corr);
  for (const auto& p : output.preds) {
    const auto* e = m.find(p.name);
    if (!e) throw ModelError("model does not define " + p.name);
    if (e->params.size() != p.args.size()) throw ModelError("model of " + p.name + " has the wrong arity");
  }
  return m;
}

std::vector<StrengthenedContract> strengthen_contracts(const mf::Program& prog, const PredicateModel& model,
                                                       const DefinitionMap& defs, const SourceMap& sm,
                                                       const PartialSpec& partial, const SurfaceBounds& b) {
  std::vector<StrengthenedContract> cs;
  for (const auto& f : prog.functions) {
    bool has_def = false;
    for (const auto& d : defs.defs) has_def |= d.subject == f.name;
    if (!has_def) continue;
    StrengthenedContract c = backtranslate(prog, model, defs, sm, f.name);
    if (c.added.empty()) continue;
    if (partial.enabled && !partial.minimize) {
      auto it = partial.keep.find(f.name);
      if (it != partial.keep.end()) {
        for (auto i : it->second)
          if (i >= c.added.size()) throw Error("conjunct index " + std::to_string(i) + " out of range for " + f.name);
        c = partial_strengthen(c, it->second);
      }
    }
    c.post = c.combined();
    cs.push_back(std::move(c));
  }
  for (const auto& k : partial.keep) {
    bool found = false;
    for (const auto& c : cs) found |= c.function == k.first;
    if (!found) throw Error("no strengthened contract for " + k.first);
  }
  if (partial.enabled && partial.minimize)
    cs = partial_minimize(cs, [&](const std::vector<StrengthenedContract>& t) {
      return check_inductive_bounded(with_contracts(prog, t), b).ok();
    });
  std::vector<StrengthenedContract> out;
  for (auto& c : cs) {
    if (c.added.empty()) continue;
    simplify_contract(prog, c);
    out.push_back(std::move(c));
  }
  return out;
}

int cmd_translate(const std::string& input, const std::string& output, const CommonOptions& c, std::ostream& out,
                  std::ostream& err) {
  return guarded(out, err, [&] {
    Stage st(out, c, "translate");
    mf::Program prog = load_program(input);
    Translation tr = translate_to_chcs(prog);
    emit(output, print_chc(tr.system), out);
    std::string extra = "clauses=" + std::to_string(tr.system.clauses.size()) +
                        " goals=" + std::to_string(tr.system.goals.size());
    if (!output.empty() && output != "-") {
      write_file(output + ".map", tr.source_map.serialize());
      extra += " artifact=" + output + " source_map=" + output + ".map";
    }
    st.done("ok", extra);
    out << "VERDICT: translated\n";
    return static_cast<int>(kOk);
  });
}

int cmd_transform(const std::string& input, const std::string& bundle, const CommonOptions& c, std::ostream& out,
                  std::ostream& err) {
  return guarded(out, err, [&] {
    ChcSystem sys = parse_chc(read_file(input));
    {
      Stage st(out, c, "recognize");
      std::string names;
      for (const auto& p : sys.preds) {
        auto r = recognize(sys, p.name);
        if (std::holds_alternative<CatamorphismInfo>(r)) names += (names.empty() ? "" : ",") + p.name;
      }
      st.done("ok", "catamorphisms=" + (names.empty() ? std::string("none") : names));
    }
    Stage st(out, c, "transform");
    std::string text;
    Bundle b = make_bundle(sys, &text);
    emit(bundle, text, out);
    std::string extra = "definitions=" + std::to_string(b.defs.defs.size()) +
                        " clauses=" + std::to_string(b.output.clauses.size()) +
                        " goals=" + std::to_string(b.output.goals.size());
    if (!bundle.empty() && bundle != "-") extra += " artifact=" + bundle;
    st.done("ok", extra);
    out << "VERDICT: transformed\n";
    return static_cast<int>(kOk);
  });
}

int cmd_solve(const std::string& bundle, const SolveOptions& s, const CommonOptions& c, std::ostream& out,
              std::ostream& err) {
  return guarded(out, err, [&] {
    Bundle b = parse_bundle(read_file(bundle));
    Solved m = obtain_model(b, s, out, c);
    if (m.verdict != "sat") {
      out << "VERDICT: " << m.verdict << "\n";
      return static_cast<int>(kNegative);
    }
    bool ok = validate_model(b, m, s.check, s, c, out);
    if (!s.model_out.empty()) {
      write_file(s.model_out, print_model(m.model));
      out << "artifact=" << s.model_out << "\n";
    }
    out << "VERDICT: " << (ok ? "sat" : "model rejected") << "\n";
    return static_cast<int>(ok ? kOk : kNegative);
  });
}

int cmd_strengthen(const std::string& bundle, const std::string& model, const std::string& input,
                   const std::string& output, const StrengthenOptions& o, const CommonOptions& c, std::ostream& out,
                   std::ostream& err) {
  return guarded(out, err, [&] {
    Bundle b = parse_bundle(read_file(bundle));
    std::string defs = o.model_defs.empty() ? "" : read_file(o.model_defs);
    PredicateModel m = load_model(read_file(model), b.input, b.output, b.defs, defs);
    mf::Program prog = load_program(input);
    Translation tr = translate_to_chcs(prog);
    Stage st(out, c, "strengthen");
    auto cs = strengthen_contracts(prog, m, b.defs, tr.source_map, o.partial, surface_bounds(c));
    std::string text = emit_annotated_program(prog, cs);
    std::string fns;
    for (const auto& sc : cs) fns += (fns.empty() ? "" : ",") + sc.function;
    st.done("ok", "strengthened=" + (fns.empty() ? std::string("none") : fns));
    Stage chk(out, c, "check_output");
    auto rep = mf::check_contracts_bounded(mf::parse_program(text), contract_bounds(c));
    if (!rep.ok()) {
      chk.done("negative", "checked=" + std::to_string(rep.checked) + " counterexample=" + counterexample_text(rep));
      out << "VERDICT: bounded counterexample\n";
      return static_cast<int>(kNegative);
    }
    chk.done("ok", "checked=" + std::to_string(rep.checked));
    emit(output, text, out);
    if (!o.diff.empty()) write_file(o.diff, contract_diff(cs));
    out << "VERDICT: strengthened\n";
    return static_cast<int>(kOk);
  });
}

int cmd_verify(const std::string& input, const VerifyOptions& o, const CommonOptions& c, std::ostream& out,
               std::ostream& err) {
  return guarded(out, err, [&] {
    namespace fs = std::filesystem;
    auto artifact = [&](const std::string& name, const std::string& text) {
      if (o.out_dir.empty()) return;
      fs::create_directories(o.out_dir);
      std::string p = (fs::path(o.out_dir) / name).string();
      write_file(p, text);
      out << "artifact=" << p << "\n";
    };
    mf::Program prog;
    {
      Stage st(out, c, "parse");
      prog = load_program(input);
      st.done("ok", "functions=" + std::to_string(prog.functions.size()));
    }
    {
      Stage st(out, c, "check_input");
      auto rep = mf::check_contracts_bounded(prog, contract_bounds(c));
      if (!rep.ok()) {
        st.done("negative", "checked=" + std::to_string(rep.checked) + " counterexample=" + counterexample_text(rep));
        out << "VERDICT: bounded counterexample\n";
        return static_cast<int>(kNegative);
      }
      st.done("ok", "checked=" + std::to_string(rep.checked));
    }
    Translation tr;
    {
      Stage st(out, c, "translate");
      tr = translate_to_chcs(prog);
      st.done("ok", "clauses=" + std::to_string(tr.system.clauses.size()) +
                        " goals=" + std::to_string(tr.system.goals.size()));
      artifact("translated.chc", print_chc(tr.system));
      artifact("translated.chc.map", tr.source_map.serialize());
    }
    if (tr.system.goals.empty()) {
      out << "VERDICT: contracts trivially valid\n";
      return static_cast<int>(kOk);
    }
    Bundle b;
    {
      Stage st(out, c, "transform");
      std::string text;
      b = make_bundle(tr.system, &text);
      st.done("ok", "definitions=" + std::to_string(b.defs.defs.size()) +
                        " clauses=" + std::to_string(b.output.clauses.size()) +
                        " goals=" + std::to_string(b.output.goals.size()));
      artifact("bundle.txt", text);
    }
    Solved m = obtain_model(b, o.solve, out, c);
    if (m.verdict != "sat") {
      out << "VERDICT: unknown\n";
      return static_cast<int>(kNegative);
    }
    artifact("model.smt2", print_model(m.model));
    if (!validate_model(b, m, o.solve.check, o.solve, c, out)) {
      out << "VERDICT: unknown\n";
      return static_cast<int>(kNegative);
    }
    std::vector<StrengthenedContract> cs;
    std::string text;
    {
      Stage st(out, c, "strengthen");
      cs = strengthen_contracts(prog, m.model, b.defs, tr.source_map, o.partial, surface_bounds(c));
      text = emit_annotated_program(prog, cs);
      std::string fns;
      for (const auto& sc : cs) fns += (fns.empty() ? "" : ",") + sc.function;
      st.done("ok", "strengthened=" + (fns.empty() ? std::string("none") : fns));
    }
    {
      Stage st(out, c, "check_output");
      auto rep = mf::check_contracts_bounded(mf::parse_program(text), contract_bounds(c));
      if (!rep.ok()) {
        st.done("negative", "checked=" + std::to_string(rep.checked) + " counterexample=" + counterexample_text(rep));
        out << "VERDICT: bounded counterexample\n";
        return static_cast<int>(kNegative);
      }
      st.done("ok", "checked=" + std::to_string(rep.checked));
    }
    artifact("strengthened.mfun", text);
    if (!o.output.empty()) {
      write_file(o.output, text);
      out << "artifact=" << o.output << "\n";
    }
    for (const auto& sc : cs) out << "post." << sc.function << "=" << mf::print_expr(sc.post) << "\n";
    out << "VERDICT: contracts valid" << (cs.empty() ? "" : "; strengthened contracts emitted") << "\n";
    return static_cast<int>(kOk);
  });
}

}  // namespace chcstr::cli
