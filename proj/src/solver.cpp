#include "chcstr/solver.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <set>
#include <sstream>

#include "chcstr/eval.hpp"
#include "chcstr/smtlib.hpp"

namespace chcstr {

const PredicateModel::Entry* PredicateModel::find(const std::string& pred) const {
  auto it = preds.find(pred);
  return it == preds.end() ? nullptr : &it->second;
}

Expr PredicateModel::instance(const Atom& a) const {
  const Entry* e = find(a.pred);
  if (!e) throw ModelError("model does not define " + a.pred);
  if (e->params.size() != a.args.size()) throw ModelError("arity mismatch for " + a.pred);
  Binding b;
  for (std::size_t i = 0; i < a.args.size(); ++i) b[e->params[i].first] = a.args[i];
  return substitute(e->body, b);
}

SolverConfig SolverConfig::from_env() {
  SolverConfig c;
  if (const char* p = std::getenv("CHCSTR_SOLVER"); p && *p) {
    c.path = p;
    return c;
  }
  if (const char* path = std::getenv("PATH")) {
    std::stringstream ss(path);
    std::string dir;
    while (std::getline(ss, dir, ':')) {
      auto f = std::filesystem::path(dir) / "z3";
      if (!dir.empty() && ::access(f.c_str(), X_OK) == 0) {
        c.path = f.string();
        break;
      }
    }
  }
  return c;
}

const char* result_name(SolverResult::Kind k) {
  switch (k) {
    case SolverResult::Kind::Sat: return "sat";
    case SolverResult::Kind::Unsat: return "unsat";
    case SolverResult::Kind::Unknown: return "unknown";
    case SolverResult::Kind::Timeout: return "timeout";
    case SolverResult::Kind::ToolError: return "error";
  }
  return "?";
}

// Emission -----------------------------------------------------------------------

namespace {

std::string atom_smt(const Atom& a) {
  if (a.args.empty()) return smt_symbol(a.pred);
  std::string s = "(" + smt_symbol(a.pred);
  for (const auto& t : a.args) s += " " + to_smt(t);
  return s + ")";
}

std::string clause_smt(const Clause& c) {
  std::vector<std::string> parts;
  if (!c.constraint.is_true()) parts.push_back(to_smt(c.constraint));
  for (const auto& a : c.body) parts.push_back(atom_smt(a));
  std::string head = c.head ? atom_smt(*c.head) : "false";
  std::string body;
  if (parts.size() == 1) {
    body = parts[0];
  } else if (parts.size() > 1) {
    body = "(and";
    for (const auto& p : parts) body += " " + p;
    body += ")";
  }
  std::string imp = body.empty() ? head : "(=> " + body + " " + head + ")";
  auto vars = c.vars();
  if (vars.empty()) return imp;
  std::string q = "(forall (";
  bool first = true;
  for (const auto& [v, s] : vars) {
    q += std::string(first ? "" : " ") + "(" + smt_symbol(v) + " " + smt_sort(s) + ")";
    first = false;
  }
  return q + ") " + imp + ")";
}

}  // namespace

std::string emit_horn(const ChcSystem& sys, const std::string& logic) {
  for (const auto& d : sys.preds)
    for (const auto& s : d.args)
      if (s.is_adt()) throw SortError("predicate " + d.name + " has an ADT-sorted argument");
  auto check = [](const Clause& c) {
    for (const auto& [v, s] : c.vars())
      if (s.is_adt()) throw SortError("variable " + v + " is ADT-sorted");
  };
  std::ostringstream out;
  out << "(set-logic " << logic << ")\n";
  for (const auto& d : sys.preds) {
    out << "(declare-fun " << smt_symbol(d.name) << " (";
    for (std::size_t i = 0; i < d.args.size(); ++i) out << (i ? " " : "") << smt_sort(d.args[i]);
    out << ") Bool)\n";
  }
  for (const auto& c : sys.clauses) {
    check(c);
    out << "(assert " << clause_smt(c) << ")\n";
  }
  for (const auto& g : sys.goals) {
    check(g);
    out << "(assert " << clause_smt(g) << ")\n";
  }
  out << "(check-sat)\n";
  if (!sys.preds.empty()) out << "(get-model)\n";
  return out.str();
}

// Reading Horn scripts -------------------------------------------------------------

namespace {

Sort sort_from_smt(const SExpr& s) {
  if (s.is("Int")) return Sort::integer();
  if (s.is("Bool")) return Sort::boolean();
  throw ParseError("unsupported sort " + s.str(), 0, 0);
}

struct HornReader {
  ChcSystem sys;
  int fresh = 0;

  Term arg_term(const SExpr& s, const SmtScope& scope, std::vector<Expr>& extra, const Sort& sort) {
    if (s.atom) {
      if (s.text == "true" || s.text == "false") return Term::boolean(s.text == "true");
      if (scope.count(s.text)) return Term::var(var_from_smt(s.text), scope.at(s.text));
    }
    Expr e = expr_from_smt(s, scope);
    if (e.op() == Op::IntLit) return Term::integer(e.value());
    Term v = Term::var("Arg_" + std::to_string(++fresh), sort);
    extra.push_back(mk_eq(term_to_expr(v), e));
    return v;
  }

  std::optional<Atom> as_atom(const SExpr& s, const SmtScope& scope, std::vector<Expr>& extra) {
    std::string name = s.atom ? s.text : (!s.list.empty() && s.list[0].atom ? s.list[0].text : "");
    const PredDecl* d = sys.find_pred(name);
    if (!d) return std::nullopt;
    std::size_t n = s.atom ? 0 : s.list.size() - 1;
    if (n != d->args.size()) throw ParseError("wrong arity for " + name, 0, 0);
    Atom a{name, {}};
    for (std::size_t i = 0; i < n; ++i) a.args.push_back(arg_term(s.list[i + 1], scope, extra, d->args[i]));
    return a;
  }

  void add_assert(const SExpr& body0) {
    SmtScope scope;
    const SExpr* body = &body0;
    if (body->head_is("forall")) {
      if (body->list.size() != 3 || body->list[1].atom) throw ParseError("malformed forall", 0, 0);
      for (const auto& b : body->list[1].list) {
        if (b.atom || b.list.size() != 2) throw ParseError("malformed binder", 0, 0);
        scope[b.list[0].text] = sort_from_smt(b.list[1]);
      }
      body = &body->list[2];
    }
    std::vector<const SExpr*> ante;
    const SExpr* head = body;
    if (body->head_is("=>")) {
      for (std::size_t i = 1; i + 1 < body->list.size(); ++i) ante.push_back(&body->list[i]);
      head = &body->list.back();
    } else if (body->head_is("not") && body->list.size() == 2) {
      ante.push_back(&body->list[1]);
      head = nullptr;
    }
    Clause c;
    std::vector<Expr> cons;
    std::vector<const SExpr*> flat;
    for (std::size_t i = 0; i < ante.size(); ++i) {
      if (ante[i]->head_is("and")) {
        for (std::size_t k = 1; k < ante[i]->list.size(); ++k) ante.push_back(&ante[i]->list[k]);
      } else {
        flat.push_back(ante[i]);
      }
    }
    for (const SExpr* s : flat) {
      if (auto a = as_atom(*s, scope, cons)) {
        c.body.push_back(*a);
      } else {
        cons.push_back(expr_from_smt(*s, scope));
      }
    }
    if (head && !head->is("false")) {
      auto a = as_atom(*head, scope, cons);
      if (!a) throw ParseError("clause head is not a predicate application: " + head->str(), 0, 0);
      c.head = *a;
    }
    c.constraint = mk_and(cons);
    sys.add(c);
  }
};

}  // namespace

ChcSystem parse_horn(const std::string& text) {
  HornReader r;
  for (const auto& cmd : parse_sexprs(text)) {
    if (cmd.atom || cmd.list.empty()) throw ParseError("unexpected " + cmd.str(), 0, 0);
    const std::string& f = cmd.list[0].text;
    if (f == "set-logic" || f == "set-info" || f == "set-option" || f == "check-sat" || f == "get-model" ||
        f == "exit")
      continue;
    if (f == "declare-fun" || f == "declare-rel") {
      if (cmd.list.size() < 3 || cmd.list[2].atom) throw ParseError("malformed declaration", 0, 0);
      PredDecl d{cmd.list[1].text, {}};
      for (const auto& s : cmd.list[2].list) d.args.push_back(sort_from_smt(s));
      r.sys.declare(d);
      continue;
    }
    if (f == "assert") {
      if (cmd.list.size() != 2) throw ParseError("malformed assert", 0, 0);
      r.add_assert(cmd.list[1]);
      continue;
    }
    throw ParseError("unsupported command " + f, 0, 0);
  }
  return std::move(r.sys);
}

// Subprocess -------------------------------------------------------------------------

namespace {

struct ProcessOutput {
  bool started = false;
  bool timed_out = false;
  int status = 0;
  std::string out, err;
  double seconds = 0;
};

ProcessOutput run_process(const std::string& script, const SolverConfig& cfg) {
  ProcessOutput po;
  std::string tmpl = (std::filesystem::temp_directory_path() / "chcstr-XXXXXX.smt2").string();
  std::vector<char> name(tmpl.begin(), tmpl.end());
  name.push_back('\0');
  int fd = ::mkstemps(name.data(), 5);
  if (fd < 0) {
    po.err = "cannot create temporary file";
    return po;
  }
  std::string file(name.data());
  ssize_t left = static_cast<ssize_t>(script.size());
  const char* p = script.data();
  while (left > 0) {
    ssize_t w = ::write(fd, p, static_cast<std::size_t>(left));
    if (w <= 0) break;
    left -= w;
    p += w;
  }
  ::close(fd);

  int outp[2], errp[2];
  if (::pipe(outp) != 0 || ::pipe(errp) != 0) {
    ::unlink(file.c_str());
    po.err = "pipe failed";
    return po;
  }
  auto start = std::chrono::steady_clock::now();
  pid_t pid = ::fork();
  if (pid == 0) {
    // the query is passed as a file; never let the solver read our stdin
    int devnull = ::open("/dev/null", O_RDONLY);
    if (devnull >= 0) {
      ::dup2(devnull, 0);
      ::close(devnull);
    }
    ::dup2(outp[1], 1);
    ::dup2(errp[1], 2);
    ::close(outp[0]);
    ::close(errp[0]);
    ::close(outp[1]);
    ::close(errp[1]);
    std::vector<std::string> argv{cfg.path};
    argv.insert(argv.end(), cfg.args.begin(), cfg.args.end());
    argv.push_back(file);
    std::vector<char*> cargv;
    for (auto& a : argv) cargv.push_back(a.data());
    cargv.push_back(nullptr);
    ::execvp(cfg.path.c_str(), cargv.data());
    ::_exit(127);
  }
  ::close(outp[1]);
  ::close(errp[1]);
  if (pid < 0) {
    ::close(outp[0]);
    ::close(errp[0]);
    ::unlink(file.c_str());
    po.err = "fork failed";
    return po;
  }
  po.started = true;
  auto deadline = start + std::chrono::duration<double>(cfg.timeout);
  pollfd fds[2] = {{outp[0], POLLIN, 0}, {errp[0], POLLIN, 0}};
  int open_fds = 2;
  char buf[4096];
  while (open_fds > 0) {
    auto now = std::chrono::steady_clock::now();
    if (now >= deadline) {
      po.timed_out = true;
      break;
    }
    int ms = static_cast<int>(std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count()) + 1;
    int r = ::poll(fds, 2, std::min(ms, 100));
    if (r < 0) break;
    for (int i = 0; i < 2; ++i) {
      if (fds[i].fd < 0 || !(fds[i].revents & (POLLIN | POLLHUP | POLLERR))) continue;
      ssize_t n = ::read(fds[i].fd, buf, sizeof buf);
      if (n <= 0) {
        ::close(fds[i].fd);
        fds[i].fd = -1;
        --open_fds;
      } else {
        (i == 0 ? po.out : po.err).append(buf, static_cast<std::size_t>(n));
      }
    }
  }
  if (po.timed_out) ::kill(pid, SIGKILL);
  for (auto& f : fds)
    if (f.fd >= 0) ::close(f.fd);
  ::waitpid(pid, &po.status, 0);
  po.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  ::unlink(file.c_str());
  if (WIFEXITED(po.status) && WEXITSTATUS(po.status) == 127 && po.out.empty()) {
    po.started = false;
    po.err = "cannot execute " + cfg.path;
  }
  return po;
}

std::string excerpt(const std::string& s) { return s.size() > 400 ? s.substr(0, 400) + "..." : s; }

// Splits the first verdict line from the rest of the output.
std::optional<std::pair<std::string, std::string>> verdict(const std::string& out) {
  std::istringstream in(out);
  std::string line;
  std::size_t consumed = 0;
  while (std::getline(in, line)) {
    consumed += line.size() + 1;
    std::string t = line;
    while (!t.empty() && std::isspace(static_cast<unsigned char>(t.back()))) t.pop_back();
    if (t == "sat" || t == "unsat" || t == "unknown") return std::make_pair(t, out.substr(std::min(consumed, out.size())));
  }
  return std::nullopt;
}

}  // namespace

SolverResult invoke(const std::string& script, const SolverConfig& config) {
  SolverResult r;
  if (config.path.empty()) {
    r.kind = SolverResult::Kind::ToolError;
    r.detail = "no solver configured";
    return r;
  }
  if (!(config.timeout > 0)) throw Error("solver timeout must be positive");
  ProcessOutput po = run_process(script, config);
  r.seconds = po.seconds;
  if (!po.started) {
    r.kind = SolverResult::Kind::ToolError;
    r.detail = po.err;
    return r;
  }
  if (po.timed_out) {
    r.kind = SolverResult::Kind::Timeout;
    r.detail = "killed after " + std::to_string(config.timeout) + "s";
    return r;
  }
  auto v = verdict(po.out);
  if (!v) {
    r.kind = SolverResult::Kind::ToolError;
    r.detail = excerpt(po.err.empty() ? po.out : po.err);
    return r;
  }
  if (v->first == "unsat") {
    r.kind = SolverResult::Kind::Unsat;
  } else if (v->first == "unknown") {
    r.kind = SolverResult::Kind::Unknown;
    r.detail = excerpt(v->second);
  } else {
    r.kind = SolverResult::Kind::Sat;
    r.detail = v->second;
    try {
      r.model = parse_model(v->second);
    } catch (const Error& e) {
      r.kind = SolverResult::Kind::ToolError;
      r.detail = std::string("unreadable model: ") + e.what();
    }
  }
  return r;
}

// Models -----------------------------------------------------------------------------

PredicateModel parse_model(const std::string& text) {
  PredicateModel m;
  std::vector<SExpr> defs;
  std::function<void(const SExpr&)> collect = [&](const SExpr& s) {
    if (s.atom) {
      if (s.text == "sat") return;
      throw ModelError("unexpected " + s.text + " in model");
    }
    if (s.head_is("define-fun")) {
      defs.push_back(s);
      return;
    }
    if (s.head_is("model")) {
      for (std::size_t i = 1; i < s.list.size(); ++i) collect(s.list[i]);
      return;
    }
    if (!s.list.empty() && s.list[0].atom) throw ModelError("unsupported model entry " + s.list[0].text);
    for (const auto& k : s.list) collect(k);
  };
  try {
    for (const auto& s : parse_sexprs(text)) collect(s);
    for (const auto& d : defs) {
      if (d.list.size() != 5 || !d.list[1].atom || d.list[2].atom) throw ModelError("malformed define-fun " + d.str().substr(0, 80));
      if (!d.list[3].is("Bool")) continue;
      PredicateModel::Entry e;
      SmtScope scope;
      for (const auto& p : d.list[2].list) {
        if (p.atom || p.list.size() != 2 || !p.list[0].atom) throw ModelError("malformed parameter in " + d.list[1].text);
        Sort s = sort_from_smt(p.list[1]);
        scope[p.list[0].text] = s;
        e.params.emplace_back(var_from_smt(p.list[0].text), s);
      }
      e.body = expr_from_smt(d.list[4], scope);
      m.preds[d.list[1].text] = e;
    }
  } catch (const ParseError& e) {
    throw ModelError(std::string("cannot read model: ") + e.what());
  }
  return m;
}

PredicateModel parse_model(const std::string& text, const ChcSystem& sys) {
  PredicateModel m = parse_model(text);
  for (const auto& d : sys.preds) {
    const auto* e = m.find(d.name);
    if (!e) throw ModelError("model does not define " + d.name);
    if (e->params.size() != d.args.size()) throw ModelError("model gives " + d.name + " the wrong arity");
    for (std::size_t i = 0; i < d.args.size(); ++i)
      if (e->params[i].second != d.args[i]) throw ModelError("model gives " + d.name + " a wrong parameter sort");
  }
  return m;
}

std::string print_model(const PredicateModel& m) {
  std::ostringstream out;
  for (const auto& [name, e] : m.preds) {
    out << "(define-fun " << smt_symbol(name) << " (";
    for (std::size_t i = 0; i < e.params.size(); ++i)
      out << (i ? " " : "") << "(" << smt_symbol(e.params[i].first) << " " << smt_sort(e.params[i].second) << ")";
    out << ") Bool\n  " << to_smt(e.body) << ")\n";
  }
  return out.str();
}

PredicateModel transport_model(const PredicateModel& m, const std::vector<PredCorrespondence>& corr) {
  PredicateModel out;
  std::set<std::string> moved;
  for (const auto& pc : corr) {
    const auto* e = m.find(pc.theirs);
    if (!e) throw ModelError("model does not define " + pc.theirs);
    PredicateModel::Entry x;
    x.params.resize(e->params.size());
    for (std::size_t i = 0; i < pc.perm.size(); ++i) x.params.at(pc.perm[i]) = e->params.at(i);
    x.body = e->body;
    out.preds[pc.ours] = x;
    moved.insert(pc.theirs);
  }
  for (const auto& [n, e] : m.preds)
    if (!moved.count(n) && !out.preds.count(n)) out.preds[n] = e;
  return out;
}

// Checking -----------------------------------------------------------------------------

namespace {

Expr violation_formula(const Clause& c, const PredicateModel& m) {
  std::vector<Expr> parts{c.constraint};
  for (const auto& a : c.body) parts.push_back(m.instance(a));
  parts.push_back(c.head ? mk_not(m.instance(*c.head)) : Expr::boolean(true));
  return mk_and(parts);
}

ModelCheck bounded_clause(const Clause& c, const PredicateModel& m, const CheckOptions& o) {
  ModelCheck r;
  std::vector<std::pair<std::string, Sort>> vars;
  for (const auto& [v, s] : c.vars()) {
    if (s.is_adt()) throw SortError("variable " + v + " is ADT-sorted");
    vars.emplace_back(v, s);
  }
  Expr f = violation_formula(c, m);
  BoundedSearch search(f, vars);
  SearchOptions so{o.lo, o.hi, o.node_budget};
  std::optional<std::vector<std::int64_t>> hit;
  auto status = search.run(BoundedSearch::Assignment(vars.size()), so, [&](const std::vector<std::int64_t>& v) {
    hit = v;
    return false;
  });
  if (status == SearchStatus::BudgetExceeded && !hit) {
    r.exhaustive = false;
    std::mt19937_64 rng(o.seed);
    std::uniform_int_distribution<std::int64_t> ints(o.lo, o.hi);
    std::uniform_int_distribution<int> bools(0, 1);
    Valuation env;
    for (std::size_t k = 0; k < o.samples && !hit; ++k) {
      std::vector<std::int64_t> v;
      for (const auto& [n, s] : vars) {
        v.push_back(s.is_bool() ? bools(rng) : ints(rng));
        env[n] = v.back();
      }
      if (eval_constraint(f, env)) hit = v;
    }
  }
  if (hit) {
    r.ok = false;
    for (std::size_t i = 0; i < vars.size(); ++i) r.witness[vars[i].first] = (*hit)[i];
  }
  return r;
}

ModelCheck exact_clause(const Clause& c, const PredicateModel& m, const CheckOptions& o) {
  if (!o.solver || o.solver->path.empty()) throw Error("exact model checking needs a solver");
  ModelCheck r;
  std::ostringstream q;
  q << "(set-logic ALL)\n";
  auto vars = c.vars();
  for (const auto& [v, s] : vars) {
    if (s.is_adt()) throw SortError("variable " + v + " is ADT-sorted");
    q << "(declare-const " << smt_symbol(v) << " " << smt_sort(s) << ")\n";
  }
  q << "(assert " << to_smt(violation_formula(c, m)) << ")\n(check-sat)\n";
  if (!vars.empty()) {
    q << "(get-value (";
    bool first = true;
    for (const auto& [v, s] : vars) {
      q << (first ? "" : " ") << smt_symbol(v);
      first = false;
    }
    q << "))\n";
  }
  ProcessOutput po = run_process(q.str(), *o.solver);
  auto v = verdict(po.out);
  if (po.timed_out || !v || v->first == "unknown") {
    r.ok = false;
    r.exhaustive = false;
    r.detail = po.timed_out ? "solver timed out" : !v ? "solver failed: " + excerpt(po.err + po.out) : "solver answered unknown";
    return r;
  }
  if (v->first == "unsat") return r;
  r.ok = false;
  try {
    for (const auto& s : parse_sexprs(v->second)) {
      if (s.atom) continue;
      for (const auto& pair : s.list) {
        if (pair.atom || pair.list.size() != 2 || !pair.list[0].atom) continue;
        const std::string& name = pair.list[0].text;
        if (!vars.count(name)) continue;
        Expr e = expr_from_smt(pair.list[1], {});
        r.witness[name] = e.value();
      }
    }
  } catch (const ParseError&) {
    r.detail = "witness unreadable";
  }
  return r;
}

}  // namespace

ModelCheck check_model(const ChcSystem& sys, const PredicateModel& m, CheckMode mode, const CheckOptions& o) {
  ModelCheck all;
  std::size_t n = sys.clauses.size() + sys.goals.size();
  for (std::size_t i = 0; i < n; ++i) {
    bool goal = i >= sys.clauses.size();
    const Clause& c = goal ? sys.goals[i - sys.clauses.size()] : sys.clauses[i];
    ModelCheck r = mode == CheckMode::Bounded ? bounded_clause(c, m, o) : exact_clause(c, m, o);
    all.exhaustive &= r.exhaustive;
    if (!r.ok) {
      r.clause = i;
      r.goal = goal;
      r.exhaustive = all.exhaustive;
      if (r.detail.empty()) r.detail = std::string(goal ? "goal " : "clause ") + std::to_string(goal ? i - sys.clauses.size() : i) + " violated";
      return r;
    }
  }
  return all;
}

}  // namespace chcstr
