#include "doctest.h"

#include <sys/stat.h>
#include <unistd.h>

#include <cstdlib>

#include "chcstr/alpha.hpp"
#include "chcstr/smtlib.hpp"
#include "support.hpp"

using namespace chcstr;

namespace {

ChcSystem golden_output() { return parse_chc(support::read_data("golden/transf_reverse.chc")); }

// Executable shell script in the temp directory; removed on destruction.
struct FakeSolver {
  std::string path;
  explicit FakeSolver(const std::string& body) {
    char tmpl[] = "/tmp/chcstr_fake_XXXXXX";
    int fd = mkstemp(tmpl);
    REQUIRE(fd >= 0);
    std::string text = "#!/bin/sh\n" + body + "\n";
    REQUIRE(write(fd, text.data(), text.size()) == static_cast<ssize_t>(text.size()));
    close(fd);
    chmod(tmpl, 0700);
    path = tmpl;
  }
  ~FakeSolver() { unlink(path.c_str()); }
  SolverConfig config(double timeout = 5) const {
    SolverConfig c;
    c.path = path;
    c.timeout = timeout;
    return c;
  }
};

}  // namespace

TEST_CASE("s-expressions") {
  auto v = parse_sexprs("(a (b |c d|) ; comment\n \"s\") x");
  REQUIRE(v.size() == 2);
  CHECK(v[0].list.size() == 3);
  CHECK(v[0].list[1].list[1].text == "c d");
  CHECK(v[1].text == "x");
  CHECK_THROWS_AS(parse_sexprs("(a"), ParseError);
  CHECK_THROWS_AS(parse_sexprs("a)"), ParseError);
}

TEST_CASE("smt symbols are quoted when needed") {
  CHECK(smt_symbol("new3") == "new3");
  CHECK(smt_symbol("3x") == "|3x|");
  CHECK(smt_symbol("a b") == "|a b|");
}

TEST_CASE("constraints print as SMT-LIB") {
  std::map<std::string, Sort> s{{"X", Sort::integer()}, {"B", Sort::boolean()}};
  CHECK(to_smt(parse_constraint("X >= -2", s)) == "(>= X (- 2))");
  CHECK(to_smt(mk_holds("B")) == "B");
  CHECK(to_smt(parse_constraint("~B", s)) == "(not B)");
}

TEST_CASE("emit_horn and parse_horn round trip") {
  ChcSystem g = golden_output();
  std::string text = emit_horn(g);
  CHECK(text.find("(set-logic HORN)") != std::string::npos);
  CHECK(text.find("(declare-fun new7 (Bool Int Bool Int Bool Bool Int Bool Int Int Bool) Bool)") != std::string::npos);
  ChcSystem back = parse_horn(text);
  CHECK(alpha_equivalent(back, g));
}

TEST_CASE("emit_horn rejects list sorts") {
  CHECK_THROWS_AS(emit_horn(parse_chc(support::read_data("golden/reverse.chc"))), SortError);
}

TEST_CASE("parse the fixture model") {
  ChcSystem g = golden_output();
  auto m = parse_model(support::read_data("fixtures/reverse_model.smt2"), g);
  CHECK(m.preds.size() == 3);
  REQUIRE(m.find("new3"));
  CHECK(m.find("new3")->params.size() == 6);
  CHECK(m.find("new7")->params.size() == 11);
  std::string printed = print_model(m);
  auto again = parse_model(printed, g);
  for (const auto& [n, e] : m.preds) CHECK(alpha_equivalent(e.body, again.find(n)->body));
}

TEST_CASE("model parsing accepts let, sat prefix and model wrapper") {
  std::string text =
      "sat\n(model (define-fun p ((x Int) (b Bool)) Bool (let ((y (+ x 1))) (and b (> y 0)))))";
  auto m = parse_model(text);
  const auto* p = m.find("p");
  REQUIRE(p);
  Atom a{"p", {Term::integer(0), Term::boolean(true)}};
  CHECK(simplify(m.instance(a)).is_true());
  Atom b{"p", {Term::integer(-1), Term::boolean(true)}};
  CHECK(simplify(m.instance(b)).is_false());
}

TEST_CASE("model parsing errors") {
  ChcSystem g = golden_output();
  CHECK_THROWS_AS(parse_model("(define-fun new3 ((x Int)) Bool true)", g), ModelError);
  CHECK_THROWS_AS(parse_model("(define-fun p ((x Int)) Bool (* x x))"), ModelError);
  CHECK_THROWS_AS(parse_model("(declare-fun p () Bool)"), ModelError);
}

TEST_CASE("bounded check of the fixture model") {
  ChcSystem g = golden_output();
  auto m = parse_model(support::read_data("fixtures/reverse_model.smt2"), g);
  auto r = check_model(g, m, CheckMode::Bounded);
  CHECK_MESSAGE(r.ok, r.detail);
}

TEST_CASE("a weakened model yields a witness") {
  ChcSystem g = golden_output();
  auto m = parse_model(support::read_data("fixtures/reverse_model.smt2"), g);
  auto& e = m.preds.at("new3");
  e.body = simplify(substitute(e.body, Binding{{"BR", Term::boolean(true)}}));
  auto r = check_model(g, m, CheckMode::Bounded);
  CHECK_FALSE(r.ok);
  CHECK_FALSE(r.witness.empty());
  // the witness really violates the clause
  const Clause& c = r.goal ? g.goals[r.clause - g.clauses.size()] : g.clauses[r.clause];
  std::vector<Expr> parts{c.constraint};
  for (const auto& a : c.body) parts.push_back(m.instance(a));
  if (c.head) parts.push_back(mk_not(m.instance(*c.head)));
  CHECK(eval_constraint(mk_and(parts), r.witness));
}

TEST_CASE("transport onto our predicate names") {
  const auto& p = support::reverse();
  for (const auto& d : p.r.defs.defs) {
    REQUIRE(p.model.find(d.name));
    CHECK(p.model.find(d.name)->params.size() == d.head.args.size());
  }
  auto r = check_model(p.r.output, p.model, CheckMode::Bounded);
  CHECK_MESSAGE(r.ok, r.detail);
}

TEST_CASE("invoke reads sat and the model") {
  FakeSolver s("cat > /dev/null; echo sat; echo '(define-fun p ((x Int)) Bool (> x 0))'");
  auto r = invoke("(check-sat)", s.config());
  CHECK(r.kind == SolverResult::Kind::Sat);
  CHECK(r.model.find("p"));
}

TEST_CASE("invoke verdicts") {
  FakeSolver unsat("cat > /dev/null; echo unsat");
  CHECK(invoke("", unsat.config()).kind == SolverResult::Kind::Unsat);
  FakeSolver unknown("cat > /dev/null; echo unknown");
  CHECK(invoke("", unknown.config()).kind == SolverResult::Kind::Unknown);
  FakeSolver garbage("cat > /dev/null; echo oops >&2; exit 3");
  auto g = invoke("", garbage.config());
  CHECK(g.kind == SolverResult::Kind::ToolError);
  CHECK(g.detail.find("oops") != std::string::npos);
  FakeSolver slow("sleep 5");
  auto t = invoke("", slow.config(0.3));
  CHECK(t.kind == SolverResult::Kind::Timeout);
  CHECK(t.seconds < 3);
  SolverConfig none;
  none.path = "/nonexistent/solver";
  CHECK(invoke("", none).kind == SolverResult::Kind::ToolError);
  CHECK(invoke("", SolverConfig{}).kind == SolverResult::Kind::ToolError);
}

TEST_CASE("the solver gets an empty stdin") {
  FakeSolver s("n=$(cat | wc -c); echo sat; echo \"; read $n bytes\"");
  auto r = invoke("(check-sat)", s.config(2));
  REQUIRE(r.kind == SolverResult::Kind::Sat);
  CHECK(r.detail.find("read 0 bytes") != std::string::npos);
}

TEST_CASE("solver on the golden output" * doctest::skip(SolverConfig::from_env().path.empty())) {
  ChcSystem g = golden_output();
  SolverConfig cfg = SolverConfig::from_env();
  auto r = invoke(emit_horn(g), cfg);
  REQUIRE(r.kind == SolverResult::Kind::Sat);
  auto m = parse_model(r.detail, g);
  CheckOptions o;
  o.solver = &cfg;
  auto exact = check_model(g, m, CheckMode::Exact, o);
  CHECK_MESSAGE(exact.ok, exact.detail);
  auto fixture = parse_model(support::read_data("fixtures/reverse_model.smt2"), g);
  CHECK(check_model(g, fixture, CheckMode::Exact, o).ok);
}

TEST_CASE("solver reports unsat for a contradictory system" * doctest::skip(SolverConfig::from_env().path.empty())) {
  auto sys = parse_chc("p(X) :- X=1.\nfalse :- p(X), X>0.\n");
  auto r = invoke(emit_horn(sys), SolverConfig::from_env());
  CHECK(r.kind == SolverResult::Kind::Unsat);
}
