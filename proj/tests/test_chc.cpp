#include "doctest.h"

#include "chcstr/alpha.hpp"
#include "chcstr/chc_text.hpp"

using namespace chcstr;

TEST_CASE("parse a single fact") {
  auto sys = parse_chc("rev([],[]).");
  REQUIRE(sys.clauses.size() == 1);
  CHECK(sys.find_pred("rev")->args == std::vector<Sort>{Sort::list(), Sort::list()});
  CHECK(print_chc(sys) == "rev([],[]).\n");
}

TEST_CASE("empty input") {
  auto sys = parse_chc("");
  CHECK(sys.clauses.empty());
  CHECK(sys.goals.empty());
  CHECK(print_chc(sys).empty());
}

TEST_CASE("sorts are inferred from constraints and lists") {
  auto sys = parse_chc("p(X,B,L) :- B & X>=0, q(L).\nq([]).\n");
  auto* p = sys.find_pred("p");
  REQUIRE(p);
  CHECK(p->args == std::vector<Sort>{Sort::integer(), Sort::boolean(), Sort::list()});
  CHECK(sys.find_pred("q")->args == std::vector<Sort>{Sort::list()});
}

TEST_CASE("goals have no head") {
  auto sys = parse_chc("p(1).\nfalse :- X>0, p(X).\n");
  REQUIRE(sys.goals.size() == 1);
  CHECK(sys.goals[0].is_goal());
  CHECK(sys.goals[0].body.size() == 1);
}

TEST_CASE("implication binds weaker than conjunction") {
  Expr e = parse_constraint("A & B => C", {{"A", Sort::boolean()}, {"B", Sort::boolean()}, {"C", Sort::boolean()}});
  CHECK(e.op() == Op::Implies);
}

TEST_CASE("declarations fix sorts") {
  auto sys = parse_chc(":- pred p(Int, Bool).\np(X,B) :- B.\n");
  CHECK(sys.find_pred("p")->args == std::vector<Sort>{Sort::integer(), Sort::boolean()});
}

TEST_CASE("parse errors carry positions") {
  try {
    parse_chc("p(X) :- X >.\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 1);
  }
  CHECK_THROWS_AS(parse_chc("/* open"), ParseError);
}

TEST_CASE("arity mismatch is a sort error") {
  CHECK_THROWS_AS(parse_chc("p(1).\np(1,2).\n"), SortError);
}

TEST_CASE("sort clash is a sort error") {
  CHECK_THROWS_AS(parse_chc("p(X) :- X & X>1.\n"), SortError);
}

TEST_CASE("print and reparse the same system") {
  const char* text =
      "snoc([],X,[X]).\n"
      "snoc([X|Xs],Y,[X|Zs]) :- snoc(Xs,Y,Zs).\n"
      "false :- (BX & ~BC), snoc(A,X,C), p(X,BX,BC).\n"
      "p(X,B,C) :- B = (X=<3) & C.\n";
  auto a = parse_chc(text);
  auto b = parse_chc(print_chc(a));
  CHECK(alpha_equivalent(a, b));
}

TEST_CASE("terms") {
  Term l = Term::cons(Term::integer(1), Term::cons(Term::integer(2), Term::nil()));
  CHECK(l.is_ground());
  CHECK(l.depth() == 2);
  CHECK(Term::nil().depth() == 0);
  CHECK(print_term(l) == "[1,2]");
  Term v = Term::var("X", Sort::integer());
  CHECK_FALSE(Term::cons(v, Term::nil()).is_ground());
}

TEST_CASE("unify binds list variables") {
  Term xs = Term::var("Xs", Sort::list());
  Term h = Term::var("H", Sort::integer());
  Term pattern = Term::cons(h, xs);
  Term value = Term::cons(Term::integer(3), Term::nil());
  Binding mgu;
  REQUIRE(unify(pattern, value, mgu));
  CHECK(resolve(h, mgu) == Term::integer(3));
  CHECK(resolve(xs, mgu) == Term::nil());
  Binding clash;
  CHECK_FALSE(unify(Term::nil(), value, clash));
}

TEST_CASE("unify occurs check") {
  Term xs = Term::var("Xs", Sort::list());
  Binding mgu;
  CHECK_FALSE(unify(xs, Term::cons(Term::integer(1), xs), mgu));
}

TEST_CASE("substitution is simultaneous") {
  Expr e = parse_constraint("X = Y + 1", {{"X", Sort::integer()}, {"Y", Sort::integer()}});
  Expr s = substitute(e, Binding{{"X", Term::var("Y", Sort::integer())}, {"Y", Term::var("X", Sort::integer())}});
  CHECK(print_constraint(s) == print_constraint(parse_constraint("Y = X + 1", {{"X", Sort::integer()}, {"Y", Sort::integer()}})));
}

TEST_CASE("substitution rejects sort changes") {
  auto sys = parse_chc("p(X) :- X>0.\n");
  CHECK_THROWS_AS(substitute(sys.clauses[0], Binding{{"X", Term::boolean(true)}}), SortError);
}

TEST_CASE("simplify folds constants") {
  CHECK(simplify(parse_constraint("1+2 = 3")).is_true());
  CHECK(simplify(parse_constraint("X>0 & false", {{"X", Sort::integer()}})).is_false());
  Expr b = mk_holds("B");
  CHECK(simplify(mk_and({b, Expr::boolean(true)})) == b);
}

TEST_CASE("mk_holds is the canonical Boolean atom") {
  Expr h = mk_holds("B");
  CHECK(h.op() == Op::Eq);
  CHECK(h.kid(0).name() == "B");
  CHECK(h.kid(1).is_true());
}

TEST_CASE("alpha equivalence renames variables consistently") {
  auto a = parse_chc("p(X,Y) :- X=<Y.\n");
  auto b = parse_chc("p(A,B) :- B>=A.\n");
  auto c = parse_chc("p(A,B) :- A>=B.\n");
  CHECK(alpha_equivalent(a.clauses[0], b.clauses[0]));
  CHECK_FALSE(alpha_equivalent(a.clauses[0], c.clauses[0]));
}

TEST_CASE("alpha equivalence with predicate renaming") {
  auto a = parse_chc("p(X) :- X>0.\nfalse :- p(X), X<0.\n");
  auto b = parse_chc("q(Y) :- Y>0.\nfalse :- q(Z), Z<0.\n");
  CHECK_FALSE(alpha_equivalent(a, b));
  CHECK(alpha_equivalent(a, b, AlphaOptions{true}));
}

TEST_CASE("rename_apart gives fresh variables") {
  auto sys = parse_chc("p(X,Y) :- X=<Y.\n");
  Clause c = rename_apart(sys.clauses[0], sys);
  CHECK(alpha_equivalent(c, sys.clauses[0]));
  for (const auto& [v, s] : c.vars()) CHECK(v != "X");
}

TEST_CASE("has_adt_vars") {
  CHECK(parse_chc("p([X|Xs]) :- p(Xs).\n").has_adt_vars());
  CHECK_FALSE(parse_chc("p(X) :- X>0.\n").has_adt_vars());
}

TEST_CASE("ite branches read before their sort is known are formulas") {
  auto sys = parse_chc("q(0) :- ~ite(X=0, B, C).\n");
  Expr e = sys.clauses[0].constraint.kid(0);
  REQUIRE(e.op() == Op::Ite);
  CHECK(e.kid(1) == mk_holds("B"));
  CHECK(e.kid(2) == mk_holds("C"));
  CHECK(print_chc(parse_chc(print_chc(sys))) == print_chc(sys));
}
