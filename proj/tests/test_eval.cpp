#include "doctest.h"

#include "chcstr/chc_text.hpp"
#include "chcstr/eval.hpp"
#include "chcstr/lfp.hpp"

using namespace chcstr;

namespace {

const std::map<std::string, Sort> kSorts = {
    {"X", Sort::integer()}, {"Y", Sort::integer()}, {"B", Sort::boolean()}, {"C", Sort::boolean()}};

}  // namespace

TEST_CASE("eval_constraint") {
  Expr e = parse_constraint("B = (X =< Y) & (C => X > 0)", kSorts);
  CHECK(eval_constraint(e, {{"X", 1}, {"Y", 2}, {"B", 1}, {"C", 1}}));
  CHECK_FALSE(eval_constraint(e, {{"X", 3}, {"Y", 2}, {"B", 1}, {"C", 0}}));
  CHECK(eval_constraint(e, {{"X", -1}, {"Y", 2}, {"B", 1}, {"C", 0}}));
  CHECK_THROWS_AS(eval_constraint(e, {{"X", 1}}), Error);
}

TEST_CASE("eval_int") {
  Expr e = parse_constraint("X = 2*Y - 1", kSorts);
  CHECK(eval_int(e.kid(1), {{"Y", 4}}) == 7);
}

TEST_CASE("bounded search enumerates every model") {
  Expr e = parse_constraint("X + Y = 2 & X >= 0 & Y >= 0", kSorts);
  BoundedSearch s(e, {{"X", Sort::integer()}, {"Y", Sort::integer()}});
  std::set<std::pair<std::int64_t, std::int64_t>> seen;
  auto st = s.run(BoundedSearch::Assignment(2), SearchOptions{-4, 4, 0}, [&](const std::vector<std::int64_t>& v) {
    seen.insert({v[0], v[1]});
    return true;
  });
  CHECK(st == SearchStatus::Complete);
  CHECK(seen == std::set<std::pair<std::int64_t, std::int64_t>>{{0, 2}, {1, 1}, {2, 0}});
}

TEST_CASE("bounded search stops on request and on budget") {
  Expr e = parse_constraint("X =< Y", kSorts);
  BoundedSearch s(e, {{"X", Sort::integer()}, {"Y", Sort::integer()}});
  int n = 0;
  auto st = s.run(BoundedSearch::Assignment(2), SearchOptions{-4, 4, 0}, [&](const std::vector<std::int64_t>&) {
    return ++n < 3;
  });
  CHECK(st == SearchStatus::Stopped);
  CHECK(n == 3);
  auto st2 = s.run(BoundedSearch::Assignment(2), SearchOptions{-4, 4, 5}, [](const std::vector<std::int64_t>&) {
    return true;
  });
  CHECK(st2 == SearchStatus::BudgetExceeded);
}

TEST_CASE("bounded search assigns defined variables outside the range") {
  Expr e = parse_constraint("Y = X + 10", kSorts);
  BoundedSearch s(e, {{"X", Sort::integer()}, {"Y", Sort::integer()}});
  BoundedSearch::Assignment init(2);
  init[0] = 1;
  std::vector<std::int64_t> got;
  s.run(init, SearchOptions{-4, 4, 0}, [&](const std::vector<std::int64_t>& v) {
    got = v;
    return false;
  });
  CHECK(got == std::vector<std::int64_t>{1, 11});
}

TEST_CASE("universe terms are depth bounded") {
  Bounds b;
  b.depth = 2;
  b.lo = 0;
  b.hi = 1;
  ChcSystem sys = parse_chc("p([]).\n");
  auto lists = universe_terms(sys, Sort::list(), b);
  // [] plus 2 of length 1 plus 4 of length 2
  CHECK(lists.size() == 7);
  for (const auto& t : lists) CHECK(in_universe(t, b));
  CHECK_FALSE(in_universe(Term::integer(2), b));
}

TEST_CASE("bounded least model of list length") {
  auto sys = parse_chc("len([],0).\nlen([H|T],N) :- N = M+1, len(T,M).\n");
  Bounds b;
  b.depth = 2;
  b.lo = 0;
  b.hi = 2;
  auto m = bounded_lfp(sys, b);
  // one atom per list of length <= 2 over {0,1,2}
  CHECK(m.size() == 1 + 3 + 9);
  CHECK(m.contains(Atom{"len", {Term::cons(Term::integer(1), Term::nil()), Term::integer(1)}}));
  CHECK_FALSE(m.contains(Atom{"len", {Term::nil(), Term::integer(1)}}));
}

TEST_CASE("least model is closed under immediate consequences") {
  auto sys = parse_chc("even(0).\neven(N) :- N = M+2, even(M).\n");
  Bounds b;
  b.lo = -2;
  b.hi = 4;
  auto m = bounded_lfp(sys, b);
  for (const auto& a : immediate_consequences(sys, m)) CHECK(m.contains(a));
  CHECK(m.contains(Atom{"even", {Term::integer(4)}}));
  CHECK_FALSE(m.contains(Atom{"even", {Term::integer(3)}}));
}

TEST_CASE("goal violations carry witnesses") {
  auto sys = parse_chc("p(1).\np(2).\nfalse :- p(X), X > 1.\n");
  auto m = bounded_lfp(sys, Bounds{});
  auto v = check_goals(sys, m);
  REQUIRE(v.size() == 1);
  CHECK(v[0].witness.at("X") == Term::integer(2));
  auto ok = parse_chc("p(1).\nfalse :- p(X), X > 1.\n");
  CHECK(check_goals(ok, bounded_lfp(ok, Bounds{})).empty());
}

TEST_CASE("atom cap raises a resource error") {
  auto sys = parse_chc("len([],0).\nlen([H|T],N) :- N = M+1, len(T,M).\n");
  Bounds b;
  b.depth = 4;
  b.max_atoms = 10;
  CHECK_THROWS_AS(bounded_lfp(sys, b), ResourceError);
}
