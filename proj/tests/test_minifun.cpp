#include "doctest.h"

#include "chcstr/minifun.hpp"
#include "support.hpp"

using namespace chcstr;
using namespace chcstr::mf;

namespace {

const char* kLen = R"(object L {
  def len(l: List[BigInt]): BigInt = {
    l match {
      case Nil() => BigInt(0)
      case Cons(x, xs) => 1 + len(xs) }
  } ensuring { res => res >= 0 }

  def loop(x: BigInt): BigInt = { loop(x) }
})";

Value list(std::vector<std::int64_t> v) { return Value::of_list(std::move(v)); }

}  // namespace

TEST_CASE("parse the Reverse program") {
  auto p = parse_program(support::read_data("reverse.mfun"));
  CHECK(p.functions.size() == 6);
  const auto* rev = p.find("rev");
  REQUIRE(rev);
  CHECK(rev->params.size() == 1);
  CHECK(rev->ret == Type::list());
  REQUIRE(rev->contract.pre);
  REQUIRE(rev->contract.post);
  CHECK(print_expr(rev->contract.pre) == "is_asorted(l)");
  CHECK(print_expr(rev->contract.post) == "is_dsorted(res)");
  CHECK(p.find("hd")->ret == Type::tuple({Type::boolean(), Type::integer()}));
  CHECK(rev->ensuring.end > rev->ensuring.begin);
  CHECK(p.source.substr(rev->ensuring.begin, 8) == "ensuring");
}

TEST_CASE("evaluate Reverse") {
  auto p = parse_program(support::read_data("reverse.mfun"));
  CHECK(eval(p, "rev", {list({1, 2, 3})}).value == list({3, 2, 1}));
  CHECK(eval(p, "snoc", {list({3, 2}), Value::integer(1)}).value == list({3, 2, 1}));
  CHECK(eval(p, "hd", {list({})}).value == Value::of_tuple({Value::boolean(false), Value::integer(0)}));
  CHECK(eval(p, "is_asorted", {list({1, 1, 2})}).value == Value::boolean(true));
  CHECK(eval(p, "is_dsorted", {list({1, 2})}).value == Value::boolean(false));
  CHECK(eval(p, "leq_all", {Value::integer(2), list({3, 2})}).value == Value::boolean(true));
}

TEST_CASE("fuel bounds evaluation") {
  auto p = parse_program(kLen);
  EvalOptions o;
  o.fuel = 2;
  CHECK(eval(p, "len", {list({1, 2, 3})}, o).diverged);
  CHECK(eval(p, "len", {list({1, 2, 3})}).value == Value::integer(3));
  CHECK(eval(p, "loop", {Value::integer(0)}).diverged);
}

TEST_CASE("argument types are checked") {
  auto p = parse_program(kLen);
  CHECK_THROWS_AS(eval(p, "len", {Value::integer(1)}), Error);
  CHECK_THROWS_AS(eval(p, "nope", {}), Error);
}

TEST_CASE("type errors are reported") {
  CHECK_THROWS_AS(parse_program("object A { def f(x: BigInt): Boolean = { x + 1 } }"), FrontendError);
  try {
    parse_program("object A { def f(x: BigInt): BigInt = { y } }");
    FAIL("expected an error");
  } catch (const FrontendError& e) {
    CHECK(e.kind() == FrontendError::Kind::UnknownIdentifier);
  }
}

TEST_CASE("non-exhaustive match is rejected") {
  try {
    parse_program("object A { def f(l: List[BigInt]): BigInt = { l match { case Nil() => BigInt(0) } } }");
    FAIL("expected an error");
  } catch (const FrontendError& e) {
    CHECK(e.kind() == FrontendError::Kind::NonExhaustive);
  }
}

TEST_CASE("syntax errors carry positions") {
  try {
    parse_program("object A {\n  def f(x: BigInt): BigInt = { x + }\n}");
    FAIL("expected an error");
  } catch (const FrontendError& e) {
    CHECK(e.kind() == FrontendError::Kind::Syntax);
    CHECK(e.line() == 2);
  }
}

TEST_CASE("expressions print and reparse") {
  auto e = parse_expr("is_dsorted(res) && forall((n: Int) => ((hd(l)._2 >= n) ==> leq_all(n,res)))");
  CHECK(print_expr(e) == "is_dsorted(res) && forall((n: Int) => ((hd(l)._2 >= n) ==> leq_all(n,res)))");
  CHECK(alpha_equal(e, parse_expr(print_expr(e))));
}

TEST_CASE("alpha_equal renames forall binders only") {
  auto a = parse_expr("forall((n: Int) => leq_all(n,res))");
  auto b = parse_expr("forall((j1: Int) => leq_all(j1,res))");
  auto c = parse_expr("forall((j1: Int) => leq_all(j1,l))");
  CHECK(alpha_equal(a, b));
  CHECK_FALSE(alpha_equal(a, c));
  CHECK_FALSE(alpha_equal(parse_expr("x >= n"), parse_expr("x >= m")));
}

TEST_CASE("eval_expr with forall ranges") {
  auto p = parse_program(support::read_data("reverse.mfun"));
  auto e = parse_expr("forall((n: Int) => ((x >= n) ==> leq_all(n,res)))");
  EvalOptions o;
  CHECK(eval_expr(p, e, {{"x", Value::integer(1)}, {"res", list({3, 1})}}, o).value.truthy());
  CHECK_FALSE(eval_expr(p, e, {{"x", Value::integer(2)}, {"res", list({3, 1})}}, o).value.truthy());
}

TEST_CASE("enumerate_values") {
  CHECK(enumerate_values(Type::integer(), 0, -1, 1).size() == 3);
  CHECK(enumerate_values(Type::boolean(), 0, 0, 0).size() == 2);
  CHECK(enumerate_values(Type::list(), 2, 0, 1).size() == 1 + 2 + 4);
  CHECK(enumerate_values(Type::tuple({Type::boolean(), Type::integer()}), 0, 0, 2).size() == 6);
}

TEST_CASE("bounded contract check") {
  auto p = parse_program(support::read_data("reverse.mfun"));
  auto rep = check_contracts_bounded(p, ContractBounds{});
  CHECK(rep.ok());
  CHECK(rep.checked > 0);
  auto bad = parse_program(R"(object B {
    def inc(x: BigInt): BigInt = { require(x >= 0) x + 1 } ensuring { res => res > 1 }
  })");
  auto r2 = check_contracts_bounded(bad, ContractBounds{});
  CHECK_FALSE(r2.ok());
  REQUIRE(r2.counterexamples.count("inc"));
  CHECK(r2.counterexamples.at("inc")[0].args[0] == Value::integer(0));
}

TEST_CASE("typecheck_formula") {
  auto p = parse_program(support::read_data("reverse.mfun"));
  std::map<std::string, Type> scope{{"l", Type::list()}, {"res", Type::list()}};
  CHECK_NOTHROW(typecheck_formula(p, parse_expr("is_dsorted(res) && hd(l)._1"), scope));
  CHECK_THROWS_AS(typecheck_formula(p, parse_expr("hd(l)._2"), scope), FrontendError);
  CHECK_THROWS_AS(typecheck_formula(p, parse_expr("is_dsorted(x)"), scope), FrontendError);
}
