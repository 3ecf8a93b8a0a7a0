#include "doctest.h"

#include "chcstr/alpha.hpp"
#include "chcstr/lfp.hpp"
#include "support.hpp"

using namespace chcstr;

namespace {

ChcSystem golden_input() { return parse_chc(support::read_data("golden/reverse.chc")); }

// The number of clauses per predicate.
std::map<std::string, int> shape(const ChcSystem& s) {
  std::map<std::string, int> m;
  for (const auto& c : s.clauses) ++m[c.head->pred];
  return m;
}

}  // namespace

TEST_CASE("translation of Reverse matches the golden clauses") {
  const auto& p = support::reverse();
  ChcSystem g = golden_input();
  CHECK(shape(p.tr.system) == shape(g));
  CHECK(p.tr.system.goals.size() == 2);
  CHECK(alpha_equivalent(p.tr.system, g));
}

TEST_CASE("source map links predicates to functions") {
  const auto& sm = support::reverse().tr.source_map;
  const auto* hd = sm.find("hd");
  REQUIRE(hd);
  CHECK(hd->tuple_result);
  CHECK(hd->params == std::vector<std::string>{"l"});
  CHECK(hd->surface(1) == "res._1");
  CHECK(hd->surface(2) == "res._2");
  CHECK(sm.find("snoc")->surface(1) == "x");
  CHECK(sm.find("snoc")->surface(2) == "res");
  REQUIRE(sm.goals.size() == 2);
  CHECK(sm.goals[0].function == "rev");
  SourceMap back = SourceMap::parse(sm.serialize());
  CHECK(back.serialize() == sm.serialize());
}

TEST_CASE("unsupported contracts are rejected") {
  auto p = mf::parse_program(R"(object A {
    def f(l: List[BigInt]): List[BigInt] = { l } ensuring { res => forall((n: Int) => n >= 0) }
  })");
  CHECK_THROWS_AS(translate_to_chcs(p), mf::FrontendError);
}

TEST_CASE("catamorphism recognition on Reverse") {
  ChcSystem g = golden_input();
  auto all = recognize_all(g);
  std::set<std::string> names;
  for (const auto& [n, info] : all) names.insert(n);
  CHECK(names == std::set<std::string>{"hd", "is_asorted", "is_dsorted", "leq_all"});
  for (const char* f : {"rev", "snoc"}) {
    auto r = recognize(g, f);
    REQUIRE(std::holds_alternative<NotACatamorphism>(r));
    CHECK(std::string(reason_text(std::get<NotACatamorphism>(r).reason)) == "ADT-sorted result");
  }
  const auto& leq = all.at("leq_all");
  CHECK(leq.list_pos == 1);
  CHECK(leq.extra_pos == std::vector<std::size_t>{0});
  CHECK(leq.result_pos == std::vector<std::size_t>{2});
  CHECK(all.at("is_asorted").aux.has_value());
  CHECK_FALSE(all.at("hd").recursive.has_value());
}

TEST_CASE("recognition rejects malformed definitions") {
  auto sys = parse_chc("len([],0).\nlen([H|T],N) :- N = M+1, len(T,M).\nlen([H|T],N) :- N = 0.\n");
  auto r = recognize(sys, "len");
  REQUIRE(std::holds_alternative<NotACatamorphism>(r));
  CHECK(std::get<NotACatamorphism>(r).reason == NotACatamorphism::Reason::WrongClauseCount);
  CHECK(std::holds_alternative<NotACatamorphism>(recognize(sys, "missing")));
  auto ok = parse_chc("len([],0).\nlen([H|T],N) :- N = M+1, len(T,M).\n");
  CHECK(std::holds_alternative<CatamorphismInfo>(recognize(ok, "len")));
}

TEST_CASE("totality of the Reverse catamorphisms") {
  for (const auto& [n, info] : recognize_all(golden_input())) CHECK_MESSAGE(totality_check(info).ok, n);
  auto sys = parse_chc("f([],R) :- R>=0.\nf([H|T],R) :- R = S+H, f(T,S).\n");
  auto info = std::get<CatamorphismInfo>(recognize(sys, "f"));
  auto t = totality_check(info);
  CHECK_FALSE(t.ok);
  CHECK(t.in_base);
}

TEST_CASE("unfold resolves against every matching clause") {
  ChcSystem g = golden_input();
  const Clause& goal = g.goals[0];
  auto out = unfold(goal, 0, g);  // rev(L,R)
  CHECK(out.size() == 2);
}

TEST_CASE("fold replaces the definition body") {
  auto sys = parse_chc("p([],0).\np([H|T],N) :- N=M+1, p(T,M).\nq(N) :- N>1.\nfalse :- N<0, p(L,N), q(N).\n");
  DefinitionClause d;
  d.name = "np";
  d.head = Atom{"np", {Term::var("N", Sort::integer())}};
  d.body = {Atom{"p", {Term::var("L", Sort::list()), Term::var("N", Sort::integer())}}};
  auto f = fold(sys.goals[0], d);
  REQUIRE(f);
  CHECK(f->body.size() == 2);
  CHECK(f->body[0].pred == "np");
  CHECK_FALSE(fold(sys.clauses[2], d));
}

TEST_CASE("t_cata on Reverse") {
  const auto& p = support::reverse();
  CHECK_FALSE(p.r.output.has_adt_vars());
  CHECK(p.r.defs.defs.size() == 3);
  CHECK(p.r.output.goals.size() == 2);
  std::set<std::string> in_rev_goal;
  for (const auto& d : p.r.defs.defs)
    if (d.context == 0) in_rev_goal.insert(p.golden_name(d.name));
  CHECK(in_rev_goal == std::set<std::string>{"new3", "new7"});
}

TEST_CASE("t_cata definitions match the golden definitions") {
  const auto& p = support::reverse();
  REQUIRE(p.corr.size() == 3);
  std::set<std::string> theirs;
  for (const auto& c : p.corr) theirs.insert(c.theirs);
  CHECK(theirs == std::set<std::string>{"new2", "new3", "new7"});
}

TEST_CASE("t_cata output is structurally equivalent to the golden output") {
  const auto& p = support::reverse();
  ChcSystem g = parse_chc(support::read_data("golden/transf_reverse.chc"));
  std::vector<Clause> theirs = g.clauses;
  theirs.insert(theirs.end(), g.goals.begin(), g.goals.end());
  CHECK(structurally_equivalent(p.output(), theirs, p.corr));
}

TEST_CASE("t_cata rejects a goal over a non-catamorphism") {
  ChcSystem g = parse_chc(support::read_data("golden/reverse.chc") +
                          "false :- ~B, rev(L,R), rev(R,L2), is_dsorted(L2,B).\n"
                          "false :- B, snoc(L,X,R), is_dsorted(R,B), rev(R,L).\n");
  try {
    t_cata(g, recognize_all(g));
    FAIL("expected a transform error");
  } catch (const TransformError& e) {
    CHECK(std::string(e.what()).find("rev") != std::string::npos);
  }
}

TEST_CASE("t_cata passes ADT-free systems through") {
  auto sys = parse_chc("p(X) :- X>0.\nfalse :- X<0, p(X).\n");
  auto r = t_cata(sys, recognize_all(sys));
  CHECK(alpha_equivalent(r.output, sys));
  CHECK(r.defs.defs.empty());
}

TEST_CASE("definition budget") {
  ChcSystem g = golden_input();
  TransformOptions o;
  o.max_definitions = 1;
  CHECK_THROWS_AS(t_cata(g, recognize_all(g), o), TransformError);
}

TEST_CASE("bundle round trip") {
  const auto& p = support::reverse();
  std::string text = serialize_bundle(p.tr.system, p.r);
  Bundle b = parse_bundle(text);
  CHECK(alpha_equivalent(b.output, p.r.output));
  CHECK(alpha_equivalent(b.input, p.tr.system));
  REQUIRE(b.defs.defs.size() == p.r.defs.defs.size());
  for (std::size_t i = 0; i < b.defs.defs.size(); ++i) {
    CHECK(b.defs.defs[i].name == p.r.defs.defs[i].name);
    CHECK(b.defs.defs[i].subject == p.r.defs.defs[i].subject);
    CHECK(b.defs.defs[i].context == p.r.defs.defs[i].context);
    CHECK(alpha_equivalent(b.defs.defs[i].clause(), p.r.defs.defs[i].clause()));
  }
  CHECK(b.stats == p.r.stats);
  CHECK(serialize_bundle(b.input, TransformResult{b.output, b.defs, b.stats, {}, {}, {}}) .size() > 0);
}

TEST_CASE("every trace step preserves the bounded least model") {
  const auto& p = support::reverse();
  Bounds b;
  b.depth = 2;
  b.lo = -1;
  b.hi = 1;
  auto res = check_trace_bounded(p.tr.system, p.r, b);
  CHECK_MESSAGE(res.ok, res.detail);
  CHECK(res.steps == p.r.trace.size());
}

TEST_CASE("the interpreter agrees with the least model of the translation") {
  const auto& p = support::reverse();
  Bounds b;
  b.depth = 2;
  b.lo = -1;
  b.hi = 1;
  auto a = support::adequacy(p.prog, p.tr.system, b);
  CHECK_MESSAGE(a.ok, a.detail);
  CHECK(a.checked > 0);
  // a wrong clause breaks the agreement
  ChcSystem broken = p.tr.system;
  for (auto& c : broken.clauses)
    if (c.head->pred == "hd" && c.head->args[0].is_ctor() && c.head->args[0].name == kCons)
      c.constraint = mk_and({c.constraint, mk_cmp(Op::Ge, term_to_expr(c.head->args[2]), Expr::integer(0))});
  CHECK_FALSE(support::adequacy(p.prog, broken, b).ok);
}
