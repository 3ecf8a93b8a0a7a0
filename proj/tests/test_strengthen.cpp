#include "doctest.h"

#include "support.hpp"

using namespace chcstr;

namespace {

const char* kRevFull =
    "is_dsorted(res) && forall((n: Int) => ((!(hd(l)._1) ==> leq_all(n,res)) && "
    "((hd(l)._2 >= n) ==> leq_all(n,res))))";
const char* kRevPartial = "is_dsorted(res) && forall((n: Int) => ((hd(l)._2 >= n) ==> leq_all(n,res)))";
const char* kSnoc = "is_dsorted(res) && forall((j1: Int) => ((x >= j1) ==> leq_all(j1,res)))";

std::vector<StrengthenedContract> full() {
  const auto& p = support::reverse();
  return cli::strengthen_contracts(p.prog, p.model, p.r.defs, p.tr.source_map, cli::PartialSpec{});
}

const StrengthenedContract& of(const std::vector<StrengthenedContract>& cs, const std::string& fn) {
  for (const auto& c : cs)
    if (c.function == fn) return c;
  throw std::runtime_error("no contract for " + fn);
}

}  // namespace

TEST_CASE("backtranslation reads the model over the surface program") {
  const auto& p = support::reverse();
  auto rev = backtranslate(p.prog, p.model, p.r.defs, p.tr.source_map, "rev");
  CHECK(rev.function == "rev");
  REQUIRE(rev.original);
  CHECK(mf::print_expr(rev.original) == "is_dsorted(res)");
  CHECK_FALSE(rev.added.empty());
  for (const auto& a : rev.added) CHECK(mf::print_expr(a).find("new") == std::string::npos);
  CHECK(mf::alpha_equal(rev.post, rev.combined()));
  std::map<std::string, mf::Type> scope{{"l", mf::Type::list()}, {"res", mf::Type::list()}};
  CHECK_NOTHROW(mf::typecheck_formula(p.prog, rev.post, scope));
}

TEST_CASE("simplified contracts for rev and snoc") {
  auto cs = full();
  REQUIRE(cs.size() == 2);
  CHECK(mf::alpha_equal(of(cs, "rev").post, mf::parse_expr(kRevFull)));
  CHECK(mf::alpha_equal(of(cs, "snoc").post, mf::parse_expr(kSnoc)));
}

TEST_CASE("simplify_formula keeps equivalent forms and undoes nothing needed") {
  const auto& p = support::reverse();
  auto f = mf::parse_expr("is_dsorted(res) && (is_dsorted(res) || leq_all(x,res))");
  auto s = simplify_formula(p.prog, "snoc", f, mf::parse_expr("is_dsorted(l)"));
  CHECK(mf::print_expr(s) == "is_dsorted(res)");
  auto g = mf::parse_expr("forall((n: Int) => (!(x >= n) || leq_all(n,res)))");
  auto t = simplify_formula(p.prog, "snoc", g, nullptr);
  CHECK(mf::alpha_equal(t, mf::parse_expr("forall((n: Int) => ((x >= n) ==> leq_all(n,res)))")));
}

TEST_CASE("partial strengthening keeps chosen conjuncts") {
  auto cs = full();
  const auto& rev = of(cs, "rev");
  auto none = partial_strengthen(rev, {});
  CHECK(mf::print_expr(none.post) == "is_dsorted(res)");
  auto all = partial_strengthen(rev, [&] {
    std::vector<std::size_t> v;
    for (std::size_t i = 0; i < rev.added.size(); ++i) v.push_back(i);
    return v;
  }());
  CHECK(mf::alpha_equal(all.post, rev.combined()));
}

TEST_CASE("partial minimization drops what the modular check does not need") {
  const auto& p = support::reverse();
  cli::PartialSpec spec;
  spec.enabled = true;
  spec.minimize = true;
  auto cs = cli::strengthen_contracts(p.prog, p.model, p.r.defs, p.tr.source_map, spec);
  CHECK(mf::alpha_equal(of(cs, "rev").post, mf::parse_expr(kRevPartial)));
  CHECK(mf::alpha_equal(of(cs, "snoc").post, mf::parse_expr(kSnoc)));
}

TEST_CASE("modular check needs the strengthened contracts") {
  const auto& p = support::reverse();
  auto before = check_inductive_bounded(p.prog);
  REQUIRE_FALSE(before.ok());
  bool snoc_pre = false;
  for (const auto& f : before.failures) snoc_pre |= f.reason.find("snoc") != std::string::npos;
  CHECK(snoc_pre);
  auto after = check_inductive_bounded(with_contracts(p.prog, full()));
  CHECK(after.ok());
  CHECK(after.checked > 0);
}

TEST_CASE("annotated program") {
  const auto& p = support::reverse();
  auto cs = full();
  std::string text = emit_annotated_program(p.prog, cs);
  auto back = mf::parse_program(text);
  CHECK(mf::alpha_equal(back.find("rev")->contract.post, mf::parse_expr(kRevFull)));
  CHECK(mf::alpha_equal(back.find("snoc")->contract.post, mf::parse_expr(kSnoc)));
  CHECK(mf::print_expr(back.find("rev")->contract.pre) == "is_asorted(l)");
  // everything outside the ensuring blocks is kept
  CHECK(text.find("def leq_all(x: BigInt, l: List[BigInt]): Boolean") != std::string::npos);
  CHECK(check_contracts_bounded(back, mf::ContractBounds{}).ok());
}

TEST_CASE("a trivial model leaves the program byte-identical") {
  const auto& p = support::reverse();
  PredicateModel m = p.model;
  for (auto& [n, e] : m.preds) e.body = Expr::boolean(true);
  auto cs = cli::strengthen_contracts(p.prog, m, p.r.defs, p.tr.source_map, cli::PartialSpec{});
  CHECK(cs.empty());
  CHECK(emit_annotated_program(p.prog, cs) == p.prog.source);
}

TEST_CASE("postconditions are added where none existed") {
  auto prog = mf::parse_program("object A {\n  def f(x: BigInt): BigInt = { x + 1 }\n}\n");
  StrengthenedContract c;
  c.function = "f";
  c.added = {mf::parse_expr("res > x")};
  c.post = c.combined();
  std::string text = emit_annotated_program(prog, {c});
  auto back = mf::parse_program(text);
  REQUIRE(back.find("f")->contract.post);
  CHECK(mf::print_expr(back.find("f")->contract.post) == "res > x");
}

TEST_CASE("contract diff") {
  auto d = contract_diff(full());
  CHECK(d.find("function rev\n- is_dsorted(res)\n+ is_dsorted(res) && forall") != std::string::npos);
  CHECK(d.find("function snoc\n") != std::string::npos);
}
