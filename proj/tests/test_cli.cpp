#include "doctest.h"

#include <filesystem>
#include <sstream>

#include "chcstr/alpha.hpp"
#include "support.hpp"

using namespace chcstr;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    char tmpl[] = "/tmp/chcstr_cli_XXXXXX";
    REQUIRE(mkdtemp(tmpl));
    path = tmpl;
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(file(name), std::ios::binary) << text;
    return file(name);
  }
  std::string read(const std::string& name) const {
    std::ifstream in(file(name), std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
};

struct Run {
  int code;
  std::string out;
  std::string last_line() const {
    auto end = out.find_last_not_of('\n');
    auto begin = out.rfind('\n', end);
    return out.substr(begin == std::string::npos ? 0 : begin + 1, end - (begin == std::string::npos ? 0 : begin + 1) + 1);
  }
};

template <class F>
Run run(F f) {
  std::ostringstream out, err;
  int code = f(out, err);
  return {code, out.str()};
}

cli::SolveOptions fixture_model() {
  cli::SolveOptions s;
  s.model_in = support::data_path("fixtures/reverse_model.smt2");
  s.model_defs = support::data_path("golden/defs_reverse.chc");
  return s;
}

}  // namespace

TEST_CASE("parse_int_range and parse_partial") {
  CHECK(cli::parse_int_range("-3:3") == std::pair<std::int64_t, std::int64_t>{-3, 3});
  CHECK_THROWS_AS(cli::parse_int_range("3"), Error);
  CHECK_THROWS_AS(cli::parse_int_range("2:1"), Error);
  auto p = cli::parse_partial("min");
  CHECK(p.enabled);
  CHECK(p.minimize);
  auto q = cli::parse_partial("rev:0,1;snoc:0");
  CHECK_FALSE(q.minimize);
  CHECK(q.keep.at("rev") == std::vector<std::size_t>{0, 1});
  CHECK(q.keep.at("snoc") == std::vector<std::size_t>{0});
  CHECK_THROWS_AS(cli::parse_partial("rev:x"), Error);
}

TEST_CASE("translate writes clauses and a source map") {
  TempDir d;
  auto r = run([&](auto& o, auto& e) {
    return cli::cmd_translate(support::data_path("reverse.mfun"), d.file("r.chc"), {}, o, e);
  });
  CHECK(r.code == cli::kOk);
  CHECK(r.last_line() == "VERDICT: translated");
  CHECK(alpha_equivalent(parse_chc(d.read("r.chc")), parse_chc(support::read_data("golden/reverse.chc"))));
  CHECK(fs::exists(d.file("r.chc.map")));
  CHECK(SourceMap::parse(d.read("r.chc.map")).find("rev"));
}

TEST_CASE("the staged pipeline with the committed model") {
  TempDir d;
  cli::CommonOptions c;
  auto t = run([&](auto& o, auto& e) {
    return cli::cmd_transform(support::data_path("golden/reverse.chc"), d.file("b.txt"), c, o, e);
  });
  REQUIRE(t.code == cli::kOk);
  CHECK(t.out.find("definitions=3") != std::string::npos);

  auto s = run([&](auto& o, auto& e) {
    auto opts = fixture_model();
    opts.model_out = d.file("m.smt2");
    return cli::cmd_solve(d.file("b.txt"), opts, c, o, e);
  });
  CHECK(s.code == cli::kOk);
  CHECK(s.last_line() == "VERDICT: sat");

  cli::StrengthenOptions so;
  so.diff = d.file("diff.txt");
  auto g = run([&](auto& o, auto& e) {
    return cli::cmd_strengthen(d.file("b.txt"), d.file("m.smt2"), support::data_path("reverse.mfun"),
                               d.file("out.mfun"), so, c, o, e);
  });
  CHECK(g.code == cli::kOk);
  CHECK(g.last_line() == "VERDICT: strengthened");
  CHECK(g.out.find("stage=check_output status=ok") != std::string::npos);
  auto prog = mf::parse_program(d.read("out.mfun"));
  CHECK(mf::check_contracts_bounded(prog, mf::ContractBounds{}).ok());
  CHECK(d.read("diff.txt").find("function rev") != std::string::npos);
}

TEST_CASE("verify with the committed model is deterministic") {
  cli::VerifyOptions v;
  v.solve = fixture_model();
  auto a = run([&](auto& o, auto& e) { return cli::cmd_verify(support::data_path("reverse.mfun"), v, {}, o, e); });
  auto b = run([&](auto& o, auto& e) { return cli::cmd_verify(support::data_path("reverse.mfun"), v, {}, o, e); });
  CHECK(a.code == cli::kOk);
  CHECK(a.out == b.out);
  CHECK(a.last_line() == "VERDICT: contracts valid; strengthened contracts emitted");
  CHECK(a.out.find("post.rev=is_dsorted(res) && forall(") != std::string::npos);
  CHECK(a.out.find("post.snoc=") != std::string::npos);
}

TEST_CASE("verify writes every artifact") {
  TempDir d;
  cli::VerifyOptions v;
  v.solve = fixture_model();
  v.out_dir = d.file("art");
  auto r = run([&](auto& o, auto& e) { return cli::cmd_verify(support::data_path("reverse.mfun"), v, {}, o, e); });
  CHECK(r.code == cli::kOk);
  for (const char* f : {"translated.chc", "translated.chc.map", "bundle.txt", "model.smt2", "strengthened.mfun"})
    CHECK_MESSAGE(fs::exists(d.path / "art" / f), f);
}

TEST_CASE("a false contract gives a bounded counterexample before solving") {
  TempDir d;
  auto in = d.write("bad.mfun", "object B {\n  def inc(x: BigInt): BigInt = { x + 1 } ensuring { res => res > x + 1 }\n}\n");
  cli::VerifyOptions v;
  v.solve.solver = "/nonexistent/solver";
  auto r = run([&](auto& o, auto& e) { return cli::cmd_verify(in, v, {}, o, e); });
  CHECK(r.code == cli::kNegative);
  CHECK(r.last_line() == "VERDICT: bounded counterexample");
  CHECK(r.out.find("stage=translate") == std::string::npos);
}

TEST_CASE("a contract-free program is trivially valid") {
  TempDir d;
  auto in = d.write("free.mfun", "object F {\n  def f(x: BigInt): BigInt = { x + 1 }\n}\n");
  cli::VerifyOptions v;
  v.solve.solver = "/nonexistent/solver";
  auto r = run([&](auto& o, auto& e) { return cli::cmd_verify(in, v, {}, o, e); });
  CHECK(r.code == cli::kOk);
  CHECK(r.last_line() == "VERDICT: contracts trivially valid");
}

TEST_CASE("exit codes for bad input and missing tools") {
  TempDir d;
  cli::VerifyOptions v;
  v.solve.solver = "/nonexistent/solver";
  auto missing = run([&](auto& o, auto& e) { return cli::cmd_verify(d.file("nope.mfun"), v, {}, o, e); });
  CHECK(missing.code == cli::kUsage);
  CHECK(missing.last_line() == "VERDICT: usage error");
  auto empty = run([&](auto& o, auto& e) { return cli::cmd_verify(d.write("e.mfun", ""), v, {}, o, e); });
  CHECK(empty.code == cli::kNegative);
  CHECK(empty.out.find("error=") != std::string::npos);
  CHECK(empty.last_line() == "VERDICT: rejected");
  auto tool = run([&](auto& o, auto& e) { return cli::cmd_verify(support::data_path("reverse.mfun"), v, {}, o, e); });
  CHECK(tool.code == cli::kToolFailure);
  CHECK(tool.last_line() == "VERDICT: tool failure");
}

TEST_CASE("a solver answering unsat gives an unknown verdict") {
  TempDir d;
  auto solver = d.write("unsat.sh", "#!/bin/sh\ncat > /dev/null\necho unsat\n");
  fs::permissions(solver, fs::perms::owner_all);
  cli::VerifyOptions v;
  v.solve.solver = solver;
  auto r = run([&](auto& o, auto& e) { return cli::cmd_verify(support::data_path("reverse.mfun"), v, {}, o, e); });
  CHECK(r.code == cli::kNegative);
  CHECK(r.last_line() == "VERDICT: unknown");
}

TEST_CASE("strengthen with a trivial model keeps the program") {
  TempDir d;
  cli::CommonOptions c;
  REQUIRE(run([&](auto& o, auto& e) {
            return cli::cmd_transform(support::data_path("golden/reverse.chc"), d.file("b.txt"), c, o, e);
          }).code == cli::kOk);
  Bundle b = parse_bundle(d.read("b.txt"));
  std::string model;
  for (const auto& def : b.defs.defs) {
    model += "(define-fun " + def.name + " (";
    for (std::size_t i = 0; i < def.head.args.size(); ++i)
      model += "(V" + std::to_string(i) + " " + (def.head.args[i].sort == Sort::boolean() ? "Bool" : "Int") + ")";
    model += ") Bool true)\n";
  }
  d.write("m.smt2", model);
  auto r = run([&](auto& o, auto& e) {
    return cli::cmd_strengthen(d.file("b.txt"), d.file("m.smt2"), support::data_path("reverse.mfun"),
                               d.file("out.mfun"), {}, c, o, e);
  });
  CHECK(r.code == cli::kOk);
  CHECK(r.out.find("strengthened=none") != std::string::npos);
  CHECK(d.read("out.mfun") == support::read_data("reverse.mfun"));
}

TEST_CASE("solve on a toy bundle") {
  TempDir d;
  cli::CommonOptions c;
  auto in = d.write("toy.chc", "p(X) :- X=1.\nfalse :- p(X), X>0.\n");
  REQUIRE(run([&](auto& o, auto& e) { return cli::cmd_transform(in, d.file("b.txt"), c, o, e); }).code == cli::kOk);
  auto solver = d.write("unsat.sh", "#!/bin/sh\ncat > /dev/null\necho unsat\n");
  fs::permissions(solver, fs::perms::owner_all);
  cli::SolveOptions s;
  s.solver = solver;
  auto r = run([&](auto& o, auto& e) { return cli::cmd_solve(d.file("b.txt"), s, c, o, e); });
  CHECK(r.code == cli::kNegative);
  CHECK(r.last_line() == "VERDICT: unsat");
  s.solver = "/nonexistent/solver";
  auto t = run([&](auto& o, auto& e) { return cli::cmd_solve(d.file("b.txt"), s, c, o, e); });
  CHECK(t.code == cli::kToolFailure);
}
