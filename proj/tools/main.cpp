#include <iostream>

#include "CLI11.hpp"
#include "chcstr/cli.hpp"

using namespace chcstr;

int main(int argc, char** argv) {
  CLI::App app{"chcstr: contract strengthening through constrained Horn clauses"};
  app.require_subcommand(1);
  app.fallthrough();

  cli::CommonOptions common;
  std::string depth, range, seed;
  app.add_option("--depth", depth, "List length bound for bounded checks");
  app.add_option("--int-range", range, "Integer range lo:hi for bounded checks");
  app.add_option("--seed", seed, "Seed for sampled checks");
  app.add_flag("--timing", common.timing, "Report stage times");

  std::string input, output;
  auto* translate = app.add_subcommand("translate", "Program to clauses (writes OUT.map as well)");
  translate->add_option("input", input, "minifun program")->required();
  translate->add_option("-o,--output", output, "Clause file (default: stdout)");

  std::string bundle;
  auto* transform = app.add_subcommand("transform", "Eliminate list arguments from a clause file");
  transform->add_option("input", input, "Clause file")->required();
  transform->add_option("-o,--output", bundle, "Bundle file (default: stdout)");

  cli::SolveOptions solve;
  std::string check;
  auto solver_flags = [&](CLI::App* sub) {
    sub->add_option("--solver", solve.solver, "Horn solver executable");
    sub->add_option("--timeout", solve.timeout, "Solver timeout in seconds");
    sub->add_option("--model-in", solve.model_in, "Use this model instead of running the solver");
    sub->add_option("--model-defs", solve.model_defs, "Definitions naming the predicates of --model-in");
    sub->add_option("--check", check, "Model check: bounded or exact")->check(CLI::IsMember({"bounded", "exact"}));
  };
  auto* solve_cmd = app.add_subcommand("solve", "Find or validate a model of a bundle");
  solve_cmd->add_option("bundle", bundle, "Bundle file")->required();
  solver_flags(solve_cmd);
  solve_cmd->add_option("--model-out", solve.model_out, "Write the model here");

  std::string model, partial;
  cli::StrengthenOptions st;
  auto* strengthen = app.add_subcommand("strengthen", "Annotate a program with postconditions from a model");
  strengthen->add_option("bundle", bundle, "Bundle file")->required();
  strengthen->add_option("model", model, "Model file")->required();
  strengthen->add_option("input", input, "minifun program")->required();
  strengthen->add_option("-o,--output", output, "Strengthened program (default: stdout)");
  strengthen->add_option("--model-defs", st.model_defs, "Definitions naming the predicates of the model");
  strengthen->add_option("--partial", partial, "Keep part of the added formula: min, or fn:i,j;...")
      ->expected(0, 1)
      ->default_str("min");
  strengthen->add_option("--diff", st.diff, "Write an original/strengthened report here");

  cli::VerifyOptions verify;
  auto* verify_cmd = app.add_subcommand("verify", "Run every stage");
  verify_cmd->add_option("input", input, "minifun program")->required();
  verify_cmd->add_option("-o,--output", verify.output, "Strengthened program");
  verify_cmd->add_option("--out-dir", verify.out_dir, "Directory for intermediate artifacts");
  solver_flags(verify_cmd);
  verify_cmd->add_option("--partial", partial, "Keep part of the added formula: min, or fn:i,j;...")
      ->expected(0, 1)
      ->default_str("min");

  try {
    app.parse(argc, argv);
    if (!depth.empty()) common.depth = std::stoi(depth);
    if (!range.empty()) common.int_range = cli::parse_int_range(range);
    if (!seed.empty()) common.seed = std::stoull(seed);
    if (!check.empty()) solve.check = check == "exact" ? CheckMode::Exact : CheckMode::Bounded;
    cli::PartialSpec ps;
    auto* opt = app.got_subcommand(strengthen) ? strengthen->get_option("--partial") : nullptr;
    if (app.got_subcommand(verify_cmd)) opt = verify_cmd->get_option("--partial");
    if (opt && opt->count() > 0) ps = cli::parse_partial(partial);
    st.partial = ps;
    verify.partial = ps;
    verify.solve = solve;
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : cli::kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kUsage;
  }

  if (app.got_subcommand(translate)) return cli::cmd_translate(input, output, common, std::cout, std::cerr);
  if (app.got_subcommand(transform)) return cli::cmd_transform(input, bundle, common, std::cout, std::cerr);
  if (app.got_subcommand(solve_cmd)) return cli::cmd_solve(bundle, solve, common, std::cout, std::cerr);
  if (app.got_subcommand(strengthen))
    return cli::cmd_strengthen(bundle, model, input, output, st, common, std::cout, std::cerr);
  return cli::cmd_verify(input, verify, common, std::cout, std::cerr);
}
