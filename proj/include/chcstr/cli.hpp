// Pipeline commands behind the `chcstr` executable. Each command reads and writes
// files only, prints `key=value` lines and a final `VERDICT:` line on `out`, and
// returns the process exit code.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "chcstr/solver.hpp"
#include "chcstr/strengthen.hpp"

namespace chcstr::cli {

enum Exit : int { kOk = 0, kNegative = 1, kUsage = 2, kToolFailure = 3 };

/// Shared by every bounded check; unset fields keep each check's own default.
struct CommonOptions {
  std::optional<int> depth;
  std::optional<std::pair<std::int64_t, std::int64_t>> int_range;
  std::optional<std::uint64_t> seed;
  bool timing = false;  // print stage times (makes the output run-dependent)
};

/// `lo:hi`; throws Error.
std::pair<std::int64_t, std::int64_t> parse_int_range(const std::string& text);

struct PartialSpec {
  bool enabled = false;
  bool minimize = false;
  std::map<std::string, std::vector<std::size_t>> keep;  // function -> kept added conjuncts
};

/// `min`, or `fn:i,j;fn2:k` (0-based indices into the added conjuncts). Throws Error.
PartialSpec parse_partial(const std::string& text);

struct SolveOptions {
  std::string solver;       // empty: CHCSTR_SOLVER or z3 on PATH
  double timeout = 60.0;
  std::string model_in;     // skip the solver and use this model
  std::string model_defs;   // definitions naming the predicates of model_in
  std::string model_out;
  std::optional<CheckMode> check;  // default: exact for solver models, else bounded
};

int cmd_translate(const std::string& input, const std::string& output, const CommonOptions& c, std::ostream& out,
                  std::ostream& err);

int cmd_transform(const std::string& input, const std::string& bundle, const CommonOptions& c, std::ostream& out,
                  std::ostream& err);

int cmd_solve(const std::string& bundle, const SolveOptions& s, const CommonOptions& c, std::ostream& out,
              std::ostream& err);

struct StrengthenOptions {
  PartialSpec partial;
  std::string diff;        // side-by-side report path
  std::string model_defs;  // as in SolveOptions
};

int cmd_strengthen(const std::string& bundle, const std::string& model, const std::string& input,
                   const std::string& output, const StrengthenOptions& o, const CommonOptions& c, std::ostream& out,
                   std::ostream& err);

struct VerifyOptions {
  SolveOptions solve;
  PartialSpec partial;
  std::string output;   // strengthened program
  std::string out_dir;  // every intermediate artifact
};

int cmd_verify(const std::string& input, const VerifyOptions& o, const CommonOptions& c, std::ostream& out,
               std::ostream& err);

// Building blocks shared with the tests.

/// Model of the bundle's output predicates from `text`. With `defs_text`, the model
/// names predicates of those definitions and is transported by matching them with the
/// bundle's definitions.
PredicateModel load_model(const std::string& text, const ChcSystem& input, const ChcSystem& output,
                          const DefinitionMap& defs, const std::string& defs_text = "");

/// Back-translated, simplified (and optionally partial) contracts for every function
/// with definitions; functions without added conjuncts are left out.
std::vector<StrengthenedContract> strengthen_contracts(const mf::Program& prog, const PredicateModel& model,
                                                       const DefinitionMap& defs, const SourceMap& sm,
                                                       const PartialSpec& partial, const SurfaceBounds& b = {});

}  // namespace chcstr::cli
