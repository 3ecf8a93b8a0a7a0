// Horn-solver interface: SMT-LIB2 emission, subprocess invocation, model parsing and
// independent model validation.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "chcstr/chc.hpp"
#include "chcstr/compare.hpp"

namespace chcstr {

class ModelError : public Error {
 public:
  using Error::Error;
};

/// Interpretation of each predicate as a constraint over its parameters.
struct PredicateModel {
  struct Entry {
    std::vector<std::pair<std::string, Sort>> params;
    Expr body;
  };
  std::map<std::string, Entry> preds;

  const Entry* find(const std::string& pred) const;
  /// The body instantiated on the atom's arguments.
  Expr instance(const Atom& a) const;
};

struct SolverConfig {
  std::string path;
  double timeout = 60.0;  // seconds
  std::vector<std::string> args;
  std::string logic = "HORN";

  /// Path from CHCSTR_SOLVER, else `z3` found on PATH, else empty.
  static SolverConfig from_env();
};

struct SolverResult {
  enum class Kind { Sat, Unsat, Unknown, Timeout, ToolError };
  Kind kind = Kind::Unknown;
  PredicateModel model;  // Sat only
  std::string detail;    // reason, stderr excerpt or raw model text
  double seconds = 0;
};

const char* result_name(SolverResult::Kind k);

/// Throws SortError when the system has ADT-sorted variables or predicates.
std::string emit_horn(const ChcSystem& sys, const std::string& logic = "HORN");

/// Reads a Horn script written by emit_horn (or by hand in the same subset).
ChcSystem parse_horn(const std::string& text);

/// Runs the solver on the script; the script goes to a temporary file that is removed
/// afterwards.
SolverResult invoke(const std::string& script, const SolverConfig& config);

/// Parses a model block: a list of `define-fun`s, optionally wrapped in `(model ...)`
/// and preceded by `sat`. Without a system every definition is kept.
PredicateModel parse_model(const std::string& text);
/// Also requires every predicate of `sys` to be defined with matching sorts.
PredicateModel parse_model(const std::string& text, const ChcSystem& sys);

std::string print_model(const PredicateModel& m);

/// Model of `ours` predicates from a model of `theirs` predicates (see compare.hpp).
PredicateModel transport_model(const PredicateModel& m, const std::vector<PredCorrespondence>& corr);

enum class CheckMode { Bounded, Exact };

struct CheckOptions {
  std::int64_t lo = -4;
  std::int64_t hi = 4;
  /// Search nodes for the exhaustive pass before falling back to sampling.
  std::uint64_t node_budget = 20000000;
  std::size_t samples = 200000;
  std::uint64_t seed = 20240501;
  const SolverConfig* solver = nullptr;  // Exact mode
};

struct ModelCheck {
  bool ok = true;
  bool exhaustive = true;  // false when some clause was only sampled
  std::size_t clause = 0;  // index into clauses, then goals
  bool goal = false;
  std::map<std::string, std::int64_t> witness;
  std::string detail;
};

/// Searches for a valuation under which some clause's body holds and its head does
/// not. Exact mode asks the configured solver instead.
ModelCheck check_model(const ChcSystem& sys, const PredicateModel& m, CheckMode mode, const CheckOptions& o = {});

}  // namespace chcstr
