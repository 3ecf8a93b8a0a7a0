// Strengthened postconditions from models of the ADT-free clauses.
//
// A model constraint of a definition `newk(V..) :- f(X,Y), cata atoms` is read back
// over the surface program: subject arguments become parameters or `res`, catamorphism
// results become calls (or tuple projections), and variables that are neither become
// universally quantified.
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "chcstr/minifun.hpp"
#include "chcstr/solver.hpp"
#include "chcstr/transform.hpp"
#include "chcstr/translate.hpp"

namespace chcstr {

class BacktranslateError : public Error {
 public:
  using Error::Error;
};

struct StrengthenedContract {
  std::string function;
  mf::NodePtr original;            // null: true
  std::vector<mf::NodePtr> added;  // top-level conjuncts, in order
  mf::NodePtr post;                // postcondition to emit

  /// original && added[0] && ...
  mf::NodePtr combined() const;
};

struct BacktranslateOptions {
  /// Catamorphism results whose call is a conjunct of the precondition become true.
  bool use_precondition = true;
  /// Use the definitions of every goal context instead of the earliest one that has
  /// a definition for the function.
  bool all_contexts = false;
};

/// Throws BacktranslateError when a head variable has no surface reading.
StrengthenedContract backtranslate(const mf::Program& prog, const PredicateModel& model, const DefinitionMap& defs,
                                   const SourceMap& sm, const std::string& fn, const BacktranslateOptions& o = {});

struct SurfaceBounds {
  int max_len = 3;
  std::int64_t lo = -2;
  std::int64_t hi = 2;
  std::int64_t forall_lo = -3;
  std::int64_t forall_hi = 3;
};

/// Top-level `&&` operands.
std::vector<mf::NodePtr> surface_conjuncts(const mf::NodePtr& e);
mf::NodePtr surface_and(const std::vector<mf::NodePtr>& parts);

/// Rewrites `f` using `assumption` (both over the parameters of `fn` and `res`).
/// Every rewrite pass and every dropped conjunct is checked by enumeration to keep
/// the value of `f` wherever the assumption holds; a failing step is undone.
mf::NodePtr simplify_formula(const mf::Program& prog, const std::string& fn, const mf::NodePtr& f,
                             const mf::NodePtr& assumption, const SurfaceBounds& b = {});

/// Sets `post` to the simplified combined postcondition under the precondition.
void simplify_contract(const mf::Program& prog, StrengthenedContract& c, const SurfaceBounds& b = {});

/// Keeps the added conjuncts with the given indices; `post` becomes the combination.
StrengthenedContract partial_strengthen(const StrengthenedContract& c, const std::vector<std::size_t>& keep);

/// Drops added conjuncts one at a time, in order, while `recheck` accepts the result.
std::vector<StrengthenedContract> partial_minimize(
    const std::vector<StrengthenedContract>& cs,
    const std::function<bool(const std::vector<StrengthenedContract>&)>& recheck);

/// The program with the postconditions of the given functions replaced.
mf::Program with_contracts(const mf::Program& prog, const std::vector<StrengthenedContract>& cs);

/// Source text with each targeted `ensuring` block rewritten; other text unchanged.
std::string emit_annotated_program(const mf::Program& prog, const std::vector<StrengthenedContract>& cs);

/// Side-by-side report of original and new postconditions.
std::string contract_diff(const std::vector<StrengthenedContract>& cs);

// Modular checking ------------------------------------------------------------------

struct InductiveFailure {
  std::string function;
  std::vector<mf::Value> args;
  std::string reason;  // e.g. "precondition of snoc" or "postcondition"
};

struct InductiveReport {
  std::vector<InductiveFailure> failures;
  std::size_t checked = 0;
  bool ok() const { return failures.empty(); }
};

/// Checks each contract using only the contracts of the callees: for every bounded
/// input satisfying the precondition, the body is evaluated with each call to a
/// function with a postcondition replaced by any bounded result satisfying that
/// postcondition (lists up to max_len + 1). Calls made directly by the checked body
/// are unfolded once, and a call whose body reaches a base case without such calls is
/// evaluated. Reports failing preconditions of calls and failing postconditions.
InductiveReport check_inductive_bounded(const mf::Program& prog, const SurfaceBounds& b = {});

}  // namespace chcstr
