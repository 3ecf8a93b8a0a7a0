// ADT removal by define-unfold-fold driven by catamorphisms.
//
// Every goal gets a set of catamorphism "roles": for each ADT argument position of a
// function predicate, the catamorphisms that its definitions carry on that argument.
// Definitions package one function atom with its role atoms; their heads list the
// basic-sort arguments of the body atoms, one slot per occurrence.
//
// While the transformation runs, atoms of new predicates carry the ADT variables of
// their definition as trailing hidden arguments, so that every intermediate clause set
// has a checkable least model. The hidden arguments are erased in the output.
#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "chcstr/cata.hpp"
#include "chcstr/chc.hpp"
#include "chcstr/lfp.hpp"

namespace chcstr {

class TransformError : public Error {
 public:
  using Error::Error;
};

/// A catamorphism on one argument role. `links[i]` is the position of the function
/// atom argument passed as the i-th extra argument, or nullopt when it is free.
struct RoleCata {
  std::string pred;
  std::vector<std::optional<std::size_t>> links;
  friend bool operator==(const RoleCata&, const RoleCata&) = default;
};

/// (function predicate, ADT argument position) -> catamorphisms, ordered by name.
using RoleMap = std::map<std::pair<std::string, std::size_t>, std::vector<RoleCata>>;

struct DefinitionClause {
  std::string name;
  Atom head;                      // basic-sort slots
  std::vector<Term> hidden;       // ADT variables of the body
  std::vector<Atom> body;         // subject atom first (if any), then catamorphism atoms
  Expr constraint;                // true for generalized definitions
  std::optional<std::string> subject;
  std::size_t context = 0;        // index of the goal whose roles built it

  /// `name(head) :- constraint, body`.
  Clause clause() const;
  /// Same with the hidden arguments appended to the head.
  Clause instrumented() const;
  std::string skeleton() const;
};

struct FoldRecord {
  std::string clause;  // e.g. "goal 0" or "new3/2"
  std::string source;  // e.g. "goal 0" or "new3"
  std::vector<std::string> defs;
};

struct DefinitionMap {
  std::vector<DefinitionClause> defs;
  std::vector<std::pair<std::string, std::string>> links;  // generalized -> general
  std::vector<FoldRecord> provenance;

  const DefinitionClause* find(const std::string& name) const;
};

struct TransformStats {
  std::size_t definitions = 0;
  std::size_t unfold_steps = 0;
  std::size_t fold_steps = 0;
  std::size_t generalizations = 0;
  std::size_t added_catas = 0;
  std::size_t assumptions = 0;
  std::size_t dropped_atoms = 0;
  friend bool operator==(const TransformStats&, const TransformStats&) = default;
};

/// One rewrite of the working clause set. Clauses are in instrumented form and are
/// identified by number; the input clauses are numbered first, then the input goals.
struct TraceStep {
  enum class Kind { Define, Unfold, AddCata, Assume, Fold, Drop, Prune };
  Kind kind;
  std::string target;
  std::vector<std::size_t> removed;
  std::vector<std::pair<std::size_t, Clause>> added;
};

const char* step_name(TraceStep::Kind k);

struct TransformOptions {
  bool contract_assumptions = true;
  std::size_t max_definitions = 64;
  bool record_trace = true;
};

struct TransformResult {
  ChcSystem output;
  DefinitionMap defs;
  TransformStats stats;
  std::vector<RoleMap> roles;  // per input goal
  std::vector<TraceStep> trace;
  std::vector<PredDecl> instrumented_decls;  // new predicates with hidden arguments
};

// Individual operations ---------------------------------------------------------

/// One clause per clause of the atom's predicate whose head unifies with it.
std::vector<Clause> unfold(const Clause& c, std::size_t atom_index, ChcSystem& sys);

struct FoldOptions {
  bool instrumented = false;  // keep hidden arguments on the new atom
  /// Atoms of these predicates do not keep catamorphism atoms alive (see fold).
  std::set<std::string> transparent;
};

/// Replaces the instance of `def`'s body among `c`'s atoms by the instance of its head.
/// A matched catamorphism atom stays in the clause while its list variable still occurs
/// in another residual atom outside `def`'s catamorphisms and `transparent`, so that a
/// later fold can cover it. nullopt when there is no instance.
std::optional<Clause> fold(const Clause& c, const DefinitionClause& def, const FoldOptions& o = {});

/// Definition whose body is the function atom of `c` with index `subject` plus the
/// catamorphism atoms the roles require on its ADT arguments.
DefinitionClause introduce_definition(const Clause& c, std::size_t subject, const RoleMap& roles,
                                      const std::map<std::string, CatamorphismInfo>& catas,
                                      const std::string& name);

struct Incomparable {};
std::variant<DefinitionClause, Incomparable> generalize(const DefinitionClause& d1, const DefinitionClause& d2);

/// Roles seeded by the contract goals alone (goals with a single function atom).
RoleMap contract_roles(const ChcSystem& sys, const std::map<std::string, CatamorphismInfo>& catas);

/// Catamorphism roles needed by one goal.
RoleMap compute_roles(const ChcSystem& sys, const Clause& goal, const std::map<std::string, CatamorphismInfo>& catas);

/// Throws TransformError when a goal uses a predicate that is neither a function
/// predicate nor a catamorphism, or when the definition budget is exceeded.
TransformResult t_cata(const ChcSystem& sys, const std::map<std::string, CatamorphismInfo>& catas,
                       const TransformOptions& opts = {});

/// Removes hidden arguments from new-predicate atoms.
Clause erase_hidden(const Clause& c, const DefinitionMap& defs);

/// Renames variables to A, B, C, ... in order of first occurrence.
Clause rename_canonical(const Clause& c);

// Trace checking ------------------------------------------------------------

struct TraceCheckResult {
  bool ok = true;
  std::size_t steps = 0;        // steps checked
  std::size_t failed_step = 0;  // index into the trace when !ok
  std::string detail;
};

/// Replays the trace from `input` and compares bounded least models before and after
/// each step: all predicates must keep their relation (predicates that existed before,
/// for Define steps) and a goal violation must exist after a step iff it existed before.
TraceCheckResult check_trace_bounded(const ChcSystem& input, const TransformResult& r, const Bounds& b);

// Bundles -----------------------------------------------------------------------

std::string serialize_bundle(const ChcSystem& input, const TransformResult& r);

struct Bundle {
  ChcSystem input;
  ChcSystem output;
  DefinitionMap defs;
  TransformStats stats;
};

Bundle parse_bundle(const std::string& text);

}  // namespace chcstr
