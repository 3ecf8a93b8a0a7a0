// Recognition of list catamorphisms among clause predicates.
//
// A catamorphism h is defined by exactly two clauses
//   h(X,[],Res) :- b(X,Res).
//   h(X,[H|T],Res) :- f(X,T,Rf), h(X,T,R), c(X,H,Rf,R,Res).
// where the list argument may sit at any position, f is an optional auxiliary
// catamorphism and the recursive atom may be absent (as for `hd`).
#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "chcstr/chc.hpp"

namespace chcstr {

struct CatamorphismInfo {
  std::string pred;
  std::size_t list_pos = 0;
  std::vector<std::size_t> extra_pos;   // the X slots
  std::vector<std::size_t> result_pos;  // the Res slots
  Clause nil_clause;   // head args other than the list are distinct variables
  Clause cons_clause;  // head list arg is [H|T] with H, T variables
  Expr base_constraint;
  std::optional<Atom> aux;        // f(X,T,Rf) in cons_clause
  std::optional<Atom> recursive;  // h(X,T,R) in cons_clause
  Expr step_constraint;

  std::size_t arity() const { return extra_pos.size() + 1 + result_pos.size(); }
};

struct NotACatamorphism {
  enum class Reason {
    Undeclared,
    NoListArgument,
    AdtResult,
    WrongClauseCount,
    NonVariableArgument,
    BodyShape,
    RecursionOnNonTail,
    AuxNotCatamorphism,
  };
  Reason reason;
  std::string detail;
};

const char* reason_text(NotACatamorphism::Reason r);

using Recognition = std::variant<CatamorphismInfo, NotACatamorphism>;

Recognition recognize(const ChcSystem& sys, const std::string& pred);

/// Every predicate of `sys` that recognizes.
std::map<std::string, CatamorphismInfo> recognize_all(const ChcSystem& sys);

struct TotalityBounds {
  std::int64_t lo = -4;
  std::int64_t hi = 4;
};

struct TotalityResult {
  bool ok = true;
  bool in_base = false;            // counterexample is in the nil clause
  std::map<std::string, std::int64_t> inputs;
  std::vector<std::vector<std::int64_t>> results;  // 0 or at least 2 result tuples
  std::string describe() const;
};

/// Checks by enumeration that the base and step constraints define exactly one
/// result tuple for every input valuation within bounds.
TotalityResult totality_check(const CatamorphismInfo& info, const TotalityBounds& b = {});

}  // namespace chcstr
