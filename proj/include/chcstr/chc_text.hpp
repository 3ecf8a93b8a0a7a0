// Prolog-style clause text: `head :- constraint, atom, ..., atom.`
//
//   file       ::= { directive | clause }
//   directive  ::= ':-' 'pred' name '(' sort {',' sort} ')' '.'
//                | ':-' 'data' Name '::=' ctor {'|' ctor} '.'
//   clause     ::= ('false' | atom) [':-' item {',' item}] '.'
//   item       ::= atom | formula
//   term       ::= Var | int | 'true' | 'false' | '[]' | '[' term {',' term} ['|' term] ']'
//                | ctor ['(' term {',' term} ')']
//
// Formulas use `~ & | => <=>`, comparisons `= != =< <= >= < >`, `+ - *` (constant
// factor only) and `ite(c,t,e)`. A bare Bool variable `B` in formula position is sugar
// for `B=true` and `~B` for `B=false`. Comments: `/* ... */` and `// ...`.
#pragma once

#include <string>

#include "chcstr/chc.hpp"

namespace chcstr {

ChcSystem parse_chc(const std::string& text);

struct PrintOptions {
  /// Emit `:- pred` directives for every predicate instead of only the ones whose
  /// sorts cannot be recovered from the clauses.
  bool explicit_decls = false;
};

std::string print_chc(const ChcSystem& sys, PrintOptions opts = {});
std::string print_clause(const Clause& c);
std::string print_atom(const Atom& a);
std::string print_term(const Term& t);
std::string print_constraint(const Expr& e);

/// Parses a single formula whose variable sorts are given by `sorts` (missing: inferred).
Expr parse_constraint(const std::string& text, const std::map<std::string, Sort>& sorts = {});

}  // namespace chcstr
