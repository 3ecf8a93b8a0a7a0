// Equivalence of clauses up to variable renaming.
//
// Conjunctions and disjunctions are compared as multisets, `=` and `~=` are
// symmetric, and `>=`/`>` are read as flipped `=<`/`<`. Optionally predicate
// names may be renamed too (consistently across a whole system).
#pragma once

#include <map>
#include <string>
#include <vector>

#include "chcstr/chc.hpp"

namespace chcstr {

struct AlphaOptions {
  bool rename_preds = false;
};

struct Renaming {
  std::map<std::string, std::string> vars;   // left -> right
  std::map<std::string, std::string> preds;  // left -> right
};

bool alpha_equivalent(const Expr& a, const Expr& b);
bool alpha_equivalent(const Clause& a, const Clause& b, const AlphaOptions& o = {});

/// Multiset equivalence of definite clauses and goals. With rename_preds, one
/// predicate bijection must serve every clause.
bool alpha_equivalent(const ChcSystem& a, const ChcSystem& b, const AlphaOptions& o = {});
bool alpha_equivalent(const std::vector<Clause>& a, const std::vector<Clause>& b, const AlphaOptions& o = {});

/// Like the clause overload, also reporting the renaming found.
bool alpha_match(const Clause& a, const Clause& b, const AlphaOptions& o, Renaming& out);

}  // namespace chcstr
