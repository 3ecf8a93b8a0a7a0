// Comparison of derived clause sets against reference clause sets whose new
// predicates may list their arguments in another order.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "chcstr/chc.hpp"

namespace chcstr {

/// Negation normal form without implications; `&`/`|` flattened.
Expr normal_form(const Expr& e);

/// Eliminates top-level `X=Y` between variables, then takes the normal form of the
/// constraint.
Clause normal_form(const Clause& c);

/// `ours` and `theirs` are definitions of one predicate each. When their bodies match
/// up to renaming, returns p with theirs.head.args[i] corresponding to ours.head.args[p[i]].
std::optional<std::vector<std::size_t>> head_permutation(const Clause& ours, const Clause& theirs);

struct PredCorrespondence {
  std::string ours;
  std::string theirs;
  std::vector<std::size_t> perm;  // as returned by head_permutation
};

/// Renames and reorders the arguments of atoms of corresponded predicates.
Clause apply_correspondence(const Clause& c, const std::vector<PredCorrespondence>& m);

/// Multiset equivalence up to variable renaming, after applying `m` to `ours` and
/// taking normal forms on both sides.
bool structurally_equivalent(const std::vector<Clause>& ours, const std::vector<Clause>& theirs,
                             const std::vector<PredCorrespondence>& m);

}  // namespace chcstr
