// Bounded bottom-up least-model evaluation and goal checking.
#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "chcstr/chc.hpp"
#include "chcstr/eval.hpp"

namespace chcstr {

struct Bounds {
  int depth = 3;
  std::int64_t lo = -2;
  std::int64_t hi = 2;
  int max_iters = 1000;
  std::size_t max_atoms = 1000000;
};

struct TupleHash {
  std::size_t operator()(const std::vector<Term>& v) const;
};

/// Finite set of ground atoms plus the bounds that produced it.
class GroundAtomSet {
 public:
  explicit GroundAtomSet(Bounds b = {}) : bounds_(b) {}

  const Bounds& bounds() const { return bounds_; }
  bool insert(const Atom& a);
  bool contains(const Atom& a) const;
  std::size_t size() const { return size_; }
  /// Tuples of one predicate, in insertion order.
  const std::vector<std::vector<Term>>& tuples(const std::string& pred) const;
  /// Indices of tuples of `pred` whose argument `pos` equals `t`.
  const std::vector<std::size_t>& lookup(const std::string& pred, std::size_t pos, const Term& t) const;
  std::set<Atom> atoms() const;
  std::vector<std::string> predicates() const;
  /// Subset relation on atoms.
  bool subset_of(const GroundAtomSet& other) const;

 private:
  struct Rel {
    std::vector<std::vector<Term>> rows;
    std::unordered_set<std::vector<Term>, TupleHash> members;
    std::vector<std::unordered_map<Term, std::vector<std::size_t>, TermHash>> index;
  };
  Bounds bounds_;
  std::map<std::string, Rel> rels_;
  std::size_t size_ = 0;
};

/// Whether a ground term lies in the bounded universe.
bool in_universe(const Term& t, const Bounds& b);

/// All ground terms of `sort` within the universe, depth-major then by constructor name.
std::vector<Term> universe_terms(const ChcSystem& sys, const Sort& sort, const Bounds& b);

/// Least fixed point of the definite clauses restricted to the bounded universe.
/// Throws ResourceError when the atom cap is exceeded.
GroundAtomSet bounded_lfp(const ChcSystem& sys, const Bounds& b);

/// Atoms derivable by one application of the clauses to `facts` (within the universe).
std::set<Atom> immediate_consequences(const ChcSystem& sys, const GroundAtomSet& facts);

struct GoalViolation {
  std::size_t goal_index = 0;
  Binding witness;  // ground values for every variable of the goal
  std::vector<Atom> body;
};

/// Every ground instance of a goal whose body atoms lie in `ground` and whose
/// constraint holds. `limit` caps the number reported (0 = all).
std::vector<GoalViolation> check_goals(const ChcSystem& sys, const GroundAtomSet& ground, std::size_t limit = 0);

/// Enumerates every instance of a clause body over `facts`; calls `visit` with a ground
/// binding of all clause variables. Unbound ADT variables range over the universe.
/// `visit` returns false to stop.
void instances(const ChcSystem& sys, const Clause& c, const GroundAtomSet& facts,
               const std::function<bool(const Binding&)>& visit);

}  // namespace chcstr
