// Constraint evaluation and bounded model search over Bool/Int variables.
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "chcstr/chc.hpp"

namespace chcstr {

/// Variable valuation; booleans are 0/1.
using Valuation = std::map<std::string, std::int64_t>;

/// Throws Error on an unbound variable.
bool eval_constraint(const Expr& c, const Valuation& env);
std::int64_t eval_int(const Expr& e, const Valuation& env);

struct SearchOptions {
  std::int64_t lo = -4;
  std::int64_t hi = 4;
  /// Search nodes before giving up; 0 means unlimited.
  std::uint64_t node_budget = 0;
};

enum class SearchStatus { Complete, Stopped, BudgetExceeded };

/// A constraint compiled against a fixed variable order. Supports partial evaluation
/// (three-valued) and a depth-first search for all satisfying completions of a
/// partial assignment. Top-level equalities `V = e` whose right side is already known
/// assign V directly, so such values may fall outside [lo,hi].
class BoundedSearch {
 public:
  using Assignment = std::vector<std::optional<std::int64_t>>;

  BoundedSearch(const Expr& c, std::vector<std::pair<std::string, Sort>> vars);

  const std::vector<std::pair<std::string, Sort>>& vars() const { return vars_; }
  int slot(const std::string& name) const;

  std::optional<std::int64_t> eval(const Assignment& a) const { return eval(root_, a); }

  /// Calls `visit` on every satisfying completion; `visit` returns false to stop.
  SearchStatus run(Assignment init, const SearchOptions& opts,
                   const std::function<bool(const std::vector<std::int64_t>&)>& visit) const;

 private:
  struct Node {
    Op op;
    int slot = -1;
    std::int64_t value = 0;
    std::vector<int> kids;
  };
  int compile(const Expr& e, const std::map<std::string, int>& slots);
  std::optional<std::int64_t> eval(int n, const Assignment& a) const;
  bool propagate(Assignment& a) const;

  std::vector<std::pair<std::string, Sort>> vars_;
  std::vector<Node> nodes_;
  int root_ = -1;
  // Top-level conjuncts of the form slot = node.
  std::vector<std::pair<int, int>> defs_;
};

}  // namespace chcstr
