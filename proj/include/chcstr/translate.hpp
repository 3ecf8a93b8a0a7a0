// Translation of MiniFun programs and contracts to constrained Horn clauses.
//
// Each function f with n parameters and k flattened result components becomes a
// predicate f/(n+k). Each non-trivial postcondition becomes a goal
//   false :- pre & ~post, f(params, results), <atoms of pre>, <atoms of post>.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "chcstr/chc.hpp"
#include "chcstr/minifun.hpp"

namespace chcstr {

struct FunctionInfo {
  std::string name;
  std::vector<std::string> params;
  std::vector<Sort> param_sorts;
  std::vector<Sort> result_sorts;
  bool tuple_result = false;

  std::size_t arity() const { return params.size() + result_sorts.size(); }
  /// Surface text of argument position `pos` of the predicate, e.g. `l`, `res`, `res._2`.
  std::string surface(std::size_t pos, const std::string& binder = "res") const;
};

struct GoalInfo {
  std::string function;
  std::map<std::string, std::string> vars;  // clause variable -> surface expression
};

/// Links clause-level names back to the surface program.
struct SourceMap {
  std::vector<FunctionInfo> functions;
  std::vector<GoalInfo> goals;  // parallel to ChcSystem::goals

  const FunctionInfo* find(const std::string& name) const;
  std::string serialize() const;
  static SourceMap parse(const std::string& text);
};

struct Translation {
  ChcSystem system;
  SourceMap source_map;
};

/// Throws mf::FrontendError (kind UnsupportedContract) for contracts outside the
/// supported shape.
Translation translate_to_chcs(const mf::Program& p);

}  // namespace chcstr
