// SMT-LIB2 s-expressions: reading, and conversion to and from the constraint IR.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "chcstr/chc.hpp"

namespace chcstr {

struct SExpr {
  bool atom = true;
  std::string text;  // for atoms; `|quoted|` symbols are stored unquoted
  std::vector<SExpr> list;

  bool is(const std::string& s) const { return atom && text == s; }
  bool head_is(const std::string& s) const { return !atom && !list.empty() && list[0].is(s); }
  std::string str() const;
};

/// Every top-level s-expression of `text`; bare atoms such as `sat` are included.
/// `;` starts a comment. Throws ParseError.
std::vector<SExpr> parse_sexprs(const std::string& text);

std::string smt_symbol(const std::string& name);
std::string smt_sort(const Sort& s);
std::string to_smt(const Expr& e);
std::string to_smt(const Term& t);

/// Symbols in scope with their sorts.
using SmtScope = std::map<std::string, Sort>;

/// Converts a term over Bool/Int. `let` bindings are inlined; constant factors of `*`
/// are folded. Throws ParseError on unknown symbols or operators and on nonlinear terms.
Expr expr_from_smt(const SExpr& s, const SmtScope& scope);

/// Rewrites an SMT-LIB symbol into a variable name the clause printer accepts.
std::string var_from_smt(const std::string& symbol);

}  // namespace chcstr
