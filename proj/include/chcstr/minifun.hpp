// MiniFun: a small first-order functional language with contracts.
//
//   program  ::= { import-line } ( 'object' Id '{' { def } '}' | { def } )
//   def      ::= 'def' id '(' [param {',' param}] ')' ':' type '=' body [ 'ensuring' '{' id '=>' expr '}' ]
//   body     ::= '{' [ 'require' '(' expr ')' ] expr '}' | expr
//   type     ::= Int | BigInt | Bool | Boolean | List ['[' (Int|BigInt) ']'] | '(' type ',' type {',' type} ')'
//   expr     ::= impl [ 'match' '{' { 'case' pattern '=>' expr } '}' ]
//   impl     ::= or [ '==>' impl ]
//   or       ::= and { '||' and }          and ::= eq { '&&' eq }
//   eq       ::= rel [ ('=='|'!=') rel ]   rel ::= add [ ('<'|'<='|'>'|'>=') add ]
//   add      ::= mul { ('+'|'-') mul }     mul ::= unary { '*' unary }
//   unary    ::= ('!'|'-') unary | postfix  postfix ::= primary { '._1' | '._2' | ... }
//   primary  ::= int | 'true' | 'false' | id | id '(' args ')' | 'BigInt' '(' int ')'
//              | 'Nil' ['[' type ']'] '(' ')' | 'Cons' ['[' type ']'] '(' expr ',' expr ')'
//              | '(' expr ')' | '(' expr ',' expr {',' expr} ')' | '{' expr '}'
//              | 'if' '(' expr ')' expr 'else' expr
//              | 'forall' '(' '(' id ':' type ')' '=>' expr ')'
//   pattern  ::= 'Nil' '(' ')' | 'Cons' '(' binder ',' binder ')' | '_'
//
// `List` is the monomorphic list of Int. Lines starting with `import` are ignored.
#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "chcstr/chc.hpp"

namespace chcstr::mf {

class FrontendError : public Error {
 public:
  enum class Kind { Syntax, Type, NonExhaustive, Overlap, UnknownIdentifier, UnsupportedContract };
  FrontendError(Kind k, const std::string& msg, int line = 0, int col = 0);
  Kind kind() const { return kind_; }
  int line() const { return line_; }
  int column() const { return col_; }

 private:
  Kind kind_;
  int line_;
  int col_;
};

struct Type {
  enum class Kind { Int, Bool, List, Tuple };
  Kind kind = Kind::Int;
  std::vector<Type> elems;

  static Type integer() { return {Kind::Int, {}}; }
  static Type boolean() { return {Kind::Bool, {}}; }
  static Type list() { return {Kind::List, {}}; }
  static Type tuple(std::vector<Type> e) { return {Kind::Tuple, std::move(e)}; }
  bool is_basic() const { return kind == Kind::Int || kind == Kind::Bool; }
  std::string str() const;
  /// Flattened component sorts (tuples expand).
  std::vector<Sort> sorts() const;

  friend bool operator==(const Type&, const Type&) = default;
};

struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;
  int line = 0;
  int col = 0;
};

enum class BinOp { Add, Sub, Mul, Lt, Le, Gt, Ge, Eq, Ne, And, Or, Implies };

const char* binop_text(BinOp op);

struct Node;
using NodePtr = std::shared_ptr<Node>;

struct Case {
  enum class Pat { Nil, Cons, Wild };
  Pat pat = Pat::Wild;
  std::string head;  // "_" for an ignored component
  std::string tail;
  NodePtr body;
};

struct Node {
  enum class Kind { Var, Int, Bool, Nil, Cons, Tuple, Proj, Not, Neg, Bin, If, Match, Call, Forall };
  Kind kind = Kind::Int;
  std::string name;  // variable, callee, or forall binder
  std::int64_t value = 0;
  int index = 0;  // projection, 1-based
  BinOp op = BinOp::Add;
  std::vector<NodePtr> kids;
  std::vector<Case> cases;  // match: kids[0] is the scrutinee
  Type binder_type;         // forall
  Type type;                // set by the typechecker
  Span span;
};

// Builders used by the back-translation.
NodePtr var(const std::string& name);
NodePtr int_lit(std::int64_t v);
NodePtr bool_lit(bool b);
NodePtr call(const std::string& fn, std::vector<NodePtr> args);
NodePtr proj(NodePtr e, int index);
NodePtr not_(NodePtr e);
NodePtr bin(BinOp op, NodePtr a, NodePtr b);
NodePtr forall(const std::string& binder, Type t, NodePtr body);

struct Param {
  std::string name;
  Type type;
};

struct Contract {
  NodePtr pre;   // null: true
  NodePtr post;  // null: true
  std::string binder = "res";
};

struct FunctionDef {
  std::string name;
  std::vector<Param> params;
  Type ret;
  NodePtr body;
  Contract contract;
  Span span;           // whole definition
  Span ensuring;       // `ensuring { ... }`, empty when absent
  std::size_t body_end = 0;  // offset just past the body
};

struct Program {
  std::string source;
  std::vector<FunctionDef> functions;

  const FunctionDef* find(const std::string& name) const;
};

/// Parses and typechecks. Throws FrontendError.
Program parse_program(const std::string& text);

/// Typechecks a standalone contract formula over `scope` (variable types) against the
/// program's functions. Throws FrontendError.
void typecheck_formula(const Program& p, NodePtr e, const std::map<std::string, Type>& scope);

/// Parses a standalone surface expression (untyped).
NodePtr parse_expr(const std::string& text);

/// Surface syntax; binary operands that are themselves operators are parenthesized.
std::string print_expr(const NodePtr& e);

/// Structural equality modulo bound-variable renaming of `forall` binders.
bool alpha_equal(const NodePtr& a, const NodePtr& b);

// ---------------------------------------------------------------------------
// Interpreter

struct Value {
  enum class Kind { Int, Bool, List, Tuple };
  Kind kind = Kind::Int;
  std::int64_t i = 0;
  std::vector<std::int64_t> list;
  std::vector<Value> tuple;

  static Value integer(std::int64_t v) { return {Kind::Int, v, {}, {}}; }
  static Value boolean(bool b) { return {Kind::Bool, b ? 1 : 0, {}, {}}; }
  static Value of_list(std::vector<std::int64_t> l) { return {Kind::List, 0, std::move(l), {}}; }
  static Value of_tuple(std::vector<Value> t) { return {Kind::Tuple, 0, {}, std::move(t)}; }
  bool truthy() const { return i != 0; }
  std::string str() const;
  /// Ground clause terms for this value (tuples flatten).
  std::vector<Term> to_terms() const;

  friend bool operator==(const Value&, const Value&) = default;
};

struct EvalOptions {
  std::uint64_t fuel = 100000;  // function calls
  std::int64_t forall_lo = -3;
  std::int64_t forall_hi = 3;
};

struct EvalResult {
  bool diverged = false;
  Value value;
};

/// Call-by-value evaluation; contracts are not checked.
EvalResult eval(const Program& p, const std::string& fname, const std::vector<Value>& args, EvalOptions opts = {});

/// Evaluates an expression under an environment (used for contracts).
EvalResult eval_expr(const Program& p, const NodePtr& e, const std::map<std::string, Value>& env,
                     EvalOptions opts = {});

/// All values of a type: ints in [lo,hi], both booleans, lists of length <= max_len.
std::vector<Value> enumerate_values(const Type& t, int max_len, std::int64_t lo, std::int64_t hi);

struct ContractBounds {
  int max_len = 3;
  std::int64_t lo = -2;
  std::int64_t hi = 2;
  std::uint64_t fuel = 100000;
};

struct Counterexample {
  std::vector<Value> args;
  Value result;
};

struct ContractReport {
  std::map<std::string, std::vector<Counterexample>> counterexamples;  // per function with a contract
  std::size_t checked = 0;
  bool ok() const;
};

/// For every function with a non-trivial postcondition and every bounded input
/// satisfying the precondition, evaluates the function and its postcondition.
ContractReport check_contracts_bounded(const Program& p, const ContractBounds& b);

}  // namespace chcstr::mf
