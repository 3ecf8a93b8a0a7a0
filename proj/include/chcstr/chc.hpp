// Sorted clause IR: sorts, terms, constraints, atoms, clauses and systems.
#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace chcstr {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& msg, int line, int col)
      : Error(std::to_string(line) + ":" + std::to_string(col) + ": " + msg), line_(line), col_(col) {}
  int line() const { return line_; }
  int column() const { return col_; }

 private:
  int line_;
  int col_;
};

class SortError : public Error {
 public:
  using Error::Error;
};

class ResourceError : public Error {
 public:
  using Error::Error;
};

struct Sort {
  enum class Kind { Bool, Int, Adt };
  Kind kind = Kind::Int;
  std::string adt;

  static Sort boolean() { return {Kind::Bool, {}}; }
  static Sort integer() { return {Kind::Int, {}}; }
  static Sort adt_named(std::string name) { return {Kind::Adt, std::move(name)}; }
  static Sort list() { return adt_named("List"); }

  bool is_basic() const { return kind != Kind::Adt; }
  bool is_bool() const { return kind == Kind::Bool; }
  bool is_int() const { return kind == Kind::Int; }
  bool is_adt() const { return kind == Kind::Adt; }
  std::string str() const;

  friend bool operator==(const Sort&, const Sort&) = default;
  friend auto operator<=>(const Sort&, const Sort&) = default;
};

struct Constructor {
  std::string name;
  std::vector<Sort> args;
};

/// Algebraic data type declaration. `List` (nil | cons(Int, List)) is built in.
struct AdtDecl {
  std::string name;
  std::vector<Constructor> ctors;

  const Constructor* find(const std::string& ctor) const;
};

AdtDecl list_adt();

inline constexpr const char* kNil = "nil";
inline constexpr const char* kCons = "cons";

struct Term {
  enum class Kind { Var, Int, Bool, Ctor };
  Kind kind = Kind::Int;
  Sort sort;
  std::string name;  // variable or constructor name
  std::int64_t value = 0;
  std::vector<Term> args;

  static Term var(std::string name, Sort sort);
  static Term integer(std::int64_t v);
  static Term boolean(bool b);
  static Term ctor(std::string name, Sort sort, std::vector<Term> args);
  static Term nil();
  static Term cons(Term head, Term tail);

  bool is_var() const { return kind == Kind::Var; }
  bool is_ctor() const { return kind == Kind::Ctor; }
  bool is_ground() const;
  /// Constructor nesting depth; nullary constructors and basic leaves have depth 0.
  int depth() const;

  friend bool operator==(const Term&, const Term&) = default;
  friend bool operator<(const Term& a, const Term& b) { return compare(a, b) < 0; }
  static int compare(const Term& a, const Term& b);
};

std::size_t hash_term(const Term& t);

struct TermHash {
  std::size_t operator()(const Term& t) const { return hash_term(t); }
};

enum class Op {
  Var,
  IntLit,
  BoolLit,
  Add,
  Sub,
  Neg,
  Mul,  // kids[0] is an integer literal
  Eq,   // on Bool this is also iff
  Ne,
  Le,
  Lt,
  Ge,
  Gt,
  Not,
  And,
  Or,
  Implies,
  Ite,
};

/// Immutable, shared constraint expression over Bool/Int variables.
class Expr {
 public:
  struct Node {
    Op op;
    Sort sort;
    std::string name;
    std::int64_t value = 0;
    std::vector<Expr> kids;
  };

  Expr();  // literal true

  static Expr var(std::string name, Sort sort);
  static Expr integer(std::int64_t v);
  static Expr boolean(bool b);
  static Expr make(Op op, std::vector<Expr> kids);

  Op op() const { return node_->op; }
  const Sort& sort() const { return node_->sort; }
  const std::string& name() const { return node_->name; }
  std::int64_t value() const { return node_->value; }
  const std::vector<Expr>& kids() const { return node_->kids; }
  const Expr& kid(std::size_t i) const { return node_->kids.at(i); }

  bool is_var() const { return op() == Op::Var; }
  bool is_true() const { return op() == Op::BoolLit && value() != 0; }
  bool is_false() const { return op() == Op::BoolLit && value() == 0; }

  friend bool operator==(const Expr& a, const Expr& b);
  friend bool operator<(const Expr& a, const Expr& b);

 private:
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

// Constructors that perform light local normalization.
Expr mk_and(std::vector<Expr> kids);
Expr mk_or(std::vector<Expr> kids);
Expr mk_not(const Expr& e);
Expr mk_implies(const Expr& a, const Expr& b);
Expr mk_eq(const Expr& a, const Expr& b);
Expr mk_ite(const Expr& c, const Expr& t, const Expr& e);
/// A bare Bool variable used as a formula: canonical form is `V = true`.
Expr mk_holds(const std::string& var);
Expr mk_cmp(Op op, const Expr& a, const Expr& b);

/// Top-level conjuncts (flattening nested `&`).
std::vector<Expr> conjuncts(const Expr& e);

/// Light simplifier: constant folding, ite collapse, negation push through comparisons,
/// `~a | b` to `a => b`. Preserves semantics.
Expr simplify(const Expr& e);

Expr term_to_expr(const Term& t);
std::optional<Term> expr_to_term(const Expr& e);

void collect_vars(const Expr& e, std::map<std::string, Sort>& out);
void collect_vars(const Term& t, std::map<std::string, Sort>& out);

struct Atom {
  std::string pred;
  std::vector<Term> args;

  friend bool operator==(const Atom&, const Atom&) = default;
  friend bool operator<(const Atom& a, const Atom& b);
};

struct Clause {
  std::optional<Atom> head;  // nullopt: goal (head `false`)
  Expr constraint;
  std::vector<Atom> body;

  bool is_goal() const { return !head.has_value(); }
  std::map<std::string, Sort> vars() const;
};

struct PredDecl {
  std::string name;
  std::vector<Sort> args;

  friend bool operator==(const PredDecl&, const PredDecl&) = default;
};

using Binding = std::map<std::string, Term>;

Term substitute(const Term& t, const Binding& b);
Expr substitute(const Expr& e, const Binding& b);
Atom substitute(const Atom& a, const Binding& b);
/// Simultaneous substitution; throws SortError when a binding changes a variable's sort.
Clause substitute(const Clause& c, const Binding& b);

/// Most general unifier extension. Returns false on clash.
bool unify(const Term& a, const Term& b, Binding& mgu);
Term resolve(const Term& t, const Binding& mgu);

class ChcSystem {
 public:
  ChcSystem();

  std::vector<AdtDecl> adts;
  std::vector<PredDecl> preds;
  std::vector<Clause> clauses;  // definite clauses
  std::vector<Clause> goals;

  const PredDecl* find_pred(const std::string& name) const;
  const AdtDecl* find_adt(const std::string& name) const;
  void declare(PredDecl d);
  void add(Clause c);

  std::vector<const Clause*> clauses_of(const std::string& pred) const;

  /// Fresh variable name with the given stem; unique per system.
  std::string fresh_name(const std::string& stem = "V");
  /// Makes later fresh names skip every `_<n>` suffix up to `n`.
  void reserve_fresh(long n) { fresh_ = std::max(fresh_, n); }
  long fresh_counter() const { return fresh_; }

  /// Checks that every atom and sort is declared and well-sorted.
  void check() const;

  bool has_adt_vars() const;

 private:
  long fresh_ = 0;
};

/// Clause with all variables renamed apart using the system's fresh counter.
Clause rename_apart(const Clause& c, ChcSystem& sys, const std::string& stem = "V");

}  // namespace chcstr
