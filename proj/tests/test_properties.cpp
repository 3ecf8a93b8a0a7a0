// Randomized properties. Every suite uses a fixed seed so failures reproduce.
#include "doctest.h"

#include <random>

#include "chcstr/alpha.hpp"
#include "chcstr/eval.hpp"
#include "support.hpp"

using namespace chcstr;

namespace {

constexpr std::uint64_t kSeed = 20240501;
constexpr int kCases = 250;

const std::vector<std::string> kInts = {"X", "Y", "Z"};
const std::vector<std::string> kBools = {"B", "C"};
const std::vector<std::string> kLists = {"L", "M"};

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  int below(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }
  std::int64_t in(std::int64_t lo, std::int64_t hi) { return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng_); }
  bool coin() { return below(2) == 0; }
  template <class T>
  const T& pick(const std::vector<T>& v) { return v[below(static_cast<int>(v.size()))]; }

  Expr int_expr(int d) {
    if (d == 0 || below(3) == 0)
      return coin() ? Expr::var(pick(kInts), Sort::integer()) : Expr::integer(in(-3, 3));
    switch (below(4)) {
      case 0: return Expr::make(Op::Add, {int_expr(d - 1), int_expr(d - 1)});
      case 1: return Expr::make(Op::Sub, {int_expr(d - 1), int_expr(d - 1)});
      case 2: return Expr::make(Op::Mul, {Expr::integer(in(-2, 3)), int_expr(d - 1)});
      default: return Expr::make(Op::Neg, {int_expr(d - 1)});
    }
  }

  Expr formula(int d) {
    if (d == 0 || below(4) == 0) {
      switch (below(3)) {
        case 0: return mk_holds(pick(kBools));
        case 1: return Expr::boolean(coin());
        default: {
          static const std::vector<Op> cmp = {Op::Eq, Op::Ne, Op::Le, Op::Lt, Op::Ge, Op::Gt};
          return mk_cmp(pick(cmp), int_expr(1), int_expr(1));
        }
      }
    }
    switch (below(5)) {
      case 0: return mk_and({formula(d - 1), formula(d - 1)});
      case 1: return mk_or({formula(d - 1), formula(d - 1)});
      case 2: return mk_not(formula(d - 1));
      case 3: return mk_implies(formula(d - 1), formula(d - 1));
      default: return mk_ite(formula(d - 1), formula(d - 1), formula(d - 1));
    }
  }

  Term list_term() {
    if (coin()) return Term::var(pick(kLists), Sort::list());
    Term t = coin() ? Term::nil() : Term::var(pick(kLists), Sort::list());
    for (int k = below(3); k > 0; --k)
      t = Term::cons(coin() ? Term::integer(in(-2, 2)) : Term::var(pick(kInts), Sort::integer()), t);
    return t;
  }

  // p(Int, List) and q(Bool, Int)
  Atom atom() {
    if (coin()) return Atom{"p", {Term::var(pick(kInts), Sort::integer()), list_term()}};
    Term b = coin() ? Term::var(pick(kBools), Sort::boolean()) : Term::boolean(coin());
    return Atom{"q", {b, coin() ? Term::var(pick(kInts), Sort::integer()) : Term::integer(in(-3, 3))}};
  }

  ChcSystem system() {
    ChcSystem s;
    s.declare({"p", {Sort::integer(), Sort::list()}});
    s.declare({"q", {Sort::boolean(), Sort::integer()}});
    for (int n = 1 + below(4); n > 0; --n) {
      Clause c;
      if (below(4) != 0) c.head = atom();
      for (int k = below(3); k > 0; --k) c.body.push_back(atom());
      c.constraint = formula(2);
      s.add(std::move(c));
    }
    return s;
  }

  Valuation valuation() {
    Valuation v;
    for (const auto& x : kInts) v[x] = in(-4, 4);
    for (const auto& b : kBools) v[b] = below(2);
    return v;
  }

  std::mt19937_64& rng() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

// Reference substitution: rebuilds the tree node by node without normalizing.
Expr naive_substitute(const Expr& e, const Binding& b) {
  if (e.is_var()) {
    auto it = b.find(e.name());
    return it == b.end() ? e : term_to_expr(it->second);
  }
  if (e.kids().empty()) return e;
  std::vector<Expr> kids;
  for (const auto& k : e.kids()) kids.push_back(naive_substitute(k, b));
  return Expr::make(e.op(), kids);
}

// Surface formulas over the parameters of snoc and its result.
std::string surface_formula(Gen& g, int d, bool bound) {
  std::vector<std::string> lists = {"l", "res"};
  std::vector<std::string> ints = {"x", "0", "1"};
  if (bound) ints.push_back("n");
  if (d == 0 || g.below(3) == 0) {
    const std::string& l = g.pick(lists);
    const std::string& i = g.pick(ints);
    switch (g.below(6)) {
      case 0: return "is_dsorted(" + l + ")";
      case 1: return "is_asorted(" + l + ")";
      case 2: return "leq_all(" + i + "," + l + ")";
      case 3: return "hd(" + l + ")._1";
      case 4: return "(hd(" + l + ")._2 >= " + i + ")";
      default: return "(" + i + " <= " + g.pick(ints) + ")";
    }
  }
  switch (g.below(bound ? 4 : 5)) {
    case 0: return "(" + surface_formula(g, d - 1, bound) + " && " + surface_formula(g, d - 1, bound) + ")";
    case 1: return "(" + surface_formula(g, d - 1, bound) + " || " + surface_formula(g, d - 1, bound) + ")";
    case 2: return "!(" + surface_formula(g, d - 1, bound) + ")";
    case 3: return "(" + surface_formula(g, d - 1, bound) + " ==> " + surface_formula(g, d - 1, bound) + ")";
    default: return "forall((n: Int) => " + surface_formula(g, d - 1, true) + ")";
  }
}

}  // namespace

TEST_CASE("property: clause systems survive print and parse") {
  Gen g(kSeed);
  for (int i = 0; i < kCases; ++i) {
    ChcSystem s = g.system();
    std::string text = print_chc(s);
    ChcSystem back = parse_chc(text);
    CHECK_MESSAGE(alpha_equivalent(back, s), text);
    CHECK_MESSAGE(print_chc(back) == text, text);
  }
}

TEST_CASE("property: substitution agrees with the reference and the semantics") {
  Gen g(kSeed + 1);
  for (int i = 0; i < kCases; ++i) {
    Expr e = g.formula(3);
    Binding b;
    for (const auto& x : kInts)
      if (g.coin()) b[x] = g.coin() ? Term::integer(g.in(-3, 3)) : Term::var(g.pick(kInts), Sort::integer());
    for (const auto& x : kBools)
      if (g.coin()) b[x] = g.coin() ? Term::boolean(g.coin()) : Term::var(g.pick(kBools), Sort::boolean());
    Expr got = substitute(e, b);
    Expr ref = naive_substitute(e, b);
    for (int k = 0; k < 8; ++k) {
      Valuation v = g.valuation();
      CHECK_MESSAGE(eval_constraint(got, v) == eval_constraint(ref, v), print_constraint(e));
      // substitution lemma: evaluate the binding first
      Valuation w = v;
      for (const auto& [x, t] : b) w[x] = t.is_var() ? v.at(t.name) : t.value;
      CHECK_MESSAGE(eval_constraint(got, v) == eval_constraint(e, w), print_constraint(e));
    }
  }
}

TEST_CASE("property: simplify preserves truth") {
  Gen g(kSeed + 2);
  for (int i = 0; i < kCases; ++i) {
    Expr e = g.formula(4);
    Expr s = simplify(e);
    for (int k = 0; k < 10; ++k) {
      Valuation v = g.valuation();
      CHECK_MESSAGE(eval_constraint(s, v) == eval_constraint(e, v), (print_constraint(e) + "  ~>  " + print_constraint(s)));
    }
  }
}

TEST_CASE("property: simplify_formula preserves bounded truth under the assumption") {
  const auto& prog = support::reverse().prog;
  SurfaceBounds b;
  b.max_len = 2;
  b.lo = -1;
  b.hi = 1;
  b.forall_lo = -2;
  b.forall_hi = 2;
  auto lists = mf::enumerate_values(mf::Type::list(), b.max_len, b.lo, b.hi);
  auto ints = mf::enumerate_values(mf::Type::integer(), 0, b.lo, b.hi);
  mf::EvalOptions eo;
  eo.forall_lo = b.forall_lo;
  eo.forall_hi = b.forall_hi;
  Gen g(kSeed + 3);
  int rewritten = 0;
  for (int i = 0; i < kCases; ++i) {
    auto f = mf::parse_expr(surface_formula(g, 3, false));
    auto a = g.below(3) == 0 ? nullptr : mf::parse_expr(surface_formula(g, 1, false));
    auto s = simplify_formula(prog, "snoc", f, a, b);
    if (!mf::alpha_equal(s, f)) ++rewritten;
    int mismatches = 0;
    for (const auto& l : lists)
      for (const auto& r : lists)
        for (const auto& x : ints) {
          std::map<std::string, mf::Value> env{{"l", l}, {"res", r}, {"x", x}};
          if (a && !mf::eval_expr(prog, a, env, eo).value.truthy()) continue;
          if (mf::eval_expr(prog, f, env, eo).value != mf::eval_expr(prog, s, env, eo).value) ++mismatches;
        }
    CHECK_MESSAGE(mismatches == 0, (mf::print_expr(f) + "  ~>  " + mf::print_expr(s)));
  }
  MESSAGE("rewritten " << rewritten << " of " << kCases);
  CHECK(rewritten > kCases / 4);
}

TEST_CASE("property: evaluation is deterministic and monotone in fuel") {
  const auto& prog = support::reverse().prog;
  Gen g(kSeed + 4);
  const std::vector<std::string> fns = {"rev", "snoc", "is_asorted", "is_dsorted", "hd", "leq_all"};
  for (int i = 0; i < kCases; ++i) {
    const std::string& fn = g.pick(fns);
    const auto* f = prog.find(fn);
    std::vector<mf::Value> args;
    for (const auto& p : f->params) {
      if (p.type == mf::Type::list()) {
        std::vector<std::int64_t> v(g.below(6));
        for (auto& x : v) x = g.in(-3, 3);
        args.push_back(mf::Value::of_list(v));
      } else {
        args.push_back(mf::Value::integer(g.in(-3, 3)));
      }
    }
    mf::EvalOptions o;
    o.fuel = static_cast<std::uint64_t>(g.in(1, 30));
    auto a = mf::eval(prog, fn, args, o);
    auto b = mf::eval(prog, fn, args, o);
    CHECK(a.diverged == b.diverged);
    if (!a.diverged) CHECK(a.value == b.value);
    mf::EvalOptions more = o;
    more.fuel += static_cast<std::uint64_t>(g.in(1, 50));
    auto c = mf::eval(prog, fn, args, more);
    if (!a.diverged) {
      CHECK_FALSE(c.diverged);
      CHECK(c.value == a.value);
    }
    if (o.fuel > 1) {
      mf::EvalOptions less = o;
      less.fuel = static_cast<std::uint64_t>(g.in(1, static_cast<std::int64_t>(o.fuel) - 1));
      if (a.diverged) CHECK(mf::eval(prog, fn, args, less).diverged);
    }
  }
}
