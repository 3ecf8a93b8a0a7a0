#include <cctype>
#include <set>

#include "chcstr/minifun.hpp"

namespace chcstr::mf {

FrontendError::FrontendError(Kind k, const std::string& msg, int line, int col)
    : Error(line > 0 ? std::to_string(line) + ":" + std::to_string(col) + ": " + msg : msg),
      kind_(k),
      line_(line),
      col_(col) {}

std::string Type::str() const {
  switch (kind) {
    case Kind::Int:
      return "Int";
    case Kind::Bool:
      return "Bool";
    case Kind::List:
      return "List";
    case Kind::Tuple: {
      std::string s = "(";
      for (std::size_t i = 0; i < elems.size(); ++i) s += (i ? ", " : "") + elems[i].str();
      return s + ")";
    }
  }
  return "?";
}

std::vector<Sort> Type::sorts() const {
  switch (kind) {
    case Kind::Int:
      return {Sort::integer()};
    case Kind::Bool:
      return {Sort::boolean()};
    case Kind::List:
      return {Sort::list()};
    case Kind::Tuple: {
      std::vector<Sort> out;
      for (const auto& e : elems)
        for (const auto& s : e.sorts()) out.push_back(s);
      return out;
    }
  }
  return {};
}

const char* binop_text(BinOp op) {
  switch (op) {
    case BinOp::Add:
      return "+";
    case BinOp::Sub:
      return "-";
    case BinOp::Mul:
      return "*";
    case BinOp::Lt:
      return "<";
    case BinOp::Le:
      return "<=";
    case BinOp::Gt:
      return ">";
    case BinOp::Ge:
      return ">=";
    case BinOp::Eq:
      return "==";
    case BinOp::Ne:
      return "!=";
    case BinOp::And:
      return "&&";
    case BinOp::Or:
      return "||";
    case BinOp::Implies:
      return "==>";
  }
  return "?";
}

const FunctionDef* Program::find(const std::string& name) const {
  for (const auto& f : functions)
    if (f.name == name) return &f;
  return nullptr;
}

NodePtr var(const std::string& name) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Var;
  n->name = name;
  return n;
}

NodePtr int_lit(std::int64_t v) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Int;
  n->value = v;
  n->type = Type::integer();
  return n;
}

NodePtr bool_lit(bool b) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Bool;
  n->value = b;
  n->type = Type::boolean();
  return n;
}

NodePtr call(const std::string& fn, std::vector<NodePtr> args) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Call;
  n->name = fn;
  n->kids = std::move(args);
  return n;
}

NodePtr proj(NodePtr e, int index) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Proj;
  n->index = index;
  n->kids = {std::move(e)};
  return n;
}

NodePtr not_(NodePtr e) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Not;
  n->kids = {std::move(e)};
  return n;
}

NodePtr bin(BinOp op, NodePtr a, NodePtr b) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Bin;
  n->op = op;
  n->kids = {std::move(a), std::move(b)};
  return n;
}

NodePtr forall(const std::string& binder, Type t, NodePtr body) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Forall;
  n->name = binder;
  n->binder_type = std::move(t);
  n->kids = {std::move(body)};
  return n;
}

namespace {

using EK = FrontendError::Kind;

enum class Tok { Ident, Int, Sym, End };

struct Token {
  Tok kind;
  std::string text;
  std::int64_t value = 0;
  std::size_t begin = 0;
  std::size_t end = 0;
  int line = 1;
  int col = 1;
};

std::vector<Token> lex(const std::string& src) {
  static const char* kSyms[] = {"==>", "=>", "==", "!=", "<=", ">=", "&&", "||", "<", ">", "!", "+", "-",
                                "*",   "(",  ")",  "{",  "}",  "[",  "]",  ",",  ":", "=", "."};
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  bool line_start = true;
  while (i < src.size()) {
    char c = src[i];
    if (c == '\n') line_start = true;
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (src.compare(i, 2, "//") == 0) {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (src.compare(i, 2, "/*") == 0) {
      int l0 = line, c0 = col;
      auto end = src.find("*/", i + 2);
      if (end == std::string::npos) throw FrontendError(EK::Syntax, "unterminated comment", l0, c0);
      advance(end + 2 - i);
      continue;
    }
    if (line_start && src.compare(i, 6, "import") == 0 &&
        (i + 6 >= src.size() || !std::isalnum(static_cast<unsigned char>(src[i + 6])))) {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    line_start = false;
    Token t;
    t.line = line;
    t.col = col;
    t.begin = i;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      t.kind = Tok::Ident;
      t.text = src.substr(i, j - i);
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      t.kind = Tok::Int;
      t.text = src.substr(i, j - i);
      try {
        t.value = std::stoll(t.text);
      } catch (const std::exception&) {
        throw FrontendError(EK::Syntax, "integer literal out of range", line, col);
      }
      advance(j - i);
    } else {
      bool matched = false;
      for (const char* s : kSyms) {
        std::size_t n = std::char_traits<char>::length(s);
        if (src.compare(i, n, s) == 0) {
          t.kind = Tok::Sym;
          t.text = s;
          advance(n);
          matched = true;
          break;
        }
      }
      if (!matched) throw FrontendError(EK::Syntax, std::string("unexpected character '") + c + "'", line, col);
    }
    t.end = i;
    out.push_back(std::move(t));
  }
  Token end;
  end.kind = Tok::End;
  end.begin = end.end = src.size();
  end.line = line;
  end.col = col;
  out.push_back(end);
  return out;
}

const std::set<std::string> kKeywords = {"def",  "object", "require", "ensuring", "match", "case",
                                         "if",   "else",   "true",    "false",    "forall"};

class Parser {
 public:
  explicit Parser(const std::string& text) : toks_(lex(text)) {}

  Program program(const std::string& text) {
    Program p;
    p.source = text;
    bool wrapped = false;
    if (is_ident("object")) {
      next();
      ident("object name");
      expect("{");
      wrapped = true;
    }
    while (is_ident("def")) p.functions.push_back(def());
    if (wrapped) expect("}");
    if (peek().kind != Tok::End) fail("expected 'def'");
    return p;
  }

  NodePtr standalone() {
    NodePtr e = expr();
    if (peek().kind != Tok::End) fail("trailing input");
    return e;
  }

 private:
  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  const Token& prev() const { return toks_[pos_ ? pos_ - 1 : 0]; }
  bool is_sym(const char* s, std::size_t k = 0) const { return peek(k).kind == Tok::Sym && peek(k).text == s; }
  bool is_ident(const char* s) const { return peek().kind == Tok::Ident && peek().text == s; }
  [[noreturn]] void fail(const std::string& msg) const {
    throw FrontendError(EK::Syntax,
                        msg + (peek().kind == Tok::End ? " at end of input" : " near '" + peek().text + "'"),
                        peek().line, peek().col);
  }
  void expect(const char* s) {
    if (!is_sym(s)) fail(std::string("expected '") + s + "'");
    next();
  }
  std::string ident(const char* what) {
    if (peek().kind != Tok::Ident || kKeywords.count(peek().text)) fail(std::string("expected ") + what);
    return next().text;
  }

  Type type() {
    if (is_sym("(")) {
      next();
      std::vector<Type> elems{type()};
      while (is_sym(",")) {
        next();
        elems.push_back(type());
      }
      expect(")");
      if (elems.size() == 1) return elems[0];
      return Type::tuple(std::move(elems));
    }
    std::string n = ident("a type");
    if (n == "Int" || n == "BigInt") return Type::integer();
    if (n == "Bool" || n == "Boolean") return Type::boolean();
    if (n == "List") {
      if (is_sym("[")) {
        next();
        Type e = type();
        if (e.kind != Type::Kind::Int) fail("only lists of integers are supported");
        expect("]");
      }
      return Type::list();
    }
    throw FrontendError(EK::Type, "unknown type '" + n + "'", prev().line, prev().col);
  }

  FunctionDef def() {
    FunctionDef f;
    const Token& start = next();  // def
    f.span.begin = start.begin;
    f.span.line = start.line;
    f.span.col = start.col;
    f.name = ident("function name");
    expect("(");
    if (!is_sym(")")) {
      while (true) {
        Param p;
        p.name = ident("parameter name");
        expect(":");
        p.type = type();
        f.params.push_back(std::move(p));
        if (!is_sym(",")) break;
        next();
      }
    }
    expect(")");
    expect(":");
    f.ret = type();
    expect("=");
    if (is_sym("{")) {
      next();
      if (is_ident("require")) {
        next();
        expect("(");
        f.contract.pre = expr();
        expect(")");
      }
      f.body = expr();
      expect("}");
    } else {
      f.body = expr();
    }
    f.body_end = prev().end;
    if (is_ident("ensuring")) {
      const Token& e = next();
      f.ensuring.begin = e.begin;
      f.ensuring.line = e.line;
      f.ensuring.col = e.col;
      expect("{");
      f.contract.binder = ident("result binder");
      expect("=>");
      f.contract.post = expr();
      expect("}");
      f.ensuring.end = prev().end;
    }
    f.span.end = prev().end;
    return f;
  }

  NodePtr mk(Node::Kind k, const Token& at) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->span.begin = at.begin;
    n->span.line = at.line;
    n->span.col = at.col;
    return n;
  }
  NodePtr finish(NodePtr n) {
    n->span.end = prev().end;
    return n;
  }

  NodePtr expr() {
    const Token& start = peek();
    NodePtr e = impl();
    if (is_ident("match")) {
      next();
      auto m = mk(Node::Kind::Match, start);
      m->kids.push_back(e);
      expect("{");
      while (is_ident("case")) {
        next();
        Case c;
        const Token& pt = peek();
        std::string p = peek().kind == Tok::Ident ? next().text : "";
        if (p == "Nil") {
          c.pat = Case::Pat::Nil;
          skip_type_args();
          expect("(");
          expect(")");
        } else if (p == "Cons") {
          c.pat = Case::Pat::Cons;
          skip_type_args();
          expect("(");
          c.head = binder();
          expect(",");
          c.tail = binder();
          expect(")");
        } else if (p == "_") {
          c.pat = Case::Pat::Wild;
        } else {
          throw FrontendError(EK::Syntax, "unsupported pattern", pt.line, pt.col);
        }
        expect("=>");
        c.body = expr();
        m->cases.push_back(std::move(c));
      }
      expect("}");
      return finish(m);
    }
    return e;
  }

  std::string binder() {
    if (peek().kind == Tok::Ident && peek().text == "_") {
      next();
      return "_";
    }
    return ident("pattern variable");
  }

  void skip_type_args() {
    if (is_sym("[")) {
      next();
      type();
      expect("]");
    }
  }

  NodePtr binary(NodePtr a, BinOp op, NodePtr b) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Bin;
    n->op = op;
    n->span = a->span;
    n->span.end = b->span.end;
    n->kids = {std::move(a), std::move(b)};
    return n;
  }

  NodePtr impl() {
    NodePtr a = disj();
    if (is_sym("==>")) {
      next();
      return binary(a, BinOp::Implies, impl());
    }
    return a;
  }
  NodePtr disj() {
    NodePtr a = conj();
    while (is_sym("||")) {
      next();
      a = binary(a, BinOp::Or, conj());
    }
    return a;
  }
  NodePtr conj() {
    NodePtr a = eq();
    while (is_sym("&&")) {
      next();
      a = binary(a, BinOp::And, eq());
    }
    return a;
  }
  NodePtr eq() {
    NodePtr a = rel();
    if (is_sym("==") || is_sym("!=")) {
      BinOp op = next().text == "==" ? BinOp::Eq : BinOp::Ne;
      return binary(a, op, rel());
    }
    return a;
  }
  NodePtr rel() {
    NodePtr a = add();
    static const std::pair<const char*, BinOp> kOps[] = {
        {"<", BinOp::Lt}, {"<=", BinOp::Le}, {">", BinOp::Gt}, {">=", BinOp::Ge}};
    for (const auto& [s, op] : kOps) {
      if (is_sym(s)) {
        next();
        return binary(a, op, add());
      }
    }
    return a;
  }
  NodePtr add() {
    NodePtr a = mul();
    while (is_sym("+") || is_sym("-")) {
      BinOp op = next().text == "+" ? BinOp::Add : BinOp::Sub;
      a = binary(a, op, mul());
    }
    return a;
  }
  NodePtr mul() {
    NodePtr a = unary();
    while (is_sym("*")) {
      next();
      a = binary(a, BinOp::Mul, unary());
    }
    return a;
  }
  NodePtr unary() {
    if (is_sym("!") || is_sym("-")) {
      const Token& t = next();
      if (t.text == "-" && peek().kind == Tok::Int) {
        auto n = mk(Node::Kind::Int, t);
        n->value = -next().value;
        return finish(n);
      }
      auto n = mk(t.text == "!" ? Node::Kind::Not : Node::Kind::Neg, t);
      n->kids.push_back(unary());
      return finish(n);
    }
    return postfix();
  }
  NodePtr postfix() {
    const Token& start = peek();
    NodePtr e = primary();
    while (is_sym(".")) {
      next();
      const Token& t = next();
      if (t.kind != Tok::Ident || t.text.size() < 2 || t.text[0] != '_') fail("expected a tuple projection");
      int idx = 0;
      try {
        idx = std::stoi(t.text.substr(1));
      } catch (const std::exception&) {
        fail("expected a tuple projection");
      }
      auto p = mk(Node::Kind::Proj, start);
      p->index = idx;
      p->kids.push_back(e);
      e = finish(p);
    }
    return e;
  }

  std::vector<NodePtr> args() {
    std::vector<NodePtr> out;
    expect("(");
    if (!is_sym(")")) {
      while (true) {
        out.push_back(expr());
        if (!is_sym(",")) break;
        next();
      }
    }
    expect(")");
    return out;
  }

  NodePtr primary() {
    const Token& t = peek();
    if (t.kind == Tok::Int) {
      next();
      auto n = mk(Node::Kind::Int, t);
      n->value = t.value;
      return finish(n);
    }
    if (is_sym("(")) {
      next();
      std::vector<NodePtr> elems{expr()};
      while (is_sym(",")) {
        next();
        elems.push_back(expr());
      }
      expect(")");
      if (elems.size() == 1) return elems[0];
      auto n = mk(Node::Kind::Tuple, t);
      n->kids = std::move(elems);
      return finish(n);
    }
    if (is_sym("{")) {
      next();
      NodePtr e = expr();
      expect("}");
      return e;
    }
    if (t.kind != Tok::Ident) fail("expected an expression");
    if (t.text == "true" || t.text == "false") {
      next();
      auto n = mk(Node::Kind::Bool, t);
      n->value = t.text == "true";
      return finish(n);
    }
    if (t.text == "if") {
      next();
      auto n = mk(Node::Kind::If, t);
      expect("(");
      n->kids.push_back(expr());
      expect(")");
      n->kids.push_back(expr());
      if (!is_ident("else")) fail("expected 'else'");
      next();
      n->kids.push_back(expr());
      return finish(n);
    }
    if (t.text == "forall") {
      next();
      auto n = mk(Node::Kind::Forall, t);
      expect("(");
      expect("(");
      n->name = ident("quantified variable");
      expect(":");
      n->binder_type = type();
      expect(")");
      expect("=>");
      n->kids.push_back(expr());
      expect(")");
      return finish(n);
    }
    if (t.text == "BigInt" && is_sym("(", 1)) {
      next();
      expect("(");
      bool neg = false;
      if (is_sym("-")) {
        next();
        neg = true;
      }
      if (peek().kind != Tok::Int) fail("expected an integer literal");
      auto n = mk(Node::Kind::Int, t);
      n->value = neg ? -next().value : next().value;
      expect(")");
      return finish(n);
    }
    if (t.text == "Nil") {
      next();
      auto n = mk(Node::Kind::Nil, t);
      skip_type_args();
      expect("(");
      expect(")");
      return finish(n);
    }
    if (t.text == "Cons") {
      next();
      auto n = mk(Node::Kind::Cons, t);
      skip_type_args();
      n->kids = args();
      if (n->kids.size() != 2) throw FrontendError(EK::Type, "Cons expects two arguments", t.line, t.col);
      return finish(n);
    }
    std::string name = ident("an expression");
    if (is_sym("(")) {
      auto n = mk(Node::Kind::Call, t);
      n->name = name;
      n->kids = args();
      return finish(n);
    }
    auto n = mk(Node::Kind::Var, t);
    n->name = name;
    return finish(n);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Typechecking

class Checker {
 public:
  explicit Checker(const Program& p) : prog_(p) {}

  Type check(const NodePtr& n, std::map<std::string, Type>& env) {
    n->type = infer(n, env);
    return n->type;
  }

 private:
  [[noreturn]] void fail(EK k, const std::string& msg, const NodePtr& at) const {
    throw FrontendError(k, msg, at->span.line, at->span.col);
  }
  void want(const NodePtr& n, const Type& t, std::map<std::string, Type>& env, const char* what) {
    Type got = check(n, env);
    if (got != t) fail(EK::Type, std::string(what) + ": expected " + t.str() + " but found " + got.str(), n);
  }

  Type infer(const NodePtr& n, std::map<std::string, Type>& env) {
    using K = Node::Kind;
    switch (n->kind) {
      case K::Int:
        return Type::integer();
      case K::Bool:
        return Type::boolean();
      case K::Var: {
        auto it = env.find(n->name);
        if (it == env.end()) fail(EK::UnknownIdentifier, "unknown identifier '" + n->name + "'", n);
        return it->second;
      }
      case K::Nil:
        return Type::list();
      case K::Cons:
        want(n->kids[0], Type::integer(), env, "list element");
        want(n->kids[1], Type::list(), env, "list tail");
        return Type::list();
      case K::Tuple: {
        std::vector<Type> elems;
        for (const auto& k : n->kids) elems.push_back(check(k, env));
        return Type::tuple(std::move(elems));
      }
      case K::Proj: {
        Type t = check(n->kids[0], env);
        if (t.kind != Type::Kind::Tuple) fail(EK::Type, "projection on a non-tuple of type " + t.str(), n);
        if (n->index < 1 || n->index > static_cast<int>(t.elems.size()))
          fail(EK::Type, "tuple projection out of range", n);
        return t.elems[n->index - 1];
      }
      case K::Not:
        want(n->kids[0], Type::boolean(), env, "operand of '!'");
        return Type::boolean();
      case K::Neg:
        want(n->kids[0], Type::integer(), env, "operand of unary '-'");
        return Type::integer();
      case K::Bin: {
        const char* op = binop_text(n->op);
        switch (n->op) {
          case BinOp::Add:
          case BinOp::Sub:
          case BinOp::Mul:
            want(n->kids[0], Type::integer(), env, op);
            want(n->kids[1], Type::integer(), env, op);
            return Type::integer();
          case BinOp::Lt:
          case BinOp::Le:
          case BinOp::Gt:
          case BinOp::Ge:
            want(n->kids[0], Type::integer(), env, op);
            want(n->kids[1], Type::integer(), env, op);
            return Type::boolean();
          case BinOp::Eq:
          case BinOp::Ne: {
            Type a = check(n->kids[0], env);
            want(n->kids[1], a, env, op);
            return Type::boolean();
          }
          case BinOp::And:
          case BinOp::Or:
          case BinOp::Implies:
            want(n->kids[0], Type::boolean(), env, op);
            want(n->kids[1], Type::boolean(), env, op);
            return Type::boolean();
        }
        return Type::boolean();
      }
      case K::If: {
        want(n->kids[0], Type::boolean(), env, "if condition");
        Type a = check(n->kids[1], env);
        want(n->kids[2], a, env, "else branch");
        return a;
      }
      case K::Match:
        return match(n, env);
      case K::Call: {
        const FunctionDef* f = prog_.find(n->name);
        if (!f) fail(EK::UnknownIdentifier, "unknown identifier '" + n->name + "'", n);
        if (f->params.size() != n->kids.size())
          fail(EK::Type,
               "function " + n->name + " expects " + std::to_string(f->params.size()) + " arguments but got " +
                   std::to_string(n->kids.size()),
               n);
        for (std::size_t i = 0; i < n->kids.size(); ++i) want(n->kids[i], f->params[i].type, env, "argument");
        return f->ret;
      }
      case K::Forall: {
        if (!n->binder_type.is_basic()) fail(EK::Type, "quantified variables must be Int or Bool", n);
        auto saved = env;
        env[n->name] = n->binder_type;
        want(n->kids[0], Type::boolean(), env, "forall body");
        env = std::move(saved);
        return Type::boolean();
      }
    }
    return Type::integer();
  }

  Type match(const NodePtr& n, std::map<std::string, Type>& env) {
    Type s = check(n->kids[0], env);
    if (s.kind != Type::Kind::List) fail(EK::Type, "match scrutinee must be a List, found " + s.str(), n);
    bool nil = false, cons = false;
    std::optional<Type> result;
    for (const auto& c : n->cases) {
      bool covered = (c.pat == Case::Pat::Nil && nil) || (c.pat == Case::Pat::Cons && cons) ||
                     (c.pat == Case::Pat::Wild && (nil || cons)) || (nil && cons);
      if (covered) fail(EK::Overlap, "overlapping match case", c.body);
      auto saved = env;
      if (c.pat == Case::Pat::Nil) {
        nil = true;
      } else if (c.pat == Case::Pat::Cons) {
        cons = true;
        if (c.head != "_") env[c.head] = Type::integer();
        if (c.tail != "_") env[c.tail] = Type::list();
        if (c.head == c.tail && c.head != "_") fail(EK::Type, "duplicate pattern variable " + c.head, c.body);
      } else {
        nil = cons = true;
      }
      Type t = check(c.body, env);
      env = std::move(saved);
      if (result && *result != t)
        fail(EK::Type, "match cases disagree: " + result->str() + " vs " + t.str(), c.body);
      result = t;
    }
    if (!nil || !cons) fail(EK::NonExhaustive, "non-exhaustive match", n);
    return *result;
  }

  const Program& prog_;
};

}  // namespace

Program parse_program(const std::string& text) {
  Parser parser(text);
  Program p = parser.program(text);
  std::set<std::string> names;
  for (const auto& f : p.functions)
    if (!names.insert(f.name).second)
      throw FrontendError(EK::Type, "duplicate function " + f.name, f.span.line, f.span.col);
  Checker ck(p);
  for (auto& f : p.functions) {
    std::map<std::string, Type> env;
    for (const auto& prm : f.params)
      if (!env.emplace(prm.name, prm.type).second)
        throw FrontendError(EK::Type, "duplicate parameter " + prm.name, f.span.line, f.span.col);
    Type body = ck.check(f.body, env);
    if (body != f.ret)
      throw FrontendError(EK::Type, "body of " + f.name + " has type " + body.str() + " but " + f.ret.str() +
                                        " was declared",
                          f.body->span.line, f.body->span.col);
    if (f.contract.pre && ck.check(f.contract.pre, env) != Type::boolean())
      throw FrontendError(EK::Type, "precondition of " + f.name + " is not Bool", f.contract.pre->span.line,
                          f.contract.pre->span.col);
    env[f.contract.binder] = f.ret;
    if (f.contract.post && ck.check(f.contract.post, env) != Type::boolean())
      throw FrontendError(EK::Type, "postcondition of " + f.name + " is not Bool", f.contract.post->span.line,
                          f.contract.post->span.col);
  }
  return p;
}

void typecheck_formula(const Program& p, NodePtr e, const std::map<std::string, Type>& scope) {
  Checker ck(p);
  auto env = scope;
  if (ck.check(e, env) != Type::boolean()) throw FrontendError(EK::Type, "formula is not Bool");
}

NodePtr parse_expr(const std::string& text) {
  Parser parser(text);
  return parser.standalone();
}

namespace {

bool atomic(const NodePtr& e) {
  using K = Node::Kind;
  return e->kind == K::Var || e->kind == K::Int || e->kind == K::Bool || e->kind == K::Call ||
         e->kind == K::Nil || e->kind == K::Cons || e->kind == K::Tuple || e->kind == K::Forall ||
         e->kind == K::Proj || e->kind == K::Not;
}

std::string paren(const NodePtr& e) { return atomic(e) ? print_expr(e) : "(" + print_expr(e) + ")"; }

}  // namespace

std::string print_expr(const NodePtr& e) {
  using K = Node::Kind;
  switch (e->kind) {
    case K::Var:
      return e->name;
    case K::Int:
      return std::to_string(e->value);
    case K::Bool:
      return e->value ? "true" : "false";
    case K::Nil:
      return "Nil()";
    case K::Cons:
      return "Cons(" + print_expr(e->kids[0]) + ", " + print_expr(e->kids[1]) + ")";
    case K::Tuple: {
      std::string s = "(";
      for (std::size_t i = 0; i < e->kids.size(); ++i) s += (i ? ", " : "") + print_expr(e->kids[i]);
      return s + ")";
    }
    case K::Proj:
      return paren(e->kids[0]) + "._" + std::to_string(e->index);
    case K::Not: {
      K k = e->kids[0]->kind;
      bool bare = k == K::Var || k == K::Call || k == K::Bool;
      return "!" + (bare ? print_expr(e->kids[0]) : "(" + print_expr(e->kids[0]) + ")");
    }
    case K::Neg:
      return "-" + paren(e->kids[0]);
    case K::Bin:
      return paren(e->kids[0]) + " " + binop_text(e->op) + " " + paren(e->kids[1]);
    case K::If:
      return "if (" + print_expr(e->kids[0]) + ") " + paren(e->kids[1]) + " else " + paren(e->kids[2]);
    case K::Match: {
      std::string s = paren(e->kids[0]) + " match {";
      for (const auto& c : e->cases) {
        s += " case ";
        if (c.pat == Case::Pat::Nil) s += "Nil()";
        if (c.pat == Case::Pat::Cons) s += "Cons(" + c.head + ", " + c.tail + ")";
        if (c.pat == Case::Pat::Wild) s += "_";
        s += " => " + print_expr(c.body);
      }
      return s + " }";
    }
    case K::Call: {
      std::string s = e->name + "(";
      for (std::size_t i = 0; i < e->kids.size(); ++i) s += (i ? "," : "") + print_expr(e->kids[i]);
      return s + ")";
    }
    case K::Forall:
      return "forall((" + e->name + ": " + e->binder_type.str() + ") => (" + print_expr(e->kids[0]) + "))";
  }
  return "?";
}

namespace {

bool alpha(const NodePtr& a, const NodePtr& b, std::map<std::string, std::string>& ren) {
  if (a->kind != b->kind) return false;
  using K = Node::Kind;
  switch (a->kind) {
    case K::Var: {
      auto it = ren.find(a->name);
      return (it == ren.end() ? a->name : it->second) == b->name;
    }
    case K::Int:
    case K::Bool:
      return a->value == b->value;
    case K::Proj:
      if (a->index != b->index) return false;
      break;
    case K::Bin:
      if (a->op != b->op) return false;
      break;
    case K::Call:
      if (a->name != b->name) return false;
      break;
    case K::Forall: {
      if (a->binder_type != b->binder_type) return false;
      auto saved = ren;
      ren[a->name] = b->name;
      bool ok = alpha(a->kids[0], b->kids[0], ren);
      ren = std::move(saved);
      return ok;
    }
    case K::Match:
      if (a->cases.size() != b->cases.size()) return false;
      for (std::size_t i = 0; i < a->cases.size(); ++i) {
        const auto &x = a->cases[i], &y = b->cases[i];
        if (x.pat != y.pat || x.head != y.head || x.tail != y.tail || !alpha(x.body, y.body, ren)) return false;
      }
      break;
    default:
      break;
  }
  if (a->kids.size() != b->kids.size()) return false;
  for (std::size_t i = 0; i < a->kids.size(); ++i)
    if (!alpha(a->kids[i], b->kids[i], ren)) return false;
  return true;
}

}  // namespace

bool alpha_equal(const NodePtr& a, const NodePtr& b) {
  std::map<std::string, std::string> ren;
  return alpha(a, b, ren);
}

}  // namespace chcstr::mf
