#include "viab/dsl.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace viab::dsl {

namespace {

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, End };

struct Token {
  Tok kind;
  double number = 0.0;
  std::string text;
  std::size_t offset = 0;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) { advance(); }

  const Token& peek() const { return cur_; }

  Token take() {
    Token t = cur_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    cur_.offset = pos_;
    if (pos_ >= src_.size()) {
      cur_.kind = Tok::End;
      cur_.text = "<end>";
      return;
    }
    char c = src_[pos_];
    switch (c) {
      case '+': cur_ = {Tok::Plus, 0, "+", pos_++}; return;
      case '-': cur_ = {Tok::Minus, 0, "-", pos_++}; return;
      case '*': cur_ = {Tok::Star, 0, "*", pos_++}; return;
      case '/': cur_ = {Tok::Slash, 0, "/", pos_++}; return;
      case '^': cur_ = {Tok::Caret, 0, "^", pos_++}; return;
      case '(': cur_ = {Tok::LParen, 0, "(", pos_++}; return;
      case ')': cur_ = {Tok::RParen, 0, ")", pos_++}; return;
      case ',': cur_ = {Tok::Comma, 0, ",", pos_++}; return;
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = src_.c_str() + pos_;
      char* end = nullptr;
      double v = std::strtod(begin, &end);
      if (end == begin)
        throw ParseError("lex error at offset " + std::to_string(pos_) + ": bad number", pos_);
      cur_ = {Tok::Number, v, std::string(begin, static_cast<std::size_t>(end - begin)), pos_};
      pos_ += static_cast<std::size_t>(end - begin);
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        ++pos_;
      cur_ = {Tok::Ident, 0, src_.substr(start, pos_ - start), start};
      return;
    }
    throw ParseError("lex error at offset " + std::to_string(pos_) + ": unexpected character '" +
                         std::string(1, c) + "'",
                     pos_);
  }

  const std::string& src_;
  std::size_t pos_ = 0;
  Token cur_;
};

ExprPtr make(Expr e) { return std::make_shared<const Expr>(std::move(e)); }

bool lookup_func(const std::string& name, Func* out) {
  if (name == "sin") { *out = Func::Sin; return true; }
  if (name == "cos") { *out = Func::Cos; return true; }
  if (name == "exp") { *out = Func::Exp; return true; }
  if (name == "sqrt") { *out = Func::Sqrt; return true; }
  if (name == "abs") { *out = Func::Abs; return true; }
  return false;
}

const char* func_name(Func f) {
  switch (f) {
    case Func::Sin: return "sin";
    case Func::Cos: return "cos";
    case Func::Exp: return "exp";
    case Func::Sqrt: return "sqrt";
    case Func::Abs: return "abs";
  }
  return "?";
}

// Parses "x12" / "e3" style variable names: prefix + positive integer.
bool indexed_var(const std::string& name, char prefix, int* index) {
  if (name.size() < 2 || name[0] != prefix) return false;
  for (std::size_t i = 1; i < name.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(name[i]))) return false;
  *index = std::atoi(name.c_str() + 1);
  return *index >= 1;
}

class Parser {
 public:
  explicit Parser(const std::string& src) : lex_(src) {}

  ExprPtr run() {
    ExprPtr e = parse_expr(0);
    const Token& t = lex_.peek();
    if (t.kind != Tok::End)
      throw ParseError("parse error at offset " + std::to_string(t.offset) +
                           ": unexpected token '" + t.text + "'",
                       t.offset);
    return e;
  }

 private:
  // Pratt loop. Binding powers: '+'/'-' 10/11, '*'/'/' 20/21, unary '-' 25,
  // '^' 30/29 (right associative).
  ExprPtr parse_expr(int min_bp) {
    ExprPtr lhs = parse_prefix();
    for (;;) {
      const Token& t = lex_.peek();
      NodeKind kind;
      int lbp, rbp;
      switch (t.kind) {
        case Tok::Plus: kind = NodeKind::Add; lbp = 10; rbp = 11; break;
        case Tok::Minus: kind = NodeKind::Sub; lbp = 10; rbp = 11; break;
        case Tok::Star: kind = NodeKind::Mul; lbp = 20; rbp = 21; break;
        case Tok::Slash: kind = NodeKind::Div; lbp = 20; rbp = 21; break;
        case Tok::Caret: kind = NodeKind::Pow; lbp = 30; rbp = 29; break;
        default: return lhs;
      }
      if (lbp < min_bp) return lhs;
      lex_.take();
      ExprPtr rhs = parse_expr(rbp);
      Expr e;
      e.kind = kind;
      e.lhs = lhs;
      e.rhs = rhs;
      lhs = make(std::move(e));
    }
  }

  ExprPtr parse_prefix() {
    const Token t = lex_.take();
    switch (t.kind) {
      case Tok::Number: {
        Expr e;
        e.kind = NodeKind::Literal;
        e.literal = t.number;
        return make(std::move(e));
      }
      case Tok::Minus: {
        Expr e;
        e.kind = NodeKind::Neg;
        e.lhs = parse_expr(25);
        return make(std::move(e));
      }
      case Tok::LParen: {
        ExprPtr inner = parse_expr(0);
        expect(Tok::RParen, ")");
        return inner;
      }
      case Tok::Ident: {
        Func f;
        if (lookup_func(t.text, &f)) {
          expect(Tok::LParen, "(");
          ExprPtr arg = parse_expr(0);
          if (lex_.peek().kind == Tok::Comma)
            throw ParseError("arity error at offset " + std::to_string(lex_.peek().offset) + ": " +
                                 t.text + " takes one argument",
                             lex_.peek().offset);
          expect(Tok::RParen, ")");
          Expr e;
          e.kind = NodeKind::Call;
          e.func = f;
          e.lhs = arg;
          return make(std::move(e));
        }
        Expr e;
        int idx = 0;
        if (t.text == "t") {
          e.kind = NodeKind::VarT;
        } else if (indexed_var(t.text, 'x', &idx)) {
          e.kind = NodeKind::VarX;
          e.index = idx;
        } else if (indexed_var(t.text, 'e', &idx)) {
          e.kind = NodeKind::VarE;
          e.index = idx;
        } else {
          e.kind = NodeKind::Param;
          e.name = t.text;
        }
        return make(std::move(e));
      }
      default:
        throw ParseError("parse error at offset " + std::to_string(t.offset) +
                             ": unexpected token '" + t.text + "'",
                         t.offset);
    }
  }

  void expect(Tok kind, const char* what) {
    const Token& t = lex_.peek();
    if (t.kind != kind)
      throw ParseError("parse error at offset " + std::to_string(t.offset) + ": expected '" +
                           what + "', got '" + t.text + "'",
                       t.offset);
    lex_.take();
  }

  Lexer lex_;
};

int precedence(NodeKind k) {
  switch (k) {
    case NodeKind::Add:
    case NodeKind::Sub: return 10;
    case NodeKind::Mul:
    case NodeKind::Div: return 20;
    case NodeKind::Neg: return 25;
    case NodeKind::Pow: return 30;
    default: return 100;  // atoms
  }
}

void render_literal(std::ostream& os, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  os << buf;
}

void print_rec(std::ostream& os, const ExprPtr& e, int parent_bp, bool right_side) {
  int bp = precedence(e->kind);
  // A child needs parens when it binds looser than its context, or equally
  // loose on the non-associative side.
  bool parens = false;
  if (bp < parent_bp) parens = true;
  if (bp == parent_bp && right_side && (parent_bp == 10 || parent_bp == 20)) parens = true;
  if (bp == parent_bp && !right_side && parent_bp == 30) parens = true;

  if (parens) os << '(';
  switch (e->kind) {
    case NodeKind::Literal: render_literal(os, e->literal); break;
    case NodeKind::VarT: os << 't'; break;
    case NodeKind::VarX: os << 'x' << e->index; break;
    case NodeKind::VarE: os << 'e' << e->index; break;
    case NodeKind::Param: os << e->name; break;
    case NodeKind::Neg:
      os << '-';
      print_rec(os, e->lhs, 25, true);
      break;
    case NodeKind::Call:
      os << func_name(e->func) << '(';
      print_rec(os, e->lhs, 0, false);
      os << ')';
      break;
    default: {
      const char* op = e->kind == NodeKind::Add   ? " + "
                       : e->kind == NodeKind::Sub ? " - "
                       : e->kind == NodeKind::Mul ? "*"
                       : e->kind == NodeKind::Div ? "/"
                                                  : "^";
      print_rec(os, e->lhs, bp, false);
      os << op;
      print_rec(os, e->rhs, bp, true);
      break;
    }
  }
  if (parens) os << ')';
}

void print_full_rec(std::ostream& os, const ExprPtr& e) {
  switch (e->kind) {
    case NodeKind::Literal: render_literal(os, e->literal); break;
    case NodeKind::VarT: os << 't'; break;
    case NodeKind::VarX: os << 'x' << e->index; break;
    case NodeKind::VarE: os << 'e' << e->index; break;
    case NodeKind::Param: os << e->name; break;
    case NodeKind::Neg:
      os << "(-";
      print_full_rec(os, e->lhs);
      os << ')';
      break;
    case NodeKind::Call:
      os << func_name(e->func) << '(';
      print_full_rec(os, e->lhs);
      os << ')';
      break;
    default: {
      const char* op = e->kind == NodeKind::Add   ? "+"
                       : e->kind == NodeKind::Sub ? "-"
                       : e->kind == NodeKind::Mul ? "*"
                       : e->kind == NodeKind::Div ? "/"
                                                  : "^";
      os << '(';
      print_full_rec(os, e->lhs);
      os << op;
      print_full_rec(os, e->rhs);
      os << ')';
      break;
    }
  }
}

}  // namespace

ExprPtr parse(const std::string& source) { return Parser(source).run(); }

std::string print(const ExprPtr& e) {
  std::ostringstream os;
  print_rec(os, e, 0, false);
  return os.str();
}

std::string print_full(const ExprPtr& e) {
  std::ostringstream os;
  print_full_rec(os, e);
  return os.str();
}

bool structurally_equal(const ExprPtr& a, const ExprPtr& b) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case NodeKind::Literal: return a->literal == b->literal;
    case NodeKind::VarT: return true;
    case NodeKind::VarX:
    case NodeKind::VarE: return a->index == b->index;
    case NodeKind::Param: return a->name == b->name;
    case NodeKind::Neg: return structurally_equal(a->lhs, b->lhs);
    case NodeKind::Call: return a->func == b->func && structurally_equal(a->lhs, b->lhs);
    default:
      return structurally_equal(a->lhs, b->lhs) && structurally_equal(a->rhs, b->rhs);
  }
}

void validate(const ExprPtr& e, const Dims& dims) {
  switch (e->kind) {
    case NodeKind::VarX:
      if (e->index > dims.state)
        throw Error("unresolved variable x" + std::to_string(e->index) + " (state dimension " +
                    std::to_string(dims.state) + ")");
      return;
    case NodeKind::VarE:
      if (e->index > dims.mark)
        throw Error("unresolved variable e" + std::to_string(e->index) + " (mark dimension " +
                    std::to_string(dims.mark) + ")");
      return;
    case NodeKind::Param: {
      for (const auto& p : dims.params)
        if (p == e->name) return;
      throw Error("unknown parameter '" + e->name + "'");
    }
    case NodeKind::Neg:
    case NodeKind::Call: validate(e->lhs, dims); return;
    case NodeKind::Add:
    case NodeKind::Sub:
    case NodeKind::Mul:
    case NodeKind::Div:
    case NodeKind::Pow:
      validate(e->lhs, dims);
      validate(e->rhs, dims);
      return;
    default: return;
  }
}

double eval(const ExprPtr& expr, const Bindings& b) {
  switch (expr->kind) {
    case NodeKind::Literal: return expr->literal;
    case NodeKind::VarT: return b.t;
    case NodeKind::VarX: return (*b.x)[expr->index - 1];
    case NodeKind::VarE: return (*b.e)[expr->index - 1];
    case NodeKind::Param: return b.params->at(expr->name);
    case NodeKind::Neg: return -eval(expr->lhs, b);
    case NodeKind::Add: return eval(expr->lhs, b) + eval(expr->rhs, b);
    case NodeKind::Sub: return eval(expr->lhs, b) - eval(expr->rhs, b);
    case NodeKind::Mul: return eval(expr->lhs, b) * eval(expr->rhs, b);
    case NodeKind::Div: {
      double den = eval(expr->rhs, b);
      if (den == 0.0) throw DomainError("division by zero");
      double v = eval(expr->lhs, b) / den;
      if (!std::isfinite(v)) throw DomainError("non-finite division result");
      return v;
    }
    case NodeKind::Pow: {
      double base = eval(expr->lhs, b);
      double ex = eval(expr->rhs, b);
      double v = std::pow(base, ex);
      if (!std::isfinite(v)) throw DomainError("non-finite power result");
      return v;
    }
    case NodeKind::Call: {
      double a = eval(expr->lhs, b);
      double v;
      switch (expr->func) {
        case Func::Sin: v = std::sin(a); break;
        case Func::Cos: v = std::cos(a); break;
        case Func::Exp: v = std::exp(a); break;
        case Func::Sqrt:
          if (a < 0.0) throw DomainError("sqrt of negative value");
          v = std::sqrt(a);
          break;
        case Func::Abs: v = std::abs(a); break;
        default: v = 0.0; break;
      }
      if (!std::isfinite(v)) throw DomainError("non-finite function result");
      return v;
    }
  }
  throw Error("corrupt expression node");
}

Vec CompiledField::operator()(double t, const Vec& x) const {
  Bindings b;
  b.t = t;
  b.x = &x;
  b.params = &params;
  Vec out(components.size());
  for (std::size_t i = 0; i < components.size(); ++i) out[i] = eval(components[i], b);
  return out;
}

Vec CompiledField::operator()(double t, const Vec& x, const Vec& e) const {
  Bindings b;
  b.t = t;
  b.x = &x;
  b.e = &e;
  b.params = &params;
  Vec out(components.size());
  for (std::size_t i = 0; i < components.size(); ++i) out[i] = eval(components[i], b);
  return out;
}

CompiledField compile_field(const std::vector<std::string>& sources, const Dims& dims,
                            const std::map<std::string, double>& params) {
  CompiledField f;
  f.params = params;
  Dims d = dims;
  for (const auto& kv : params) d.params.push_back(kv.first);
  for (const auto& src : sources) {
    ExprPtr e = parse(src);
    validate(e, d);
    f.components.push_back(std::move(e));
  }
  return f;
}

}  // namespace viab::dsl
