#ifndef VIAB_DSL_HPP
#define VIAB_DSL_HPP

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "viab/common.hpp"

// Arithmetic expression language for coefficient fields. Grammar:
//
//   expr    := term (('+'|'-') term)*
//   term    := factor (('*'|'/') factor)*
//   factor  := '-' factor | power
//   power   := atom ('^' factor)?              -- right associative
//   atom    := number | ident | ident '(' expr ')' | '(' expr ')'
//
// with precedence ^ > unary minus > * / > + -. Identifiers are the time
// variable t, state variables x1..xm, mark variables e1..el, the functions
// sin cos exp sqrt abs, or named parameters. Parsed trees are immutable and
// shareable; evaluation is pure.

namespace viab::dsl {

class ParseError : public Error {
 public:
  ParseError(const std::string& msg, std::size_t off) : Error(msg), offset(off) {}
  std::size_t offset;
};

enum class NodeKind { Literal, VarT, VarX, VarE, Param, Neg, Add, Sub, Mul, Div, Pow, Call };
enum class Func { Sin, Cos, Exp, Sqrt, Abs };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  NodeKind kind;
  double literal = 0.0;   // Literal
  int index = 0;          // VarX / VarE, 1-based
  std::string name;       // Param
  Func func = Func::Sin;  // Call
  ExprPtr lhs, rhs;       // operands; unary nodes use lhs only
};

ExprPtr parse(const std::string& source);

// Minimal-parenthesis rendering; parse(print(e)) is structurally equal to e.
std::string print(const ExprPtr& e);
// Every subexpression parenthesized; the reference form for differential tests.
std::string print_full(const ExprPtr& e);

bool structurally_equal(const ExprPtr& a, const ExprPtr& b);

struct Dims {
  int state = 0;  // m
  int mark = 0;   // l
  std::vector<std::string> params;
};

// Checks that every variable and parameter resolves; throws Error otherwise.
void validate(const ExprPtr& e, const Dims& dims);

struct Bindings {
  double t = 0.0;
  const Vec* x = nullptr;
  const Vec* e = nullptr;
  const std::map<std::string, double>* params = nullptr;
};

double eval(const ExprPtr& expr, const Bindings& b);

// One vector-valued field from m component expressions.
struct CompiledField {
  std::vector<ExprPtr> components;
  std::map<std::string, double> params;

  Vec operator()(double t, const Vec& x) const;
  Vec operator()(double t, const Vec& x, const Vec& e) const;
};

CompiledField compile_field(const std::vector<std::string>& sources, const Dims& dims,
                            const std::map<std::string, double>& params);

}  // namespace viab::dsl

#endif  // VIAB_DSL_HPP
