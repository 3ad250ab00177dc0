#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "viab/dsl.hpp"

using namespace viab;
using namespace viab::dsl;

namespace {

double eval_str(const std::string& src, const Vec& x, double t = 0.0,
                const std::map<std::string, double>& params = {}) {
  ExprPtr e = parse(src);
  Bindings b;
  b.t = t;
  b.x = &x;
  b.params = &params;
  return eval(e, b);
}

}  // namespace

TEST_CASE("literals and variables") {
  CHECK(eval_str("3.5", {}) == 3.5);
  CHECK(eval_str("-x3", {0, 0, 2}) == -2.0);
  CHECK(eval_str("t", {}, 1.25) == 1.25);
}

TEST_CASE("functions and parameters") {
  std::map<std::string, double> params{{"beta", M_PI / 2}};
  CHECK(eval_str("sin(beta)*cos(t)", {}, 0.0, params) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("power is right associative and binds tighter than unary minus") {
  // x2^2^2 = x2^(2^2) = 2^4 = 16
  CHECK(eval_str("2*x1 + x2^2^2", {1, 2, 0}) == 18.0);
  CHECK(eval_str("-2^2", {}) == -4.0);
  ExprPtr e = parse("x1^2^3");
  CHECK(e->kind == NodeKind::Pow);
  CHECK(e->lhs->kind == NodeKind::VarX);
  CHECK(e->rhs->kind == NodeKind::Pow);
}

TEST_CASE("unary minus binds tighter than multiplication") {
  ExprPtr e = parse("-x1*3");
  CHECK(e->kind == NodeKind::Mul);
  CHECK(e->lhs->kind == NodeKind::Neg);
}

TEST_CASE("example drift component") {
  double x2 = std::sin(0.7);
  CHECK(eval_str("-0.5*x2", {0, x2, 0}) == -0.5 * x2);
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(eval_str("1/x1", {0.0}), DomainError);
  CHECK_THROWS_AS(eval_str("sqrt(-1)", {}), DomainError);
  CHECK_THROWS_AS(eval_str("exp(1e6)", {}), DomainError);
}

TEST_CASE("lex and parse errors carry byte offsets") {
  try {
    parse("1 + $");
    FAIL("expected ParseError");
  } catch (const dsl::ParseError& e) {
    CHECK(e.offset == 4);
  }
  try {
    parse("sin(1,2)");
    FAIL("expected arity ParseError");
  } catch (const dsl::ParseError& e) {
    CHECK(std::string(e.what()).find("arity") != std::string::npos);
  }
  CHECK_THROWS_AS(parse("(1+2"), dsl::ParseError);
  CHECK_THROWS_AS(parse("1 2"), dsl::ParseError);
}

TEST_CASE("validation resolves variables against declared dimensions") {
  Dims dims;
  dims.state = 3;
  dims.mark = 1;
  dims.params = {"beta"};
  CHECK_NOTHROW(validate(parse("x3 + e1 + beta"), dims));
  CHECK_THROWS_AS(validate(parse("x4"), dims), Error);
  CHECK_THROWS_AS(validate(parse("e2"), dims), Error);
  CHECK_THROWS_AS(validate(parse("gamma"), dims), Error);
}

TEST_CASE("compile_field checks dimensions and evaluates componentwise") {
  Dims dims;
  dims.state = 3;
  auto f = compile_field({"0", "-0.5*x2", "-0.5*x3"}, dims, {});
  Vec x{1.0, 2.0, 4.0};
  Vec v = f(0.0, x);
  CHECK(v == Vec{0.0, -1.0, -2.0});
  CHECK_THROWS_AS(compile_field({"x9"}, dims, {}), Error);
}

TEST_CASE("parse-print-parse fixpoint on random expressions") {
  Dims dims;
  dims.state = 3;
  dims.params = {"beta", "lambda"};
  std::mt19937_64 eng(2024);
  for (int i = 0; i < 2000; ++i) {
    ExprPtr e = viab::testing::random_expr(eng, 5, dims);
    ExprPtr again = parse(print(e));
    CHECK(structurally_equal(e, again));
    ExprPtr again2 = parse(print(again));
    CHECK(structurally_equal(again, again2));
  }
}

TEST_CASE("precedence differential test against the fully parenthesized oracle") {
  Dims dims;
  dims.state = 3;
  dims.params = {"beta"};
  std::mt19937_64 eng(77);
  std::map<std::string, double> params{{"beta", 0.7}};
  Vec x{0.3, -1.2, 2.5};
  int evaluated = 0;
  for (int i = 0; i < 2000; ++i) {
    ExprPtr e = viab::testing::random_expr(eng, 6, dims);
    ExprPtr minimal = parse(print(e));
    ExprPtr oracle = parse(print_full(e));
    REQUIRE(structurally_equal(minimal, e));
    REQUIRE(structurally_equal(oracle, e));
    Bindings b;
    b.t = 0.5;
    b.x = &x;
    b.params = &params;
    try {
      double a = eval(minimal, b);
      double c = eval(oracle, b);
      CHECK(a == c);  // bitwise: identical trees
      ++evaluated;
    } catch (const DomainError&) {
      CHECK_THROWS_AS(eval(oracle, b), DomainError);
    }
  }
  CHECK(evaluated > 500);
}
