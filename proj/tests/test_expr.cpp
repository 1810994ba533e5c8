#include <doctest.h>

#include <cmath>
#include <random>

#include "heis/expr.hpp"

using namespace heis;
using namespace heis::expr;

namespace {

ErrorKind kind_of(std::string_view src, const Bindings& b = {}) {
  try {
    eval(parse(src), b);
  } catch (const ExprError& e) {
    return e.kind();
  }
  FAIL("no error raised for " << src);
  return ErrorKind::domain_error;
}

std::size_t offset_of(std::string_view src) {
  try {
    parse(src);
  } catch (const ExprError& e) {
    return e.position();
  }
  FAIL("no error raised for " << src);
  return 0;
}

}  // namespace

TEST_CASE("tokenizer") {
  const auto toks = tokenize("sqrt(R^2 - r^2)");
  REQUIRE(toks.size() == 10);
  CHECK(toks[0].kind == TokenKind::identifier);
  CHECK(toks[1].kind == TokenKind::lparen);
  CHECK(toks[9].kind == TokenKind::rparen);
  CHECK(toks[5].text == "-");
  CHECK(toks[5].position == 9);
  const auto nums = tokenize("1.5e-3 .25 2E+2");
  REQUIRE(nums.size() == 3);
  CHECK(nums[1].text == ".25");
}

TEST_CASE("lexical and syntax errors carry offsets") {
  try {
    tokenize("2..3");
    FAIL("expected error");
  } catch (const ExprError& e) {
    CHECK(e.kind() == ErrorKind::malformed_number);
    CHECK(e.position() == 1);
  }
  try {
    tokenize("r # 2");
    FAIL("expected error");
  } catch (const ExprError& e) {
    CHECK(e.kind() == ErrorKind::illegal_character);
    CHECK(e.position() == 2);
  }
  CHECK(offset_of("(r + 1") == 0);
  CHECK(offset_of("r + ") == 4);
  CHECK(kind_of("foo(1)") == ErrorKind::unknown_function);
  CHECK(kind_of("pow(1)") == ErrorKind::arity_mismatch);
  CHECK(kind_of("sqrt(1, 2)") == ErrorKind::arity_mismatch);
  CHECK(kind_of("r + 1") == ErrorKind::unbound_variable);
  CHECK(kind_of("(1))") == ErrorKind::unbalanced_paren);
}

TEST_CASE("precedence and associativity") {
  const Bindings none;
  CHECK(eval(parse("1 + 2 * 3"), none) == 7.0);
  CHECK(eval(parse("2 ^ 3 ^ 2"), none) == 512.0);
  CHECK(eval(parse("-2 ^ 2"), none) == -4.0);
  CHECK(eval(parse("2 ^ -1"), none) == 0.5);
  CHECK(eval(parse("8 / 4 / 2"), none) == 1.0);
  CHECK(eval(parse("10 - 4 - 3"), none) == 3.0);
  CHECK(eval(parse("pow(2, 10)"), none) == 1024.0);
  CHECK(eval(parse("ln(exp(1.5))"), none) == doctest::Approx(1.5));
}

TEST_CASE("domain errors") {
  CHECK(kind_of("sqrt(-1)") == ErrorKind::domain_error);
  CHECK(kind_of("ln(0)") == ErrorKind::domain_error);
  CHECK(kind_of("1 / 0") == ErrorKind::domain_error);
  CHECK(kind_of("(-2) ^ 0.5") == ErrorKind::domain_error);
  CHECK(kind_of("acos(2)") == ErrorKind::domain_error);
  const Bindings none;
  CHECK(eval(parse("(-2) ^ 3"), none) == -8.0);
  CHECK(eval(parse("sqrt(-1e-13)"), none) == 0.0);
}

TEST_CASE("printing round-trips") {
  for (const char* src : {"sqrt(R^2 - r^2)", "-r^2 + 3*sin(r)/2", "pow(r, 3) - abs(-r)", "2^3^r", "-(-(r))"}) {
    const Ast a = parse(src);
    const Ast b = parse(to_string(a));
    CHECK(structurally_equal(a, b));
    CHECK(to_string(a) == to_string(b));
  }
  const auto vars = free_variables(parse("r + R*r - lambda"));
  CHECK(vars.size() == 3);
  CHECK(vars.at("R") == 4);
}

TEST_CASE("compiled expressions agree with the tree evaluator") {
  const char* src = "lambda*r*sqrt(1 - lambda^2*r^2) + acos(lambda*r)";
  const Expression e = Expression::compile(src, {"r", "lambda"});
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 0.99);
  for (int i = 0; i < 100; ++i) {
    const double r = u(rng);
    const double values[2] = {r, 1.0};
    const Bindings b{{"r", r}, {"lambda", 1.0}};
    CHECK(e.eval(values) == eval(parse(src), b));
    CHECK(e.eval_dual(0, values).deriv == eval_dual(parse(src), "r", b).deriv);
  }
  try {
    Expression::compile("sqrt(q)", {"r"});
    FAIL("expected error");
  } catch (const ExprError& err) {
    CHECK(err.kind() == ErrorKind::unbound_variable);
    CHECK(err.position() == 5);
  }
}

TEST_CASE("dual-number derivatives match central differences") {
  const char* exprs[] = {"sqrt(1 + r^2)", "sin(r)*cos(2*r)", "exp(-r^2)/(1 + r)", "ln(2 + r)^3",
                         "acos(r/2)", "pow(r, 2.5)", "abs(r - 0.3)*r", "r^r"};
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.4, 1.5);
  for (const char* src : exprs) {
    const Expression e = Expression::compile(src, {"r"});
    for (int i = 0; i < 50; ++i) {
      const double r = u(rng);
      const double h = 1e-6;
      const double p[1] = {r + h}, m[1] = {r - h}, c[1] = {r};
      const double fd = (e.eval(p) - e.eval(m)) / (2 * h);
      const double ad = e.eval_dual(0, c).deriv;
      CHECK_MESSAGE(std::abs(ad - fd) <= 1e-6 * (1 + std::abs(ad)), src << " at r = " << r);
    }
  }
}
