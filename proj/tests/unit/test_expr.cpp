#include <doctest.h>

#include "fracwell/errors.hpp"
#include "fracwell/expr.hpp"

using fracwell::Expr;

TEST_CASE("expressions evaluate in x and y") {
  CHECK(Expr("2.4 - 0.4*abs(x-y)")(0.25, 0.75) == doctest::Approx(2.2));
  CHECK(Expr("2^3^2")(0.0) == doctest::Approx(512.0));
  CHECK(Expr("-x^2")(3.0) == doctest::Approx(-9.0));
  CHECK(Expr("max(x, y) + min(x, y)")(1.0, 2.0) == doctest::Approx(3.0));
  CHECK(Expr("sin(pi*x)")(0.5) == doctest::Approx(1.0));
  CHECK(Expr("3")(0.0) == 3.0);
}

TEST_CASE("expression structure queries") {
  CHECK(Expr("1/3 + pi").is_constant());
  CHECK_FALSE(Expr("x + 1").is_constant());
  CHECK(Expr("abs(x - y)").uses_y());
  CHECK_FALSE(Expr("3 + 0.2*x").uses_y());
}

TEST_CASE("malformed expressions are config errors") {
  CHECK_THROWS_AS(Expr("2 +"), fracwell::ConfigError);
  CHECK_THROWS_AS(Expr("foo(x)"), fracwell::ConfigError);
  CHECK_THROWS_AS(Expr("(x"), fracwell::ConfigError);
  CHECK_THROWS_AS(Expr("z"), fracwell::ConfigError);
}
