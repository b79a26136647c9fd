#include <doctest.h>

#include "rbsde/expr.hpp"

using namespace rbsde;

TEST_CASE("expression evaluation") {
  CHECK(Expr::parse("1 + 2*3").eval(0, 0, 0) == 7.0);
  CHECK(Expr::parse("(1 + 2)*3").eval(0, 0, 0) == 9.0);
  CHECK(Expr::parse("-W").eval(0, 0, 2.5) == -2.5);
  CHECK(Expr::parse("n + t + W").eval(1, 0.5, -2.0) == -0.5);
  CHECK(Expr::parse("max(W, 0)").eval(0, 0, -3.0) == 0.0);
  CHECK(Expr::parse("max(W, 0)").eval(0, 0, 3.0) == 3.0);
  CHECK(Expr::parse("min(1, W)").eval(0, 0, 3.0) == 1.0);
  CHECK(Expr::parse("abs(-4)").eval(0, 0, 0) == 4.0);
  CHECK(Expr::parse("exp(0)").eval(0, 0, 0) == 1.0);
  CHECK(Expr::parse("W > 0").eval(0, 0, 1.0) == 1.0);
  CHECK(Expr::parse("W > 0").eval(0, 0, -1.0) == 0.0);
  CHECK(Expr::parse("(t >= 1)*2 + (t < 1)*5").eval(0, 0.5, 0) == 5.0);
  CHECK(Expr::parse("1/2").eval(0, 0, 0) == 0.5);
  CHECK(Expr::parse("2 - 3 - 4").eval(0, 0, 0) == -5.0);  // left associative
}

TEST_CASE("parse errors carry a position") {
  CHECK_THROWS_AS(Expr::parse("W +"), ScenarioParseError);
  CHECK_THROWS_AS(Expr::parse("foo"), ScenarioParseError);
  CHECK_THROWS_AS(Expr::parse("max(1)"), ScenarioParseError);
  CHECK_THROWS_AS(Expr::parse("(1 + 2"), ScenarioParseError);
  CHECK_THROWS_AS(Expr::parse("1 2"), ScenarioParseError);
  CHECK_THROWS_AS(Expr::parse("sqrt(2)"), ScenarioParseError);
  try {
    Expr::parse("W +");
  } catch (const ScenarioParseError& e) {
    CHECK(e.column >= 3);
  }
}
