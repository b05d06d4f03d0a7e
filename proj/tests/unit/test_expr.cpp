#include <doctest.h>

#include <cmath>
#include <random>

#include "algebrokit/expr.hpp"

using namespace algebrokit;

namespace {
double ev(const ScalarField& f, std::initializer_list<double> p) {
  std::vector<double> v(p);
  return f.eval(v);
}
}  // namespace

TEST_CASE("parse and evaluate basic arithmetic") {
  auto f = parse_expr("x1*x2 + 3", {"x1", "x2"});
  CHECK(ev(f, {2, 5}) == 13.0);
  CHECK(ev(parse_expr("sin(0)", {"x1"}), {7.3}) == 0.0);
  CHECK(ev(parse_expr("x1^2", {"x1"}), {3}) == 9.0);
  CHECK(ev(parse_expr("exp(0)", {"x1"}), {42}) == 1.0);
  CHECK(ev(parse_expr("2 + 3*4", {"x1"}), {0}) == 14.0);
  CHECK(ev(parse_expr("(2 + 3)*4", {"x1"}), {0}) == 20.0);
  CHECK(ev(parse_expr("2 - 3 - 4", {"x1"}), {0}) == -5.0);   // left associative
  CHECK(ev(parse_expr("12/3/2", {"x1"}), {0}) == 2.0);
  CHECK(ev(parse_expr("-x1^2", {"x1"}), {3}) == -9.0);       // power binds tighter
  CHECK(ev(parse_expr("x1^-1", {"x1"}), {4}) == 0.25);
  CHECK(ev(parse_expr("tanh(0) + sqrt(4) + log(exp(1))", {"x1"}), {0}) ==
        doctest::Approx(3.0));
}

TEST_CASE("parse errors carry positions") {
  CHECK_THROWS_AS(parse_expr("x1 + * 2", {"x1"}), ParseError);
  try {
    parse_expr("x1 + * 2", {"x1"});
  } catch (const ParseError& e) {
    CHECK(e.position == 5);  // offset of '*'
  }
  CHECK_THROWS_AS(parse_expr("y + 1", {"x1"}), ParseError);      // undeclared variable
  CHECK_THROWS_AS(parse_expr("sin(x1, x1)", {"x1"}), ParseError);  // arity
  CHECK_THROWS_AS(parse_expr("foo(x1)", {"x1"}), ParseError);
  CHECK_THROWS_AS(parse_expr("x1^x1", {"x1"}), ParseError);  // exponent must be literal
  CHECK_THROWS_AS(parse_expr("x1 +", {"x1"}), ParseError);
  CHECK_THROWS_AS(parse_expr("1", {}), Error);  // empty variable list
}

TEST_CASE("evaluation domain errors") {
  CHECK_THROWS_AS(ev(parse_expr("1/x1", {"x1"}), {0}), EvalError);
  CHECK_THROWS_AS(ev(parse_expr("log(x1)", {"x1"}), {-1}), EvalError);
  CHECK_THROWS_AS(ev(parse_expr("log(x1)", {"x1"}), {0}), EvalError);
  CHECK_THROWS_AS(ev(parse_expr("sqrt(x1)", {"x1"}), {-4}), EvalError);
  CHECK_THROWS_AS(ev(parse_expr("x1^-2", {"x1"}), {0}), EvalError);
}

TEST_CASE("fourth-order partial derivatives") {
  auto f = parse_expr("x1^2", {"x1"});
  const double p[1] = {3.0};
  CHECK(partial(f, 0, p, 1e-3) == doctest::Approx(6.0).epsilon(1e-8));

  auto c = parse_expr("7", {"x1"});
  CHECK(partial(c, 0, p) == 0.0);

  auto s = parse_expr("sin(x1)", {"x1"});
  const double origin[1] = {0.0};
  CHECK(std::fabs(partial(s, 0, origin, 1e-3) - std::cos(0.0)) < 1e-10);
}

TEST_CASE("pretty-print round trip evaluates identically") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(-2.0, 2.0);
  const std::vector<std::string> sources = {
      "x1*x2 + 3", "-x1^2 + x2/(1 + x1^2)", "sin(x1)*cos(x2) - exp(x1/4)",
      "sqrt(x1^2 + 1) + tanh(x2)", "x1 - x2 - 1.5e-1*x1*x2"};
  for (const auto& src : sources) {
    auto f = parse_expr(src, {"x1", "x2"});
    auto g = parse_expr(f.pretty(), {"x1", "x2"});
    for (int k = 0; k < 100; ++k) {
      const double p[2] = {unit(rng), unit(rng)};
      CHECK(f.eval(p) == g.eval(p));  // tolerance 0
    }
  }
}

TEST_CASE("partial is linear on random polynomial fields") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  auto f = parse_expr("x1^3 + 2*x1*x2", {"x1", "x2"});
  auto g = parse_expr("x2^2 - x1*x2 + 1", {"x1", "x2"});
  for (int k = 0; k < 20; ++k) {
    const double a = unit(rng), b = unit(rng);
    auto combo = a * f + b * g;
    const double p[2] = {unit(rng), unit(rng)};
    for (std::size_t i = 0; i < 2; ++i) {
      const double lhs = partial(combo, i, p);
      const double rhs = a * partial(f, i, p) + b * partial(g, i, p);
      CHECK(std::fabs(lhs - rhs) < 1e-9);
    }
  }
}

TEST_CASE("stencil error decreases at fourth order") {
  auto f = parse_expr("x1^6 + sin(2*x1)", {"x1"});
  const double x = 0.7;
  const double exact = 6 * std::pow(x, 5) + 2 * std::cos(2 * x);
  const double p[1] = {x};
  const double e1 = std::fabs(partial(f, 0, p, 0.05) - exact);
  const double e2 = std::fabs(partial(f, 0, p, 0.025) - exact);
  const double e3 = std::fabs(partial(f, 0, p, 0.0125) - exact);
  const double r1 = e1 / e2, r2 = e2 / e3;
  CHECK(r1 > 10.0);
  CHECK(r1 < 22.0);
  CHECK(r2 > 10.0);
  CHECK(r2 < 22.0);
}

TEST_CASE("variable remapping and tail restriction") {
  auto rho = parse_expr("b1*b2", {"b1", "b2"});
  auto lifted = remap_variables(rho, {"b1", "b2", "al1"}, {0, 1});
  CHECK(ev(lifted, {2, 3, 99}) == 6.0);

  auto g = parse_expr("x1 + x2*x3 + x3^2", {"x1", "x2", "x3"});
  auto restricted = restrict_tail(g, 2);
  CHECK(restricted.arity() == 2);
  CHECK(ev(restricted, {5, 7}) == 5.0);

  auto d = derived_field("d", {"x1", "x2", "x3"},
                         [](std::span<const double> p) { return p[0] + p[2]; });
  auto dr = restrict_tail(d, 2);
  CHECK(ev(dr, {5, 7}) == 5.0);
}
