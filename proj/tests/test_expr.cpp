#include <doctest.h>

#include <cmath>

#include "cmc/errors.hpp"
#include "cmc/expr.hpp"
#include "oracles.hpp"

using cmc::expr::Expr;

TEST_CASE("operator precedence and associativity") {
  CHECK(Expr::parse("1+2*3").eval(0, 0) == 7.0);
  CHECK(Expr::parse("(1+2)*3").eval(0, 0) == 9.0);
  CHECK(Expr::parse("2^3^2").eval(0, 0) == 512.0);
  CHECK(Expr::parse("-2^2").eval(0, 0) == -4.0);
  CHECK(Expr::parse("2*-3").eval(0, 0) == -6.0);
  CHECK(Expr::parse("8/4/2").eval(0, 0) == 1.0);
  CHECK(Expr::parse("8-4-2").eval(0, 0) == 2.0);
  CHECK(Expr::parse("t - x").eval(3.0, 1.0) == 2.0);
  CHECK(Expr::parse("pi").eval(0, 0) == doctest::Approx(M_PI));
  CHECK(Expr::parse("e").eval(0, 0) == doctest::Approx(std::exp(1.0)));
  CHECK(Expr::parse("2e-3").eval(0, 0) == doctest::Approx(2e-3));
}

TEST_CASE("parse errors report the offending offset") {
  auto offset_of = [](const char* src) -> long {
    try {
      (void)Expr::parse(src);
    } catch (const cmc::ParseError& e) {
      return static_cast<long>(e.offset());
    }
    return -1;
  };
  CHECK(offset_of("sin(x") == 5);
  CHECK(offset_of("1+") == 2);
  CHECK(offset_of("") == 0);
  CHECK(offset_of("t x") == 2);
  CHECK(offset_of("foo(t)") >= 0);
  CHECK(offset_of("sin(t") == 5);
}

TEST_CASE("evaluation outside the domain raises EvalError") {
  CHECK_THROWS_AS(Expr::parse("log(t)").eval(-1.0, 0.0), cmc::EvalError);
  CHECK_THROWS_AS(Expr::parse("1/(t-1)").eval(1.0, 0.0), cmc::EvalError);
  CHECK_THROWS_AS(Expr::parse("sqrt(x)").eval(0.0, -1.0), cmc::EvalError);
  CHECK_THROWS_AS(Expr::parse("(t-2)^0.5").eval(0.0, 0.0), cmc::EvalError);
  CHECK(Expr::parse("(t-2)^2").eval(0.0, 0.0) == 4.0);
}

TEST_CASE("random expressions round-trip through to_string") {
  oracle::ExprGenerator gen(20240601);
  for (int i = 0; i < 1000; ++i) {
    const std::string src = gen();
    CAPTURE(src);
    const Expr a = Expr::parse(src);
    const Expr b = Expr::parse(a.to_string());
    REQUIRE(b.to_string() == a.to_string());
    for (double t : {-0.7, 0.1, 0.9})
      for (double x : {-0.3, 0.6}) {
        const double va = a.eval(t, x), vb = b.eval(t, x);
        REQUIRE(va == vb);
      }
  }
}

TEST_CASE("jet derivatives agree with finite differences") {
  oracle::ExprGenerator gen(77);
  const double h1 = 1e-5, h2 = 1e-3;
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const std::string src = gen();
    CAPTURE(src);
    const Expr e = Expr::parse(src);
    const double t = -0.6 + 1.2 * (i % 7) / 6.0, x = 0.5 - (i % 5) * 0.2;
    const cmc::Jet2 j = e.eval_jet(t, x);
    auto f = [&](double dt, double dx) { return e.eval(t + dt, x + dx); };
    const double scale = std::max(1.0, std::abs(j.value));
    REQUIRE(j.value == doctest::Approx(e.eval(t, x)));
    const double ft = (f(h1, 0) - f(-h1, 0)) / (2 * h1);
    const double fx = (f(0, h1) - f(0, -h1)) / (2 * h1);
    // fourth-order second differences
    auto d2 = [&](double ax, double ay) {
      return (-f(2 * h2 * ax, 2 * h2 * ay) + 16 * f(h2 * ax, h2 * ay) - 30 * f(0, 0) + 16 * f(-h2 * ax, -h2 * ay) -
              f(-2 * h2 * ax, -2 * h2 * ay)) /
             (12 * h2 * h2);
    };
    const double ftt = d2(1, 0), fxx = d2(0, 1);
    auto mixed = [&](double a) { return (f(a, a) - f(a, -a) - f(-a, a) + f(-a, -a)) / (4 * a * a); };
    const double ftx = (4 * mixed(h2 / 2) - mixed(h2)) / 3;  // Richardson, fourth order
    const double hscale = std::max(scale, j.hess.cwiseAbs().maxCoeff());
    worst = std::max({worst, std::abs(j.d(0) - ft) / scale, std::abs(j.d(1) - fx) / scale,
                      std::abs(j.d(0, 0) - ftt) / hscale, std::abs(j.d(1, 1) - fxx) / hscale,
                      std::abs(j.d(0, 1) - ftx) / hscale, std::abs(j.d(1, 0) - j.d(0, 1))});
  }
  MESSAGE("max relative jet/FD deviation " << worst);
  CHECK(worst <= 1e-5);
}

TEST_CASE("constant subtrees are flagged") {
  CHECK(Expr::parse("2*pi + 1").root().constant);
  CHECK_FALSE(Expr::parse("2*t").root().constant);
}
