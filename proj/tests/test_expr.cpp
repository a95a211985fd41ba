#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "fman/expr.hpp"
#include "oracles.hpp"
#include "random_expr.hpp"

using fman::Expr;

namespace {

const std::vector<std::string> kNames = {"x", "y", "t"};

Expr parse(const std::string& text) { return fman::parse_expr(text, kNames); }

Eigen::VectorXd at(double x, double y, double t) {
  Eigen::VectorXd p(3);
  p << x, y, t;
  return p;
}

}  // namespace

TEST_CASE("parser precedence and associativity") {
  const auto p = at(2.0, 3.0, 0.5);
  CHECK(parse("1 + 2 * 3").evaluate(p) == doctest::Approx(7.0));
  CHECK(parse("x - y - 1").evaluate(p) == doctest::Approx(-2.0));
  CHECK(parse("x / y / 2").evaluate(p) == doctest::Approx(1.0 / 3.0));
  CHECK(parse("-x^2").evaluate(p) == doctest::Approx(-4.0));
  CHECK(parse("x^-1").evaluate(p) == doctest::Approx(0.5));
  CHECK(parse("2*-x").evaluate(p) == doctest::Approx(-4.0));
  CHECK(parse("exp(2*t)").evaluate(p) == doctest::Approx(std::exp(1.0)));
  CHECK(parse("1.5e-1 * x").evaluate(p) == doctest::Approx(0.3));
  CHECK(parse("sqrt(x^2 + 5)").evaluate(p) == doctest::Approx(3.0));
}

TEST_CASE("printed form parses back to an equal tree") {
  testing_support::RandomExpr gen(7, kNames);
  for (int k = 0; k < 300; ++k) {
    const Expr e = gen(4);
    const std::string text = e.to_string();
    const Expr back = parse(text);
    CAPTURE(text);
    CHECK(back.to_string() == text);
    const auto p = gen.point();
    CHECK(back.evaluate(p) == doctest::Approx(e.evaluate(p)).epsilon(1e-12));
  }
}

TEST_CASE("parse errors carry a position") {
  for (const std::string bad : {"1 +", "(x", "x y", "sin x", "2 ** 3", "", "x)", "foo(x)"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(parse(bad), fman::ParseError);
  }
  try {
    parse("x + w");
    FAIL("expected UnknownSymbolError");
  } catch (const fman::UnknownSymbolError& e) {
    CHECK(e.symbol() == "w");
    CHECK(e.position() == 4);
  }
}

TEST_CASE("undefined values raise DomainError") {
  CHECK_THROWS_AS(parse("1/(x-x)").evaluate(at(0.3, 0, 0)), fman::DomainError);
  CHECK_THROWS_AS(parse("log(x - 3)").evaluate_jet(at(0.3, 0, 0)), fman::DomainError);
  CHECK_THROWS_AS(parse("sqrt(-1 - y^2)").evaluate(at(0, 0.5, 0)), fman::DomainError);
}

TEST_CASE("jet of exp(2t)") {
  const auto j = parse("exp(2*t)").evaluate_jet(at(0.1, 0.2, 0.25));
  const double v = std::exp(0.5);
  CHECK(j.value == doctest::Approx(v));
  CHECK(j.gradient(2) == doctest::Approx(2 * v));
  CHECK(j.gradient(0) == 0.0);
  CHECK(j.hessian(2, 2) == doctest::Approx(4 * v));
  CHECK(j.hessian(0, 2) == 0.0);
}

TEST_CASE("jets are linear") {
  testing_support::RandomExpr gen(11, kNames);
  for (int k = 0; k < 100; ++k) {
    const Expr a = gen(3), b = gen(3);
    const auto p = gen.point();
    const auto ja = a.evaluate_jet(p), jb = b.evaluate_jet(p);
    const auto jc = (Expr(2.5) * a - b).evaluate_jet(p);
    CHECK((jc.gradient - (2.5 * ja.gradient - jb.gradient)).norm() <= 1e-12 * (1 + jc.gradient.norm()));
    CHECK((jc.hessian - (2.5 * ja.hessian - jb.hessian)).norm() <= 1e-12 * (1 + jc.hessian.norm()));
  }
}

TEST_CASE("derivatives agree with central finite differences on 1000 random pairs") {
  testing_support::RandomExpr gen(2024, kNames);
  int checked = 0;
  for (int k = 0; k < 1000; ++k) {
    const Expr e = gen(4);
    const auto p = gen.point();
    const auto jet = e.evaluate_jet(p);
    const Eigen::VectorXd g = oracle::fd_gradient(e, p, 1e-5);
    const Eigen::MatrixXd H = oracle::fd_hessian(e, p, 1e-4);
    CAPTURE(e.to_string());
    CHECK(jet.value == doctest::Approx(e.evaluate(p)).epsilon(1e-14));
    CHECK((jet.gradient - g).cwiseAbs().maxCoeff() <= 1e-5 * (1 + g.cwiseAbs().maxCoeff()));
    CHECK((jet.hessian - H).cwiseAbs().maxCoeff() <= 1e-3 * (1 + H.cwiseAbs().maxCoeff()));
    CHECK((jet.hessian - jet.hessian.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * (1 + jet.hessian.norm()));
    ++checked;
  }
  CHECK(checked == 1000);
}

TEST_CASE("rebind follows coordinate names") {
  const Expr e = parse("x*t");
  const std::vector<std::string> other = {"t", "x"};
  Eigen::VectorXd q(2);
  q << 3.0, 5.0;
  CHECK(e.rebind(other).evaluate(q) == doctest::Approx(15.0));
  CHECK(e.symbols() == std::vector<std::size_t>{0, 2});
}
