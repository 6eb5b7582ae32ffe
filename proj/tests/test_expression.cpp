#include "mechorbit/errors.hpp"
#include "mechorbit/expression.hpp"
#include "mechorbit/presets.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace mechorbit;

namespace {

double eval(const char* text, std::initializer_list<double> q) {
  Vector x(static_cast<Eigen::Index>(q.size()));
  int i = 0;
  for (double v : q) x(i++) = v;
  return Expression::parse(text, static_cast<int>(x.size()))(x);
}

}  // namespace

TEST(Expression, Precedence) {
  EXPECT_DOUBLE_EQ(eval("1 + 2*3", {0}), 7.0);
  EXPECT_DOUBLE_EQ(eval("2^3^2", {0}), 512.0);
  EXPECT_DOUBLE_EQ(eval("-q1^2", {3}), -9.0);
  EXPECT_DOUBLE_EQ(eval("(1+q1)/(2)", {3}), 2.0);
  EXPECT_DOUBLE_EQ(eval("q1 - q2 - 1", {5, 2}), 2.0);
  EXPECT_DOUBLE_EQ(eval("8/4/2", {0}), 1.0);
  EXPECT_DOUBLE_EQ(eval("q1^-1", {4}), 0.25);
}

TEST(Expression, FunctionsAndConstants) {
  EXPECT_NEAR(eval("sin(pi/2) + cos(0) + exp(0) + log(e)", {0}), 4.0, 1e-15);
  EXPECT_NEAR(eval("sqrt(q1) + tanh(0) + tan(0)", {16}), 4.0, 1e-15);
  EXPECT_NEAR(eval("2.5e-1*q1", {4}), 1.0, 1e-15);
}

TEST(Expression, NegativeBaseIntegerPower) {
  EXPECT_DOUBLE_EQ(eval("q1^3", {-2}), -8.0);
  EXPECT_DOUBLE_EQ(eval("(q1 - 1)^2", {-1}), 4.0);
}

TEST(Expression, Errors) {
  EXPECT_THROW(Expression::parse("q3", 2), GeometryError);
  EXPECT_THROW(Expression::parse("q0", 2), GeometryError);
  EXPECT_THROW(Expression::parse("1 +", 1), GeometryError);
  EXPECT_THROW(Expression::parse("foo(q1)", 1), GeometryError);
  EXPECT_THROW(Expression::parse("(q1", 1), GeometryError);
  EXPECT_THROW(Expression::parse("q1 q1", 1), GeometryError);
  EXPECT_THROW(Expression::parse("sin q1", 1), GeometryError);
  try {
    Expression::parse("q1 + $", 1);
    FAIL();
  } catch (const GeometryError& e) {
    EXPECT_NE(std::string(e.what()).find("offset 5"), std::string::npos) << e.what();
  }
}

TEST(Expression, JetMatchesFiniteDifferences) {
  const Expression e = Expression::parse("exp(0.3*q1)*sin(q2) + q1^2*q2^3/(1+q2^2) + sqrt(2+q1*q1)", 2);
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const Vector q = fixtures::random_vector(rng, 2, -1.5, 1.5);
    const Jet j = e.jet(q);
    EXPECT_NEAR(j.v, e(q), 1e-14 * (1 + std::abs(j.v)));
    const double h = 1e-5;
    for (int i = 0; i < 2; ++i) {
      Vector a = q, b = q;
      a(i) += h;
      b(i) -= h;
      EXPECT_NEAR(j.d(i), (e(a) - e(b)) / (2 * h), 1e-7);
      const Jet ja = e.jet(a), jb = e.jet(b);
      for (int k = 0; k < 2; ++k) EXPECT_NEAR(j.h(i, k), (ja.d(k) - jb.d(k)) / (2 * h), 1e-6);
    }
    EXPECT_DOUBLE_EQ(j.h(0, 1), j.h(1, 0));
  }
}

TEST(Expression, QuadraticMatchesHarmonicPreset) {
  const PotentialField expr = make_potential_expression("0.5*q1^2 - 0.5", 1);
  const PotentialField preset = make_potential_preset("harmonic", 1, {{"k", 1.0}, {"V0", 0.5}});
  std::mt19937_64 rng(11);
  for (int i = 0; i < 1000; ++i) {
    const Vector q = fixtures::random_vector(rng, 1, -20, 20);
    EXPECT_NEAR(expr(q), preset(q), 1e-12 * (1 + std::abs(preset(q))));
  }
}
