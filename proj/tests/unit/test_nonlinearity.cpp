#include <gtest/gtest.h>

#include "philap/philap.hpp"

using namespace philap;

namespace {

Nonlinearity canonical(double dip = -0.2) {
  return Nonlinearity({1, 2, 3}, {0, 1, 1.5, 2, 2.5, 3}, {1, 0, dip, 0, 1, 0});
}

// Trapezoid oracle on the node list, exact for piecewise-linear data.
double trapezoid(const std::vector<double>& s, const std::vector<double>& f, double lo, double hi) {
  double acc = 0;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    const double a = std::max(lo, s[i]), b = std::min(hi, s[i + 1]);
    if (b <= a) continue;
    auto at = [&](double x) { return f[i] + (f[i + 1] - f[i]) * (x - s[i]) / (s[i + 1] - s[i]); };
    acc += (b - a) * (at(a) + at(b)) / 2;
  }
  return acc;
}

}  // namespace

TEST(Validate, ConstantSingleBandIsValid) {
  const Nonlinearity f({1}, {0, 1}, {1, 1});
  EXPECT_EQ(f.m(), 1);
  EXPECT_TRUE(validate(f, true).ok());
}

TEST(Validate, CanonicalSkeleton) {
  const auto f = canonical();
  const auto rep = validate(f, true);
  EXPECT_TRUE(rep.ok());
  ASSERT_EQ(rep.band_integrals.size(), 1u);
  EXPECT_NEAR(rep.band_integrals[0], 0.4, 1e-12);
  EXPECT_NEAR(trapezoid({0, 1, 1.5, 2, 2.5, 3}, {1, 0, -0.2, 0, 1, 0}, 1, 3), 0.4, 1e-15);
}

TEST(Validate, DeepDipViolatesPositiveIntegral) {
  const auto rep = validate(canonical(-2), true);
  ASSERT_FALSE(rep.ok());
  bool found = false;
  for (const auto& v : rep.violations) found = found || (v.condition == FCondition::f3 && v.k == 1);
  EXPECT_TRUE(found);
  EXPECT_NEAR(band_integral(canonical(-2), 1), -0.5, 1e-12);
}

TEST(Validate, PositiveValueInNegativeIntervalIsReported) {
  const Nonlinearity f({1, 2, 3}, {0, 1, 1.5, 2, 2.5, 3}, {1, 0, 0.3, 0, 1, 0});
  const auto rep = validate(f, false);
  bool found = false;
  for (const auto& v : rep.violations) found = found || v.condition == FCondition::f2_negative;
  EXPECT_TRUE(found);
}

TEST(Validate, NegativeAtZeroViolatesPositivity) {
  const Nonlinearity f({1, 2, 3}, {0, 1, 1.5, 2, 2.5, 3}, {-1, 0, -0.2, 0, 1, 0});
  EXPECT_FALSE(validate(f, true).ok());
}

TEST(Construct, UnorderedSkeletonIsStructuralError) {
  EXPECT_THROW(Nonlinearity({1, 3, 2}, {0, 3}, {1, 0}), StructuralError);
  EXPECT_THROW(Nonlinearity({1, 2}, {0, 2}, {1, 0}), StructuralError);
}

TEST(Truncate, Branches) {
  const auto f = canonical();
  const auto tf = truncate(f, 2);
  const double ak = 3;
  EXPECT_EQ(tf.value(-1), f.f0());
  EXPECT_DOUBLE_EQ(tf.value(ak / 2), f.value(ak / 2));
  EXPECT_EQ(tf.value(ak + 1), 0.0);
}

TEST(Truncate, PrimitiveBranches) {
  const auto f = canonical();
  const auto tf = truncate(f, 2);
  EXPECT_EQ(tf.primitive(0), 0.0);
  EXPECT_DOUBLE_EQ(tf.primitive(5), tf.primitive(3));
  EXPECT_NEAR(tf.primitive(3), trapezoid({0, 1, 1.5, 2, 2.5, 3}, {1, 0, -0.2, 0, 1, 0}, 0, 3), 1e-14);
  const Nonlinearity c({2}, {0, 2}, {0.7, 0.7});
  const auto tc = truncate(c, 1);
  for (double s : {0.0, 0.5, 1.3, 2.0}) EXPECT_NEAR(tc.primitive(s), 0.7 * s, 1e-15);
}

TEST(Truncate, IndexOutOfRange) {
  const auto f = canonical();
  EXPECT_THROW(truncate(f, 1), StructuralError);
  EXPECT_THROW(truncate(f, 3), StructuralError);
}

TEST(BandIntegral, AntisymmetricIsZero) {
  const Nonlinearity f({1, 2, 3}, {0, 1, 1.5, 2, 2.5, 3}, {1, 0, -0.5, 0, 0.5, 0});
  EXPECT_NEAR(band_integral(f, 1), 0.0, 1e-15);
}

TEST(BandIntegral, NonnegativeWithOnePositiveNode) {
  const Nonlinearity f({1, 2, 3}, {0, 1, 2, 2.5, 3}, {1, 0, 0, 0.3, 0});
  EXPECT_GT(band_integral(f, 1), 0.0);
}

TEST(Primitive, MatchesTrapezoidOracle) {
  const auto f = canonical();
  const std::vector<double> s{0, 1, 1.5, 2, 2.5, 3}, v{1, 0, -0.2, 0, 1, 0};
  for (double x : {0.2, 1.0, 1.7, 2.4, 3.0}) EXPECT_NEAR(f.primitive(x), trapezoid(s, v, 0, x), 1e-14);
}
