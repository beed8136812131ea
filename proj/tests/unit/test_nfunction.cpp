#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "philap/philap.hpp"

using namespace philap;

namespace {

const auto kCertGrid = log_grid(1e-6, 1e6, 100000);

// Independent oracle: composite Simpson on [0, t] of s phi(s) with many panels.
double simpson_oracle(const Phi& phi, double t, int panels = 20000) {
  auto g = [&](double s) { return s > 0 ? s * phi.phi(s) : 0.0; };
  const double h = t / panels;
  double acc = g(0) + g(t);
  for (int i = 1; i < panels; ++i) acc += (i % 2 ? 4 : 2) * g(i * h);
  return acc * h / 3;
}

}  // namespace

TEST(PhiValue, CurvatureGammaOneIsConstantTwo) { EXPECT_DOUBLE_EQ(Phi::curvature(1).phi(7), 2.0); }

TEST(PhiValue, PowerThreeAtTwo) { EXPECT_DOUBLE_EQ(Phi::p_power(3).phi(2), 2.0); }

TEST(PhiValue, PlogTwoAtOne) {
  EXPECT_NEAR(Phi::plog(2).phi(1), 2 * std::log(2.0) + 0.5, 1e-14);
}

TEST(PhiValue, NonpositiveArgumentIsDomainError) {
  EXPECT_THROW(Phi::p_power(2).phi(0), DomainError);
  EXPECT_THROW(Phi::curvature(2).phi(-1), DomainError);
}

TEST(PhiValue, ConstructorsRejectInvalidParameters) {
  EXPECT_THROW(Phi::p_power(1), DomainError);
  EXPECT_THROW(Phi::curvature(0.5), DomainError);
  EXPECT_THROW(Phi::plog(0.9), DomainError);
}

TEST(NFunction, CurvatureTwoAtOneIsThree) { EXPECT_NEAR(Phi::curvature(2).nfunction(1), 3.0, 1e-13); }

TEST(NFunction, ZeroAtZero) {
  for (const auto& phi : {Phi::p_power(2), Phi::curvature(2), Phi::plog(2)}) EXPECT_EQ(phi.nfunction(0), 0.0);
}

TEST(NFunction, PlogOneAtOneIsLogTwo) { EXPECT_NEAR(Phi::plog(1).nfunction(1), std::log(2.0), 1e-13); }

TEST(NFunction, MatchesSimpsonOracle) {
  for (const auto& phi : {Phi::p_power(1.5), Phi::p_power(3), Phi::curvature(1.5), Phi::plog(2.5)}) {
    for (double t : {0.01, 0.3, 1.0, 4.0}) {
      const double ref = simpson_oracle(phi, t);
      EXPECT_NEAR(phi.nfunction(t), ref, 1e-6 * std::max(1.0, ref)) << phi.describe() << " t=" << t;
    }
  }
}

TEST(GrowthRatio, PowerIsConstant) {
  for (double p : {1.5, 2.0, 3.0, 5.0}) {
    for (double t : {1e-4, 0.5, 3.0, 1e5}) EXPECT_NEAR(Phi::p_power(p).growth_ratio(t), p - 1, 1e-12);
  }
}

TEST(GrowthRatio, CurvatureClosedForm) {
  const auto phi = Phi::curvature(2);
  for (double t : {1e-3, 0.2, 1.0, 7.0, 300.0}) {
    EXPECT_NEAR(phi.growth_ratio(t), 1 + 2 * (2 - 1) * t * t / (1 + t * t), 1e-12);
  }
}

TEST(GrowthRatio, PlogLimits) {
  const auto phi = Phi::plog(2.5);
  EXPECT_NEAR(phi.growth_ratio(1e-9), 2.5, 1e-6);
  // The upper limit is approached like 1/log t.
  double prev = phi.growth_ratio(1e3);
  for (double t : {1e9, 1e50, 1e200}) {
    const double r = phi.growth_ratio(t);
    EXPECT_LT(r, prev);
    EXPECT_NEAR(r, 1.5, 1.0 / std::log(t));
    prev = r;
  }
}

TEST(GrowthRatio, AgreesWithFiniteDifferenceOfFlux) {
  for (const auto& phi : {Phi::curvature(3), Phi::plog(2)}) {
    for (double t : {0.1, 1.0, 10.0}) {
      const double e = 1e-6 * t;
      const double dflux = (phi.flux(t + e) - phi.flux(t - e)) / (2 * e);
      EXPECT_NEAR(phi.growth_ratio(t), dflux / phi.phi(t), 1e-6);
    }
  }
}

TEST(CertifyGrowth, Curvature) {
  const auto b = certify_growth(Phi::curvature(2), kCertGrid);
  EXPECT_DOUBLE_EQ(b.Gamma1, 1);
  EXPECT_DOUBLE_EQ(b.Gamma2, 3);
  EXPECT_DOUBLE_EQ(b.gamma1, 2);
  EXPECT_DOUBLE_EQ(b.gamma2, 4);
  EXPECT_EQ(b.violations, 0u);
}

TEST(CertifyGrowth, CurvatureBelowOneSwapsBounds) {
  const auto b = certify_growth(Phi::curvature(0.75), kCertGrid);
  EXPECT_DOUBLE_EQ(b.Gamma1, 0.5);
  EXPECT_DOUBLE_EQ(b.Gamma2, 1);
}

TEST(CertifyGrowth, Plog) {
  const auto b = certify_growth(Phi::plog(2), kCertGrid);
  EXPECT_DOUBLE_EQ(b.Gamma1, 1);
  EXPECT_DOUBLE_EQ(b.Gamma2, 2);
  EXPECT_EQ(b.violations, 0u);
}

TEST(CertifyGrowth, PowerTwo) {
  const auto b = certify_growth(Phi::p_power(2), kCertGrid);
  EXPECT_DOUBLE_EQ(b.Gamma1, 1);
  EXPECT_DOUBLE_EQ(b.Gamma2, 1);
  EXPECT_DOUBLE_EQ(b.gamma1, 2);
  EXPECT_DOUBLE_EQ(b.gamma2, 2);
}

TEST(CertifyGrowth, PlogOneHasZeroLowerExponent) {
  EXPECT_THROW(certify_growth(Phi::plog(1), kCertGrid), ConditionViolation);
}

TEST(CertifyGrowth, TabulatedSampledBoundsMatchCurvature) {
  const auto t = log_grid(1e-6, 1e6, 241);
  std::vector<double> v;
  const auto ref = Phi::curvature(2);
  for (double x : t) v.push_back(ref.phi(x));
  const auto tab = Phi::tabulated(t, v);
  const auto b = certify_growth(tab, kCertGrid);
  EXPECT_FALSE(b.closed_form);
  EXPECT_NEAR(b.Gamma1, 1, 1e-4);
  EXPECT_NEAR(b.Gamma2, 3, 1e-4);
  for (double x : {1e-3, 0.7, 2.0, 50.0}) EXPECT_NEAR(tab.phi(x), ref.phi(x), 1e-6 * ref.phi(x));
  EXPECT_NEAR(tab.nfunction(1), 3.0, 1e-6);
}

TEST(CertifyGrowth, TableMustBeLogSpaced) {
  EXPECT_THROW(Phi::tabulated({1, 2, 3, 4, 5}, {1, 1, 1, 1, 1}), StructuralError);
}

TEST(Structure, BuiltinsPass) {
  for (const auto& phi : {Phi::p_power(2), Phi::curvature(2), Phi::plog(3)}) {
    const auto b = certify_growth(phi, kCertGrid);
    EXPECT_TRUE(check_structure(phi, kCertGrid, b.Gamma1).ok()) << phi.describe();
  }
}

TEST(InvertFlux, Examples) {
  EXPECT_NEAR(invert_flux(Phi::p_power(2), 5.0), 5.0, 1e-11);
  EXPECT_NEAR(invert_flux(Phi::p_power(3), 4.0), 2.0, 1e-11);
  EXPECT_NEAR(invert_flux(Phi::curvature(1), 6.0), 3.0, 1e-11);
}

TEST(InvertFlux, OddAndZero) {
  const auto phi = Phi::plog(2);
  EXPECT_EQ(invert_flux(phi, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(invert_flux(phi, -3.0), -invert_flux(phi, 3.0));
}

TEST(InvertFlux, NonFiniteIsRangeError) {
  EXPECT_THROW(invert_flux(Phi::p_power(2), std::numeric_limits<double>::infinity()), RangeError);
}

TEST(Luxemburg, ZeroFunction) {
  Eigen::VectorXd u = Eigen::VectorXd::Zero(5), w = Eigen::VectorXd::Constant(5, 0.2);
  EXPECT_EQ(luxemburg_norm(Phi::p_power(2), u, w), 0.0);
}

TEST(Luxemburg, ConstantOneOnUnitMeasure) {
  Eigen::VectorXd u = Eigen::VectorXd::Ones(10), w = Eigen::VectorXd::Constant(10, 0.1);
  // Oracle: bisection on Phi(1/k) = 1 with Phi(t) = t^2 / 2.
  double lo = 0.01, hi = 10;
  for (int i = 0; i < 200; ++i) {
    const double mid = (lo + hi) / 2;
    (0.5 / (mid * mid) > 1 ? lo : hi) = mid;
  }
  EXPECT_NEAR(luxemburg_norm(Phi::p_power(2), u, w), lo, 1e-9);
  EXPECT_NEAR(lo, 1 / std::sqrt(2.0), 1e-12);
}

TEST(ZetaBounds, IdentityAtOne) {
  const auto phi = Phi::curvature(2);
  const auto b = certify_growth(phi, kCertGrid);
  EXPECT_TRUE(check_zeta_bounds(phi, b, 3.7, 1.0));
}

TEST(ZetaBounds, CurvatureAtTwo) {
  const auto phi = Phi::curvature(2);
  const auto b = certify_growth(phi, kCertGrid);
  EXPECT_NEAR(phi.nfunction(2), 24.0, 1e-12);
  EXPECT_TRUE(check_zeta_bounds(phi, b, 1.0, 2.0));
}

TEST(ZetaBounds, PlogMonteCarlo) {
  const auto phi = Phi::plog(2);
  const auto b = certify_growth(phi, kCertGrid);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.1, 10);
  for (int i = 0; i < 10000; ++i) ASSERT_TRUE(check_zeta_bounds(phi, b, u(rng), u(rng)));
}
