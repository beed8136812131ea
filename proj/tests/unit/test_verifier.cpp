#include <gtest/gtest.h>

#include <cmath>

#include "philap/philap.hpp"

using namespace philap;

namespace {

Nonlinearity canonical2() { return Nonlinearity({1, 2, 3}, {0, 1, 1.5, 2, 2.5, 3}, {1, 0, -0.2, 0, 1, 0}); }
Nonlinearity canonical3() {
  return Nonlinearity({1, 2, 3, 4, 5}, {0, 1, 1.5, 2, 2.5, 3, 3.5, 4, 4.5, 5}, {1, 0, -0.2, 0, 1, 0, -0.2, 0, 1, 0});
}

const auto kCertGrid = log_grid(1e-6, 1e6, 1000);

}  // namespace

TEST(WeakResidual, ZeroSolutionWithZeroSource) {
  const Nonlinearity f({1}, {0, 1}, {0, 0});
  const GridFunction u(Domain<double>::interval(1), 50);
  EXPECT_EQ(weak_residual(Phi::p_power(2), f, 3.0, u, 16).max, 0.0);
}

TEST(WeakResidual, ClosedFormBallSolution) {
  const Nonlinearity f({10}, {0, 10}, {1, 1});
  GridFunction u(Domain<double>::ball(1, 2), 1000);
  for (Eigen::Index i = 0; i < u.node_count(); ++i) {
    const double r = u.coordinate1(i);
    u[i] = (1 - r * r) / 4;
  }
  const auto wr = weak_residual(Phi::p_power(2), f, 1.0, u, 32);
  EXPECT_LE(wr.max, 1e-4);

  // Sensitivity: a 1e-2 bump perturbation raises the residual by at least 10x.
  auto v = u;
  for (Eigen::Index i = 0; i < v.node_count(); ++i) {
    v[i] += 1e-2 * CosineBump<double>::profile(v.coordinate1(i), 0.2, 0.6);
  }
  EXPECT_GE(weak_residual(Phi::p_power(2), f, 1.0, v, 32).max, 10 * wr.max);
}

TEST(WeakResidual, BumpsAreSeededAndInsideDomain) {
  const auto dom = Domain<double>::rectangle(2, 1);
  const auto a = make_test_bumps(dom, 8, 3), b = make_test_bumps(dom, 8, 3);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].lo, b[i].lo);
    EXPECT_EQ(a[i].width, b[i].width);
    EXPECT_GE(a[i].lo[0], 0.0);
    EXPECT_LE(a[i].lo[0] + a[i].width[0], 2.0);
    EXPECT_LE(a[i].lo[1] + a[i].width[1], 1.0);
  }
}

TEST(WeakResidual, DecreasesUnderRefinementForMinimizer) {
  const auto f = canonical2();
  const auto phi = Phi::p_power(2);
  auto solve = [&](int cells) {
    const GridFunction shape(Domain<double>::interval(1), cells);
    MultistartOptions<double> ms;
    ms.count = 2;
    return minimize_multistart(phi, truncate(f, 2), 1500.0, shape, ms).best_run()->minimizer;
  };
  const double coarse = weak_residual(phi, f, 1500.0, solve(200), 32).max;
  const double fine = weak_residual(phi, f, 1500.0, solve(400), 32).max;
  EXPECT_LT(coarse, 1e-2);
  EXPECT_LT(fine, coarse);
}

TEST(BandOrdering, SingleChainPasses) {
  const auto rep = check_band_ordering(std::vector<BandSample<double>>{{2, 2.5}}, canonical2());
  EXPECT_TRUE(rep.all_passed());
}

TEST(BandOrdering, SupExactlyAtLowerEdgeFails) {
  const auto rep = check_band_ordering(std::vector<BandSample<double>>{{2, 1.0}}, canonical2());
  EXPECT_FALSE(rep.all_passed());
}

TEST(BandOrdering, MissingBandThrows) {
  EXPECT_THROW(check_band_ordering(std::vector<BandSample<double>>{{2, 2.5}}, canonical3()), StructuralError);
}

TEST(BandOrdering, FullChain) {
  const auto rep = check_band_ordering(std::vector<BandSample<double>>{{3, 4.9}, {2, 2.9}}, canonical3());
  EXPECT_TRUE(rep.all_passed());
}

TEST(Positivity, InteriorPositivePasses) {
  GridFunction u(Domain<double>::interval(1), 10);
  for (Eigen::Index i = 1; i < 10; ++i) u[i] = 0.1;
  EXPECT_TRUE(check_positivity(u, canonical2()).all_passed());
}

TEST(Positivity, InteriorZeroFailsAndNamesNode) {
  GridFunction u(Domain<double>::interval(1), 10);
  for (Eigen::Index i = 1; i < 10; ++i) u[i] = 0.1;
  u[4] = 0;
  const auto rep = check_positivity(u, canonical2());
  ASSERT_FALSE(rep.all_passed());
  EXPECT_NE(rep.checks.front().detail.find("node 4"), std::string::npos);
}

TEST(Positivity, RequiresPositiveSourceAtZero) {
  const Nonlinearity f({1}, {0, 1}, {0, 0});
  EXPECT_THROW(check_positivity(GridFunction(Domain<double>::interval(1), 4), f), StructuralError);
}

TEST(Positivity, RadialBandSolution) {
  const auto f = canonical2();
  const auto rep = find_band_solution(Phi::p_power(2), f, 120.0, 2, 1.0, 1);
  ASSERT_TRUE(rep.found());
  EXPECT_TRUE(check_positivity(rep.roots.front().profile, f).all_passed());
}

TEST(PucciSerrin, NonnegativeSourceNeedsNoShift) {
  const Nonlinearity f({1}, {0, 1}, {1, 0.5});
  const auto phi = Phi::p_power(3);
  const auto ps = check_pucci_serrin(phi, certify_growth(phi, kCertGrid), f, 10.0, 1.0);
  ASSERT_TRUE(ps.c.has_value());
  EXPECT_EQ(*ps.c, 0.0);
}

TEST(PucciSerrin, QuadraticCaseDeltaIsReciprocal) {
  const auto phi = Phi::p_power(2);
  const auto ps = check_pucci_serrin(phi, certify_growth(phi, kCertGrid), canonical2(), 50.0, 3.0);
  ASSERT_TRUE(ps.c.has_value());
  EXPECT_GT(*ps.c, 0.0);
  EXPECT_NEAR(ps.delta, 1.0 / *ps.c, 1e-15);
  EXPECT_LE(ps.worst_bound_gap, 1e-12);
  EXPECT_TRUE(ps.report.all_passed());
}

TEST(PucciSerrin, DeltaTwoRatioAboveGammaOne) {
  for (const auto& phi : {Phi::curvature(2), Phi::plog(2.5), Phi::p_power(4)}) {
    const auto g = certify_growth(phi, kCertGrid);
    const auto ps = check_pucci_serrin(phi, g, canonical2(), 30.0, 3.0);
    EXPECT_GE(ps.min_delta2_ratio, g.gamma1 * (1 - 1e-9)) << phi.describe();
  }
}

TEST(NecessaryCondition, ValidatedNonlinearityPasses) {
  EXPECT_TRUE(check_necessary_condition(2.5, canonical2()).passed);
}

TEST(NecessaryCondition, NegativeControl) {
  const Nonlinearity bad({1, 2, 3}, {0, 1, 1.5, 2, 2.5, 3}, {1, 0, -2, 0, 1, 0});
  const auto nc = check_necessary_condition(2.5, bad);
  EXPECT_FALSE(nc.passed);
  EXPECT_LT(nc.band_integral, 0.0);
}

TEST(NecessaryCondition, IntermediateIntegralForRadialSolution) {
  const auto f = canonical2();
  const auto rep = find_band_solution(Phi::p_power(2), f, 120.0, 2, 1.0, 1);
  ASSERT_TRUE(rep.found());
  for (const auto& root : rep.roots) {
    const auto nc = check_necessary_condition(root.supnorm, f);
    EXPECT_GT(nc.to_sup_integral, 0.0);
  }
}

TEST(NecessaryCondition, SupOutsideEveryBandThrows) {
  EXPECT_THROW(check_necessary_condition(0.5, canonical2()), StructuralError);
}
