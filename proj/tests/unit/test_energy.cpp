#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "philap/philap.hpp"

using namespace philap;

namespace {

Nonlinearity canonical2() { return Nonlinearity({1, 2, 3}, {0, 1, 1.5, 2, 2.5, 3}, {1, 0, -0.2, 0, 1, 0}); }

GridFunction random_grid(const Domain<double>& dom, int n1, int n2, double top, std::uint64_t seed) {
  GridFunction u(dom, n1, n2);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(0.0, top);
  for (Eigen::Index i = 0; i < u.node_count(); ++i) u[i] = d(rng);
  u.enforce_boundary();
  return u;
}

}  // namespace

TEST(Energy, ZeroFunctionHasZeroEnergy) {
  const auto f = canonical2();
  const GridFunction u(Domain<double>::interval(1), 40);
  EXPECT_EQ(discretize_energy(Phi::curvature(2), truncate(f, 2), 10.0, u), 0.0);
}

TEST(Energy, TwoCellHandComputation) {
  GridFunction u(Domain<double>::interval(1), 2);
  u[1] = 1;
  EXPECT_NEAR(dirichlet_energy(Phi::p_power(2), u), 2.0, 1e-14);
}

TEST(Energy, AffineInLambda) {
  const auto f = canonical2();
  const auto tf = truncate(f, 2);
  const auto u = random_grid(Domain<double>::interval(1), 50, 0, 3, 3);
  const auto phi = Phi::plog(2);
  const double e1 = discretize_energy(phi, tf, 1.0, u), e2 = discretize_energy(phi, tf, 4.0, u);
  const double e0 = discretize_energy(phi, tf, 0.0, u);
  EXPECT_NEAR(e0, dirichlet_energy(phi, u), 1e-12);
  EXPECT_NEAR(e2 - e0, 4 * (e1 - e0), 1e-10);
}

TEST(Gradient, ZeroFunctionIsLoadVector) {
  const auto f = canonical2();
  const double lambda = 7;
  for (const auto& dom : {Domain<double>::interval(1), Domain<double>::rectangle(1, 2)}) {
    const GridFunction u(dom, 10, 10);
    const auto g = energy_gradient(Phi::p_power(2), truncate(f, 2), lambda, u);
    for (Eigen::Index i = 0; i < u.node_count(); ++i) {
      if (u.is_boundary(i)) continue;
      ASSERT_NEAR(g[i], -lambda * f.f0() * u.node_measure(i), 1e-12) << i;
    }
  }
}

TEST(Gradient, MatchesCentralDifferences) {
  const auto f = canonical2();
  const auto tf = truncate(f, 2);
  for (const auto& phi : {Phi::p_power(2), Phi::p_power(3), Phi::curvature(2), Phi::plog(2)}) {
    for (const auto& dom : {Domain<double>::interval(1), Domain<double>::rectangle(1, 1), Domain<double>::ball(1, 3)}) {
      auto u = random_grid(dom, 12, 8, 2.9, 11);
      const auto g = energy_gradient(phi, tf, 5.0, u);
      for (Eigen::Index i = 0; i < u.node_count(); ++i) {
        if (u.is_boundary(i)) continue;
        const double e = 1e-6 * std::max(1.0, std::abs(u[i]));
        auto up = u, dn = u;
        up[i] += e;
        dn[i] -= e;
        const double fd = (discretize_energy(phi, tf, 5.0, up) - discretize_energy(phi, tf, 5.0, dn)) / (2 * e);
        ASSERT_NEAR(g[i], fd, 1e-6 * std::max(1.0, std::abs(fd))) << phi.describe() << " " << dom.describe();
      }
    }
  }
}

TEST(Minimize, ZeroLambdaGivesZero) {
  const auto f = canonical2();
  auto init = random_grid(Domain<double>::interval(1), 40, 0, 2, 1);
  const auto rep = minimize(Phi::p_power(2), truncate(f, 2), 0.0, init);
  EXPECT_TRUE(rep.converged);
  EXPECT_LT(rep.minimizer.sup_norm(), 1e-8);
  EXPECT_NEAR(rep.energy, 0.0, 1e-14);
}

TEST(Minimize, PoissonParabola) {
  const Nonlinearity f({1}, {0, 1}, {1, 1});
  const GridFunction init(Domain<double>::interval(1), 200);
  const auto rep = minimize(Phi::p_power(2), truncate(f, 1), 1.0, init);
  ASSERT_TRUE(rep.converged);
  EXPECT_NEAR(rep.supnorm, 0.125, 1e-6);
  for (Eigen::Index i = 0; i < init.node_count(); ++i) {
    const double x = init.coordinate1(i);
    ASSERT_NEAR(rep.minimizer[i], x * (1 - x) / 2, 1e-6);
  }
  EXPECT_LE(rep.grad_norm, MinimizeOptions<double>{}.gtol);
}

TEST(Minimize, SteepestDescentAgreesWithNewton) {
  const Nonlinearity f({1}, {0, 1}, {1, 1});
  const GridFunction init(Domain<double>::interval(1), 20);
  MinimizeOptions<double> opt;
  opt.direction = DescentDirection::steepest;
  opt.gtol = 1e-9;
  const auto a = minimize(Phi::p_power(2), truncate(f, 1), 1.0, init, opt);
  const auto b = minimize(Phi::p_power(2), truncate(f, 1), 1.0, init);
  ASSERT_TRUE(a.converged);
  EXPECT_NEAR(a.supnorm, b.supnorm, 1e-6);
}

TEST(Minimize, CanonicalLargeLambdaLandsInBand) {
  const auto f = canonical2();
  const GridFunction shape(Domain<double>::interval(1), 200);
  MultistartOptions<double> ms;
  ms.seed = 4;
  const auto res = minimize_multistart(Phi::p_power(2), truncate(f, 2), 2000.0, shape, ms);
  ASSERT_NE(res.best_run(), nullptr);
  EXPECT_GT(res.best_run()->supnorm, 1.0);
  EXPECT_LE(res.best_run()->supnorm, 3.0 + band_slack(3.0));
  EXPECT_TRUE(res.best_run()->band_occupied());
}

TEST(Minimize, IterationCapReportsNonConvergence) {
  const auto f = canonical2();
  MinimizeOptions<double> opt;
  opt.max_iterations = 1;
  opt.direction = DescentDirection::steepest;
  const auto init = random_grid(Domain<double>::interval(1), 100, 0, 2.5, 8);
  const auto rep = minimize(Phi::p_power(2), truncate(f, 2), 500.0, init, opt);
  EXPECT_FALSE(rep.converged);
  EXPECT_EQ(rep.iterations, 1);
}

TEST(Plateau, Values) {
  const GridFunction shape(Domain<double>::interval(1), 16);
  const auto w = build_plateau(shape, 0.25, 2.0);
  EXPECT_EQ(w[0], 0.0);
  EXPECT_EQ(w[16], 0.0);
  EXPECT_DOUBLE_EQ(w[2], 1.0);  // x = 1/8
  EXPECT_DOUBLE_EQ(w[8], 2.0);
  EXPECT_THROW(build_plateau(shape, 0.4, 2.0), StructuralError);
}

TEST(Threshold, CanonicalOneDimensionalOracle) {
  const auto est = lambda_threshold_estimate(Phi::p_power(2), canonical2(), Domain<double>::interval(1), 2, 1.0 / 16);
  // alpha~ = F(3) - F(1) = 0.4, C = F(3) = 0.9, collar 1/8, eta = 0.4 - 2 * 0.9 / 8.
  EXPECT_NEAR(est.alpha_tilde, 0.4, 1e-14);
  EXPECT_NEAR(est.C_k, 0.9, 1e-14);
  EXPECT_NEAR(est.eta, 0.175, 1e-14);
  // Phi(3 / (1/16)) on the collar: 48^2 / 2 * 1/8 = 144.
  EXPECT_NEAR(est.dirichlet, 144.0, 1e-10);
  EXPECT_NEAR(est.lambda, 144.0 / 0.175, 1e-9);
}

TEST(Threshold, ScalingFScalesLambdaInversely) {
  const auto f = canonical2();
  const auto dom = Domain<double>::interval(1);
  const auto a = lambda_threshold_estimate(Phi::curvature(2), f, dom, 2, 1.0 / 16);
  const auto b = lambda_threshold_estimate(Phi::curvature(2), f.scaled(3.0), dom, 2, 1.0 / 16);
  EXPECT_NEAR(b.eta, 3 * a.eta, 1e-12);
  EXPECT_NEAR(b.lambda, a.lambda / 3, 1e-9 * a.lambda);
}

TEST(Threshold, SmallCollarApproachesFullMeasure) {
  const auto est = lambda_threshold_estimate(Phi::p_power(2), canonical2(), Domain<double>::interval(1), 2, 1e-6);
  EXPECT_NEAR(est.eta, est.alpha_tilde, 1e-5);
}

TEST(Sweep, CeilingAndOccupancy) {
  const auto f = Nonlinearity({1, 2, 3, 4, 5}, {0, 1, 1.5, 2, 2.5, 3, 3.5, 4, 4.5, 5},
                              {1, 0, -0.2, 0, 1, 0, -0.2, 0, 1, 0});
  const GridFunction shape(Domain<double>::interval(1), 100);
  std::vector<double> lambdas{1, 10, 100, 1000, 10000};
  SweepOptions<double> so;
  so.multistart.seed = 2;
  const auto sw = sweep(Phi::p_power(2), f, shape, lambdas, so);
  ASSERT_TRUE(sw.lambda_bar.has_value());
  EXPECT_LE(*sw.lambda_bar, sw.analytic_ceiling());
  EXPECT_TRUE(sw.occupied(2, 4));
  EXPECT_TRUE(sw.occupied(3, 4));
}

TEST(Sweep, ThreadCountDoesNotChangeResults) {
  const auto f = canonical2();
  const GridFunction shape(Domain<double>::interval(1), 60);
  std::vector<double> lambdas{50, 200, 800, 3200};
  SweepOptions<double> a, b;
  a.multistart.seed = b.multistart.seed = 9;
  b.threads = 4;
  const auto x = sweep(Phi::curvature(2), f, shape, lambdas, a);
  const auto y = sweep(Phi::curvature(2), f, shape, lambdas, b);
  for (std::size_t j = 0; j < lambdas.size(); ++j) {
    const auto& rx = x.at(2, j).runs;
    const auto& ry = y.at(2, j).runs;
    ASSERT_EQ(rx.size(), ry.size());
    for (std::size_t i = 0; i < rx.size(); ++i) EXPECT_EQ(rx[i].energy, ry[i].energy);
  }
}

TEST(Luxemburg, GridFunctionHomogeneity) {
  const auto u = random_grid(Domain<double>::rectangle(1, 1), 10, 10, 1, 6);
  auto v = u;
  v.values() *= -2.5;
  const auto phi = Phi::curvature(2);
  EXPECT_NEAR(luxemburg_norm(phi, v), 2.5 * luxemburg_norm(phi, u), 1e-8 * luxemburg_norm(phi, v));
}
