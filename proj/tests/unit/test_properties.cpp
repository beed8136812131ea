// Randomized checks of the invariants that hold for every input, not just the
// worked examples.

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "philap/philap.hpp"

using namespace philap;

namespace {

std::vector<Phi> generators() {
  return {Phi::p_power(1.5), Phi::p_power(2), Phi::p_power(4), Phi::curvature(0.75), Phi::curvature(2),
          Phi::curvature(3.5), Phi::plog(1.5), Phi::plog(3)};
}

// A random nonlinearity with the interleaved sign pattern and positive band integrals.
Nonlinearity random_f(std::mt19937_64& rng, int m) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> skeleton, s{0}, v{0.2 + u(rng)};
  double x = 0.5 + u(rng);
  skeleton.push_back(x);
  s.push_back(x);
  v.push_back(0);
  for (int k = 1; k < m; ++k) {
    const double neg = 0.5 + u(rng), pos = 0.5 + u(rng);
    const double dip = -0.2 * u(rng), hump = 1 + u(rng);
    const double b = x + neg, next = b + pos;
    s.insert(s.end(), {x + neg / 2, b, b + pos / 2, next});
    v.insert(v.end(), {dip, 0, hump, 0});
    skeleton.insert(skeleton.end(), {b, next});
    x = next;
  }
  return Nonlinearity(skeleton, s, v);
}

}  // namespace

TEST(Property, FluxIsStrictlyIncreasingAndInvertible) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> e(-6, 6);
  for (const auto& phi : generators()) {
    for (int i = 0; i < 200; ++i) {
      const double t = std::pow(10.0, e(rng));
      ASSERT_LT(phi.flux(t), phi.flux(t * (1 + 1e-6))) << phi.describe();
      ASSERT_NEAR(invert_flux(phi, phi.flux(t)), t, 1e-10 * t) << phi.describe();
    }
  }
}

TEST(Property, GrowthRatioWithinCertifiedBounds) {
  const auto grid = log_grid(1e-6, 1e6, 2000);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> e(-6, 6);
  for (const auto& phi : generators()) {
    const auto b = certify_growth(phi, grid);
    EXPECT_LE(b.Gamma1, b.Gamma2);
    EXPECT_DOUBLE_EQ(b.gamma1, b.Gamma1 + 1);
    EXPECT_DOUBLE_EQ(b.gamma2, b.Gamma2 + 1);
    for (int i = 0; i < 500; ++i) {
      const double r = phi.growth_ratio(std::pow(10.0, e(rng)));
      ASSERT_GE(r, b.Gamma1 - 1e-9);
      ASSERT_LE(r, b.Gamma2 + 1e-9);
    }
  }
}

TEST(Property, NFunctionIsConvexAndSuperlinear) {
  for (const auto& phi : generators()) {
    double prev_slope = 0;
    for (double t : log_grid(1e-3, 1e3, 200)) {
      const double slope = phi.nfunction_derivative(t);
      ASSERT_GT(slope, prev_slope) << phi.describe();
      prev_slope = slope;
    }
    EXPECT_GT(phi.nfunction(1e6) / 1e6, phi.nfunction(1e3) / 1e3);
  }
}

TEST(Property, ZetaBoundsOnRandomPairs) {
  const auto grid = log_grid(1e-6, 1e6, 2000);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> e(-3, 3);
  for (const auto& phi : generators()) {
    const auto b = certify_growth(phi, grid);
    for (int i = 0; i < 2000; ++i) {
      ASSERT_TRUE(check_zeta_bounds(phi, b, std::pow(10.0, e(rng)), std::pow(10.0, e(rng)))) << phi.describe();
    }
  }
}

TEST(Property, LuxemburgHomogeneity) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-2, 2);
  for (const auto& phi : generators()) {
    for (int i = 0; i < 10; ++i) {
      GridFunction g(Domain<double>::interval(1), 30);
      for (Eigen::Index j = 1; j < 30; ++j) g[j] = u(rng);
      const double c = u(rng) * 5;
      auto h = g;
      h.values() *= c;
      const double n = luxemburg_norm(phi, g);
      ASSERT_NEAR(luxemburg_norm(phi, h), std::abs(c) * n, 1e-8 * std::max(1.0, std::abs(c) * n));
    }
  }
}

TEST(Property, TruncationIsZeroAboveCapAndFrozenBelowZero) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto f = random_f(rng, 3);
    const auto rep = validate(f, true);
    ASSERT_TRUE(rep.ok()) << "violation at s = " << rep.violations.front().witness;
    for (int k = 2; k <= 3; ++k) {
      const auto tf = truncate(f, k);
      EXPECT_EQ(tf.value(f.a(k) * 1.01), 0.0);
      EXPECT_EQ(tf.value(-0.3), f.f0());
      EXPECT_DOUBLE_EQ(tf.primitive(f.a(k) + 10), tf.primitive(f.a(k)));
    }
  }
}

TEST(Property, MinimizersStayInTruncationBox) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 6; ++trial) {
    const auto f = random_f(rng, 2);
    const auto tf = truncate(f, 2);
    const GridFunction shape(Domain<double>::interval(1), 120);
    MultistartOptions<double> ms;
    ms.seed = std::uint64_t(trial);
    for (const auto& phi : {Phi::p_power(2), Phi::curvature(2)}) {
      const auto res = minimize_multistart(phi, tf, 5000.0, shape, ms);
      for (const auto& r : res.runs) {
        if (!r.converged) continue;
        EXPECT_GE(r.minimizer.values().minCoeff(), -1e-8);
        EXPECT_LE(r.minimizer.max_value(), f.a(2) * (1 + 1e-3));
      }
    }
  }
}

TEST(Property, ConvergedMinimizerSatisfiesGradientTolerance) {
  const Nonlinearity f({1, 2, 3}, {0, 1, 1.5, 2, 2.5, 3}, {1, 0, -0.2, 0, 1, 0});
  const GridFunction shape(Domain<double>::rectangle(1, 1), 16, 16);
  MultistartOptions<double> ms;
  const auto res = minimize_multistart(Phi::p_power(2), truncate(f, 2), 300.0, shape, ms);
  for (const auto& r : res.runs) {
    if (!r.converged) continue;
    const auto g = energy_gradient(Phi::p_power(2), truncate(f, 2), 300.0, r.minimizer);
    // Free nodes only: nodes held at a_k may keep an upward-pointing gradient.
    for (Eigen::Index i = 0; i < g.node_count(); ++i) {
      if (r.minimizer[i] < 3) {
        ASSERT_LE(std::abs(g[i]), 1e-6);
      }
    }
  }
}

TEST(Property, RadialStepRefinementConverges) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    const auto f = random_f(rng, 2);
    const auto phi = Phi::curvature(1.5);
    auto end_value = [&](double h) {
      return shoot(phi, f, 20.0, 2, f.a(2) * 0.9, ShootOptions<double>{h, 0.3, 0}).u.back();
    };
    const double e1 = std::abs(end_value(2e-3) - end_value(2.5e-4));
    const double e2 = std::abs(end_value(1e-3) - end_value(2.5e-4));
    EXPECT_LE(e2, e1 + 1e-13);
  }
}

TEST(Property, VerifierIsReadOnly) {
  const Nonlinearity f({1, 2, 3}, {0, 1, 1.5, 2, 2.5, 3}, {1, 0, -0.2, 0, 1, 0});
  GridFunction u(Domain<double>::interval(1), 40);
  for (Eigen::Index i = 1; i < 40; ++i) u[i] = 2.5 * std::sin(3.14159 * double(i) / 40);
  const auto copy = u.values();
  weak_residual(Phi::p_power(2), f, 100.0, u, 8);
  check_positivity(u, f);
  EXPECT_EQ(u.values(), copy);
}
