#include "acceptance.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>

namespace philap::app {

Nonlinearity canonical_f(int m) {
  std::vector<double> skeleton{1};
  std::vector<double> s{0, 1};
  std::vector<double> v{1, 0};
  for (int k = 1; k < m; ++k) {
    const double a = 1 + 2 * (k - 1);
    skeleton.push_back(a + 1);
    skeleton.push_back(a + 2);
    for (double x : {a + 0.5, a + 1, a + 1.5, a + 2}) s.push_back(x);
    for (double y : {-0.2, 0.0, 1.0, 0.0}) v.push_back(y);
  }
  return Nonlinearity(skeleton, s, v);
}

namespace {

using Clock = std::chrono::steady_clock;

struct Builtin {
  std::string name;
  Phi phi;
};

std::vector<Builtin> builtins() {
  return {{"p_power(p=2)", Phi::p_power(2)}, {"curvature(gamma=2)", Phi::curvature(2)}, {"plog(p=2)", Phi::plog(2)}};
}

std::string fmt(double v, int digits = 4) {
  std::ostringstream os;
  os << std::setprecision(digits) << v;
  return os.str();
}

// Solutions accepted by the multiplicity criterion, reused by 7 and 9.
struct Accepted {
  std::string phi_name;
  Phi phi;
  double lambda = 0;
  EnergyReport<double> report;
};

struct State {
  const AcceptanceOptions& opt;
  std::vector<Accepted> accepted;
  bool multiplicity_ran = false;
};

CriterionResult certification(State&) {
  CriterionResult r{1, "N-function certification", true, 0, 0, {}};
  std::ostringstream d;
  const auto grid = log_grid(1e-6, 1e6, 100000);
  auto expect = [&](const std::string& label, const Phi& phi, double G1, double G2) {
    const auto b = certify_growth(phi, grid);
    const bool ok = b.closed_form && b.Gamma1 == G1 && b.Gamma2 == G2 && b.gamma1 == G1 + 1 &&
                    b.gamma2 == G2 + 1 && b.violations == 0;
    r.passed = r.passed && ok;
    d << label << " (" << b.Gamma1 << "," << b.Gamma2 << "," << b.gamma1 << "," << b.gamma2
      << ") violations=" << b.violations << (ok ? "" : " MISMATCH") << "; ";
  };
  expect("curvature(2)", Phi::curvature(2), 1, 3);
  expect("plog(2)", Phi::plog(2), 1, 2);
  for (double p : {1.5, 2.0, 3.0, 5.0}) {
    const Phi phi = Phi::p_power(p);
    const auto b = certify_growth(phi, grid);
    const bool flat = std::abs(b.sampled_min - (p - 1)) <= 1e-12 && std::abs(b.sampled_max - (p - 1)) <= 1e-12;
    const bool ok = b.Gamma1 == p - 1 && b.Gamma2 == p - 1 && flat && b.violations == 0;
    r.passed = r.passed && ok;
    d << "p_power(" << p << ") ratio in [" << fmt(b.sampled_min, 15) << "," << fmt(b.sampled_max, 15) << "]"
      << (ok ? "" : " MISMATCH") << "; ";
  }
  r.budget = 1;
  r.detail = d.str();
  return r;
}

CriterionResult inversion(State&) {
  CriterionResult r{2, "flux inversion round trip", true, 0, 0, {}};
  double worst = 0;
  const auto grid = log_grid(1e-6, 1e6, 2001);
  for (const auto& b : builtins()) {
    for (double t : grid) {
      const double back = invert_flux(b.phi, b.phi.flux(t));
      worst = std::max(worst, std::abs(back - t) / t);
    }
  }
  r.passed = worst <= 1e-10;
  r.budget = 1;
  r.detail = "max relative error " + fmt(worst) + " over 3 x 2001 points in [1e-6, 1e6] (tol 1e-10)";
  return r;
}

CriterionResult radial_oracles(State&) {
  CriterionResult r{3, "radial closed-form oracles and RK4 order", true, 0, 0, {}};
  const Phi p2 = Phi::p_power(2);
  ShootOptions<double> so;
  so.step = 1e-3;
  so.max_radius = 5;
  // u = d - r^2 / 4 solves -(r u')'/r = 1.
  const Nonlinearity one({100}, {0, 100}, {1, 1});
  const auto a = shoot(p2, one, 1.0, 2, 1.0, so);
  double err_a = 0;
  for (std::size_t i = 0; i < a.r.size(); ++i) err_a = std::max(err_a, std::abs(a.u[i] - (1 - a.r[i] * a.r[i] / 4)));
  // u = cos r has its first zero at pi / 2.
  const Nonlinearity lin({10}, {0, 10}, {0, 10});
  const auto b = shoot(p2, lin, 1.0, 1, 1.0, so);
  const double err_b = b.hit_zero() ? std::abs(b.r.back() - std::numbers::pi / 2) : INFINITY;
  // Identity residual under step halving.
  so.step = 1e-2;
  const double coarse = shoot(p2, lin, 1.0, 2, 1.0, so).max_residual();
  so.step = 5e-3;
  const double fine = shoot(p2, lin, 1.0, 2, 1.0, so).max_residual();
  const double ratio = coarse / fine;
  r.passed = err_a <= 1e-6 && err_b <= 1e-6 && ratio >= 8;
  r.detail = "(a) sup error " + fmt(err_a) + " (tol 1e-6); (b) |rho - pi/2| = " + fmt(err_b) +
             " (tol 1e-6); residual " + fmt(coarse) + " -> " + fmt(fine) + " under h/2, ratio " + fmt(ratio) +
             " (need >= 8)";
  return r;
}

CriterionResult gradient_check(State& st) {
  CriterionResult r{4, "discrete gradient vs central differences", true, 0, 0, {}};
  const Nonlinearity f = canonical_f(2);
  const auto tf = truncate(f, 2);
  const double lambda = 50;
  std::mt19937_64 rng(fan_out_seed(st.opt.seed, 4));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0;
  int cases = 0;
  for (const auto& b : builtins()) {
    for (int dims = 1; dims <= 2; ++dims) {
      for (int trial = 0; trial < 20; ++trial) {
        GridFunction u = dims == 1 ? GridFunction(Domain<double>::interval(1), 24)
                                   : GridFunction(Domain<double>::rectangle(1, 1), 6, 6);
        for (Eigen::Index i = 0; i < u.node_count(); ++i) u[i] = 3.2 * unit(rng) - 0.1;
        u.enforce_boundary();
        const auto g = energy_gradient(b.phi, tf, lambda, u).values();
        Vector<double> fd = Vector<double>::Zero(u.node_count());
        for (Eigen::Index i = 0; i < u.node_count(); ++i) {
          if (u.is_boundary(i)) continue;
          const double eps = 1e-6 * std::max(1.0, std::abs(u[i]));
          GridFunction up = u, dn = u;
          up[i] += eps;
          dn[i] -= eps;
          fd(i) = (discretize_energy(b.phi, tf, lambda, up) - discretize_energy(b.phi, tf, lambda, dn)) / (2 * eps);
        }
        const double rel = (g - fd).cwiseAbs().maxCoeff() / std::max(1e-300, g.cwiseAbs().maxCoeff());
        worst = std::max(worst, rel);
        ++cases;
      }
    }
  }
  r.passed = worst <= 1e-6;
  r.budget = 10;
  r.detail = "max relative error " + fmt(worst) + " over " + std::to_string(cases) + " random grid functions (tol 1e-6)";
  return r;
}

CriterionResult truncation_bound(State& st) {
  CriterionResult r{5, "minimizers of I_2 stay in [0, a_2]", true, 0, 0, {}};
  const Nonlinearity f = canonical_f(2);
  const auto tf = truncate(f, 2);
  const auto dom = Domain<double>::interval(1);
  const GridFunction shape(dom, 200);
  MultistartOptions<double> ms;
  ms.seed = fan_out_seed(st.opt.seed, 5);
  int checked = 0, violations = 0, unconverged = 0;
  double worst_low = 0, worst_high = 0;
  std::ostringstream d;
  for (const auto& b : builtins()) {
    const double lk = lambda_threshold_estimate(b.phi, f, dom, 2, 1.0 / 16).lambda;
    for (int j = 0; j < 10; ++j) {
      const double lambda = lk * std::pow(10.0, -2.0 + 3.0 * j / 9.0);
      const auto res = minimize_multistart(b.phi, tf, lambda, shape, ms, std::uint64_t(j));
      for (const auto& run : res.runs) {
        if (!run.converged) {
          ++unconverged;
          continue;
        }
        ++checked;
        const double lo = run.minimizer.values().minCoeff();
        const double hi = run.minimizer.max_value();
        worst_low = std::min(worst_low, lo);
        worst_high = std::max(worst_high, hi / 3);
        if (lo < -1e-8 || hi > 3 * (1 + 1e-3)) ++violations;
      }
    }
  }
  r.passed = violations == 0 && checked > 0;
  d << checked << " converged minimizers over 3 generators x 10 lambdas, " << violations
    << " violations; min v = " << fmt(worst_low) << ", max v / a_2 = " << fmt(worst_high, 8);
  if (unconverged) d << "; " << unconverged << " runs did not converge (not checked)";
  r.detail = d.str();
  return r;
}

std::vector<Builtin> multiplicity_set(const AcceptanceOptions& opt) {
  if (opt.multiplicity_phis.empty()) return {{"p_power(p=2)", Phi::p_power(2)}, {"curvature(gamma=2)", Phi::curvature(2)}};
  std::vector<Builtin> out;
  for (const auto& p : opt.multiplicity_phis) out.push_back({p.describe(), p});
  return out;
}

CriterionResult multiplicity(State& st) {
  CriterionResult r{6, "multiplicity: bands (a1,a2] and (a2,a3] occupied at 2 lambda_bar", true, 0, 0, {}};
  st.multiplicity_ran = true;
  const Nonlinearity f = canonical_f(3);
  const auto dom = Domain<double>::interval(1);
  const GridFunction shape(dom, 400);
  std::ostringstream d;
  for (const auto& b : multiplicity_set(st.opt)) {
    SweepOptions<double> so;
    so.threads = st.opt.threads;
    so.multistart.seed = fan_out_seed(st.opt.seed, 6);
    double ceiling = 0;
    for (int k = 2; k <= 3; ++k) ceiling = std::max(ceiling, lambda_threshold_estimate(b.phi, f, dom, k, 1.0 / 16).lambda);
    std::vector<double> lambdas;
    const int n = 48;
    for (int i = 0; i < n; ++i) lambdas.push_back(std::pow(ceiling, double(i) / double(n - 1)));
    const auto sw = sweep(b.phi, f, shape, lambdas, so);
    d << b.name << ": ceiling " << fmt(sw.analytic_ceiling());
    if (!sw.lambda_bar) {
      r.passed = false;
      d << ", no lambda with both bands occupied; ";
      continue;
    }
    const double lbar = *sw.lambda_bar;
    const double lambda = 2 * lbar;
    std::vector<BandSample<double>> samples;
    bool all = true;
    for (int k = 2; k <= 3; ++k) {
      const auto res = minimize_multistart(b.phi, truncate(f, k), lambda, shape, so.multistart, 1000);
      const EnergyReport<double>* occ = nullptr;
      for (const auto& run : res.runs) {
        if (run.band_occupied() && (!occ || run.energy < occ->energy)) occ = &run;
      }
      if (!occ) {
        all = false;
        d << ", band k=" << k << " empty at 2 lambda_bar";
        continue;
      }
      samples.push_back(band_sample(*occ));
      st.accepted.push_back({b.name, b.phi, lambda, *occ});
      d << ", |u_" << k << "| = " << fmt(occ->supnorm, 6);
    }
    bool chain = false;
    if (all) chain = check_band_ordering(samples, f).all_passed();
    const bool ok = all && chain && lbar <= sw.analytic_ceiling();
    r.passed = r.passed && ok;
    d << ", lambda_bar = " << fmt(lbar) << (lbar <= sw.analytic_ceiling() ? " <= ceiling" : " > ceiling")
      << ", ordering " << (chain ? "pass" : "FAIL") << "; ";
  }
  r.budget = 300;
  r.detail = d.str();
  return r;
}

CriterionResult necessary(State& st) {
  CriterionResult r{7, "necessary condition on accepted and radial solutions", true, 0, 0, {}};
  if (!st.multiplicity_ran) (void)multiplicity(st);
  const Nonlinearity f = canonical_f(3);
  int violations = 0, minimizers = 0, radial = 0;
  for (const auto& a : st.accepted) {
    ++minimizers;
    if (!check_necessary_condition(a.report.supnorm, f).passed) ++violations;
  }
  const Phi p2 = Phi::p_power(2);
  BandSearchOptions<double> bo;
  bo.samples = 48;
  int found[3] = {0, 0, 0};
  for (double lambda : {150.0, 600.0}) {
    for (int j = 1; j <= 2; ++j) {
      const auto rep = find_band_solution(p2, f, lambda, 2, 1.0, j, bo);
      for (const auto& root : rep.roots) {
        if (!root.in_band) continue;
        ++radial;
        ++found[j];
        const auto nc = check_necessary_condition(root.supnorm, f);
        const bool ok = nc.passed && nc.to_sup_integral > 0 && check_bk_exceeded(root.profile, f, j);
        if (!ok) ++violations;
      }
    }
  }
  r.passed = violations == 0 && minimizers > 0 && found[1] > 0 && found[2] > 0;
  r.detail = std::to_string(minimizers) + " minimizers and " + std::to_string(radial) +
             " radial band solutions (N=2, R=1, p=2) checked, " + std::to_string(violations) + " violations";
  return r;
}

CriterionResult cross_module(State& st) {
  CriterionResult r{8, "radial shooting vs energy minimizer on the ball", true, 0, 0, {}};
  const Phi p2 = Phi::p_power(2);
  const Nonlinearity f = canonical_f(2);
  const double lambda = 120;
  const auto rep = find_band_solution(p2, f, lambda, 2, 1.0, 1, BandSearchOptions<double>{});
  MultistartOptions<double> ms;
  ms.seed = fan_out_seed(st.opt.seed, 8);
  const GridFunction shape(Domain<double>::ball(1, 2), 200);
  const auto res = minimize_multistart(p2, truncate(f, 2), lambda, shape, ms);
  const EnergyReport<double>* occ = nullptr;
  for (const auto& run : res.runs) {
    if (run.band_occupied() && (!occ || run.energy < occ->energy)) occ = &run;
  }
  double best = INFINITY;
  for (const auto& root : rep.roots) {
    if (!occ) break;
    const auto& p = root.profile;
    double diff = 0;
    for (Eigen::Index i = 0; i < shape.node_count(); ++i) {
      const double x = shape.coordinate1(i);
      const auto it = std::upper_bound(p.r.begin(), p.r.end(), x);
      double ux = 0;
      if (it != p.r.end() && it != p.r.begin()) {
        const auto j = std::size_t(it - p.r.begin());
        const double w = (x - p.r[j - 1]) / (p.r[j] - p.r[j - 1]);
        ux = p.u[j - 1] + w * (p.u[j] - p.u[j - 1]);
      }
      diff = std::max(diff, std::abs(ux - occ->minimizer[i]));
    }
    best = std::min(best, diff);
  }
  r.passed = occ && best <= 1e-2;
  r.budget = 120;
  r.detail = "k=2, lambda=120, grid 200: " + std::to_string(rep.roots.size()) + " shooting root(s), minimizer sup " +
             (occ ? fmt(occ->supnorm, 6) : std::string("none")) + ", sup-norm gap to nearest root " + fmt(best) +
             " (tol 1e-2)";
  return r;
}

CriterionResult weak(State& st) {
  CriterionResult r{9, "weak residual of accepted solutions", true, 0, 0, {}};
  if (!st.multiplicity_ran) (void)multiplicity(st);
  const Nonlinearity f = canonical_f(3);
  std::ostringstream d;
  if (st.accepted.empty()) r.passed = false;
  for (const auto& a : st.accepted) {
    const auto seed = fan_out_seed(st.opt.seed, 9);
    const double coarse = weak_residual(a.phi, f, a.lambda, a.report.minimizer, 32, seed).max;
    MinimizeOptions<double> mo;
    const auto refined = minimize(a.phi, truncate(f, a.report.k), a.lambda, a.report.minimizer.refined(), mo);
    const double fine = weak_residual(a.phi, f, a.lambda, refined.minimizer, 32, seed).max;
    const bool ok = coarse <= 1e-3 && fine < coarse;
    r.passed = r.passed && ok;
    d << a.phi_name << " k=" << a.report.k << ": " << fmt(coarse) << " -> " << fmt(fine) << " refined"
      << (ok ? "" : " FAIL") << "; ";
  }
  r.detail = d.str() + "(tol 1e-3 at grid 400, must decrease at grid 800)";
  return r;
}

CriterionResult zeta_and_luxemburg(State& st) {
  CriterionResult r{10, "zeta bounds and Luxemburg homogeneity", true, 0, 0, {}};
  std::mt19937_64 rng(fan_out_seed(st.opt.seed, 10));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int zeta_fail = 0;
  double worst = 0;
  const auto grid = log_grid(1e-6, 1e6, 1000);
  for (const auto& b : builtins()) {
    const auto bounds = certify_growth(b.phi, grid);
    for (int i = 0; i < 10000; ++i) {
      const double rho = std::pow(10.0, -3 + 6 * unit(rng));
      const double t = std::pow(10.0, -3 + 6 * unit(rng));
      if (!check_zeta_bounds(b.phi, bounds, rho, t)) ++zeta_fail;
    }
    for (int i = 0; i < 100; ++i) {
      GridFunction u(Domain<double>::interval(1), 40);
      for (Eigen::Index j = 0; j < u.node_count(); ++j) u[j] = 4 * unit(rng) - 2;
      double c = 20 * unit(rng) - 10;
      if (std::abs(c) < 1e-3) c = 1;
      GridFunction cu = u;
      cu.values() *= c;
      const double base = luxemburg_norm(b.phi, u);
      const double scaled = luxemburg_norm(b.phi, cu);
      worst = std::max(worst, std::abs(scaled - std::abs(c) * base) / (std::abs(c) * base));
    }
  }
  r.passed = zeta_fail == 0 && worst <= 1e-8;
  r.detail = std::to_string(zeta_fail) + " zeta-bound failures in 3 x 10^4 samples; worst homogeneity error " +
             fmt(worst) + " over 3 x 100 grid functions (tol 1e-8)";
  return r;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt) {
  using Fn = CriterionResult (*)(State&);
  const Fn table[] = {certification, inversion, radial_oracles, gradient_check, truncation_bound,
                      multiplicity,  necessary, cross_module,   weak,           zeta_and_luxemburg};
  State st{opt, {}, false};
  std::vector<CriterionResult> out;
  for (int id = 1; id <= 10; ++id) {
    if (!opt.only.empty() && std::find(opt.only.begin(), opt.only.end(), id) == opt.only.end()) continue;
    const auto t0 = Clock::now();
    CriterionResult res;
    try {
      res = table[id - 1](st);
    } catch (const std::exception& e) {
      res = CriterionResult{id, "criterion " + std::to_string(id), false, 0, 0, {}};
      res.detail = std::string("exception: ") + e.what();
    }
    res.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    if (res.budget > 0 && res.seconds > res.budget) {
      res.passed = false;
      res.detail += " [runtime " + fmt(res.seconds) + " s exceeds " + fmt(res.budget) + " s]";
    }
    if (opt.on_result) opt.on_result(res);
    out.push_back(std::move(res));
  }
  return out;
}

std::string format_result(const CriterionResult& r) {
  std::ostringstream os;
  os << (r.passed ? "PASS" : "FAIL") << " criterion " << std::setw(2) << r.id << " [" << r.name << "] ("
     << std::fixed << std::setprecision(2) << r.seconds << " s): " << r.detail;
  return os.str();
}

}  // namespace philap::app
