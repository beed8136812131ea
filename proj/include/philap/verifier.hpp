#ifndef PHILAP_VERIFIER_HPP
#define PHILAP_VERIFIER_HPP

// Post-hoc checks on computed solutions. Every check is read-only and states
// its tolerance.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "philap/core.hpp"
#include "philap/energy.hpp"
#include "philap/grid.hpp"
#include "philap/nfunction.hpp"
#include "philap/nonlinearity.hpp"
#include "philap/radial.hpp"

namespace philap {

struct CheckResult {
  std::string name;
  bool passed = false;
  double measured = 0;
  double tolerance = 0;
  std::string reference;
  std::string detail;
};

struct VerificationReport {
  std::vector<CheckResult> checks;

  bool all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
  }
  void add(CheckResult c) { checks.push_back(std::move(c)); }
  void append(const VerificationReport& other) {
    checks.insert(checks.end(), other.checks.begin(), other.checks.end());
  }
};

// Weak residual.

/// Tensor-product raised-cosine bump: 1 at the center of each support
/// interval, vanishing with zero slope at both ends.
template <typename Scalar>
struct CosineBump {
  std::array<Scalar, 2> lo{};
  std::array<Scalar, 2> width{};
  int dims = 1;

  static Scalar profile(Scalar x, Scalar lo, Scalar w) {
    if (x <= lo || x >= lo + w) return Scalar(0);
    return (1 - std::cos(2 * std::numbers::pi_v<Scalar> * (x - lo) / w)) / 2;
  }
  static Scalar slope(Scalar x, Scalar lo, Scalar w) {
    if (x <= lo || x >= lo + w) return Scalar(0);
    return std::numbers::pi_v<Scalar> / w * std::sin(2 * std::numbers::pi_v<Scalar> * (x - lo) / w);
  }
  Scalar value(Scalar x, Scalar y = 0) const {
    Scalar v = profile(x, lo[0], width[0]);
    if (dims == 2) v *= profile(y, lo[1], width[1]);
    return v;
  }
  std::array<Scalar, 2> gradient(Scalar x, Scalar y = 0) const {
    if (dims == 1) return {slope(x, lo[0], width[0]), Scalar(0)};
    return {slope(x, lo[0], width[0]) * profile(y, lo[1], width[1]),
            profile(x, lo[0], width[0]) * slope(y, lo[1], width[1])};
  }
};

/// Seeded bumps whose supports lie inside the domain (radial supports avoid r = 0).
template <typename Scalar>
std::vector<CosineBump<Scalar>> make_test_bumps(const Domain<Scalar>& dom, int trials, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<CosineBump<Scalar>> out;
  const int dims = dom.shape == DomainShape::rectangle ? 2 : 1;
  for (int t = 0; t < trials; ++t) {
    CosineBump<Scalar> b;
    b.dims = dims;
    for (int d = 0; d < dims; ++d) {
      const Scalar len = d == 0 ? dom.length1 : dom.length2;
      const Scalar w = len * Scalar(0.3 + 0.5 * unit(rng));
      b.width[std::size_t(d)] = w;
      b.lo[std::size_t(d)] = (len - w) * Scalar(unit(rng));
    }
    out.push_back(b);
  }
  return out;
}

template <typename Scalar>
struct WeakResidual {
  Scalar max{};
  std::vector<Scalar> per_trial;
};

/// max over bumps v of |int phi(|grad u|) grad u . grad v - lambda int f(u) v| /
/// (1 + lambda int |f(u) v|). The flux term pairs the cellwise gradient of u with
/// the exact gradient of v (3-point Gauss per direction); the source term uses
/// the same cell quadrature as the discrete energy, with v exact at the points.
template <typename Scalar>
WeakResidual<Scalar> weak_residual(const BasicPhi<Scalar>& phi, const BasicNonlinearity<Scalar>& f, Scalar lambda,
                                   const BasicGridFunction<Scalar>& u, int trials, std::uint64_t seed = 0) {
  const auto bumps = make_test_bumps(u.domain(), trials, seed);
  const Scalar gx[3] = {(1 - std::sqrt(Scalar(0.6))) / 2, Scalar(0.5), (1 + std::sqrt(Scalar(0.6))) / 2};
  const Scalar gw[3] = {Scalar(5) / 18, Scalar(8) / 18, Scalar(5) / 18};
  const auto& dom = u.domain();
  const auto& val = u.values();
  const bool planar = dom.shape == DomainShape::rectangle;
  const bool radial = dom.shape == DomainShape::ball;
  const Scalar omega = radial ? unit_sphere_measure<Scalar>(dom.dimension) : Scalar(1);
  WeakResidual<Scalar> out;
  for (const auto& v : bumps) {
    Scalar flux_term = 0;
    detail::for_each_cell(u, [&](Scalar, const Eigen::Index* idx, const Scalar (*)[3], const Scalar* g, int dims) {
      const Scalar x0 = u.coordinate1(idx[0]), y0 = u.coordinate2(idx[0]);
      const Scalar h1 = u.h1(), h2 = planar ? u.h2() : Scalar(0);
      if (x0 + h1 <= v.lo[0] || x0 >= v.lo[0] + v.width[0]) return;
      if (planar && (y0 + h2 <= v.lo[1] || y0 >= v.lo[1] + v.width[1])) return;
      const Scalar norm = dims == 2 ? std::hypot(g[0], g[1]) : std::abs(g[0]);
      if (!(norm > gradient_floor<Scalar>())) return;
      const Scalar w = phi.phi(norm);
      for (int a = 0; a < 3; ++a) {
        const Scalar x = x0 + gx[a] * h1;
        if (planar) {
          for (int b = 0; b < 3; ++b) {
            const Scalar y = y0 + gx[b] * h2;
            const auto gv = v.gradient(x, y);
            flux_term += gw[a] * gw[b] * h1 * h2 * w * (g[0] * gv[0] + g[1] * gv[1]);
          }
        } else {
          const Scalar jac = radial ? omega * std::pow(x, dom.dimension - 1) : Scalar(1);
          flux_term += gw[a] * h1 * jac * w * g[0] * v.gradient(x)[0];
        }
      }
    });
    Scalar source = 0, source_abs = 0;
    detail::for_each_source_point(u, [&](Scalar q, const Eigen::Index* idx, const Scalar* shape, int count) {
      Scalar x = 0, y = 0;
      for (int a = 0; a < count; ++a) {
        x += shape[a] * u.coordinate1(idx[a]);
        y += shape[a] * u.coordinate2(idx[a]);
      }
      const Scalar bump = v.value(x, y);
      if (bump == 0) return;
      const Scalar fv = f.value(detail::interpolate_at(val, idx, shape, count)) * bump;
      source += q * fv;
      source_abs += q * std::abs(fv);
    });
    const Scalar r = std::abs(flux_term - lambda * source) / (1 + lambda * source_abs);
    out.per_trial.push_back(r);
    out.max = std::max(out.max, r);
  }
  return out;
}

// Band ordering.

template <typename Scalar>
struct BandSample {
  int k = 0;          // truncation index: a_{k-1} < sup <= a_k
  Scalar supnorm{};
};

template <typename Scalar>
BandSample<Scalar> band_sample(const EnergyReport<Scalar>& r) {
  return {r.k, r.supnorm};
}

/// Radial root for solution index j sits in truncation band k = j + 1.
template <typename Scalar>
BandSample<Scalar> band_sample(const ShootingRoot<Scalar>& root, int band) {
  return {band + 1, root.supnorm};
}

/// a_1 < |u_2| <= a_2 < |u_3| <= ... <= a_m with eps_band slack on the <= sides
/// and margin 1e-6 on the < sides. Throws if some band k = 2..m has no sample.
template <typename Scalar>
VerificationReport check_band_ordering(const std::vector<BandSample<Scalar>>& samples,
                                       const BasicNonlinearity<Scalar>& f) {
  VerificationReport rep;
  for (int k = 2; k <= f.m(); ++k) {
    auto it = std::find_if(samples.begin(), samples.end(), [k](const auto& s) { return s.k == k; });
    if (it == samples.end()) {
      std::ostringstream os;
      os << "band ordering: no solution supplied for band k = " << k;
      throw StructuralError(os.str());
    }
    const Scalar lo = f.a(k - 1), hi = f.a(k);
    std::ostringstream name;
    name << "band_order_k" << k;
    CheckResult lower{name.str() + "_lower", it->supnorm > lo + band_margin<Scalar>(),
                      double(it->supnorm - lo), double(band_margin<Scalar>()),
                      "a_{k-1} < |u| (strict)", {}};
    CheckResult upper{name.str() + "_upper", it->supnorm <= hi + band_slack(hi), double(it->supnorm - hi),
                      double(band_slack(hi)), "|u| <= a_k", {}};
    rep.add(lower);
    rep.add(upper);
  }
  return rep;
}

// Positivity.

template <typename Scalar>
VerificationReport check_positivity(const BasicGridFunction<Scalar>& u, const BasicNonlinearity<Scalar>& f) {
  if (!(f.f0() > 0)) throw StructuralError("positivity check requires f(0) > 0");
  VerificationReport rep;
  Scalar mn = std::numeric_limits<Scalar>::infinity();
  Eigen::Index where = -1;
  for (Eigen::Index i = 0; i < u.node_count(); ++i) {
    if (!u.is_boundary(i) && u[i] < mn) {
      mn = u[i];
      where = i;
    }
  }
  std::ostringstream os;
  os << "min at node " << where << " (x = " << u.coordinate1(where) << ")";
  rep.add({"positivity", mn > 0, double(mn), 0.0, "u >= 0, f(0) > 0 => u > 0", os.str()});
  return rep;
}

template <typename Scalar>
VerificationReport check_positivity(const RadialProfile<Scalar>& p, const BasicNonlinearity<Scalar>& f) {
  if (!(f.f0() > 0)) throw StructuralError("positivity check requires f(0) > 0");
  VerificationReport rep;
  const std::size_t last = p.hit_zero() ? p.u.size() - 1 : p.u.size();
  Scalar mn = std::numeric_limits<Scalar>::infinity();
  std::size_t where = 0;
  for (std::size_t i = 0; i < last; ++i) {
    if (p.u[i] < mn) {
      mn = p.u[i];
      where = i;
    }
  }
  std::ostringstream os;
  os << "min at r = " << p.r[where];
  rep.add({"positivity", mn > 0, double(mn), 0.0, "u >= 0, f(0) > 0 => u > 0", os.str()});
  return rep;
}

// Maximum-principle inequalities used in the positivity argument.

template <typename Scalar>
struct PucciSerrinReport {
  std::optional<Scalar> c;          // least c with lambda f + c (s Phi(s))' >= 0
  std::optional<Scalar> c_variant;  // same with (s phi(s))'
  Scalar delta{};                   // (gamma1 - 1) / c: where c s / (gamma1 - 1) reaches 1
  Scalar worst_bound_gap{};         // max of c s Phi / H - c s / (gamma1 - 1) on (0, delta]
  Scalar min_delta2_ratio{};        // min of s Phi'(s) / Phi(s) on (0, delta]
  VerificationReport report;
};

template <typename Scalar>
PucciSerrinReport<Scalar> check_pucci_serrin(const BasicPhi<Scalar>& phi, const GrowthBounds<Scalar>& growth,
                                             const BasicNonlinearity<Scalar>& f, Scalar lambda, Scalar ak) {
  if (!(f.f0() > 0)) throw StructuralError("maximum-principle check requires f(0) > 0");
  if (!(growth.gamma1 > 1)) throw StructuralError("maximum-principle check requires gamma1 > 1");
  PucciSerrinReport<Scalar> out;
  const int mesh = 2000;
  std::vector<Scalar> s(mesh + 1);
  for (int i = 0; i <= mesh; ++i) s[std::size_t(i)] = ak * Scalar(i) / Scalar(mesh);
  auto printed = [&](Scalar x) { return phi.nfunction(x) + x * phi.flux(x); };  // (s Phi(s))'
  auto variant = [&](Scalar x) { return x > 0 ? phi.flux_derivative(x) : Scalar(0); };  // (s phi(s))'
  auto least_c = [&](auto&& deriv) -> std::optional<Scalar> {
    auto ok = [&](Scalar c) {
      for (Scalar x : s) {
        if (lambda * f.value(x) + c * deriv(x) < 0) return false;
      }
      return true;
    };
    if (ok(Scalar(0))) return Scalar(0);
    Scalar c = Scalar(1e-12);
    for (int j = 0; j < 200; ++j, c *= 2) {
      if (ok(c)) return c;
    }
    return std::nullopt;
  };
  out.c = least_c(printed);
  out.c_variant = least_c(variant);
  if (!out.c) throw StructuralError("no finite c makes lambda f + c (s Phi)' nonnegative");
  const Scalar c = *out.c;
  const Scalar g1 = growth.gamma1;
  out.delta = c > 0 ? (g1 - 1) / c : ak;
  const Scalar top = std::min(out.delta, ak);
  out.worst_bound_gap = -std::numeric_limits<Scalar>::infinity();
  out.min_delta2_ratio = std::numeric_limits<Scalar>::infinity();
  for (Scalar x : log_grid(top * Scalar(1e-6), top, 400)) {
    const Scalar big = phi.nfunction(x);
    const Scalar H = x * phi.flux(x) - big;
    const Scalar lhs = c * x * big / H;
    const Scalar rhs = c * x / (g1 - 1);
    out.worst_bound_gap = std::max(out.worst_bound_gap, lhs - rhs * (1 + Scalar(1e-9)));
    out.min_delta2_ratio = std::min(out.min_delta2_ratio, x * phi.flux(x) / big);
  }
  std::ostringstream cdesc;
  cdesc << "c = " << c << ", c(s phi(s))' variant = ";
  if (out.c_variant) {
    cdesc << *out.c_variant;
  } else {
    cdesc << "none";
  }
  out.report.add({"pucci_serrin_c", true, double(c), 0.0, "lambda f(s) + c (s Phi(s))' >= 0 on [0, a_k]",
                  cdesc.str()});
  std::ostringstream bdesc;
  bdesc << "delta = " << out.delta;
  out.report.add({"pucci_serrin_bound", !(c > 0) || out.worst_bound_gap <= 0, double(out.worst_bound_gap), 0.0,
                  "c s Phi(s) / H(s) <= c s / (gamma1 - 1) on (0, delta]", bdesc.str()});
  out.report.add({"delta2_lower", out.min_delta2_ratio >= g1 * (1 - Scalar(1e-9)), double(out.min_delta2_ratio),
                  double(g1), "s Phi'(s) / Phi(s) >= gamma1", ""});
  return out;
}

// Necessary condition.

template <typename Scalar>
struct NecessaryCondition {
  int band = 0;               // j with a_j < sup <= a_{j+1}
  Scalar band_integral{};     // int_{a_j}^{a_{j+1}} f
  Scalar to_sup_integral{};   // int_{a_j}^{sup} f
  bool passed = false;
  VerificationReport report;
};

/// Classifies sup into its band and checks int_{a_j}^{a_{j+1}} f > 1e-12. The
/// intermediate int_{a_j}^{sup} f is reported alongside.
template <typename Scalar>
NecessaryCondition<Scalar> check_necessary_condition(Scalar supnorm, const BasicNonlinearity<Scalar>& f) {
  NecessaryCondition<Scalar> out;
  for (int j = 1; j < f.m(); ++j) {
    const Scalar hi = f.a(j + 1);
    if (supnorm > f.a(j) && supnorm <= hi + band_slack(hi)) {
      out.band = j;
      break;
    }
  }
  if (out.band == 0) throw StructuralError("solution sup norm lies in no band (a_j, a_{j+1}]");
  out.band_integral = band_integral(f, out.band);
  out.to_sup_integral = f.integral(f.a(out.band), supnorm);
  out.passed = out.band_integral > band_integral_floor<Scalar>();
  std::ostringstream name;
  name << "necessary_condition_j" << out.band;
  out.report.add({name.str(), out.passed, double(out.band_integral), double(band_integral_floor<Scalar>()),
                  "int_{a_j}^{a_{j+1}} f > 0", ""});
  out.report.add({name.str() + "_to_sup", out.to_sup_integral > 0, double(out.to_sup_integral), 0.0,
                  "int_{a_j}^{|u|} f > 0", ""});
  return out;
}

}  // namespace philap

#endif  // PHILAP_VERIFIER_HPP
