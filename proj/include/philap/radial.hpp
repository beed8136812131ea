#ifndef PHILAP_RADIAL_HPP
#define PHILAP_RADIAL_HPP

// Radial reduction on a ball: march the integral identity
//   -r^{N-1} G(u'(r)) = Q(r),  Q(r) = lambda int_0^r f(u) t^{N-1} dt,
// outward from u(0) = d as a first-order system in (u, Q), and shoot on d.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "philap/core.hpp"
#include "philap/nfunction.hpp"
#include "philap/nonlinearity.hpp"

namespace philap {

enum class ShotEnd { zero, max_radius, escaped };

inline const char* to_string(ShotEnd e) {
  switch (e) {
    case ShotEnd::zero: return "zero";
    case ShotEnd::max_radius: return "max_radius";
    case ShotEnd::escaped: return "escaped";
  }
  return "?";
}

template <typename Scalar>
struct RadialProfile {
  int dimension = 1;
  Scalar lambda{};
  Scalar d{};
  Scalar step{};
  ShotEnd end = ShotEnd::max_radius;
  std::vector<Scalar> r;
  std::vector<Scalar> u;
  std::vector<Scalar> du;
  std::vector<Scalar> Q;
  // |r^{N-1} G(u') + Q_quad| / (1 + |Q_quad|), Q_quad an independent quadrature of
  // lambda f(u) t^{N-1} over the sampled profile.
  std::vector<Scalar> residual;

  Scalar stop_radius() const { return r.empty() ? Scalar(0) : r.back(); }
  bool hit_zero() const { return end == ShotEnd::zero; }
  std::optional<Scalar> first_zero() const {
    return hit_zero() ? std::optional<Scalar>(r.back()) : std::nullopt;
  }
  Scalar sup_norm() const {
    Scalar s = 0;
    for (Scalar v : u) s = std::max(s, std::abs(v));
    return s;
  }
  std::size_t argmax() const {
    return static_cast<std::size_t>(std::distance(u.begin(), std::max_element(u.begin(), u.end())));
  }
  Scalar max_residual() const {
    Scalar s = 0;
    for (Scalar v : residual) s = std::max(s, v);
    return s;
  }
};

template <typename Scalar>
struct ShootOptions {
  Scalar step = Scalar(1e-3);
  Scalar max_radius = Scalar(10);
  // Escape level; <= 0 means 2 a_m.
  Scalar escape = Scalar(0);
};

namespace detail {

template <typename Scalar>
struct RadialRhs {
  const BasicPhi<Scalar>& phi;
  const BasicNonlinearity<Scalar>& f;
  Scalar lambda;
  int n;
  Scalar d;
  Scalar series_radius;

  // Returns (u', Q').
  std::pair<Scalar, Scalar> operator()(Scalar r, Scalar u, Scalar q) const {
    const Scalar w = n == 1 ? Scalar(1) : std::pow(r, n - 1);
    const Scalar dq = lambda * f.value(u) * w;
    Scalar flux_target;
    if (n == 1) {
      flux_target = -q;
    } else if (r < series_radius) {
      // Q / r^{N-1} -> lambda f(d) r / N as r -> 0.
      flux_target = -lambda * f.value(d) * r / Scalar(n);
    } else {
      flux_target = -q / w;
    }
    return {invert_flux(phi, flux_target), dq};
  }
};

template <typename Scalar>
void rk4_step(const RadialRhs<Scalar>& rhs, Scalar r, Scalar h, Scalar& u, Scalar& q) {
  const auto [k1u, k1q] = rhs(r, u, q);
  const auto [k2u, k2q] = rhs(r + h / 2, u + h / 2 * k1u, q + h / 2 * k1q);
  const auto [k3u, k3q] = rhs(r + h / 2, u + h / 2 * k2u, q + h / 2 * k2q);
  const auto [k4u, k4q] = rhs(r + h, u + h * k3u, q + h * k3q);
  u += h / 6 * (k1u + 2 * k2u + 2 * k3u + k4u);
  q += h / 6 * (k1q + 2 * k2q + 2 * k3q + k4q);
}

}  // namespace detail

/// Fills profile.residual from an independent Hermite-corrected trapezoid of
/// lambda f(u) t^{N-1} over the sampled nodes.
template <typename Scalar>
void compute_identity_residual(const BasicPhi<Scalar>& phi, const BasicNonlinearity<Scalar>& f,
                               RadialProfile<Scalar>& p) {
  const int n = p.dimension;
  const std::size_t count = p.r.size();
  p.residual.assign(count, Scalar(0));
  auto g = [&](std::size_t i) {
    return p.lambda * f.value(p.u[i]) * (n == 1 ? Scalar(1) : std::pow(p.r[i], n - 1));
  };
  auto dg = [&](std::size_t i) {
    const Scalar r = p.r[i];
    const Scalar w = n == 1 ? Scalar(1) : std::pow(r, n - 1);
    // u approaches 0 from above at the stopping point, so take the right-sided slope there.
    const Scalar ui = p.u[i] > 0 ? p.u[i] : std::numeric_limits<Scalar>::min();
    Scalar out = f.slope(ui) * p.du[i] * w;
    if (n == 2) {
      out += f.value(p.u[i]);
    } else if (n > 2) {
      out += Scalar(n - 1) * f.value(p.u[i]) * std::pow(r, n - 2);
    }
    return p.lambda * out;
  };
  Scalar q = 0;
  for (std::size_t i = 0; i < count; ++i) {
    if (i > 0) {
      const Scalar h = p.r[i] - p.r[i - 1];
      q += h / 2 * (g(i - 1) + g(i)) + h * h / 12 * (dg(i - 1) - dg(i));
    }
    const Scalar w = n == 1 ? Scalar(1) : std::pow(p.r[i], n - 1);
    p.residual[i] = std::abs(w * phi.flux(p.du[i]) + q) / (1 + std::abs(q));
  }
}

/// RK4 march from u(0) = d. Stops at the first zero of u (located by bisection
/// on the last step length), at opts.max_radius, or when u exceeds the escape level.
template <typename Scalar>
RadialProfile<Scalar> shoot(const BasicPhi<Scalar>& phi, const BasicNonlinearity<Scalar>& f, Scalar lambda,
                            int dimension, Scalar d, const ShootOptions<Scalar>& opts = {}) {
  if (!(d > 0) || !(opts.step > 0) || !(lambda > 0) || dimension < 1) {
    throw DomainError("shoot requires d > 0, h > 0, lambda > 0, N >= 1");
  }
  const Scalar h = opts.step;
  const Scalar escape = opts.escape > 0 ? opts.escape : 2 * f.a(f.m());
  detail::RadialRhs<Scalar> rhs{phi, f, lambda, dimension, d, 10 * h};
  RadialProfile<Scalar> p;
  p.dimension = dimension;
  p.lambda = lambda;
  p.d = d;
  p.step = h;
  Scalar r = 0;
  Scalar u = d;
  Scalar q = 0;
  auto push = [&](Scalar rr, Scalar uu, Scalar qq) {
    p.r.push_back(rr);
    p.u.push_back(uu);
    p.Q.push_back(qq);
    p.du.push_back(rr == 0 ? Scalar(0) : rhs(rr, uu, qq).first);
  };
  push(r, u, q);
  const auto max_steps = static_cast<long>(std::ceil(opts.max_radius / h));
  for (long s = 0; s < max_steps; ++s) {
    Scalar un = u;
    Scalar qn = q;
    try {
      detail::rk4_step(rhs, r, h, un, qn);
    } catch (const RangeError& e) {
      std::ostringstream os;
      os << e.what() << " (at r = " << r << ")";
      throw RangeError(os.str());
    }
    if (un <= 0) {
      // Bisect on the step length for u = 0.
      Scalar lo = 0;
      Scalar hi = h;
      for (int it = 0; it < 200 && hi - lo > std::numeric_limits<Scalar>::epsilon() * (r + h); ++it) {
        const Scalar mid = (lo + hi) / 2;
        Scalar um = u, qm = q;
        detail::rk4_step(rhs, r, mid, um, qm);
        if (um > 0) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      Scalar uz = u, qz = q;
      detail::rk4_step(rhs, r, hi, uz, qz);
      push(r + hi, Scalar(0), qz);
      p.end = ShotEnd::zero;
      compute_identity_residual(phi, f, p);
      return p;
    }
    r = h * Scalar(s + 1);
    u = un;
    q = qn;
    push(r, u, q);
    if (u > escape) {
      p.end = ShotEnd::escaped;
      compute_identity_residual(phi, f, p);
      return p;
    }
  }
  p.end = ShotEnd::max_radius;
  compute_identity_residual(phi, f, p);
  return p;
}

/// One sampled shot of a band scan.
template <typename Scalar>
struct ShotSample {
  Scalar d{};
  std::optional<Scalar> rho;  // first zero radius, none if the shot never hits zero
  ShotEnd end = ShotEnd::max_radius;
};

template <typename Scalar>
struct ShootingRoot {
  Scalar d{};
  Scalar rho{};
  RadialProfile<Scalar> profile;
  Scalar supnorm{};
  bool in_band = false;
};

/// Outcome of a band search for one (lambda, band).
template <typename Scalar>
struct SolveReport {
  int band = 0;  // solution index j: a_j < sup <= a_{j+1}
  Scalar lambda{};
  Scalar radius{};
  int dimension = 1;
  std::vector<ShotSample<Scalar>> samples;
  std::vector<ShootingRoot<Scalar>> roots;
  int rejected_jumps = 0;     // sign changes of rho - R that were discontinuities
  bool multiple_roots = false;
  std::string diagnostics;
  bool found() const { return !roots.empty(); }
};

template <typename Scalar>
struct BandSearchOptions {
  Scalar step = Scalar(1e-3);
  int samples = 64;
  Scalar radius_tol = Scalar(1e-8);  // relative to R
  Scalar max_radius_factor = 2;
};

/// Scans d over (d_lo, d_hi] and bisects every sign change of rho(d) - R.
template <typename Scalar>
SolveReport<Scalar> find_shooting_roots(const BasicPhi<Scalar>& phi, const BasicNonlinearity<Scalar>& f,
                                        Scalar lambda, int dimension, Scalar radius, Scalar d_lo, Scalar d_hi,
                                        const BandSearchOptions<Scalar>& opt = {}) {
  SolveReport<Scalar> rep;
  rep.lambda = lambda;
  rep.radius = radius;
  rep.dimension = dimension;
  ShootOptions<Scalar> so;
  so.step = opt.step;
  so.max_radius = opt.max_radius_factor * radius;
  auto signed_gap = [&](Scalar d, ShotSample<Scalar>& s) {
    const auto prof = shoot(phi, f, lambda, dimension, d, so);
    s.d = d;
    s.end = prof.end;
    s.rho = prof.first_zero();
    return s.rho ? *s.rho - radius : std::numeric_limits<Scalar>::infinity();
  };
  const int n = std::max(2, opt.samples);
  std::vector<Scalar> gaps;
  for (int i = 1; i <= n; ++i) {
    ShotSample<Scalar> s;
    const Scalar d = d_lo + (d_hi - d_lo) * Scalar(i) / Scalar(n);
    gaps.push_back(signed_gap(d, s));
    rep.samples.push_back(s);
  }
  const Scalar tol = opt.radius_tol * radius;
  for (int i = 0; i + 1 < n; ++i) {
    const Scalar g0 = gaps[std::size_t(i)];
    const Scalar g1 = gaps[std::size_t(i + 1)];
    if ((g0 > 0) == (g1 > 0)) continue;
    Scalar lo = rep.samples[std::size_t(i)].d;
    Scalar hi = rep.samples[std::size_t(i + 1)].d;
    const bool lo_positive = g0 > 0;
    Scalar best_d = lo;
    Scalar best_gap = std::numeric_limits<Scalar>::infinity();
    for (int it = 0; it < 200; ++it) {
      const Scalar mid = lo + (hi - lo) / 2;
      ShotSample<Scalar> s;
      const Scalar g = signed_gap(mid, s);
      if (std::abs(g) < std::abs(best_gap)) {
        best_gap = g;
        best_d = mid;
      }
      if (std::abs(g) <= tol || hi - lo <= std::numeric_limits<Scalar>::epsilon() * 4 * std::abs(mid)) break;
      if ((g > 0) == lo_positive) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    if (!(std::abs(best_gap) <= tol)) {
      ++rep.rejected_jumps;
      continue;
    }
    ShootingRoot<Scalar> root;
    root.d = best_d;
    root.profile = shoot(phi, f, lambda, dimension, best_d, so);
    root.rho = *root.profile.first_zero();
    root.supnorm = root.profile.sup_norm();
    rep.roots.push_back(std::move(root));
  }
  rep.multiple_roots = rep.roots.size() > 1;
  std::ostringstream os;
  if (rep.roots.empty()) {
    os << "no sign change of rho(d) - R on " << n << " samples of (" << d_lo << ", " << d_hi << "]";
    if (rep.rejected_jumps > 0) os << "; " << rep.rejected_jumps << " discontinuities rejected";
  } else {
    os << rep.roots.size() << " root(s)";
    if (rep.multiple_roots) os << " (non-monotone rho(d), all reported)";
  }
  rep.diagnostics = os.str();
  return rep;
}

/// Band search for the solution with a_j < sup <= a_{j+1}, j = 1..m-1.
template <typename Scalar>
SolveReport<Scalar> find_band_solution(const BasicPhi<Scalar>& phi, const BasicNonlinearity<Scalar>& f,
                                       Scalar lambda, int dimension, Scalar radius, int band,
                                       const BandSearchOptions<Scalar>& opt = {}) {
  if (band < 1 || band >= f.m()) throw StructuralError("band index must satisfy 1 <= j <= m - 1");
  const Scalar lo = f.a(band);
  const Scalar hi = f.a(band + 1);
  auto rep = find_shooting_roots(phi, f, lambda, dimension, radius, lo, hi, opt);
  rep.band = band;
  for (auto& root : rep.roots) root.in_band = root.supnorm > lo && root.supnorm <= hi;
  return rep;
}

/// True iff the profile's sup exceeds b_j.
template <typename Scalar>
bool check_bk_exceeded(const RadialProfile<Scalar>& profile, const BasicNonlinearity<Scalar>& f, int band) {
  return profile.sup_norm() > f.b(band);
}

template <typename Scalar>
struct IdentityBalance {
  Scalar supnorm{};
  Scalar r0{};            // argmax
  Scalar r1{};            // first crossing of u = a_j after r0
  Scalar slope_at_r1{};   // u'(r1)
  Scalar band_to_sup{};   // int_{a_j}^{sup} f
  Scalar radial_dissipation{};  // int_{r0}^{r1} (N-1)/t phi(|u'|) u'^2 dt
  Scalar flux_dissipation{};    // int_0^{u'(r1)} [s phi(|s|)]' s ds, trapezoid on the profile
  Scalar flux_dissipation_exact{};  // |z| G(|z|) - Phi(|z|), z = u'(r1)
  Scalar lhs{};           // lambda int_{sup}^{a_j} f
  Scalar rhs{};           // -(radial + flux dissipation)
  Scalar relative_residual{};
};

/// Splits lambda int_{sup}^{a_j} f into the two dissipation terms between the
/// argmax r0 and the first a_j-crossing r1.
template <typename Scalar>
IdentityBalance<Scalar> energy_identity_integral(const BasicPhi<Scalar>& phi, const RadialProfile<Scalar>& p,
                                                 const BasicNonlinearity<Scalar>& f, int band) {
  const Scalar level = f.a(band);
  const std::size_t i0 = p.argmax();
  IdentityBalance<Scalar> out;
  out.supnorm = p.u[i0];
  out.r0 = p.r[i0];
  std::size_t i1 = i0;
  while (i1 < p.u.size() && p.u[i1] > level) ++i1;
  if (i1 == p.u.size() || i1 == i0) {
    throw StructuralError("profile never descends to a_j after its maximum");
  }
  // Cubic Hermite on [r_{i1-1}, r_{i1}] for the exact crossing.
  const std::size_t a = i1 - 1;
  const Scalar ra = p.r[a], rb = p.r[i1];
  const Scalar hseg = rb - ra;
  auto hermite = [&](Scalar s, Scalar* deriv) {
    const Scalar s2 = s * s, s3 = s2 * s;
    const Scalar val = (2 * s3 - 3 * s2 + 1) * p.u[a] + (s3 - 2 * s2 + s) * hseg * p.du[a] +
                       (-2 * s3 + 3 * s2) * p.u[i1] + (s3 - s2) * hseg * p.du[i1];
    if (deriv) {
      *deriv = ((6 * s2 - 6 * s) * p.u[a] + (3 * s2 - 4 * s + 1) * hseg * p.du[a] +
                (-6 * s2 + 6 * s) * p.u[i1] + (3 * s2 - 2 * s) * hseg * p.du[i1]) /
               hseg;
    }
    return val;
  };
  Scalar lo = 0, hi = 1;
  for (int it = 0; it < 200; ++it) {
    const Scalar mid = (lo + hi) / 2;
    if (hermite(mid, nullptr) > level) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const Scalar s1 = (lo + hi) / 2;
  Scalar z1 = 0;
  hermite(s1, &z1);
  out.r1 = ra + s1 * hseg;
  out.slope_at_r1 = z1;

  bool moving = z1 != 0;
  for (std::size_t i = i0; i <= a; ++i) moving = moving || p.du[i] != 0;
  if (!moving) throw StructuralError("u' vanishes identically on [r0, r1]");

  const int n = p.dimension;
  auto radial_term = [&](Scalar t, Scalar z) {
    if (n == 1 || t == 0) return Scalar(0);
    return Scalar(n - 1) / t * phi.flux(std::abs(z)) * std::abs(z);
  };
  Scalar d1 = 0, d2 = 0;
  for (std::size_t i = i0; i < a; ++i) {
    const Scalar h = p.r[i + 1] - p.r[i];
    d1 += h / 2 * (radial_term(p.r[i], p.du[i]) + radial_term(p.r[i + 1], p.du[i + 1]));
    d2 += (phi.flux(p.du[i + 1]) - phi.flux(p.du[i])) * (p.du[i] + p.du[i + 1]) / 2;
  }
  d1 += (out.r1 - ra) / 2 * (radial_term(ra, p.du[a]) + radial_term(out.r1, z1));
  d2 += (phi.flux(z1) - phi.flux(p.du[a])) * (p.du[a] + z1) / 2;
  // u' starts from 0 at an interior maximum or at the center.
  if (p.du[i0] != 0) d2 += (phi.flux(p.du[i0]) - 0) * (p.du[i0] + 0) / 2;
  out.radial_dissipation = d1;
  out.flux_dissipation = d2;
  const Scalar az = std::abs(z1);
  out.flux_dissipation_exact = az * phi.flux(az) - phi.nfunction(az);
  out.band_to_sup = f.integral(level, out.supnorm);
  out.lhs = p.lambda * f.integral(out.supnorm, level);
  out.rhs = -(d1 + d2);
  const Scalar scale = std::max({std::abs(out.lhs), std::abs(out.rhs), std::numeric_limits<Scalar>::min()});
  out.relative_residual = std::abs(out.lhs - out.rhs) / scale;
  return out;
}

}  // namespace philap

#endif  // PHILAP_RADIAL_HPP
