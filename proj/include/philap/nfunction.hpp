#ifndef PHILAP_NFUNCTION_HPP
#define PHILAP_NFUNCTION_HPP

// Generator phi of the Phi-Laplacian, its N-function Phi(t) = int_0^t s phi(s) ds,
// the flux G(z) = phi(|z|) z and the growth constants that control both.

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "philap/core.hpp"

namespace philap {

enum class PhiKind { p_power, curvature, plog, custom };

inline const char* to_string(PhiKind kind) {
  switch (kind) {
    case PhiKind::p_power: return "p_power";
    case PhiKind::curvature: return "curvature";
    case PhiKind::plog: return "plog";
    case PhiKind::custom: return "custom";
  }
  return "unknown";
}

/// Log-spaced sample grid on [lo, hi] with n points.
template <typename Scalar>
std::vector<Scalar> log_grid(Scalar lo, Scalar hi, std::size_t n) {
  std::vector<Scalar> out(n);
  const Scalar a = std::log(lo);
  const Scalar b = std::log(hi);
  for (std::size_t i = 0; i < n; ++i) {
    const Scalar s = n == 1 ? Scalar(0) : Scalar(i) / Scalar(n - 1);
    out[i] = std::exp(a + (b - a) * s);
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

/// Certified bounds Gamma1 <= (t phi)'/phi <= Gamma2 and gamma_i = Gamma_i + 1.
template <typename Scalar>
struct GrowthBounds {
  Scalar Gamma1{};
  Scalar Gamma2{};
  Scalar gamma1{};
  Scalar gamma2{};
  bool closed_form = false;
  // Grid the bounds were certified (or checked) on.
  Scalar grid_lo{};
  Scalar grid_hi{};
  std::size_t grid_points = 0;
  // Sampled extremes of the ratio and where they occur.
  Scalar sampled_min{};
  Scalar sampled_max{};
  Scalar argmin_t{};
  Scalar argmax_t{};
  std::size_t violations = 0;
};

/// Scalar generator phi with analytic evaluators for the three built-in
/// families and a log-log cubic Hermite table for custom data.
template <typename Scalar>
class BasicPhi {
 public:
  struct Table {
    std::vector<Scalar> log_t;
    std::vector<Scalar> log_phi;
    std::vector<Scalar> slope;     // d log(phi) / d log(t) at each node
    std::vector<Scalar> cumulative;  // Phi(t_i)
    Scalar step{};
  };

  static BasicPhi p_power(Scalar p) {
    if (!(p > 1)) throw DomainError("p_power requires p > 1");
    return BasicPhi(PhiKind::p_power, p);
  }

  static BasicPhi curvature(Scalar gamma) {
    if (!(gamma > Scalar(0.5))) throw DomainError("curvature requires gamma > 1/2");
    return BasicPhi(PhiKind::curvature, gamma);
  }

  static BasicPhi plog(Scalar p) {
    if (!(p >= 1)) throw DomainError("plog requires p >= 1");
    return BasicPhi(PhiKind::plog, p);
  }

  /// Custom generator from samples of phi on a log-spaced grid. If dphi is
  /// empty the log-log slopes are taken from five-point differences.
  static BasicPhi tabulated(const std::vector<Scalar>& t, const std::vector<Scalar>& phi,
                            const std::vector<Scalar>& dphi = {}) {
    const std::size_t n = t.size();
    if (n < 5 || phi.size() != n || (!dphi.empty() && dphi.size() != n)) {
      throw StructuralError("custom phi table needs >= 5 rows with matching columns");
    }
    auto table = std::make_shared<Table>();
    table->log_t.resize(n);
    table->log_phi.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (!(t[i] > 0) || !(phi[i] > 0)) {
        throw StructuralError("custom phi table entries must be positive");
      }
      table->log_t[i] = std::log(t[i]);
      table->log_phi[i] = std::log(phi[i]);
    }
    table->step = (table->log_t[n - 1] - table->log_t[0]) / Scalar(n - 1);
    if (!(table->step > 0)) throw StructuralError("custom phi table must be increasing in t");
    for (std::size_t i = 1; i < n; ++i) {
      const Scalar d = table->log_t[i] - table->log_t[i - 1];
      if (std::abs(d - table->step) > Scalar(1e-6) * table->step) {
        throw StructuralError("custom phi table must be log-spaced");
      }
    }
    table->slope.resize(n);
    const auto& y = table->log_phi;
    const Scalar h = table->step;
    for (std::size_t i = 0; i < n; ++i) {
      if (!dphi.empty()) {
        table->slope[i] = t[i] * dphi[i] / phi[i];
      } else if (i >= 2 && i + 2 < n) {
        table->slope[i] = (y[i - 2] - 8 * y[i - 1] + 8 * y[i + 1] - y[i + 2]) / (12 * h);
      } else if (i < 2) {
        table->slope[i] =
            (-25 * y[i] + 48 * y[i + 1] - 36 * y[i + 2] + 16 * y[i + 3] - 3 * y[i + 4]) / (12 * h);
      } else {
        table->slope[i] =
            (25 * y[i] - 48 * y[i - 1] + 36 * y[i - 2] - 16 * y[i - 3] + 3 * y[i - 4]) / (12 * h);
      }
    }
    BasicPhi out(PhiKind::custom, Scalar(0));
    out.table_ = table;
    // Memo of Phi at the nodes, built once; the object is immutable afterwards.
    table->cumulative.resize(n);
    const Scalar s0 = table->slope.front();
    if (!(s0 > -1)) throw ConditionViolation("custom phi: t*phi(t) does not vanish at 0", t.front());
    table->cumulative[0] = phi.front() * t.front() * t.front() / (s0 + 2);
    for (std::size_t i = 1; i < n; ++i) {
      auto integrand = [&out](Scalar s) { return s * out.phi(s); };
      table->cumulative[i] =
          table->cumulative[i - 1] + adaptive_simpson(integrand, t[i - 1], t[i], Scalar(1e-12));
    }
    return out;
  }

  PhiKind kind() const noexcept { return kind_; }
  /// p for p_power/plog, gamma for curvature, 0 for custom.
  Scalar parameter() const noexcept { return param_; }
  const Table* table() const noexcept { return table_.get(); }

  std::string describe() const {
    std::ostringstream os;
    os << to_string(kind_);
    if (kind_ == PhiKind::curvature) {
      os << "(gamma=" << param_ << ")";
    } else if (kind_ == PhiKind::custom) {
      os << "(" << table_->log_t.size() << " nodes)";
    } else {
      os << "(p=" << param_ << ")";
    }
    return os.str();
  }

  Scalar phi(Scalar t) const {
    if (!(t > 0)) throw DomainError("phi evaluated at nonpositive t");
    const Scalar p = param_;
    switch (kind_) {
      case PhiKind::p_power: return std::pow(t, p - 2);
      case PhiKind::curvature: return 2 * p * std::pow(1 + t * t, p - 1);
      case PhiKind::plog: return p * std::pow(t, p - 2) * std::log1p(t) + std::pow(t, p - 1) / (1 + t);
      case PhiKind::custom: return std::exp(log_phi_table(std::log(t)));
    }
    return Scalar(0);
  }

  Scalar dphi(Scalar t) const {
    if (!(t > 0)) throw DomainError("dphi evaluated at nonpositive t");
    const Scalar p = param_;
    switch (kind_) {
      case PhiKind::p_power: return (p - 2) * std::pow(t, p - 3);
      case PhiKind::curvature: return 4 * p * (p - 1) * std::pow(1 + t * t, p - 2) * t;
      case PhiKind::plog: return (flux_derivative(t) - phi(t)) / t;
      case PhiKind::custom: {
        const Scalar eta = std::cbrt(std::numeric_limits<Scalar>::epsilon());
        return (phi(t * (1 + eta)) - phi(t * (1 - eta))) / (2 * t * eta);
      }
    }
    return Scalar(0);
  }

  /// G(z) = phi(|z|) z, odd, continuous at 0.
  Scalar flux(Scalar z) const {
    if (z == 0) return Scalar(0);
    const Scalar t = std::abs(z);
    const Scalar p = param_;
    Scalar g{};
    switch (kind_) {
      case PhiKind::p_power: g = std::pow(t, p - 1); break;
      case PhiKind::curvature: g = 2 * p * t * std::pow(1 + t * t, p - 1); break;
      case PhiKind::plog: g = p * std::pow(t, p - 1) * std::log1p(t) + std::pow(t, p) / (1 + t); break;
      case PhiKind::custom: g = t * phi(t); break;
    }
    return z < 0 ? -g : g;
  }

  /// (t phi(t))' for t > 0.
  Scalar flux_derivative(Scalar t) const {
    if (!(t > 0)) throw DomainError("flux derivative evaluated at nonpositive t");
    const Scalar p = param_;
    switch (kind_) {
      case PhiKind::p_power: return (p - 1) * std::pow(t, p - 2);
      case PhiKind::curvature: return phi(t) * growth_ratio(t);
      case PhiKind::plog: {
        const Scalar u = t / (1 + t);
        return std::pow(t, p - 2) * (p * (p - 1) * std::log1p(t) + 2 * p * u - u * u);
      }
      case PhiKind::custom: return phi(t) + t * dphi(t);
    }
    return Scalar(0);
  }

  /// (t phi(t))' / phi(t) = 1 + t phi'(t) / phi(t).
  Scalar growth_ratio(Scalar t) const {
    if (!(t > 0)) throw DomainError("growth ratio evaluated at nonpositive t");
    const Scalar p = param_;
    switch (kind_) {
      case PhiKind::p_power: return p - 1;
      case PhiKind::curvature: {
        const Scalar t2 = t * t;
        return 1 + 2 * (p - 1) * t2 / (1 + t2);
      }
      case PhiKind::plog: {
        const Scalar u = t / (1 + t);
        const Scalar l = std::log1p(t);
        return (p * (p - 1) * l + 2 * p * u - u * u) / (p * l + u);
      }
      case PhiKind::custom: {
        const Scalar ph = phi(t);
        if (ph == 0) throw NumericError("degenerate generator: phi(t) == 0");
        return 1 + t * dphi(t) / ph;
      }
    }
    return Scalar(0);
  }

  /// Phi(t) = int_0^|t| s phi(s) ds.
  Scalar nfunction(Scalar t) const {
    t = std::abs(t);
    if (t == 0) return Scalar(0);
    const Scalar p = param_;
    switch (kind_) {
      case PhiKind::p_power: return std::pow(t, p) / p;
      case PhiKind::curvature: return std::expm1(p * std::log1p(t * t));
      case PhiKind::plog: return std::pow(t, p) * std::log1p(t);
      case PhiKind::custom: return nfunction_table(t);
    }
    return Scalar(0);
  }

  /// Phi'(t) = t phi(t) for t >= 0.
  Scalar nfunction_derivative(Scalar t) const { return flux(t); }

 private:
  BasicPhi(PhiKind kind, Scalar param) : kind_(kind), param_(param) {}

  Scalar log_phi_table(Scalar x) const {
    const Table& tb = *table_;
    const std::size_t n = tb.log_t.size();
    if (x <= tb.log_t.front()) return tb.log_phi.front() + tb.slope.front() * (x - tb.log_t.front());
    if (x >= tb.log_t.back()) return tb.log_phi.back() + tb.slope.back() * (x - tb.log_t.back());
    auto i = static_cast<std::size_t>((x - tb.log_t.front()) / tb.step);
    i = std::min(i, n - 2);
    const Scalar h = tb.log_t[i + 1] - tb.log_t[i];
    const Scalar s = (x - tb.log_t[i]) / h;
    const Scalar s2 = s * s;
    const Scalar s3 = s2 * s;
    const Scalar h00 = 2 * s3 - 3 * s2 + 1;
    const Scalar h10 = s3 - 2 * s2 + s;
    const Scalar h01 = -2 * s3 + 3 * s2;
    const Scalar h11 = s3 - s2;
    return h00 * tb.log_phi[i] + h10 * h * tb.slope[i] + h01 * tb.log_phi[i + 1] +
           h11 * h * tb.slope[i + 1];
  }

  Scalar nfunction_table(Scalar t) const {
    const Table& tb = *table_;
    const Scalar x = std::log(t);
    auto integrand = [this](Scalar s) { return s * phi(s); };
    if (x <= tb.log_t.front()) {
      return t * phi(t) * t / (tb.slope.front() + 2);
    }
    if (x >= tb.log_t.back()) {
      const Scalar tn = std::exp(tb.log_t.back());
      const Scalar e = tb.slope.back() + 2;
      return tb.cumulative.back() + (t * phi(t) * t - tn * phi(tn) * tn) / e;
    }
    auto i = static_cast<std::size_t>((x - tb.log_t.front()) / tb.step);
    i = std::min(i, tb.log_t.size() - 2);
    const Scalar ti = std::exp(tb.log_t[i]);
    return tb.cumulative[i] + adaptive_simpson(integrand, ti, t, Scalar(1e-12));
  }

  PhiKind kind_;
  Scalar param_;
  std::shared_ptr<const Table> table_;
};

using Phi = BasicPhi<double>;

// Free-function surface.

template <typename Scalar>
Scalar phi_value(const BasicPhi<Scalar>& phi, Scalar t) {
  return phi.phi(t);
}

template <typename Scalar>
Scalar nfunction_value(const BasicPhi<Scalar>& phi, Scalar t) {
  return phi.nfunction(t);
}

template <typename Scalar>
Scalar growth_ratio(const BasicPhi<Scalar>& phi, Scalar t) {
  return phi.growth_ratio(t);
}

/// Closed-form Gamma bounds for the built-in families; nullopt for custom.
template <typename Scalar>
std::optional<std::pair<Scalar, Scalar>> closed_form_ratio_bounds(const BasicPhi<Scalar>& phi) {
  const Scalar p = phi.parameter();
  switch (phi.kind()) {
    case PhiKind::p_power: return std::pair{p - 1, p - 1};
    case PhiKind::curvature:
      return std::pair{std::min(Scalar(1), 2 * p - 1), std::max(Scalar(1), 2 * p - 1)};
    case PhiKind::plog: return std::pair{p - 1, p};
    case PhiKind::custom: return std::nullopt;
  }
  return std::nullopt;
}

/// Certifies Gamma1/Gamma2 (closed form for built-ins, sampled inf/sup for
/// custom) and counts sampled ratios falling outside the certified interval.
template <typename Scalar>
GrowthBounds<Scalar> certify_growth(const BasicPhi<Scalar>& phi, const std::vector<Scalar>& grid) {
  if (grid.size() < 1000 || grid.front() > Scalar(1e-6) || grid.back() < Scalar(1e6)) {
    throw StructuralError("certification grid must span [1e-6, 1e6] with >= 1000 points");
  }
  GrowthBounds<Scalar> out;
  out.grid_lo = grid.front();
  out.grid_hi = grid.back();
  out.grid_points = grid.size();
  out.sampled_min = std::numeric_limits<Scalar>::infinity();
  out.sampled_max = -std::numeric_limits<Scalar>::infinity();
  for (Scalar t : grid) {
    const Scalar r = phi.growth_ratio(t);
    if (r < out.sampled_min) {
      out.sampled_min = r;
      out.argmin_t = t;
    }
    if (r > out.sampled_max) {
      out.sampled_max = r;
      out.argmax_t = t;
    }
  }
  if (auto cf = closed_form_ratio_bounds(phi)) {
    out.Gamma1 = cf->first;
    out.Gamma2 = cf->second;
    out.closed_form = true;
  } else {
    out.Gamma1 = out.sampled_min;
    out.Gamma2 = out.sampled_max;
  }
  out.gamma1 = out.Gamma1 + 1;
  out.gamma2 = out.Gamma2 + 1;
  const Scalar slack = Scalar(1e-12);
  for (Scalar t : grid) {
    const Scalar r = phi.growth_ratio(t);
    if (r < out.Gamma1 - slack * (1 + std::abs(out.Gamma1)) ||
        r > out.Gamma2 + slack * (1 + std::abs(out.Gamma2))) {
      ++out.violations;
    }
  }
  if (!(out.Gamma1 > 0)) {
    std::ostringstream os;
    os << "growth condition violated: Gamma1 = " << out.Gamma1 << " <= 0 (gamma1 would not exceed 1) for "
       << phi.describe() << ", ratio smallest at t = " << out.argmin_t;
    throw ConditionViolation(os.str(), static_cast<double>(out.argmin_t));
  }
  return out;
}

/// Structural checks on G(t) = t phi(t): strict monotonicity on the grid and
/// the decay/blow-up implied by the certified exponent at 1e-8 and 1e8.
template <typename Scalar>
struct StructureReport {
  bool monotone = true;
  Scalar monotone_witness{};
  bool vanishes_at_zero = true;
  bool unbounded_at_infinity = true;
  Scalar flux_at_small{};
  Scalar flux_at_large{};
  bool ok() const { return monotone && vanishes_at_zero && unbounded_at_infinity; }
};

template <typename Scalar>
StructureReport<Scalar> check_structure(const BasicPhi<Scalar>& phi, const std::vector<Scalar>& grid,
                                        Scalar Gamma1) {
  StructureReport<Scalar> out;
  Scalar prev = -1;
  for (Scalar t : grid) {
    const Scalar g = phi.flux(t);
    if (!(g > prev)) {
      out.monotone = false;
      out.monotone_witness = t;
      break;
    }
    prev = g;
  }
  const Scalar g1 = phi.flux(Scalar(1));
  out.flux_at_small = phi.flux(Scalar(1e-8));
  out.flux_at_large = phi.flux(Scalar(1e8));
  const Scalar slack = Scalar(1e-9);
  // log G has slope >= Gamma1 in log t, so G(t)/G(1) is <= t^Gamma1 below 1 and >= above.
  out.vanishes_at_zero = Gamma1 > 0 && out.flux_at_small <= g1 * std::pow(Scalar(1e-8), Gamma1) * (1 + slack);
  out.unbounded_at_infinity = Gamma1 > 0 && out.flux_at_large >= g1 * std::pow(Scalar(1e8), Gamma1) * (1 - slack);
  return out;
}

/// Solves phi(|z|) z = y. Geometric bracket growth from z = 1, then bisection
/// to relative tolerance rel_tol. Odd in y.
template <typename Scalar>
Scalar invert_flux(const BasicPhi<Scalar>& phi, Scalar y, Scalar rel_tol = Scalar(1e-12)) {
  if (y == 0) return Scalar(0);
  if (!std::isfinite(y)) throw RangeError("flux inversion: non-finite target");
  const Scalar target = std::abs(y);
  Scalar lo = 1;
  Scalar hi = 1;
  int doublings = 0;
  if (phi.flux(hi) < target) {
    while (phi.flux(hi) < target) {
      lo = hi;
      hi *= 2;
      if (++doublings > 1000) throw RangeError("flux inversion: no bracket within 1000 doublings");
    }
  } else {
    while (phi.flux(lo) > target) {
      hi = lo;
      lo /= 2;
      if (++doublings > 1000 || lo == 0) {
        throw RangeError("flux inversion: no bracket within 1000 halvings");
      }
    }
  }
  const Scalar z = bisect_increasing([&](Scalar s) { return phi.flux(s); }, target, lo, hi, rel_tol);
  return y < 0 ? -z : z;
}

/// Luxemburg norm inf{k > 0 : sum_i w_i Phi(u_i / k) <= 1} of weighted samples.
template <typename Scalar, typename Derived, typename DerivedW>
Scalar luxemburg_norm(const BasicPhi<Scalar>& phi, const Eigen::MatrixBase<Derived>& samples,
                      const Eigen::MatrixBase<DerivedW>& weights, Scalar rel_tol = Scalar(1e-10)) {
  const Scalar peak = samples.cwiseAbs().maxCoeff();
  if (peak == 0) return Scalar(0);
  auto modular = [&](Scalar k) {
    Scalar s = 0;
    for (Eigen::Index i = 0; i < samples.size(); ++i) s += weights(i) * phi.nfunction(samples(i) / k);
    return s;
  };
  Scalar lo = peak;
  Scalar hi = peak;
  int guard = 0;
  while (modular(hi) > 1) {
    hi *= 2;
    if (++guard > 2000) throw NumericError("Luxemburg norm: upper bracket not found");
  }
  while (modular(lo) <= 1) {
    lo /= 2;
    if (++guard > 4000 || lo == 0) throw NumericError("Luxemburg norm: lower bracket not found");
  }
  // modular is decreasing in k; bisect on its negation.
  return bisect_increasing([&](Scalar k) { return -modular(k); }, Scalar(-1), lo, hi, rel_tol);
}

/// zeta0(t) Phi(rho) <= Phi(rho t) <= zeta1(t) Phi(rho) within relative slack 1e-9.
template <typename Scalar>
bool check_zeta_bounds(const BasicPhi<Scalar>& phi, const GrowthBounds<Scalar>& bounds, Scalar rho,
                       Scalar t) {
  const Scalar a = std::pow(t, bounds.gamma1);
  const Scalar b = std::pow(t, bounds.gamma2);
  const Scalar zeta0 = std::min(a, b);
  const Scalar zeta1 = std::max(a, b);
  const Scalar base = phi.nfunction(rho);
  const Scalar value = phi.nfunction(rho * t);
  const Scalar slack = Scalar(1e-9);
  return value >= zeta0 * base * (1 - slack) && value <= zeta1 * base * (1 + slack);
}

}  // namespace philap

#endif  // PHILAP_NFUNCTION_HPP
