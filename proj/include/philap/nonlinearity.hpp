#ifndef PHILAP_NONLINEARITY_HPP
#define PHILAP_NONLINEARITY_HPP

// Piecewise-linear sign-changing nonlinearity f on [0, a_m] with the interval
// skeleton 0 < a_1 < b_1 < ... < b_{m-1} < a_m, its truncations f_k and the
// exact primitives.

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "philap/core.hpp"

namespace philap {

template <typename Scalar>
class BasicNonlinearity {
 public:
  /// breakpoints = {a_1, b_1, a_2, ..., b_{m-1}, a_m}; nodes (s_i, f_i) cover [0, a_m].
  BasicNonlinearity(std::vector<Scalar> breakpoints, std::vector<Scalar> s, std::vector<Scalar> f)
      : breaks_(std::move(breakpoints)), s_(std::move(s)), f_(std::move(f)) {
    if (breaks_.empty() || breaks_.size() % 2 == 0) {
      throw StructuralError("skeleton must list a_1, b_1, ..., a_m (odd count)");
    }
    if (!(breaks_.front() > 0)) throw StructuralError("skeleton must start with a_1 > 0");
    for (std::size_t i = 1; i < breaks_.size(); ++i) {
      if (!(breaks_[i] > breaks_[i - 1])) {
        std::ostringstream os;
        os << "skeleton breakpoints not strictly increasing at position " << i;
        throw StructuralError(os.str());
      }
    }
    if (s_.size() < 2 || s_.size() != f_.size()) {
      throw StructuralError("nonlinearity needs >= 2 nodes with matching values");
    }
    if (s_.front() != 0) throw StructuralError("first node must sit at s = 0");
    for (std::size_t i = 1; i < s_.size(); ++i) {
      if (!(s_[i] > s_[i - 1])) throw StructuralError("node abscissae must be strictly increasing");
    }
    const Scalar am = breaks_.back();
    if (std::abs(s_.back() - am) > Scalar(1e-12) * am) {
      throw StructuralError("last node must sit at s = a_m");
    }
    s_.back() = am;
    cumulative_.assign(s_.size(), Scalar(0));
    for (std::size_t i = 1; i < s_.size(); ++i) {
      cumulative_[i] = cumulative_[i - 1] + (s_[i] - s_[i - 1]) * (f_[i] + f_[i - 1]) / 2;
    }
  }

  int m() const noexcept { return static_cast<int>(breaks_.size() / 2 + 1); }
  /// a_k, 1-based.
  Scalar a(int k) const { return breaks_.at(static_cast<std::size_t>(2 * (k - 1))); }
  /// b_k, 1-based, k <= m - 1.
  Scalar b(int k) const { return breaks_.at(static_cast<std::size_t>(2 * (k - 1) + 1)); }
  Scalar f0() const noexcept { return f_.front(); }
  const std::vector<Scalar>& breakpoints() const noexcept { return breaks_; }
  const std::vector<Scalar>& nodes() const noexcept { return s_; }
  const std::vector<Scalar>& node_values() const noexcept { return f_; }

  /// f(s); f(0) for s < 0 and f(a_m) for s > a_m.
  Scalar value(Scalar s) const {
    if (s <= 0) return f_.front();
    if (s >= s_.back()) return f_.back();
    const std::size_t i = segment(s);
    const Scalar w = (s - s_[i]) / (s_[i + 1] - s_[i]);
    return (1 - w) * f_[i] + w * f_[i + 1];
  }

  /// Slope of the segment containing s (0 outside (0, a_m)).
  Scalar slope(Scalar s) const {
    if (s <= 0 || s >= s_.back()) return Scalar(0);
    const std::size_t i = segment(s);
    return (f_[i + 1] - f_[i]) / (s_[i + 1] - s_[i]);
  }

  /// F(s) = int_0^s f, exact, with the constant continuations outside [0, a_m].
  Scalar primitive(Scalar s) const {
    if (s <= 0) return f_.front() * s;
    if (s >= s_.back()) return cumulative_.back() + f_.back() * (s - s_.back());
    const std::size_t i = segment(s);
    return cumulative_[i] + (s - s_[i]) * (f_[i] + value(s)) / 2;
  }

  /// Exact int_lo^hi f.
  Scalar integral(Scalar lo, Scalar hi) const { return primitive(hi) - primitive(lo); }

  /// Extremes of F on [lo, hi] (F is piecewise quadratic; candidates are the
  /// nodes, the interval ends and sign changes of f inside segments).
  std::pair<Scalar, Scalar> primitive_range(Scalar lo, Scalar hi) const {
    std::vector<Scalar> cand{lo, hi};
    for (std::size_t i = 0; i + 1 < s_.size(); ++i) {
      if (s_[i] > lo && s_[i] < hi) cand.push_back(s_[i]);
      if ((f_[i] < 0) != (f_[i + 1] < 0) && f_[i] != f_[i + 1]) {
        const Scalar root = s_[i] + (s_[i + 1] - s_[i]) * f_[i] / (f_[i] - f_[i + 1]);
        if (root > lo && root < hi) cand.push_back(root);
      }
    }
    Scalar mn = primitive(cand.front());
    Scalar mx = mn;
    for (Scalar c : cand) {
      const Scalar v = primitive(c);
      mn = std::min(mn, v);
      mx = std::max(mx, v);
    }
    return {mn, mx};
  }

  /// sup |f| on [0, a_m].
  Scalar sup_abs() const {
    Scalar out = 0;
    for (Scalar v : f_) out = std::max(out, std::abs(v));
    return out;
  }

  /// Same skeleton, values multiplied by c.
  BasicNonlinearity scaled(Scalar c) const {
    std::vector<Scalar> g(f_);
    for (auto& v : g) v *= c;
    return BasicNonlinearity(breaks_, s_, g);
  }

 private:
  std::size_t segment(Scalar s) const {
    auto it = std::upper_bound(s_.begin(), s_.end(), s);
    auto i = static_cast<std::size_t>(std::distance(s_.begin(), it));
    return std::min(i == 0 ? 0 : i - 1, s_.size() - 2);
  }

  std::vector<Scalar> breaks_;
  std::vector<Scalar> s_;
  std::vector<Scalar> f_;
  std::vector<Scalar> cumulative_;
};

using Nonlinearity = BasicNonlinearity<double>;

// Validation.

enum class FCondition { f1, f2_negative, f2_positive, f3 };

inline const char* to_string(FCondition c) {
  switch (c) {
    case FCondition::f1: return "f(0) >= 0";
    case FCondition::f2_negative: return "f <= 0 on (a_k, b_k)";
    case FCondition::f2_positive: return "f >= 0 on (b_k, a_{k+1})";
    case FCondition::f3: return "int_{a_k}^{a_{k+1}} f > 0";
  }
  return "?";
}

template <typename Scalar>
struct FViolation {
  FCondition condition;
  int k;            // band index (0 for f1)
  Scalar witness;   // s where the condition fails (a_k for f3)
  Scalar value;     // f(witness) or the offending integral
};

template <typename Scalar>
struct ValidationReport {
  std::vector<FViolation<Scalar>> violations;
  std::vector<Scalar> band_integrals;   // trapezoid, k = 1..m-1
  std::vector<std::pair<int, Scalar>> truncation_jumps;  // (k, f(a_k)) with f(a_k) != 0
  bool f3_checked = false;
  bool ok() const { return violations.empty(); }
};

/// Positivity threshold for the band integrals.
template <typename Scalar>
constexpr Scalar band_integral_floor() {
  return Scalar(1e-12);
}

/// Trapezoid over the node mesh refined to step <= 1e-4 a_m.
template <typename Scalar>
Scalar trapezoid_integral(const BasicNonlinearity<Scalar>& f, Scalar lo, Scalar hi) {
  const Scalar max_step = Scalar(1e-4) * f.a(f.m());
  std::vector<Scalar> mesh{lo, hi};
  for (Scalar s : f.nodes()) {
    if (s > lo && s < hi) mesh.push_back(s);
  }
  std::sort(mesh.begin(), mesh.end());
  Scalar total = 0;
  for (std::size_t i = 0; i + 1 < mesh.size(); ++i) {
    const Scalar x0 = mesh[i];
    const Scalar x1 = mesh[i + 1];
    const auto pieces = std::max<long>(1, static_cast<long>(std::ceil((x1 - x0) / max_step)));
    const Scalar h = (x1 - x0) / Scalar(pieces);
    for (long j = 0; j < pieces; ++j) {
      const Scalar a = x0 + h * Scalar(j);
      const Scalar b = j + 1 == pieces ? x1 : a + h;
      total += (b - a) * (f.value(a) + f.value(b)) / 2;
    }
  }
  return total;
}

template <typename Scalar>
ValidationReport<Scalar> validate(const BasicNonlinearity<Scalar>& f, bool check_f3) {
  ValidationReport<Scalar> rep;
  rep.f3_checked = check_f3;
  if (f.f0() < 0) rep.violations.push_back({FCondition::f1, 0, Scalar(0), f.f0()});
  const int m = f.m();
  auto scan = [&](Scalar lo, Scalar hi, bool want_nonpositive, int k) {
    std::vector<Scalar> pts{lo, hi};
    for (Scalar s : f.nodes()) {
      if (s > lo && s < hi) pts.push_back(s);
    }
    std::sort(pts.begin(), pts.end());
    for (Scalar s : pts) {
      const Scalar v = f.value(s);
      if (want_nonpositive ? v > 0 : v < 0) {
        rep.violations.push_back(
            {want_nonpositive ? FCondition::f2_negative : FCondition::f2_positive, k, s, v});
        return;
      }
    }
  };
  for (int k = 1; k < m; ++k) {
    scan(f.a(k), f.b(k), true, k);
    scan(f.b(k), f.a(k + 1), false, k);
  }
  for (int k = 1; k < m; ++k) {
    const Scalar integral = trapezoid_integral(f, f.a(k), f.a(k + 1));
    rep.band_integrals.push_back(integral);
    if (check_f3 && !(integral > band_integral_floor<Scalar>())) {
      rep.violations.push_back({FCondition::f3, k, f.a(k), integral});
    }
  }
  for (int k = 1; k <= m; ++k) {
    const Scalar v = f.value(f.a(k));
    if (v != 0) rep.truncation_jumps.emplace_back(k, v);
  }
  return rep;
}

/// Exact int_{a_k}^{a_{k+1}} f, k = 1..m-1.
template <typename Scalar>
Scalar band_integral(const BasicNonlinearity<Scalar>& f, int k) {
  if (k < 1 || k >= f.m()) throw StructuralError("band index out of range");
  return f.integral(f.a(k), f.a(k + 1));
}

/// f_k(s) = f(0) for s <= 0, f(s) on [0, a_k], 0 above a_k.
template <typename Scalar>
class BasicTruncatedF {
 public:
  BasicTruncatedF(const BasicNonlinearity<Scalar>& parent, int k) : parent_(&parent), k_(k) {
    // k = 1 is accepted when m = 1 so the single-band problem has a truncation.
    const int lo = parent.m() == 1 ? 1 : 2;
    if (k < lo || k > parent.m()) {
      std::ostringstream os;
      os << "truncation index k = " << k << " outside [" << lo << ", " << parent.m() << "]";
      throw StructuralError(os.str());
    }
    cap_ = parent.a(k);
    cap_primitive_ = parent.primitive(cap_);
  }

  int k() const noexcept { return k_; }
  Scalar cap() const noexcept { return cap_; }
  const BasicNonlinearity<Scalar>& parent() const noexcept { return *parent_; }

  Scalar value(Scalar s) const {
    if (s <= 0) return parent_->f0();
    if (s > cap_) return Scalar(0);
    return parent_->value(s);
  }

  Scalar slope(Scalar s) const {
    if (s <= 0 || s > cap_) return Scalar(0);
    return parent_->slope(s);
  }

  Scalar primitive(Scalar s) const {
    if (s <= 0) return parent_->f0() * s;
    if (s >= cap_) return cap_primitive_;
    return parent_->primitive(s);
  }

 private:
  const BasicNonlinearity<Scalar>* parent_;
  int k_;
  Scalar cap_{};
  Scalar cap_primitive_{};
};

using TruncatedF = BasicTruncatedF<double>;

/// The truncation keeps a pointer to f; f must outlive it.
template <typename Scalar>
BasicTruncatedF<Scalar> truncate(const BasicNonlinearity<Scalar>& f, int k) {
  return BasicTruncatedF<Scalar>(f, k);
}

template <typename Scalar>
Scalar primitive(const BasicTruncatedF<Scalar>& tf, Scalar s) {
  return tf.primitive(s);
}

}  // namespace philap

#endif  // PHILAP_NONLINEARITY_HPP
