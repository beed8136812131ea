#ifndef PHILAP_CORE_HPP
#define PHILAP_CORE_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace philap {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// Error taxonomy. Every failure a caller can act on gets its own type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an evaluator (t <= 0 for phi).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Iterative method or quadrature failed to reach its tolerance.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Bracket search exhausted its budget.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Malformed input: unordered breakpoints, bad indices, missing data.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// A structural hypothesis on phi or f fails; carries the witnessing point.
class ConditionViolation : public Error {
 public:
  ConditionViolation(const std::string& what, double witness)
      : Error(what), witness_(witness) {}
  double witness() const noexcept { return witness_; }

 private:
  double witness_;
};

/// Surface measure of the unit sphere in R^N (2 for N = 1, 2*pi for N = 2).
template <typename Scalar>
Scalar unit_sphere_measure(int dimension) {
  const Scalar half_n = Scalar(dimension) / Scalar(2);
  return Scalar(2) * std::pow(std::numbers::pi_v<Scalar>, half_n) / std::tgamma(half_n);
}

namespace detail {

template <typename Scalar, typename F>
Scalar simpson_step(F& f, Scalar a, Scalar fa, Scalar b, Scalar fb, Scalar m, Scalar fm,
                    Scalar whole, Scalar tol, int depth) {
  const Scalar lm = (a + m) / 2;
  const Scalar rm = (m + b) / 2;
  const Scalar flm = f(lm);
  const Scalar frm = f(rm);
  const Scalar left = (m - a) / 6 * (fa + 4 * flm + fm);
  const Scalar right = (b - m) / 6 * (fm + 4 * frm + fb);
  const Scalar delta = left + right - whole;
  if (std::abs(delta) <= 15 * tol) return left + right + delta / 15;
  if (depth <= 0) throw NumericError("adaptive Simpson: recursion limit reached");
  return simpson_step(f, a, fa, m, fm, lm, flm, left, tol / 2, depth - 1) +
         simpson_step(f, m, fm, b, fb, rm, frm, right, tol / 2, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson quadrature on [a, b]. The tolerance is absolute, scaled up
/// by the magnitude of a coarse estimate when that exceeds one.
template <typename Scalar, typename F>
Scalar adaptive_simpson(F&& f, Scalar a, Scalar b, Scalar tol, int max_depth = 48) {
  if (a == b) return Scalar(0);
  const Scalar fa = f(a);
  const Scalar fb = f(b);
  const Scalar m = (a + b) / 2;
  const Scalar fm = f(m);
  const Scalar whole = (b - a) / 6 * (fa + 4 * fm + fb);
  const Scalar scaled = tol * std::max(Scalar(1), std::abs(whole));
  return detail::simpson_step(f, a, fa, b, fb, m, fm, whole, scaled, max_depth);
}

/// Bisection for an increasing function g on [lo, hi] with g(lo) <= target <= g(hi).
/// Stops when the bracket is within rel_tol of its upper end.
template <typename Scalar, typename G>
Scalar bisect_increasing(G&& g, Scalar target, Scalar lo, Scalar hi, Scalar rel_tol,
                         int max_iter = 400) {
  for (int it = 0; it < max_iter; ++it) {
    if (hi - lo <= rel_tol * std::abs(hi)) break;
    const Scalar mid = lo + (hi - lo) / 2;
    if (mid <= lo || mid >= hi) break;
    if (g(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo + (hi - lo) / 2;
}

/// 64-bit FNV-1a, used for config fingerprints in output headers.
inline std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace philap

#endif  // PHILAP_CORE_HPP
