#ifndef PHILAP_GRID_HPP
#define PHILAP_GRID_HPP

// Uniform Dirichlet grids: interval [0, L], rectangle [0, L1] x [0, L2] and the
// radial ball [0, R] in dimension N (center free, r = R clamped to zero).

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "philap/core.hpp"

namespace philap {

enum class DomainShape { interval, rectangle, ball };

inline const char* to_string(DomainShape s) {
  switch (s) {
    case DomainShape::interval: return "interval";
    case DomainShape::rectangle: return "rectangle";
    case DomainShape::ball: return "ball";
  }
  return "?";
}

template <typename Scalar>
struct Domain {
  DomainShape shape = DomainShape::interval;
  Scalar length1 = 1;  // L, L1 or R
  Scalar length2 = 1;  // L2 (rectangle only)
  int dimension = 1;   // N (ball only; 1 for interval, 2 for rectangle)

  static Domain interval(Scalar length) { return {DomainShape::interval, length, length, 1}; }
  static Domain rectangle(Scalar l1, Scalar l2) { return {DomainShape::rectangle, l1, l2, 2}; }
  static Domain ball(Scalar radius, int dimension) {
    if (dimension < 1) throw StructuralError("ball dimension must be >= 1");
    return {DomainShape::ball, radius, radius, dimension};
  }

  Scalar measure() const {
    switch (shape) {
      case DomainShape::interval: return length1;
      case DomainShape::rectangle: return length1 * length2;
      case DomainShape::ball:
        return unit_sphere_measure<Scalar>(dimension) / Scalar(dimension) * std::pow(length1, dimension);
    }
    return Scalar(0);
  }

  Scalar inradius() const {
    switch (shape) {
      case DomainShape::interval: return length1 / 2;
      case DomainShape::rectangle: return std::min(length1, length2) / 2;
      case DomainShape::ball: return length1;
    }
    return Scalar(0);
  }

  /// |{x : dist(x, boundary) < delta}|.
  Scalar collar_measure(Scalar delta) const {
    const Scalar d = std::min(delta, inradius());
    switch (shape) {
      case DomainShape::interval: return 2 * d;
      case DomainShape::rectangle:
        return length1 * length2 - (length1 - 2 * d) * (length2 - 2 * d);
      case DomainShape::ball: {
        const Scalar w = unit_sphere_measure<Scalar>(dimension) / Scalar(dimension);
        return w * (std::pow(length1, dimension) - std::pow(length1 - d, dimension));
      }
    }
    return Scalar(0);
  }

  std::string describe() const {
    std::ostringstream os;
    switch (shape) {
      case DomainShape::interval: os << "interval[0," << length1 << "]"; break;
      case DomainShape::rectangle: os << "rectangle[0," << length1 << "]x[0," << length2 << "]"; break;
      case DomainShape::ball: os << "ball(R=" << length1 << ",N=" << dimension << ")"; break;
    }
    return os.str();
  }
};

/// Nodal values on a uniform grid. Nodes of the rectangle are stored with the
/// first coordinate fastest: index = i + (n1 + 1) j.
template <typename Scalar>
class BasicGridFunction {
 public:
  BasicGridFunction(Domain<Scalar> domain, int cells1, int cells2 = 0)
      : domain_(domain), n1_(cells1), n2_(domain.shape == DomainShape::rectangle ? cells2 : 0) {
    if (n1_ < 2 || (domain_.shape == DomainShape::rectangle && n2_ < 2)) {
      throw StructuralError("grid needs at least 2 cells per direction");
    }
    values_ = Vector<Scalar>::Zero(node_count());
  }

  const Domain<Scalar>& domain() const noexcept { return domain_; }
  int cells1() const noexcept { return n1_; }
  int cells2() const noexcept { return n2_; }
  Scalar h1() const { return domain_.length1 / Scalar(n1_); }
  Scalar h2() const { return n2_ > 0 ? domain_.length2 / Scalar(n2_) : Scalar(0); }
  Eigen::Index node_count() const {
    return domain_.shape == DomainShape::rectangle ? Eigen::Index(n1_ + 1) * (n2_ + 1)
                                                   : Eigen::Index(n1_ + 1);
  }
  Eigen::Index cell_count() const {
    return domain_.shape == DomainShape::rectangle ? Eigen::Index(n1_) * n2_ : Eigen::Index(n1_);
  }

  Vector<Scalar>& values() noexcept { return values_; }
  const Vector<Scalar>& values() const noexcept { return values_; }
  Scalar& operator[](Eigen::Index i) { return values_(i); }
  Scalar operator[](Eigen::Index i) const { return values_(i); }

  Eigen::Index index(int i, int j = 0) const { return Eigen::Index(i) + Eigen::Index(n1_ + 1) * j; }

  bool is_boundary(Eigen::Index idx) const {
    switch (domain_.shape) {
      case DomainShape::interval: return idx == 0 || idx == n1_;
      case DomainShape::ball: return idx == n1_;
      case DomainShape::rectangle: {
        const auto i = idx % (n1_ + 1);
        const auto j = idx / (n1_ + 1);
        return i == 0 || i == n1_ || j == 0 || j == n2_;
      }
    }
    return false;
  }

  /// First coordinate (x or r) of a node.
  Scalar coordinate1(Eigen::Index idx) const {
    const auto i = domain_.shape == DomainShape::rectangle ? idx % (n1_ + 1) : idx;
    return h1() * Scalar(i);
  }
  Scalar coordinate2(Eigen::Index idx) const {
    return domain_.shape == DomainShape::rectangle ? h2() * Scalar(idx / (n1_ + 1)) : Scalar(0);
  }

  /// Distance from a node to the Dirichlet boundary.
  Scalar boundary_distance(Eigen::Index idx) const {
    const Scalar x = coordinate1(idx);
    switch (domain_.shape) {
      case DomainShape::interval: return std::min(x, domain_.length1 - x);
      case DomainShape::ball: return domain_.length1 - x;
      case DomainShape::rectangle: {
        const Scalar y = coordinate2(idx);
        return std::min({x, domain_.length1 - x, y, domain_.length2 - y});
      }
    }
    return Scalar(0);
  }

  /// Lumped (dual-cell) measure attached to a node.
  Scalar node_measure(Eigen::Index idx) const {
    const Scalar h = h1();
    switch (domain_.shape) {
      case DomainShape::interval: return (idx == 0 || idx == n1_) ? h / 2 : h;
      case DomainShape::ball: {
        const Scalar r = coordinate1(idx);
        const Scalar lo = std::max(Scalar(0), r - h / 2);
        const Scalar hi = std::min(domain_.length1, r + h / 2);
        return shell(lo, hi);
      }
      case DomainShape::rectangle: {
        const auto i = idx % (n1_ + 1);
        const auto j = idx / (n1_ + 1);
        const Scalar wx = (i == 0 || i == n1_) ? Scalar(0.5) : Scalar(1);
        const Scalar wy = (j == 0 || j == n2_) ? Scalar(0.5) : Scalar(1);
        return wx * wy * h * h2();
      }
    }
    return Scalar(0);
  }

  /// Measure of a cell (interval/ball: cell c spans nodes c, c+1).
  Scalar cell_measure(Eigen::Index c) const {
    switch (domain_.shape) {
      case DomainShape::interval: return h1();
      case DomainShape::rectangle: return h1() * h2();
      case DomainShape::ball: return shell(h1() * Scalar(c), h1() * Scalar(c + 1));
    }
    return Scalar(0);
  }

  /// Shell measure w_N/N (hi^N - lo^N).
  Scalar shell(Scalar lo, Scalar hi) const {
    const int n = domain_.dimension;
    return unit_sphere_measure<Scalar>(n) / Scalar(n) * (std::pow(hi, n) - std::pow(lo, n));
  }

  Scalar sup_norm() const { return values_.cwiseAbs().maxCoeff(); }
  Scalar max_value() const { return values_.maxCoeff(); }

  Scalar min_interior() const {
    Scalar out = std::numeric_limits<Scalar>::infinity();
    for (Eigen::Index i = 0; i < values_.size(); ++i) {
      if (!is_boundary(i)) out = std::min(out, values_(i));
    }
    return out;
  }

  void enforce_boundary() {
    for (Eigen::Index i = 0; i < values_.size(); ++i) {
      if (is_boundary(i)) values_(i) = 0;
    }
  }

  bool conforms_with(const BasicGridFunction& other) const {
    return domain_.shape == other.domain_.shape && n1_ == other.n1_ && n2_ == other.n2_ &&
           domain_.length1 == other.domain_.length1 && domain_.length2 == other.domain_.length2 &&
           domain_.dimension == other.domain_.dimension;
  }

  /// Same domain with doubled resolution; values by linear interpolation.
  BasicGridFunction refined() const {
    BasicGridFunction out(domain_, 2 * n1_, 2 * n2_);
    if (domain_.shape != DomainShape::rectangle) {
      for (int i = 0; i <= 2 * n1_; ++i) {
        out.values_(i) = i % 2 == 0 ? values_(i / 2) : (values_(i / 2) + values_(i / 2 + 1)) / 2;
      }
    } else {
      for (int j = 0; j <= 2 * n2_; ++j) {
        for (int i = 0; i <= 2 * n1_; ++i) {
          const int i0 = i / 2, i1 = (i + 1) / 2, j0 = j / 2, j1 = (j + 1) / 2;
          out.values_(out.index(i, j)) = (values_(index(i0, j0)) + values_(index(i1, j0)) +
                                          values_(index(i0, j1)) + values_(index(i1, j1))) /
                                         4;
        }
      }
    }
    return out;
  }

 private:
  Domain<Scalar> domain_;
  int n1_;
  int n2_;
  Vector<Scalar> values_;
};

using GridFunction = BasicGridFunction<double>;

}  // namespace philap

#endif  // PHILAP_GRID_HPP
