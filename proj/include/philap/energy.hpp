#ifndef PHILAP_ENERGY_HPP
#define PHILAP_ENERGY_HPP

// Discrete truncated energy I_k(lambda, u) = int Phi(|grad u|) - lambda int F_k(u)
// on uniform Dirichlet grids, its exact gradient, a descent minimizer, the
// plateau comparison function and the lambda-threshold machinery.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "philap/core.hpp"
#include "philap/grid.hpp"
#include "philap/nfunction.hpp"
#include "philap/nonlinearity.hpp"

namespace philap {

namespace detail {

// Calls visit(cell_measure, idx[3], coef[2][3], g[2], dims) for every cell.
// Gradient component d is sum_j coef[d][j] * u[idx[j]].
template <typename Scalar, typename Visit>
void for_each_cell(const BasicGridFunction<Scalar>& u, Visit&& visit) {
  const auto& dom = u.domain();
  const auto& v = u.values();
  if (dom.shape == DomainShape::rectangle) {
    const Scalar h1 = u.h1();
    const Scalar h2 = u.h2();
    const Scalar cm = h1 * h2;
    for (int j = 0; j < u.cells2(); ++j) {
      for (int i = 0; i < u.cells1(); ++i) {
        const Eigen::Index idx[3] = {u.index(i, j), u.index(i + 1, j), u.index(i, j + 1)};
        const Scalar coef[2][3] = {{-1 / h1, 1 / h1, 0}, {-1 / h2, 0, 1 / h2}};
        const Scalar g[2] = {(v(idx[1]) - v(idx[0])) / h1, (v(idx[2]) - v(idx[0])) / h2};
        visit(cm, idx, coef, g, 2);
      }
    }
  } else {
    const Scalar h = u.h1();
    for (int c = 0; c < u.cells1(); ++c) {
      const Eigen::Index idx[3] = {c, c + 1, c + 1};
      const Scalar coef[2][3] = {{-1 / h, 1 / h, 0}, {0, 0, 0}};
      const Scalar g[2] = {(v(c + 1) - v(c)) / h, 0};
      visit(u.cell_measure(c), idx, coef, g, 1);
    }
  }
}

// Source-term quadrature: 3-point Gauss per direction on each cell, with u
// interpolated linearly (bilinearly on the rectangle) between the cell nodes.
// Calls visit(weight, idx[4], shape[4], count) per quadrature point; on the ball
// the weight carries the shell Jacobian w_N r^{N-1}.
template <typename Scalar, typename Visit>
void for_each_source_point(const BasicGridFunction<Scalar>& u, Visit&& visit) {
  const Scalar gx[3] = {(1 - std::sqrt(Scalar(0.6))) / 2, Scalar(0.5), (1 + std::sqrt(Scalar(0.6))) / 2};
  const Scalar gw[3] = {Scalar(5) / 18, Scalar(8) / 18, Scalar(5) / 18};
  const auto& dom = u.domain();
  if (dom.shape == DomainShape::rectangle) {
    const Scalar area = u.h1() * u.h2();
    for (int j = 0; j < u.cells2(); ++j) {
      for (int i = 0; i < u.cells1(); ++i) {
        const Eigen::Index idx[4] = {u.index(i, j), u.index(i + 1, j), u.index(i, j + 1), u.index(i + 1, j + 1)};
        for (int a = 0; a < 3; ++a) {
          for (int b = 0; b < 3; ++b) {
            const Scalar sx = gx[a], sy = gx[b];
            const Scalar shape[4] = {(1 - sx) * (1 - sy), sx * (1 - sy), (1 - sx) * sy, sx * sy};
            visit(gw[a] * gw[b] * area, idx, shape, 4);
          }
        }
      }
    }
  } else {
    const Scalar h = u.h1();
    const bool radial = dom.shape == DomainShape::ball;
    const int n = dom.dimension;
    const Scalar omega = radial ? unit_sphere_measure<Scalar>(n) : Scalar(1);
    for (int c = 0; c < u.cells1(); ++c) {
      const Eigen::Index idx[4] = {c, c + 1, c + 1, c + 1};
      for (int a = 0; a < 3; ++a) {
        const Scalar x = h * (Scalar(c) + gx[a]);
        const Scalar jac = radial ? omega * std::pow(x, n - 1) : Scalar(1);
        const Scalar shape[4] = {1 - gx[a], gx[a], 0, 0};
        visit(gw[a] * h * jac, idx, shape, 2);
      }
    }
  }
}

template <typename Scalar>
Scalar interpolate_at(const Vector<Scalar>& v, const Eigen::Index* idx, const Scalar* shape, int count) {
  Scalar out = 0;
  for (int a = 0; a < count; ++a) out += shape[a] * v(idx[a]);
  return out;
}

// Interpolates min(v, cap) at a source point. Nodes above the cap do not move
// the interpolant, so their entries of `active` are zeroed; a node exactly at
// the cap keeps its weight, which gives the one-sided derivative from below.
// Nodal values above a_k then change only the Dirichlet part of the energy, so
// clipping to a_k never raises the energy, as in the continuous problem.
template <typename Scalar>
Scalar interpolate_capped(const Vector<Scalar>& v, const Eigen::Index* idx, const Scalar* shape, int count, Scalar cap,
                          Scalar* active) {
  Scalar out = 0;
  for (int a = 0; a < count; ++a) {
    const Scalar x = v(idx[a]);
    active[a] = x <= cap ? shape[a] : Scalar(0);
    out += shape[a] * std::min(x, cap);
  }
  return out;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace detail

/// Deterministic per-subtask seed derived from one global seed.
inline std::uint64_t fan_out_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                                  std::uint64_t c = 0) {
  return detail::splitmix64(detail::splitmix64(detail::splitmix64(seed ^ a) ^ b) ^ c);
}

/// Cells with |grad u| below this contribute nothing to the gradient (G(0) = 0).
template <typename Scalar>
constexpr Scalar gradient_floor() {
  return Scalar(1e-30);
}

template <typename Scalar>
Scalar discretize_energy(const BasicPhi<Scalar>& phi, const BasicTruncatedF<Scalar>& tf, Scalar lambda,
                         const BasicGridFunction<Scalar>& u) {
  Scalar dirichlet = 0;
  detail::for_each_cell(u, [&](Scalar cm, const Eigen::Index*, const Scalar (*)[3], const Scalar* g, int dims) {
    const Scalar norm = dims == 2 ? std::hypot(g[0], g[1]) : std::abs(g[0]);
    dirichlet += phi.nfunction(norm) * cm;
  });
  Scalar source = 0;
  detail::for_each_source_point(u, [&](Scalar w, const Eigen::Index* idx, const Scalar* shape, int count) {
    Scalar active[4];
    source += w * tf.primitive(detail::interpolate_capped(u.values(), idx, shape, count, tf.cap(), active));
  });
  return dirichlet - lambda * source;
}

/// sum over cells of Phi(|grad u|) * measure.
template <typename Scalar>
Scalar dirichlet_energy(const BasicPhi<Scalar>& phi, const BasicGridFunction<Scalar>& u) {
  Scalar total = 0;
  detail::for_each_cell(u, [&](Scalar cm, const Eigen::Index*, const Scalar (*)[3], const Scalar* g, int dims) {
    total += phi.nfunction(dims == 2 ? std::hypot(g[0], g[1]) : std::abs(g[0])) * cm;
  });
  return total;
}

/// Exact gradient of discretize_energy with respect to the free nodal values.
/// Boundary entries are zero.
template <typename Scalar>
BasicGridFunction<Scalar> energy_gradient(const BasicPhi<Scalar>& phi, const BasicTruncatedF<Scalar>& tf,
                                          Scalar lambda, const BasicGridFunction<Scalar>& u) {
  BasicGridFunction<Scalar> grad(u.domain(), u.cells1(), u.cells2());
  auto& out = grad.values();
  detail::for_each_cell(u, [&](Scalar cm, const Eigen::Index* idx, const Scalar (*coef)[3], const Scalar* g,
                               int dims) {
    const Scalar norm = dims == 2 ? std::hypot(g[0], g[1]) : std::abs(g[0]);
    if (!(norm > gradient_floor<Scalar>())) return;
    const Scalar w = phi.phi(norm) * cm;
    for (int d = 0; d < dims; ++d) {
      for (int j = 0; j < 3; ++j) {
        if (coef[d][j] != 0) out(idx[j]) += w * g[d] * coef[d][j];
      }
    }
  });
  detail::for_each_source_point(u, [&](Scalar w, const Eigen::Index* idx, const Scalar* shape, int count) {
    Scalar active[4];
    const Scalar q = detail::interpolate_capped(u.values(), idx, shape, count, tf.cap(), active);
    const Scalar fq = lambda * w * tf.value(q);
    for (int a = 0; a < count; ++a) out(idx[a]) -= fq * active[a];
  });
  for (Eigen::Index i = 0; i < u.node_count(); ++i) {
    if (u.is_boundary(i)) out(i) = 0;
  }
  return grad;
}

enum class DescentDirection {
  steepest,        // -gradient
  modified_newton  // -(H + tau D)^{-1} gradient, H the second variation
};

template <typename Scalar>
struct MinimizeOptions {
  Scalar gtol = Scalar(1e-8);
  long max_iterations = 100000;
  Scalar armijo = Scalar(1e-4);
  int max_halvings = 60;
  DescentDirection direction = DescentDirection::modified_newton;
};

template <typename Scalar>
struct EnergyReport {
  int k = 0;
  Scalar lambda{};
  Scalar energy{};
  Scalar grad_norm{};
  long iterations = 0;
  bool converged = false;
  std::string init;  // label of the starting guess
  BasicGridFunction<Scalar> minimizer;
  Scalar supnorm{};
  bool bound_ok = false;   // -1e-8 <= v <= a_k + eps_band
  bool in_band = false;    // a_{k-1} < sup <= a_k + eps_band
  bool band_occupied() const { return converged && in_band; }
};

/// eps_band = 1e-3 a_k.
template <typename Scalar>
Scalar band_slack(Scalar ak) {
  return Scalar(1e-3) * ak;
}

/// Strictness margin on the lower side of a band.
template <typename Scalar>
constexpr Scalar band_margin() {
  return Scalar(1e-6);
}

template <typename Scalar>
bool in_truncation_band(const BasicNonlinearity<Scalar>& f, int k, Scalar sup) {
  const Scalar lo = k >= 2 ? f.a(k - 1) : Scalar(0);
  const Scalar hi = f.a(k);
  return sup > lo + band_margin<Scalar>() && sup <= hi + band_slack(hi);
}

namespace detail {

template <typename Scalar>
Eigen::SparseMatrix<Scalar> second_variation(const BasicPhi<Scalar>& phi, const BasicTruncatedF<Scalar>& tf,
                                             Scalar lambda, const BasicGridFunction<Scalar>& u) {
  using Triplet = Eigen::Triplet<Scalar>;
  std::vector<Triplet> trips;
  trips.reserve(static_cast<std::size_t>(u.cell_count()) * 160 + static_cast<std::size_t>(u.node_count()));
  Scalar gmax = 0;
  for_each_cell(u, [&](Scalar, const Eigen::Index*, const Scalar (*)[3], const Scalar* g, int dims) {
    gmax = std::max(gmax, dims == 2 ? std::hypot(g[0], g[1]) : std::abs(g[0]));
  });
  const Scalar floor = std::max(Scalar(1e-8), Scalar(1e-6) * gmax);
  for_each_cell(u, [&](Scalar cm, const Eigen::Index* idx, const Scalar (*coef)[3], const Scalar* g, int dims) {
    const Scalar norm = dims == 2 ? std::hypot(g[0], g[1]) : std::abs(g[0]);
    const Scalar t = std::max(norm, floor);
    const Scalar along = phi.flux_derivative(t);  // (t phi)'
    const Scalar across = phi.phi(t);
    Scalar A[2][2];
    if (dims == 1) {
      A[0][0] = along;
      A[0][1] = A[1][0] = A[1][1] = 0;
    } else {
      Scalar e0 = 1, e1 = 0;
      if (norm > 0) {
        e0 = g[0] / norm;
        e1 = g[1] / norm;
      }
      const Scalar diff = along - across;
      A[0][0] = across + diff * e0 * e0;
      A[1][1] = across + diff * e1 * e1;
      A[0][1] = A[1][0] = diff * e0 * e1;
    }
    for (int a = 0; a < 3; ++a) {
      if (u.is_boundary(idx[a])) continue;
      for (int b = 0; b < 3; ++b) {
        if (u.is_boundary(idx[b])) continue;
        Scalar s = 0;
        for (int d = 0; d < dims; ++d) {
          for (int e = 0; e < dims; ++e) s += coef[d][a] * A[d][e] * coef[e][b];
        }
        if (s != 0) trips.emplace_back(idx[a], idx[b], s * cm);
      }
    }
  });
  for_each_source_point(u, [&](Scalar w, const Eigen::Index* idx, const Scalar* shape, int count) {
    Scalar active[4];
    const Scalar q = interpolate_capped(u.values(), idx, shape, count, tf.cap(), active);
    const Scalar curv = -lambda * w * tf.slope(q);
    if (curv == 0) return;
    for (int a = 0; a < count; ++a) {
      if (u.is_boundary(idx[a]) || active[a] == 0) continue;
      for (int b = 0; b < count; ++b) {
        if (!u.is_boundary(idx[b]) && active[b] != 0) trips.emplace_back(idx[a], idx[b], curv * active[a] * active[b]);
      }
    }
  });
  for (Eigen::Index i = 0; i < u.node_count(); ++i) {
    if (u.is_boundary(i)) trips.emplace_back(i, i, Scalar(1));
  }
  Eigen::SparseMatrix<Scalar> H(u.node_count(), u.node_count());
  H.setFromTriplets(trips.begin(), trips.end());
  return H;
}

// Solves (H + tau D) d = -g with the smallest tau on a geometric ladder that
// makes the shifted matrix positive definite.
template <typename Scalar>
std::optional<Vector<Scalar>> shifted_newton_direction(const Eigen::SparseMatrix<Scalar>& H,
                                                       const Vector<Scalar>& g,
                                                       const BasicGridFunction<Scalar>& u) {
  Vector<Scalar> scale(u.node_count());
  Scalar diag_max = 0;
  for (Eigen::Index i = 0; i < u.node_count(); ++i) {
    scale(i) = u.is_boundary(i) ? Scalar(0) : u.node_measure(i);
    if (scale(i) > 0) diag_max = std::max(diag_max, std::abs(H.coeff(i, i)) / scale(i));
  }
  Scalar tau = 0;
  const Scalar tau0 = std::max(Scalar(1e-10), Scalar(1e-8) * diag_max);
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<Scalar>> solver;
  for (int attempt = 0; attempt < 80; ++attempt) {
    Eigen::SparseMatrix<Scalar> M = H;
    if (tau > 0) {
      for (Eigen::Index i = 0; i < u.node_count(); ++i) {
        if (scale(i) > 0) M.coeffRef(i, i) += tau * scale(i);
      }
    }
    solver.compute(M);
    if (solver.info() == Eigen::Success && (solver.vectorD().array() > 0).all()) {
      Vector<Scalar> d = solver.solve(-g);
      if (solver.info() == Eigen::Success && d.allFinite()) return d;
    }
    tau = tau == 0 ? tau0 : tau * 4;
  }
  return std::nullopt;
}

}  // namespace detail

/// Projected descent with Armijo backtracking (halving) on the box u <= a_k,
/// until the projected gradient satisfies |g|_inf <= gtol. Nodes sitting at a_k
/// whose gradient points upward are held fixed for the step. A line search that
/// stalls because the predicted decrease is below the rounding level of the
/// energy counts as converged; any
/// other stall, and hitting the iteration cap, is reported, not thrown.
template <typename Scalar>
EnergyReport<Scalar> minimize(const BasicPhi<Scalar>& phi, const BasicTruncatedF<Scalar>& tf, Scalar lambda,
                              const BasicGridFunction<Scalar>& init,
                              const MinimizeOptions<Scalar>& opt = {}) {
  const Scalar cap = tf.cap();
  const Eigen::Index n = init.node_count();
  BasicGridFunction<Scalar> u = init;
  u.enforce_boundary();
  u.values() = u.values().cwiseMin(cap);
  Scalar energy = discretize_energy(phi, tf, lambda, u);
  Vector<Scalar> g = energy_gradient(phi, tf, lambda, u).values();
  std::vector<char> fixed(std::size_t(n), 0);
  auto project_gradient = [&] {
    for (Eigen::Index i = 0; i < n; ++i) {
      fixed[std::size_t(i)] = !u.is_boundary(i) && u[i] >= cap && g(i) < 0;
      if (fixed[std::size_t(i)]) g(i) = 0;
    }
  };
  project_gradient();
  long it = 0;
  bool converged = g.cwiseAbs().maxCoeff() <= opt.gtol;
  BasicGridFunction<Scalar> trial = u;
  auto try_step = [&](const Vector<Scalar>& dir, Scalar alpha) {
    for (int h = 0; h <= opt.max_halvings; ++h) {
      trial.values() = (u.values() + alpha * dir).cwiseMin(cap);
      const Scalar e = discretize_energy(phi, tf, lambda, trial);
      if (e < energy && e <= energy + opt.armijo * g.dot(trial.values() - u.values())) {
        u.values() = trial.values();
        energy = e;
        return true;
      }
      alpha /= 2;
    }
    return false;
  };
  while (!converged && it < opt.max_iterations) {
    Vector<Scalar> dir;
    if (opt.direction == DescentDirection::modified_newton) {
      auto H = detail::second_variation(phi, tf, lambda, u);
      if (std::find(fixed.begin(), fixed.end(), 1) != fixed.end()) {
        H.prune([&](Eigen::Index r, Eigen::Index c, const Scalar&) {
          return !fixed[std::size_t(r)] && !fixed[std::size_t(c)];
        });
        for (Eigen::Index i = 0; i < n; ++i) {
          if (fixed[std::size_t(i)]) H.coeffRef(i, i) = 1;
        }
      }
      auto d = detail::shifted_newton_direction(H, g, u);
      dir = d ? *d : Vector<Scalar>(-g);
    } else {
      dir = -g;
    }
    if (!(g.dot(dir) < 0)) dir = -g;
    ++it;
    bool accepted = try_step(dir, Scalar(1));
    if (!accepted) {
      // Working precision reached: the energy can no longer resolve the step.
      const Scalar resolution = 64 * std::numeric_limits<Scalar>::epsilon() * std::max(Scalar(1), std::abs(energy));
      if (-g.dot(dir) <= resolution) {
        converged = true;
        break;
      }
      if (opt.direction == DescentDirection::modified_newton) {
        accepted = try_step(-g, 1 / std::max(Scalar(1), g.cwiseAbs().maxCoeff()));
      }
    }
    if (!accepted) break;
    g = energy_gradient(phi, tf, lambda, u).values();
    project_gradient();
    converged = g.cwiseAbs().maxCoeff() <= opt.gtol;
  }
  EnergyReport<Scalar> rep{tf.k(), lambda, energy, g.cwiseAbs().maxCoeff(), it, converged, "", u};
  rep.supnorm = u.sup_norm();
  const Scalar ak = tf.cap();
  rep.bound_ok = u.values().minCoeff() >= Scalar(-1e-8) && u.max_value() <= ak + band_slack(ak);
  rep.in_band = in_truncation_band(tf.parent(), tf.k(), rep.supnorm);
  return rep;
}

/// w(x) = height * min(1, dist(x, boundary) / delta), sampled on the grid of `shape`.
template <typename Scalar>
BasicGridFunction<Scalar> build_plateau(const BasicGridFunction<Scalar>& shape, Scalar delta, Scalar height) {
  const Scalar limit = shape.domain().inradius() / 2;
  if (!(delta > 0) || delta > limit * (1 + Scalar(1e-12))) {
    std::ostringstream os;
    os << "plateau collar width " << delta << " must lie in (0, " << limit << "]";
    throw StructuralError(os.str());
  }
  BasicGridFunction<Scalar> w(shape.domain(), shape.cells1(), shape.cells2());
  for (Eigen::Index i = 0; i < w.node_count(); ++i) {
    w[i] = height * std::min(Scalar(1), shape.boundary_distance(i) / delta);
  }
  w.enforce_boundary();
  return w;
}

template <typename Scalar>
struct ThresholdEstimate {
  int k = 0;
  Scalar delta{};           // collar width actually used
  int shrinks = 0;
  Scalar alpha_tilde{};     // F(a_k) - max_{[0, a_{k-1}]} F
  Scalar C_k{};             // max_{[0, a_k]} |F|
  Scalar collar{};          // |Omega_delta|
  Scalar dirichlet{};       // int Phi(|grad w_delta|)
  Scalar eta{};
  Scalar lambda{};
};

/// eta_k = alpha~_k |Omega| - 2 C_k |Omega_delta| and lambda_k = int Phi(|grad w_delta|) / eta_k,
/// halving delta up to 20 times until eta_k > 0. The ramp has |grad w| = a_k / delta
/// on the collar, so the Dirichlet term is Phi(a_k / delta) |Omega_delta|.
template <typename Scalar>
ThresholdEstimate<Scalar> lambda_threshold_estimate(const BasicPhi<Scalar>& phi,
                                                    const BasicNonlinearity<Scalar>& f,
                                                    const Domain<Scalar>& domain, int k, Scalar delta) {
  if (k < 2 || k > f.m()) throw StructuralError("threshold estimate needs 2 <= k <= m");
  ThresholdEstimate<Scalar> out;
  out.k = k;
  const Scalar ak = f.a(k);
  out.alpha_tilde = f.primitive(ak) - f.primitive_range(Scalar(0), f.a(k - 1)).second;
  const auto range = f.primitive_range(Scalar(0), ak);
  out.C_k = std::max(std::abs(range.first), std::abs(range.second));
  if (!(out.alpha_tilde > 0)) {
    std::ostringstream os;
    os << "alpha~_" << k << " = " << out.alpha_tilde << " <= 0: band integral condition fails";
    throw ConditionViolation(os.str(), static_cast<double>(f.a(k - 1)));
  }
  delta = std::min(delta, domain.inradius());
  for (int s = 0; s <= 20; ++s) {
    out.delta = delta;
    out.shrinks = s;
    out.collar = domain.collar_measure(delta);
    out.eta = out.alpha_tilde * domain.measure() - 2 * out.C_k * out.collar;
    if (out.eta > 0) break;
    delta /= 2;
  }
  if (!(out.eta > 0)) {
    std::ostringstream os;
    os << "eta_" << k << " <= 0 after 20 halvings: |Omega_delta| = " << out.collar
       << " vs alpha~ |Omega| = " << out.alpha_tilde * domain.measure();
    throw NumericError(os.str());
  }
  out.dirichlet = phi.nfunction(ak / out.delta) * out.collar;
  out.lambda = out.dirichlet / out.eta;
  return out;
}

template <typename Scalar>
struct MultistartOptions {
  int count = 3;            // zero, plateau, then random starts
  std::uint64_t seed = 0;
  Scalar plateau_fraction = Scalar(0.25);  // collar width as a fraction of the inradius
  MinimizeOptions<Scalar> minimize;
};

/// Starting guess `index` for band k: 0 zero, 1 plateau at a_k, >= 2 uniform random in [0, a_k].
template <typename Scalar>
BasicGridFunction<Scalar> multistart_init(const BasicGridFunction<Scalar>& shape, const BasicTruncatedF<Scalar>& tf,
                                          int index, std::uint64_t seed, Scalar plateau_fraction,
                                          std::string* label = nullptr) {
  BasicGridFunction<Scalar> u(shape.domain(), shape.cells1(), shape.cells2());
  if (index == 0) {
    if (label) *label = "zero";
  } else if (index == 1) {
    if (label) *label = "plateau";
    u = build_plateau(shape, plateau_fraction * shape.domain().inradius(), tf.cap());
  } else {
    if (label) *label = "random" + std::to_string(index - 1);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    for (Eigen::Index i = 0; i < u.node_count(); ++i) u[i] = tf.cap() * Scalar(dist(rng));
    u.enforce_boundary();
  }
  return u;
}

/// All multistart runs for one (k, lambda); the best converged energy is the
/// reported "best found" minimizer.
template <typename Scalar>
struct MultistartResult {
  std::vector<EnergyReport<Scalar>> runs;
  int best = -1;
  const EnergyReport<Scalar>* best_run() const { return best < 0 ? nullptr : &runs[static_cast<std::size_t>(best)]; }
};

template <typename Scalar>
MultistartResult<Scalar> minimize_multistart(const BasicPhi<Scalar>& phi, const BasicTruncatedF<Scalar>& tf,
                                             Scalar lambda, const BasicGridFunction<Scalar>& shape,
                                             const MultistartOptions<Scalar>& opt,
                                             std::uint64_t lambda_tag = 0) {
  MultistartResult<Scalar> out;
  for (int s = 0; s < std::max(1, opt.count); ++s) {
    std::string label;
    const auto init = multistart_init(shape, tf, s, fan_out_seed(opt.seed, std::uint64_t(tf.k()), lambda_tag,
                                                                 std::uint64_t(s)),
                                      opt.plateau_fraction, &label);
    auto rep = minimize(phi, tf, lambda, init, opt.minimize);
    rep.init = label;
    out.runs.push_back(std::move(rep));
  }
  for (std::size_t i = 0; i < out.runs.size(); ++i) {
    const auto& r = out.runs[i];
    if (!r.converged) continue;
    if (out.best < 0 || r.energy < out.runs[static_cast<std::size_t>(out.best)].energy) out.best = int(i);
  }
  return out;
}

template <typename Scalar>
struct LambdaSweep {
  std::vector<Scalar> lambdas;
  int m = 0;
  // runs[(k - 2) * lambdas.size() + j] for band k and lambda index j.
  std::vector<MultistartResult<Scalar>> runs;
  std::vector<ThresholdEstimate<Scalar>> thresholds;  // k = 2..m
  std::optional<Scalar> lambda_bar;                   // least grid lambda with every band occupied
  std::vector<std::optional<Scalar>> first_occupied;  // per k = 2..m

  const MultistartResult<Scalar>& at(int k, std::size_t j) const {
    return runs[static_cast<std::size_t>(k - 2) * lambdas.size() + j];
  }
  /// Occupying run for band k at lambda index j (lowest energy among those in band).
  const EnergyReport<Scalar>* occupant(int k, std::size_t j) const {
    const EnergyReport<Scalar>* best = nullptr;
    for (const auto& r : at(k, j).runs) {
      if (r.band_occupied() && (!best || r.energy < best->energy)) best = &r;
    }
    return best;
  }
  bool occupied(int k, std::size_t j) const { return occupant(k, j) != nullptr; }
  Scalar analytic_ceiling() const {
    Scalar c = 0;
    for (const auto& t : thresholds) c = std::max(c, t.lambda);
    return c;
  }
};

template <typename Scalar>
struct SweepOptions {
  MultistartOptions<Scalar> multistart;
  Scalar threshold_delta = Scalar(1) / 16;
  int threads = 1;
};

/// Runs every (k, lambda, start) combination; independent jobs are spread over
/// worker threads and merged by (k, lambda index).
template <typename Scalar>
LambdaSweep<Scalar> sweep(const BasicPhi<Scalar>& phi, const BasicNonlinearity<Scalar>& f,
                          const BasicGridFunction<Scalar>& shape, const std::vector<Scalar>& lambdas,
                          const SweepOptions<Scalar>& opt) {
  LambdaSweep<Scalar> out;
  out.lambdas = lambdas;
  out.m = f.m();
  const int m = f.m();
  if (m < 2) throw StructuralError("sweep needs m >= 2");
  for (int k = 2; k <= m; ++k) {
    out.thresholds.push_back(lambda_threshold_estimate(phi, f, shape.domain(), k,
                                                       std::min(opt.threshold_delta, shape.domain().inradius() / 2)));
  }
  const std::size_t nl = lambdas.size();
  out.runs.resize(static_cast<std::size_t>(m - 1) * nl);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t job = next++; job < out.runs.size(); job = next++) {
      const int k = int(job / nl) + 2;
      const std::size_t j = job % nl;
      const auto tf = truncate(f, k);
      out.runs[job] = minimize_multistart(phi, tf, lambdas[j], shape, opt.multistart, std::uint64_t(j));
    }
  };
  const int nthreads = std::max(1, opt.threads);
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  out.first_occupied.assign(static_cast<std::size_t>(m - 1), std::nullopt);
  for (std::size_t j = 0; j < nl; ++j) {
    bool all = true;
    for (int k = 2; k <= m; ++k) {
      const bool occ = out.occupied(k, j);
      auto& first = out.first_occupied[static_cast<std::size_t>(k - 2)];
      if (occ && !first) first = lambdas[j];
      all = all && occ;
    }
    if (all && !out.lambda_bar) out.lambda_bar = lambdas[j];
  }
  return out;
}

/// Luxemburg norm of a grid function by the cell-midpoint rule.
template <typename Scalar>
Scalar luxemburg_norm(const BasicPhi<Scalar>& phi, const BasicGridFunction<Scalar>& u,
                      Scalar rel_tol = Scalar(1e-10)) {
  Vector<Scalar> samples(u.cell_count());
  Vector<Scalar> weights(u.cell_count());
  Eigen::Index c = 0;
  const auto& v = u.values();
  if (u.domain().shape == DomainShape::rectangle) {
    for (int j = 0; j < u.cells2(); ++j) {
      for (int i = 0; i < u.cells1(); ++i, ++c) {
        samples(c) = (v(u.index(i, j)) + v(u.index(i + 1, j)) + v(u.index(i, j + 1)) + v(u.index(i + 1, j + 1))) / 4;
        weights(c) = u.cell_measure(c);
      }
    }
  } else {
    for (; c < u.cell_count(); ++c) {
      samples(c) = (v(c) + v(c + 1)) / 2;
      weights(c) = u.cell_measure(c);
    }
  }
  return luxemburg_norm(phi, samples, weights, rel_tol);
}

}  // namespace philap

#endif  // PHILAP_ENERGY_HPP
