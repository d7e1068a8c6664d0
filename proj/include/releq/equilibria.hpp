#pragma once

// Relative equilibria: closed-form constructors, multistart search with Newton
// polish, deduplication modulo rotation, classification and census.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "releq/errors.hpp"
#include "releq/nbody.hpp"
#include "releq/parallel.hpp"
#include "releq/rng.hpp"
#include "releq/smale.hpp"

namespace releq {

enum class ShapeTag { collinear, regular_polygon, polygon_with_center, lagrange_triangle, generic };

inline const char *to_string(ShapeTag t) {
  switch (t) {
  case ShapeTag::collinear:
    return "collinear";
  case ShapeTag::regular_polygon:
    return "regular_polygon";
  case ShapeTag::polygon_with_center:
    return "polygon_with_center";
  case ShapeTag::lagrange_triangle:
    return "lagrange_triangle";
  case ShapeTag::generic:
    return "generic";
  }
  return "generic";
}

struct EquilibriumClass {
  PlanarConfiguration representative;
  double potential_value = 0.0;
  double gradient_norm = 0.0;
  SpectrumReport index_report;
  bool nondegenerate_up_to_rotations = false;
  double singular_value_ratio = 0.0; // smallest / largest singular value of D²Ṽ
  std::size_t pivot = 0;
  ShapeTag shape_tag = ShapeTag::generic;
  std::vector<ShapeTag> detected_tags;
  std::size_t multiplicity = 1; // number of starts that landed in this class
};

// ---------------------------------------------------------------------------
// Closed forms

inline PlanarConfiguration two_body(double m1, double m2) {
  MassVector m({m1, m2});
  const double d = std::cbrt(m.total() / kFourPi);
  return PlanarConfiguration({Vec2(m2 / m.total() * d, 0.0), Vec2(-m1 / m.total() * d, 0.0)},
                             std::move(m));
}

/// Equilateral triangle with side (M/4π)^{1/3}, mass-centered. `mirrored`
/// selects the other orientation (the two are not related by a rotation
/// unless masses coincide).
inline PlanarConfiguration lagrange_triangle(double m1, double m2, double m3,
                                             bool mirrored = false) {
  MassVector m({m1, m2, m3});
  const double s = std::cbrt(m.total() / kFourPi);
  const double h = (mirrored ? -1.0 : 1.0) * s * std::sqrt(3.0) / 2.0;
  std::vector<Vec2> pts{Vec2(0.0, 0.0), Vec2(s, 0.0), Vec2(0.5 * s, h)};
  const Vec2 c = (m1 * pts[0] + m2 * pts[1] + m3 * pts[2]) / m.total();
  for (Vec2 &p : pts)
    p -= c;
  return PlanarConfiguration(std::move(pts), std::move(m));
}

/// a_N = ½ Σ_{j=1}^{N−1} 1/sin(πj/N)
inline double polygon_sum(int n) {
  if (n < 2)
    throw ValidationError("polygon needs N >= 2");
  double a = 0.0;
  for (int j = 1; j < n; ++j)
    a += 1.0 / std::sin(kPi * j / n);
  return 0.5 * a;
}

/// Regular N-gon of equal masses with radius r = (a_N m / 8π)^{1/3}.
inline PlanarConfiguration polygon(int n, double m_star) {
  if (n < 2)
    throw ValidationError("polygon needs N >= 2");
  MassVector m(std::vector<double>(static_cast<std::size_t>(n), m_star));
  const double r = std::cbrt(polygon_sum(n) * m_star / (8.0 * kPi));
  std::vector<Vec2> pts(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const double t = 2.0 * kPi * j / n;
    pts[static_cast<std::size_t>(j)] = Vec2(r * std::cos(t), r * std::sin(t));
  }
  return PlanarConfiguration(std::move(pts), std::move(m));
}

namespace detail {

inline PlanarConfiguration ring_with_center(int n, double r, const MassVector &m) {
  std::vector<Vec2> pts(static_cast<std::size_t>(n) + 1);
  for (int j = 0; j < n; ++j) {
    const double t = 2.0 * kPi * j / n;
    pts[static_cast<std::size_t>(j)] = Vec2(r * std::cos(t), r * std::sin(t));
  }
  pts.back() = Vec2::Zero();
  return PlanarConfiguration(std::move(pts), m);
}

} // namespace detail

/// N ring particles of mass m_ring around one particle of mass m_center. The
/// radius is the root of the radial force balance on a ring particle, found by
/// bracketed Newton.
inline PlanarConfiguration polygon_with_center(int n, double m_ring, double m_center) {
  if (n < 2)
    throw ValidationError("polygon_with_center needs N >= 2 ring particles");
  std::vector<double> mv(static_cast<std::size_t>(n), m_ring);
  mv.push_back(m_center);
  const MassVector m(std::move(mv));
  const auto mspan = m.values();

  // Residual: radial component of ∇V on ring particle 0 (sits at (r, 0)).
  // Its derivative follows from the Hessian applied to the ring's radial field.
  auto residual = [&](double r, double *deriv) {
    const Eigen::VectorXd z = detail::ring_with_center(n, r, m).flat();
    const Eigen::VectorXd g = detail::gradient(z, mspan);
    if (deriv) {
      Eigen::VectorXd dz = Eigen::VectorXd::Zero(z.size());
      for (int j = 0; j < n; ++j) {
        dz(2 * j) = z(2 * j) / r;
        dz(2 * j + 1) = z(2 * j + 1) / r;
      }
      *deriv = (detail::hessian(z, mspan) * dz)(0);
    }
    return g(0);
  };

  // f(r) = m_ring·r − c/r² with c > 0: negative near 0, positive for large r.
  double lo = 1e-3, hi = 1.0;
  while (residual(lo, nullptr) > 0.0)
    lo *= 0.5;
  while (residual(hi, nullptr) < 0.0)
    hi *= 2.0;
  double r = 0.5 * (lo + hi);
  for (int it = 0; it < 100; ++it) {
    double df = 0.0;
    const double f = residual(r, &df);
    if (f < 0.0)
      lo = r;
    else
      hi = r;
    double next = r - f / df;
    if (!(next > lo && next < hi))
      next = 0.5 * (lo + hi);
    if (std::abs(next - r) <= 1e-15 * r) {
      const PlanarConfiguration out = detail::ring_with_center(n, next, m);
      if (gradient_norm(out) <= 1e-10)
        return out;
    }
    r = next;
  }
  const PlanarConfiguration out = detail::ring_with_center(n, r, m);
  if (gradient_norm(out) <= 1e-10)
    return out;
  throw ConvergenceError("polygon_with_center: radius iteration did not converge in 100 steps");
}

/// Collinear equilibrium realizing the left-to-right `ordering` (0-based
/// permutation of particle indices) on the first axis. The potential restricted
/// to the line is strictly convex inside each ordering chamber, so damped
/// Newton that never leaves the chamber converges to its unique minimizer,
/// which is automatically mass-centered.
inline PlanarConfiguration moulton(const MassVector &masses, const std::vector<std::size_t> &ordering) {
  const std::size_t n = masses.size();
  if (ordering.size() != n)
    throw ValidationError("ordering length must equal the number of masses");
  std::vector<bool> seen(n, false);
  for (std::size_t k : ordering) {
    if (k >= n || seen[k])
      throw ValidationError("ordering must be a permutation of the particle indices");
    seen[k] = true;
  }
  if (n == 1)
    return PlanarConfiguration({Vec2::Zero()}, masses);

  const auto m = masses.values();
  auto energy = [&](const Eigen::VectorXd &x) {
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      e += 0.5 * m[i] * x(i) * x(i);
      for (std::size_t j = i + 1; j < n; ++j)
        e += m[i] * m[j] / (kFourPi * std::abs(x(i) - x(j)));
    }
    return e;
  };
  auto in_chamber = [&](const Eigen::VectorXd &x) {
    for (std::size_t k = 0; k + 1 < n; ++k)
      if (!(x(ordering[k]) < x(ordering[k + 1])))
        return false;
    return true;
  };

  Eigen::VectorXd x(n);
  const double spacing = std::cbrt(masses.total() / kFourPi);
  for (std::size_t k = 0; k < n; ++k)
    x(ordering[k]) = (static_cast<double>(k) - 0.5 * static_cast<double>(n - 1)) * spacing;

  for (int it = 0; it < 200; ++it) {
    Eigen::VectorXd g(n);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      g(i) = m[i] * x(i);
      h(i, i) += m[i];
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i)
          continue;
        const double d = x(i) - x(j);
        const double ad = std::abs(d);
        const double c = m[i] * m[j] / kFourPi;
        g(i) -= c * d / (ad * ad * ad);
        h(i, i) += 2.0 * c / (ad * ad * ad);
        h(i, j) -= 2.0 * c / (ad * ad * ad);
      }
    }
    if (g.norm() <= 1e-14 * std::max(1.0, masses.total() * spacing))
      break;
    const Eigen::VectorXd step = h.llt().solve(-g);
    const double e0 = energy(x);
    double t = 1.0;
    Eigen::VectorXd trial = x + step;
    while (!(in_chamber(trial) && energy(trial) <= e0 + 1e-4 * t * g.dot(step))) {
      t *= 0.5;
      if (t < 1e-12)
        break;
      trial = x + t * step;
    }
    if (t < 1e-12) {
      // No acceptable decrease: at rounding level already.
      break;
    }
    x = trial;
  }

  std::vector<Vec2> pts(n);
  for (std::size_t i = 0; i < n; ++i)
    pts[i] = Vec2(x(i), 0.0);
  PlanarConfiguration out(std::move(pts), masses);
  if (!(gradient_norm(out) <= 1e-10))
    throw ConvergenceError("moulton: Newton on the line problem did not converge");
  return out;
}

// ---------------------------------------------------------------------------
// Classification

struct ClassifyOptions {
  double certify_tolerance = 1e-9;
  double shape_tolerance = 1e-8;
  double degeneracy_factor = 1e-8;
};

namespace detail {

/// Flat coordinates and gradient/Hessian of Ṽ: V with the pivot's second
/// coordinate removed.
inline std::vector<Eigen::Index> reduced_indices(std::size_t n, std::size_t pivot) {
  std::vector<Eigen::Index> idx;
  for (std::size_t k = 0; k < 2 * n; ++k)
    if (k != 2 * pivot + 1)
      idx.push_back(static_cast<Eigen::Index>(k));
  return idx;
}

inline double singular_value_ratio_reduced(const PlanarConfiguration &c, std::size_t pivot) {
  const Eigen::MatrixXd h = detail::hessian(c.flat(), c.masses().values());
  const auto idx = reduced_indices(c.size(), pivot);
  const auto k = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXd hr(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j)
      hr(i, j) = h(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(hr);
  const Eigen::VectorXd s = svd.singularValues();
  return s(s.size() - 1) / s(0);
}

inline std::vector<ShapeTag> detect_shapes(const PlanarConfiguration &c, double tol) {
  std::vector<ShapeTag> tags;
  const std::size_t n = c.size();
  const Vec2 com = c.center_of_mass();
  std::vector<Vec2> p(n);
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    p[i] = c.point(i) - com;
    scale = std::max(scale, p[i].norm());
  }
  const double eps = tol * std::max(scale, 1e-300);

  auto is_regular = [&](const std::vector<Vec2> &pts) {
    if (pts.size() < 2)
      return false;
    const double r0 = pts[0].norm();
    std::vector<double> ang;
    for (const Vec2 &q : pts) {
      if (std::abs(q.norm() - r0) > eps || q.norm() <= eps)
        return false;
      ang.push_back(std::atan2(q.y(), q.x()));
    }
    std::sort(ang.begin(), ang.end());
    const double gap = 2.0 * kPi / static_cast<double>(pts.size());
    for (std::size_t k = 0; k < ang.size(); ++k) {
      const double next = k + 1 < ang.size() ? ang[k + 1] : ang[0] + 2.0 * kPi;
      if (std::abs((next - ang[k]) - gap) * r0 > eps)
        return false;
    }
    return true;
  };

  if (n == 3) {
    const double d01 = (p[0] - p[1]).norm(), d02 = (p[0] - p[2]).norm(), d12 = (p[1] - p[2]).norm();
    if (std::abs(d01 - d02) <= eps && std::abs(d01 - d12) <= eps && std::abs(d02 - d12) <= eps)
      tags.push_back(ShapeTag::lagrange_triangle);
  }
  if (n >= 3 && is_regular(p))
    tags.push_back(ShapeTag::regular_polygon);

  if (n >= 2) {
    Eigen::Matrix2d s = Eigen::Matrix2d::Zero();
    for (const Vec2 &q : p)
      s += q * q.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(s);
    const Vec2 normal = es.eigenvectors().col(0);
    bool collinear = true;
    for (const Vec2 &q : p)
      collinear = collinear && std::abs(normal.dot(q)) <= eps;
    if (collinear)
      tags.push_back(ShapeTag::collinear);
  }

  if (n >= 3) {
    std::vector<std::size_t> centre;
    std::vector<Vec2> ring;
    for (std::size_t i = 0; i < n; ++i) {
      if (p[i].norm() <= eps)
        centre.push_back(i);
      else
        ring.push_back(p[i]);
    }
    if (centre.size() == 1 && is_regular(ring))
      tags.push_back(ShapeTag::polygon_with_center);
  }
  return tags;
}

inline ShapeTag primary_tag(const std::vector<ShapeTag> &tags) {
  for (ShapeTag t : {ShapeTag::lagrange_triangle, ShapeTag::regular_polygon, ShapeTag::collinear,
                     ShapeTag::polygon_with_center})
    if (std::find(tags.begin(), tags.end(), t) != tags.end())
      return t;
  return ShapeTag::generic;
}

} // namespace detail

inline EquilibriumClass classify(const PlanarConfiguration &config, const ClassifyOptions &opt = {}) {
  const double gn = gradient_norm(config);
  if (!(gn <= opt.certify_tolerance))
    throw ValidationError("configuration is not a certified critical point (gradient norm " +
                          std::to_string(gn) + ")");
  EquilibriumClass ec;
  ec.pivot = largest_norm_index(config);
  ec.representative = canonicalize(config, ec.pivot);
  ec.potential_value = potential(ec.representative);
  ec.gradient_norm = gradient_norm(ec.representative);
  if (config.size() >= 2) {
    ec.index_report = reduced_hessian(to_smale(ec.representative).shape);
    ec.singular_value_ratio = detail::singular_value_ratio_reduced(ec.representative, ec.pivot);
    ec.nondegenerate_up_to_rotations = ec.singular_value_ratio > opt.degeneracy_factor;
  } else {
    ec.singular_value_ratio = 1.0;
    ec.nondegenerate_up_to_rotations = true;
  }
  ec.detected_tags = detail::detect_shapes(ec.representative, opt.shape_tolerance);
  ec.shape_tag = detail::primary_tag(ec.detected_tags);
  return ec;
}

// ---------------------------------------------------------------------------
// Multistart search

/// What the descent stage drives down before the Newton polish. Descending V
/// alone only reaches its local minima; saddle classes (collinear ones among
/// them) need the residual ½|∇V|² as target.
enum class DescentTarget { potential, gradient_norm, mixed };

inline const char *to_string(DescentTarget t) {
  switch (t) {
  case DescentTarget::potential:
    return "potential";
  case DescentTarget::gradient_norm:
    return "gradient_norm";
  case DescentTarget::mixed:
    return "mixed";
  }
  return "mixed";
}

struct FindOptions {
  std::size_t num_starts = 500;
  std::uint64_t seed = 42;
  double annulus_inner = 0.2;
  double annulus_outer = 2.0;
  double descent_tolerance = 1e-3;
  double polish_tolerance = 1e-11;
  double certify_tolerance = 1e-9;
  double dedupe_factor = 1e-6;
  double collision_floor = 1e-6;
  int max_descent_iterations = 20000;
  int max_lm_iterations = 500;
  int max_newton_iterations = 50;
  DescentTarget target = DescentTarget::mixed;
  unsigned threads = 0; // 0: hardware concurrency
};

struct FindDiagnostics {
  std::size_t starts = 0;
  std::size_t certified = 0;
  std::size_t descent_failed = 0;
  std::size_t polish_failed = 0;
  std::size_t certify_failed = 0;
  std::size_t max_newton_iterations_used = 0;
};

struct FindResult {
  std::vector<EquilibriumClass> classes;
  FindDiagnostics diagnostics;
};

namespace detail {

struct StartOutcome {
  enum class Status { certified, descent_failed, polish_failed, certify_failed } status;
  Eigen::VectorXd z;
  int newton_iterations = 0;
};

inline bool separated(const Eigen::VectorXd &z, double floor) { return min_pair_distance(z) >= floor; }

inline bool descend_potential(Eigen::VectorXd &z, std::span<const double> m, const FindOptions &o) {
  double t = 1e-2;
  double v = potential(z, m);
  for (int it = 0; it < o.max_descent_iterations; ++it) {
    const Eigen::VectorXd g = gradient(z, m);
    const double gg = g.squaredNorm();
    if (std::sqrt(gg) <= o.descent_tolerance)
      return true;
    t *= 2.0;
    for (;;) {
      const Eigen::VectorXd trial = z - t * g;
      if (separated(trial, o.collision_floor)) {
        const double vt = potential(trial, m);
        if (vt <= v - 1e-4 * t * gg) {
          z = trial;
          v = vt;
          break;
        }
      }
      t *= 0.5;
      if (t < 1e-16)
        return false;
    }
  }
  return false;
}

/// Levenberg-Marquardt on the system ∇V = 0 (Jacobian = Hessian).
inline bool descend_residual(Eigen::VectorXd &z, std::span<const double> m, const FindOptions &o) {
  double mu = 1e-3;
  Eigen::VectorXd g = gradient(z, m);
  double r = g.norm();
  const Eigen::Index n = z.size();
  for (int it = 0; it < o.max_lm_iterations; ++it) {
    if (r <= o.descent_tolerance)
      return true;
    const Eigen::MatrixXd h = hessian(z, m);
    const Eigen::MatrixXd hh = h.transpose() * h;
    const Eigen::VectorXd hg = h.transpose() * g;
    bool accepted = false;
    for (int tries = 0; tries < 40; ++tries) {
      const double damp = mu * std::max(1.0, hh.diagonal().maxCoeff());
      const Eigen::VectorXd step =
          (hh + damp * Eigen::MatrixXd::Identity(n, n)).ldlt().solve(-hg);
      const Eigen::VectorXd trial = z + step;
      if (trial.allFinite() && separated(trial, o.collision_floor)) {
        const Eigen::VectorXd gt = gradient(trial, m);
        if (gt.norm() < r) {
          z = trial;
          g = gt;
          r = gt.norm();
          mu = std::max(mu / 3.0, 1e-12);
          accepted = true;
          break;
        }
      }
      mu *= 4.0;
    }
    if (!accepted)
      return false;
  }
  return r <= o.descent_tolerance;
}

inline Eigen::VectorXd rotate_flat(const Eigen::VectorXd &z, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  Eigen::VectorXd out(z.size());
  for (Eigen::Index i = 0; i < z.size() / 2; ++i) {
    out(2 * i) = c * z(2 * i) - s * z(2 * i + 1);
    out(2 * i + 1) = s * z(2 * i) + c * z(2 * i + 1);
  }
  return out;
}

inline std::size_t largest_norm_flat(const Eigen::VectorXd &z) {
  double best = -1.0;
  for (Eigen::Index i = 0; i < z.size() / 2; ++i)
    best = std::max(best, std::hypot(z(2 * i), z(2 * i + 1)));
  for (Eigen::Index i = 0; i < z.size() / 2; ++i)
    if (std::hypot(z(2 * i), z(2 * i + 1)) >= best * (1.0 - 1e-9))
      return static_cast<std::size_t>(i);
  return 0;
}

/// Newton on Ṽ (pivot second coordinate frozen at 0 after rotating the pivot
/// onto the first axis). Returns the iteration count or -1 on failure.
inline int newton_polish(Eigen::VectorXd &z, std::span<const double> m, double tol, int max_it,
                         double collision_floor) {
  const std::size_t pivot = largest_norm_flat(z);
  z = rotate_flat(z, -std::atan2(z(2 * pivot + 1), z(2 * pivot)));
  z(2 * pivot + 1) = 0.0;
  const auto idx = reduced_indices(m.size(), pivot);
  const auto k = static_cast<Eigen::Index>(idx.size());
  Eigen::VectorXd g = gradient(z, m);
  for (int it = 0; it <= max_it; ++it) {
    if (g.norm() <= tol)
      return it;
    if (it == max_it)
      break;
    const Eigen::MatrixXd h = hessian(z, m);
    Eigen::MatrixXd hr(k, k);
    Eigen::VectorXd gr(k);
    for (Eigen::Index i = 0; i < k; ++i) {
      gr(i) = g(idx[static_cast<std::size_t>(i)]);
      for (Eigen::Index j = 0; j < k; ++j)
        hr(i, j) = h(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    }
    const Eigen::VectorXd step = hr.colPivHouseholderQr().solve(-gr);
    if (!step.allFinite())
      return -1;
    double t = 1.0;
    bool accepted = false;
    for (int tries = 0; tries < 30; ++tries) {
      Eigen::VectorXd trial = z;
      for (Eigen::Index i = 0; i < k; ++i)
        trial(idx[static_cast<std::size_t>(i)]) += t * step(i);
      if (separated(trial, collision_floor)) {
        const Eigen::VectorXd gt = gradient(trial, m);
        // Full Newton steps are always taken near the solution; damping only
        // guards against wild steps from poor starting points.
        if (t == 1.0 ? gt.norm() < 10.0 * g.norm() + tol : gt.norm() < g.norm()) {
          z = trial;
          g = gt;
          accepted = true;
          break;
        }
      }
      t *= 0.5;
    }
    if (!accepted)
      return -1;
  }
  return -1;
}

inline StartOutcome run_start(Eigen::VectorXd z, std::size_t start_index, std::span<const double> m,
                              const FindOptions &o) {
  StartOutcome out;
  bool use_potential = true;
  if (o.target == DescentTarget::gradient_norm)
    use_potential = false;
  else if (o.target == DescentTarget::mixed)
    use_potential = (start_index % 2 == 0);
  const bool ok = use_potential ? descend_potential(z, m, o) : descend_residual(z, m, o);
  if (!ok) {
    out.status = StartOutcome::Status::descent_failed;
    return out;
  }
  const int its = newton_polish(z, m, o.polish_tolerance, o.max_newton_iterations, o.collision_floor);
  if (its < 0) {
    out.status = StartOutcome::Status::polish_failed;
    return out;
  }
  out.newton_iterations = its;
  if (!(gradient(z, m).norm() <= o.certify_tolerance)) {
    out.status = StartOutcome::Status::certify_failed;
    return out;
  }
  out.status = StartOutcome::Status::certified;
  out.z = std::move(z);
  return out;
}

inline bool lexicographic_less(const PlanarConfiguration &a, const PlanarConfiguration &b) {
  const Eigen::VectorXd x = a.flat(), y = b.flat();
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x(i) < y(i))
      return true;
    if (y(i) < x(i))
      return false;
  }
  return false;
}

} // namespace detail

/// Starts drawn i.i.d. uniform (by area) in the annulus, then mass-centered.
inline std::vector<PlanarConfiguration> sample_starts(const MassVector &masses, const FindOptions &o) {
  Rng rng(o.seed);
  std::vector<PlanarConfiguration> starts;
  starts.reserve(o.num_starts);
  const double r0sq = o.annulus_inner * o.annulus_inner;
  const double r1sq = o.annulus_outer * o.annulus_outer;
  for (std::size_t s = 0; s < o.num_starts; ++s) {
    std::vector<Vec2> pts(masses.size());
    Vec2 c = Vec2::Zero();
    for (std::size_t i = 0; i < masses.size(); ++i) {
      const double r = std::sqrt(r0sq + rng.uniform01() * (r1sq - r0sq));
      const double t = 2.0 * kPi * rng.uniform01();
      pts[i] = Vec2(r * std::cos(t), r * std::sin(t));
      c += masses[i] * pts[i];
    }
    c /= masses.total();
    for (Vec2 &p : pts)
      p -= c;
    starts.emplace_back(std::move(pts), masses);
  }
  return starts;
}

/// Multistart search from explicit starting configurations. Classes are
/// reduced in start order and then sorted by (potential, representative), so
/// the result does not depend on thread scheduling.
inline FindResult find_equilibria(const MassVector &masses, const std::vector<PlanarConfiguration> &starts,
                                  const FindOptions &o = {}) {
  if (starts.empty())
    throw ValidationError("num_starts must be at least 1");
  if (masses.size() < 2)
    throw ValidationError("find_equilibria needs at least two masses");
  const auto m = masses.values();
  std::vector<detail::StartOutcome> outcomes(starts.size());
  detail::parallel_for(starts.size(), o.threads, [&](std::size_t i) {
    if (starts[i].size() != masses.size())
      throw ValidationError("start configuration has the wrong number of points");
    outcomes[i] = detail::run_start(starts[i].flat(), i, m, o);
  });

  FindResult result;
  FindDiagnostics &d = result.diagnostics;
  d.starts = starts.size();
  std::vector<EquilibriumClass> classes;
  ClassifyOptions copt;
  copt.certify_tolerance = o.certify_tolerance;
  for (const auto &out : outcomes) {
    switch (out.status) {
    case detail::StartOutcome::Status::descent_failed:
      ++d.descent_failed;
      continue;
    case detail::StartOutcome::Status::polish_failed:
      ++d.polish_failed;
      continue;
    case detail::StartOutcome::Status::certify_failed:
      ++d.certify_failed;
      continue;
    case detail::StartOutcome::Status::certified:
      break;
    }
    ++d.certified;
    d.max_newton_iterations_used =
        std::max<std::size_t>(d.max_newton_iterations_used, static_cast<std::size_t>(out.newton_iterations));
    const PlanarConfiguration c = PlanarConfiguration::from_flat(out.z, masses);
    const double tol = o.dedupe_factor * c.weighted_norm();
    bool merged = false;
    for (EquilibriumClass &ec : classes)
      if (config_distance_mod_rotation(c, ec.representative) <= tol) {
        ++ec.multiplicity;
        merged = true;
        break;
      }
    if (!merged)
      classes.push_back(classify(c, copt));
  }

  std::stable_sort(classes.begin(), classes.end(), [](const EquilibriumClass &a, const EquilibriumClass &b) {
    const double scale = std::max(std::abs(a.potential_value), std::abs(b.potential_value));
    if (std::abs(a.potential_value - b.potential_value) > 1e-10 * scale)
      return a.potential_value < b.potential_value;
    return detail::lexicographic_less(a.representative, b.representative);
  });
  result.classes = std::move(classes);
  return result;
}

inline FindResult find_equilibria(const MassVector &masses, const FindOptions &o = {}) {
  if (o.num_starts < 1)
    throw ValidationError("num_starts must be at least 1");
  return find_equilibria(masses, sample_starts(masses, o), o);
}

// ---------------------------------------------------------------------------
// Census

/// [2^{N−1}(N−2) + 1] (N−2)!
inline std::uint64_t palmore_lower_bound(std::size_t n) {
  if (n < 3)
    throw ValidationError("the census bound needs N >= 3");
  std::uint64_t fact = 1;
  for (std::uint64_t k = 2; k <= n - 2; ++k)
    fact *= k;
  return ((std::uint64_t{1} << (n - 1)) * (n - 2) + 1) * fact;
}

struct CensusRecord {
  FindResult search;
  std::size_t classes_found = 0;
  std::uint64_t lower_bound = 0;
  bool satisfied = false;
  // (negative_count, positive_count) -> number of classes
  std::map<std::pair<int, int>, std::size_t> index_histogram;
};

inline CensusRecord palmore_census(const MassVector &masses, const FindOptions &o = {}) {
  CensusRecord c;
  c.lower_bound = palmore_lower_bound(masses.size());
  c.search = find_equilibria(masses, o);
  c.classes_found = c.search.classes.size();
  c.satisfied = c.classes_found >= c.lower_bound;
  for (const auto &ec : c.search.classes)
    ++c.index_histogram[{ec.index_report.negative_count, ec.index_report.positive_count}];
  return c;
}

} // namespace releq
