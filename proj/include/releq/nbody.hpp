#pragma once

// Planar N-body reduced potential
//
//   V_m(ζ) = (1/8π) Σ_{j≠k} m_j m_k / |ζ_k − ζ_j| + ½ Σ_j m_j |ζ_j|²
//
// with gravitational constant 1/(4π), together with its analytic derivatives,
// the ω-scaled variant, and rotation handling. Relative equilibria are the
// critical points of V_m.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "releq/errors.hpp"

namespace releq {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kFourPi = 4.0 * std::numbers::pi;

using Vec2 = Eigen::Vector2d;

/// Positive masses m_1..m_N.
class MassVector {
public:
  MassVector() = default;
  explicit MassVector(std::vector<double> masses) : m_(std::move(masses)) {
    if (m_.empty())
      throw ValidationError("masses must not be empty");
    total_ = 0.0;
    for (double v : m_) {
      if (!(v > 0.0) || !std::isfinite(v))
        throw ValidationError("masses must be positive");
      total_ += v;
    }
  }

  std::size_t size() const noexcept { return m_.size(); }
  double operator[](std::size_t i) const { return m_[i]; }
  double total() const noexcept { return total_; }
  std::span<const double> values() const noexcept { return m_; }
  const std::vector<double> &vector() const noexcept { return m_; }

  MassVector scaled(double factor) const {
    std::vector<double> out(m_);
    for (double &v : out)
      v *= factor;
    return MassVector(std::move(out));
  }

  friend bool operator==(const MassVector &, const MassVector &) = default;

private:
  std::vector<double> m_;
  double total_ = 0.0;
};

/// N planar points with their masses.
class PlanarConfiguration {
public:
  PlanarConfiguration() = default;
  PlanarConfiguration(std::vector<Vec2> points, MassVector masses)
      : points_(std::move(points)), masses_(std::move(masses)) {
    if (points_.size() != masses_.size())
      throw ValidationError("configuration has " + std::to_string(points_.size()) +
                            " points but " + std::to_string(masses_.size()) + " masses");
    for (const Vec2 &p : points_)
      if (!p.allFinite())
        throw ValidationError("configuration contains non-finite coordinates");
  }

  static PlanarConfiguration from_flat(const Eigen::VectorXd &z, MassVector masses) {
    std::vector<Vec2> pts(static_cast<std::size_t>(z.size() / 2));
    for (std::size_t i = 0; i < pts.size(); ++i)
      pts[i] = Vec2(z(2 * i), z(2 * i + 1));
    return PlanarConfiguration(std::move(pts), std::move(masses));
  }

  std::size_t size() const noexcept { return points_.size(); }
  const std::vector<Vec2> &points() const noexcept { return points_; }
  const Vec2 &point(std::size_t i) const { return points_[i]; }
  const MassVector &masses() const noexcept { return masses_; }

  Eigen::VectorXd flat() const {
    Eigen::VectorXd z(2 * points_.size());
    for (std::size_t i = 0; i < points_.size(); ++i) {
      z(2 * i) = points_[i].x();
      z(2 * i + 1) = points_[i].y();
    }
    return z;
  }

  Vec2 center_of_mass() const {
    Vec2 c = Vec2::Zero();
    for (std::size_t i = 0; i < size(); ++i)
      c += masses_[i] * points_[i];
    return c / masses_.total();
  }

  /// Largest distance of a point from the center of mass.
  double scale() const {
    const Vec2 c = center_of_mass();
    double s = 0.0;
    for (const Vec2 &p : points_)
      s = std::max(s, (p - c).norm());
    return s;
  }

  /// sqrt(Σ m_i |ζ_i|²): the length unit of the mass-weighted metric.
  double weighted_norm() const {
    double s = 0.0;
    for (std::size_t i = 0; i < size(); ++i)
      s += masses_[i] * points_[i].squaredNorm();
    return std::sqrt(s);
  }

private:
  std::vector<Vec2> points_;
  MassVector masses_;
};

namespace detail {

inline constexpr double kCoincidenceFactor = 1e-12;

inline double flat_scale(const Eigen::VectorXd &z, std::span<const double> m) {
  const std::size_t n = m.size();
  double mt = 0.0, cx = 0.0, cy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mt += m[i];
    cx += m[i] * z(2 * i);
    cy += m[i] * z(2 * i + 1);
  }
  cx /= mt;
  cy /= mt;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    s = std::max(s, std::hypot(z(2 * i) - cx, z(2 * i + 1) - cy));
  return s;
}

inline double min_pair_distance(const Eigen::VectorXd &z) {
  const Eigen::Index n = z.size() / 2;
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      best = std::min(best, std::hypot(z(2 * i) - z(2 * j), z(2 * i + 1) - z(2 * j + 1)));
  return best;
}

inline void require_distinct(const Eigen::VectorXd &z, std::span<const double> m) {
  const std::size_t n = m.size();
  if (n < 2)
    return;
  const double threshold = kCoincidenceFactor * flat_scale(z, m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = std::hypot(z(2 * i) - z(2 * j), z(2 * i + 1) - z(2 * j + 1));
      if (d <= threshold)
        throw DomainError("points " + std::to_string(i) + " and " + std::to_string(j) +
                          " coincide");
    }
}

/// U_m = (1/4π) Σ_{i<j} m_i m_j / r_ij  (each unordered pair once).
inline double interaction(const Eigen::VectorXd &z, std::span<const double> m) {
  const std::size_t n = m.size();
  double u = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      u += m[i] * m[j] / std::hypot(z(2 * i) - z(2 * j), z(2 * i + 1) - z(2 * j + 1));
  return u / kFourPi;
}

inline Eigen::VectorXd interaction_gradient(const Eigen::VectorXd &z,
                                            std::span<const double> m) {
  const std::size_t n = m.size();
  Eigen::VectorXd g = Eigen::VectorXd::Zero(z.size());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = z(2 * i) - z(2 * j);
      const double dy = z(2 * i + 1) - z(2 * j + 1);
      const double r = std::hypot(dx, dy);
      const double c = m[i] * m[j] / (kFourPi * r * r * r);
      g(2 * i) -= c * dx;
      g(2 * i + 1) -= c * dy;
      g(2 * j) += c * dx;
      g(2 * j + 1) += c * dy;
    }
  return g;
}

inline Eigen::MatrixXd interaction_hessian(const Eigen::VectorXd &z,
                                           std::span<const double> m) {
  const std::size_t n = m.size();
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(z.size(), z.size());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const Vec2 d(z(2 * i) - z(2 * j), z(2 * i + 1) - z(2 * j + 1));
      const double r = d.norm();
      const double c = m[i] * m[j] / kFourPi;
      // ∂²(c/r)/∂ζ_i² = c (3 d dᵀ / r⁵ − I / r³)
      const Eigen::Matrix2d block =
          c * (3.0 * d * d.transpose() / std::pow(r, 5) - Eigen::Matrix2d::Identity() / (r * r * r));
      const auto ii = static_cast<Eigen::Index>(2 * i);
      const auto jj = static_cast<Eigen::Index>(2 * j);
      h.block<2, 2>(ii, ii) += block;
      h.block<2, 2>(jj, jj) += block;
      h.block<2, 2>(ii, jj) -= block;
      h.block<2, 2>(jj, ii) -= block;
    }
  return h;
}

inline double confinement(const Eigen::VectorXd &z, std::span<const double> m) {
  double s = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i)
    s += m[i] * (z(2 * i) * z(2 * i) + z(2 * i + 1) * z(2 * i + 1));
  return 0.5 * s;
}

inline double potential(const Eigen::VectorXd &z, std::span<const double> m) {
  return interaction(z, m) + confinement(z, m);
}

inline Eigen::VectorXd gradient(const Eigen::VectorXd &z, std::span<const double> m) {
  Eigen::VectorXd g = interaction_gradient(z, m);
  for (std::size_t i = 0; i < m.size(); ++i) {
    g(2 * i) += m[i] * z(2 * i);
    g(2 * i + 1) += m[i] * z(2 * i + 1);
  }
  return g;
}

inline Eigen::MatrixXd hessian(const Eigen::VectorXd &z, std::span<const double> m) {
  Eigen::MatrixXd h = interaction_hessian(z, m);
  for (std::size_t i = 0; i < m.size(); ++i) {
    h(2 * i, 2 * i) += m[i];
    h(2 * i + 1, 2 * i + 1) += m[i];
  }
  return h;
}

/// diag(m_1, m_1, m_2, m_2, ...)
inline Eigen::VectorXd mass_diagonal(std::span<const double> m) {
  Eigen::VectorXd d(2 * m.size());
  for (std::size_t i = 0; i < m.size(); ++i)
    d(2 * i) = d(2 * i + 1) = m[i];
  return d;
}

} // namespace detail

/// U_m(ζ): interaction part of V_m.
inline double interaction_energy(const PlanarConfiguration &c) {
  const Eigen::VectorXd z = c.flat();
  detail::require_distinct(z, c.masses().values());
  return detail::interaction(z, c.masses().values());
}

inline double potential(const PlanarConfiguration &c) {
  const Eigen::VectorXd z = c.flat();
  detail::require_distinct(z, c.masses().values());
  return detail::potential(z, c.masses().values());
}

inline std::vector<Vec2> gradient(const PlanarConfiguration &c) {
  const Eigen::VectorXd z = c.flat();
  detail::require_distinct(z, c.masses().values());
  const Eigen::VectorXd g = detail::gradient(z, c.masses().values());
  std::vector<Vec2> out(c.size());
  for (std::size_t i = 0; i < c.size(); ++i)
    out[i] = Vec2(g(2 * i), g(2 * i + 1));
  return out;
}

/// Euclidean norm of the flattened gradient.
inline double gradient_norm(const PlanarConfiguration &c) {
  const Eigen::VectorXd z = c.flat();
  detail::require_distinct(z, c.masses().values());
  return detail::gradient(z, c.masses().values()).norm();
}

inline Eigen::MatrixXd hessian(const PlanarConfiguration &c) {
  const Eigen::VectorXd z = c.flat();
  detail::require_distinct(z, c.masses().values());
  return detail::hessian(z, c.masses().values());
}

/// V_m^ω(ξ) with confinement ½ω²Σm|ξ|². Satisfies V_m^ω(ω^{-2/3}ζ) = ω^{2/3} V_m(ζ).
inline double scaled_potential(const PlanarConfiguration &xi, double omega) {
  if (!(omega > 0.0))
    throw ValidationError("omega must be positive");
  const Eigen::VectorXd z = xi.flat();
  detail::require_distinct(z, xi.masses().values());
  return detail::interaction(z, xi.masses().values()) +
         omega * omega * detail::confinement(z, xi.masses().values());
}

/// ∇_ξ V_m^ω, flattened as (ξ_1x, ξ_1y, ξ_2x, ...).
inline Eigen::VectorXd scaled_gradient(const PlanarConfiguration &xi, double omega) {
  const Eigen::VectorXd z = xi.flat();
  detail::require_distinct(z, xi.masses().values());
  Eigen::VectorXd g = detail::interaction_gradient(z, xi.masses().values());
  for (std::size_t i = 0; i < xi.size(); ++i) {
    g(2 * i) += omega * omega * xi.masses()[i] * z(2 * i);
    g(2 * i + 1) += omega * omega * xi.masses()[i] * z(2 * i + 1);
  }
  return g;
}

inline PlanarConfiguration rotate(const PlanarConfiguration &c, double alpha) {
  const Eigen::Rotation2Dd rot(alpha);
  std::vector<Vec2> pts;
  pts.reserve(c.size());
  for (const Vec2 &p : c.points())
    pts.push_back(rot * p);
  return PlanarConfiguration(std::move(pts), c.masses());
}

/// Rotation putting point `pivot` on the positive first axis.
inline PlanarConfiguration canonicalize(const PlanarConfiguration &c, std::size_t pivot) {
  if (pivot >= c.size())
    throw ValidationError("pivot index out of range");
  const Vec2 &p = c.point(pivot);
  if (p.norm() <= 1e-300 || p.norm() <= 1e-14 * c.weighted_norm() / std::sqrt(c.masses().total()))
    throw DomainError("pivot point " + std::to_string(pivot) +
                      " is at the origin; choose another pivot index");
  PlanarConfiguration out = rotate(c, -std::atan2(p.y(), p.x()));
  // Pin the pivot exactly on the axis; rounding otherwise leaves ~1e-17.
  std::vector<Vec2> pts = out.points();
  pts[pivot] = Vec2(p.norm(), 0.0);
  return PlanarConfiguration(std::move(pts), c.masses());
}

/// Index of the point with the largest norm (lowest index among near-ties).
inline std::size_t largest_norm_index(const PlanarConfiguration &c) {
  double best = -1.0;
  for (const Vec2 &p : c.points())
    best = std::max(best, p.norm());
  for (std::size_t i = 0; i < c.size(); ++i)
    if (c.point(i).norm() >= best * (1.0 - 1e-9))
      return i;
  return 0;
}

/// Rotation angle α minimizing Σ m_i |e^{iα} a_i − b_i|².
inline double optimal_rotation(const PlanarConfiguration &a, const PlanarConfiguration &b) {
  std::complex<double> s{0.0, 0.0};
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::complex<double> ai(a.point(i).x(), a.point(i).y());
    const std::complex<double> bi(b.point(i).x(), b.point(i).y());
    s += a.masses()[i] * bi * std::conj(ai);
  }
  return std::arg(s);
}

/// min over α of the mass-weighted distance between e^{iα}a and b.
inline double config_distance_mod_rotation(const PlanarConfiguration &a,
                                           const PlanarConfiguration &b) {
  if (a.size() != b.size())
    throw ValidationError("configurations have different numbers of points");
  if (!(a.masses() == b.masses()))
    throw ValidationError("configurations have different masses");
  const PlanarConfiguration ra = rotate(a, optimal_rotation(a, b));
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    s += a.masses()[i] * (ra.point(i) - b.point(i)).squaredNorm();
  return std::sqrt(s);
}

} // namespace releq
