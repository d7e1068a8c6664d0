#pragma once

// Smale coordinates ζ = α q + b on the normalized manifold
//   S_m = { Σ m_i q_i = 0, ½ Σ m_i |q_i|² = 1 }
// and the reduced (covariant) Hessian of U_m restricted to S_m.
//
// Since U_m is homogeneous of degree −1, stationarity of U_m on S_m reads
// ∇U = −(U/2) diag(m) q, so the multiplier has magnitude U(q̄)/2 and a critical
// point of V_m is ζ̄ = (U(q̄)/2)^{1/3} q̄.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "releq/errors.hpp"
#include "releq/nbody.hpp"

namespace releq {

struct SmaleCoordinates {
  double alpha = 0.0;
  Vec2 shift = Vec2::Zero();
  PlanarConfiguration shape;
};

struct SpectrumReport {
  std::vector<double> eigenvalues; // ascending
  int negative_count = 0;
  int positive_count = 0;
  int zero_count = 0;
  double tolerance = 0.0;
};

inline constexpr double kSmaleManifoldTolerance = 1e-10;
inline constexpr double kSpectrumZeroFactor = 1e-7;

inline SpectrumReport make_spectrum(const Eigen::MatrixXd &symmetric) {
  SpectrumReport r;
  if (symmetric.rows() == 0)
    return r;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (symmetric + symmetric.transpose()),
                                                    Eigen::EigenvaluesOnly);
  const Eigen::VectorXd ev = es.eigenvalues();
  r.eigenvalues.assign(ev.data(), ev.data() + ev.size());
  std::sort(r.eigenvalues.begin(), r.eigenvalues.end());
  double scale = 0.0;
  for (double v : r.eigenvalues)
    scale = std::max(scale, std::abs(v));
  r.tolerance = kSpectrumZeroFactor * scale;
  for (double v : r.eigenvalues) {
    if (std::abs(v) <= r.tolerance)
      ++r.zero_count;
    else if (v < 0)
      ++r.negative_count;
    else
      ++r.positive_count;
  }
  return r;
}

inline SmaleCoordinates to_smale(const PlanarConfiguration &c) {
  const Vec2 b = c.center_of_mass();
  double s = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i)
    s += c.masses()[i] * (c.point(i) - b).squaredNorm();
  const double alpha = std::sqrt(0.5 * s);
  if (!(alpha > 1e-300) || alpha <= 1e-14 * std::max(1.0, b.norm()))
    throw DomainError("degenerate configuration: all points coincide");
  std::vector<Vec2> q(c.size());
  for (std::size_t i = 0; i < c.size(); ++i)
    q[i] = (c.point(i) - b) / alpha;
  return {alpha, b, PlanarConfiguration(std::move(q), c.masses())};
}

inline PlanarConfiguration from_smale(const SmaleCoordinates &s) {
  std::vector<Vec2> pts(s.shape.size());
  for (std::size_t i = 0; i < pts.size(); ++i)
    pts[i] = s.alpha * s.shape.point(i) + s.shift;
  return PlanarConfiguration(std::move(pts), s.shape.masses());
}

/// Max violation of the three S_m constraints.
inline double smale_constraint_violation(const PlanarConfiguration &q) {
  Vec2 first = Vec2::Zero();
  double second = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    first += q.masses()[i] * q.point(i);
    second += q.masses()[i] * q.point(i).squaredNorm();
  }
  return std::max(first.cwiseAbs().maxCoeff(), std::abs(0.5 * second - 1.0));
}

inline void require_on_manifold(const PlanarConfiguration &q) {
  const double v = smale_constraint_violation(q);
  if (!(v <= kSmaleManifoldTolerance))
    throw ValidationError("shape is off the normalized manifold (violation " +
                          std::to_string(v) + ")");
}

/// U_m(q) = (1/8π) Σ_{i≠j} m_i m_j / |q_i − q_j|.
inline double smale_energy(const PlanarConfiguration &shape) { return interaction_energy(shape); }

/// Magnitude of the Lagrange multiplier at a critical shape: U(q̄)/2.
inline double smale_multiplier(const PlanarConfiguration &shape) {
  return 0.5 * smale_energy(shape);
}

namespace detail {

/// Columns form a mass-orthonormal basis of the complement of
/// {translations, dilation q, rotation iq}: dimension 2N − 4.
inline Eigen::MatrixXd smale_tangent_basis(const Eigen::VectorXd &q, std::span<const double> m) {
  const Eigen::Index n2 = q.size();
  const Eigen::Index n = n2 / 2;
  Eigen::VectorXd sq(n2);
  for (Eigen::Index i = 0; i < n; ++i)
    sq(2 * i) = sq(2 * i + 1) = std::sqrt(m[static_cast<std::size_t>(i)]);

  Eigen::MatrixXd span(n2, 4);
  span.setZero();
  for (Eigen::Index i = 0; i < n; ++i) {
    span(2 * i, 0) = 1.0;
    span(2 * i + 1, 1) = 1.0;
    span(2 * i, 2) = q(2 * i);
    span(2 * i + 1, 2) = q(2 * i + 1);
    span(2 * i, 3) = -q(2 * i + 1);
    span(2 * i + 1, 3) = q(2 * i);
  }
  const Eigen::MatrixXd u = sq.asDiagonal() * span;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(u);
  const Eigen::MatrixXd full = qr.householderQ() * Eigen::MatrixXd::Identity(n2, n2);
  Eigen::MatrixXd tangent = full.rightCols(n2 - 4);
  return sq.cwiseInverse().asDiagonal() * tangent;
}

/// D²U + (U/2) diag(m): covariant Hessian of U on S_m, ambient form.
inline Eigen::MatrixXd smale_covariant_hessian(const Eigen::VectorXd &q,
                                               std::span<const double> m) {
  const double u = interaction(q, m);
  Eigen::MatrixXd h = interaction_hessian(q, m);
  h.diagonal() += 0.5 * u * mass_diagonal(m);
  return h;
}

} // namespace detail

inline Eigen::MatrixXd tangent_basis(const PlanarConfiguration &shape) {
  if (shape.size() < 2)
    throw ValidationError("the normalized manifold needs at least two points");
  require_on_manifold(shape);
  return detail::smale_tangent_basis(shape.flat(), shape.masses().values());
}

/// Spectrum of the covariant Hessian of U_m on S_m, restricted to the
/// (2N−4)-dimensional complement of the rotation orbit, in the mass metric.
inline SpectrumReport reduced_hessian(const PlanarConfiguration &shape) {
  require_on_manifold(shape);
  const Eigen::VectorXd q = shape.flat();
  detail::require_distinct(q, shape.masses().values());
  if (shape.size() < 3)
    return make_spectrum(Eigen::MatrixXd(0, 0));
  const Eigen::MatrixXd b = detail::smale_tangent_basis(q, shape.masses().values());
  const Eigen::MatrixXd h = detail::smale_covariant_hessian(q, shape.masses().values());
  return make_spectrum(b.transpose() * h * b);
}

/// |Pᵀ H (iq)| where P spans the tangent space of S_m (translations and q removed).
/// Vanishes at critical shapes by rotation invariance.
inline double rotation_mode_residual(const PlanarConfiguration &shape) {
  require_on_manifold(shape);
  const Eigen::VectorXd q = shape.flat();
  const auto m = shape.masses().values();
  detail::require_distinct(q, m);
  Eigen::VectorXd iq(q.size());
  for (Eigen::Index i = 0; i < q.size() / 2; ++i) {
    iq(2 * i) = -q(2 * i + 1);
    iq(2 * i + 1) = q(2 * i);
  }
  Eigen::MatrixXd basis = detail::smale_tangent_basis(q, m);
  Eigen::MatrixXd with_rot(q.size(), basis.cols() + 1);
  with_rot << basis, iq / std::sqrt((detail::mass_diagonal(m).array() * iq.array().square()).sum());
  const Eigen::MatrixXd h = detail::smale_covariant_hessian(q, m);
  return (with_rot.transpose() * (h * iq)).norm();
}

struct HessianBlockReport {
  double alpha = 0.0;
  double alpha_alpha = 0.0;
  double alpha_alpha_confinement = 2.0; // ∂²_α of the α² term alone
  double alpha_alpha_expected = 0.0;    // 2U/α³ + 2 from the exact form on S_m
  std::vector<double> shift_eigenvalues;
  double total_mass = 0.0;
  double cross_alpha_shift = 0.0;
  double cross_alpha_shape = 0.0;
  double cross_shift_shape = 0.0;
  double block_scale = 0.0;
  std::vector<double> shape_eigenvalues;
  std::vector<double> predicted_shape_eigenvalues; // α^{-1} · reduced spectrum
  double shape_max_rel_deviation = 0.0;
};

/// Second-difference Hessian of V_m in chart coordinates (α, b, t) around a
/// critical point, t parametrizing S_m by the retraction
/// q(t) = normalize(q̄ + B t) with B the tangent basis.
inline HessianBlockReport hessian_block_check(const PlanarConfiguration &critical,
                                              double critical_tolerance = 1e-8) {
  const double gn = gradient_norm(critical);
  if (!(gn <= critical_tolerance))
    throw ValidationError("configuration is not a critical point (gradient norm " +
                          std::to_string(gn) + ")");
  if (critical.size() < 2)
    throw ValidationError("block check needs at least two points");
  const auto m = critical.masses().values();
  const SmaleCoordinates sc = to_smale(critical);
  const Eigen::VectorXd q0 = sc.shape.flat();
  const Eigen::MatrixXd basis = detail::smale_tangent_basis(q0, m);
  const Eigen::Index k = basis.cols();
  const Eigen::Index dim = 3 + k;
  const Eigen::Index n = q0.size() / 2;

  auto v_of = [&](const Eigen::VectorXd &y) {
    Eigen::VectorXd q = q0 + basis * y.tail(k);
    Vec2 c = Vec2::Zero();
    double mt = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      c += m[i] * Vec2(q(2 * i), q(2 * i + 1));
      mt += m[i];
    }
    c /= mt;
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      q(2 * i) -= c.x();
      q(2 * i + 1) -= c.y();
      s += m[i] * (q(2 * i) * q(2 * i) + q(2 * i + 1) * q(2 * i + 1));
    }
    q /= std::sqrt(0.5 * s);
    Eigen::VectorXd z(q.size());
    for (Eigen::Index i = 0; i < n; ++i) {
      z(2 * i) = y(0) * q(2 * i) + y(1);
      z(2 * i + 1) = y(0) * q(2 * i + 1) + y(2);
    }
    return detail::potential(z, m);
  };

  Eigen::VectorXd y0 = Eigen::VectorXd::Zero(dim);
  y0(0) = sc.alpha;
  // Steps scaled to each coordinate's natural size.
  Eigen::VectorXd h(dim);
  h(0) = 1e-4 * sc.alpha;
  h(1) = h(2) = 1e-4 * sc.alpha;
  for (Eigen::Index i = 3; i < dim; ++i)
    h(i) = 1e-4;

  Eigen::MatrixXd hess(dim, dim);
  const double f0 = v_of(y0);
  for (Eigen::Index i = 0; i < dim; ++i) {
    Eigen::VectorXd yp = y0, ym = y0;
    yp(i) += h(i);
    ym(i) -= h(i);
    hess(i, i) = (v_of(yp) - 2.0 * f0 + v_of(ym)) / (h(i) * h(i));
    for (Eigen::Index j = i + 1; j < dim; ++j) {
      Eigen::VectorXd pp = y0, pm = y0, mp = y0, mm = y0;
      pp(i) += h(i), pp(j) += h(j);
      pm(i) += h(i), pm(j) -= h(j);
      mp(i) -= h(i), mp(j) += h(j);
      mm(i) -= h(i), mm(j) -= h(j);
      hess(i, j) = hess(j, i) =
          (v_of(pp) - v_of(pm) - v_of(mp) + v_of(mm)) / (4.0 * h(i) * h(j));
    }
  }

  HessianBlockReport r;
  r.alpha = sc.alpha;
  r.total_mass = critical.masses().total();
  r.alpha_alpha = hess(0, 0);
  r.alpha_alpha_expected = 2.0 * smale_energy(sc.shape) / std::pow(sc.alpha, 3) + 2.0;

  const Eigen::Matrix2d shift = hess.block<2, 2>(1, 1);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(shift);
  r.shift_eigenvalues = {es.eigenvalues()(0), es.eigenvalues()(1)};

  r.cross_alpha_shift = hess.block(0, 1, 1, 2).norm();
  r.cross_alpha_shape = k > 0 ? hess.block(0, 3, 1, k).norm() : 0.0;
  r.cross_shift_shape = k > 0 ? hess.block(1, 3, 2, k).norm() : 0.0;

  const SpectrumReport qs = make_spectrum(hess.bottomRightCorner(k, k));
  r.shape_eigenvalues = qs.eigenvalues;
  const SpectrumReport reduced = reduced_hessian(sc.shape);
  double scale = std::max(std::abs(r.alpha_alpha), r.total_mass);
  for (double v : reduced.eigenvalues) {
    r.predicted_shape_eigenvalues.push_back(v / sc.alpha);
    scale = std::max(scale, std::abs(v / sc.alpha));
  }
  r.block_scale = scale;
  for (std::size_t i = 0; i < r.shape_eigenvalues.size(); ++i)
    r.shape_max_rel_deviation =
        std::max(r.shape_max_rel_deviation,
                 std::abs(r.shape_eigenvalues[i] - r.predicted_shape_eigenvalues[i]) / scale);
  return r;
}

} // namespace releq
