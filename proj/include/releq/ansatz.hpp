#pragma once

// Multi-bump ansatz W_ξ = Σ w^{λ_i}(· − ξ_i) with ξ_i = ω^{−2/3}(ζ_i, 0), the
// energy
//   J[W] = ½∫|∇W|² − (1/(p+1)) Σ_i ∫_{B_i} (W − λ_i + ½ω²|x′|²)₊^{p+1}
// and the error field of the superposition. Integrals over each ball are done
// ray by ray: Gauss-Legendre in cos θ, trapezoid in φ, and Gauss-Legendre
// radial panels split at the cell support and at the positivity edge.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/tools/roots.hpp>

#include "releq/cell.hpp"
#include "releq/errors.hpp"
#include "releq/nbody.hpp"
#include "releq/parallel.hpp"
#include "releq/quadrature.hpp"

namespace releq {

using Vec3 = Eigen::Vector3d;

struct Ansatz {
  std::shared_ptr<const CellProfile> profile;
  MassVector masses;
  std::vector<double> lambdas;
  std::vector<double> support_radii;
  std::vector<Vec3> centers_xi;
  std::vector<Vec2> centers_zeta; // empty when built directly from ξ
  double omega = 0.0;
  double mu = 10.0;
  double cutoff_radius = 0.0;
  double gamma = 0.0; // cell-energy exponent used for the self terms

  std::size_t size() const { return lambdas.size(); }
};

namespace detail {

inline void fill_cells(Ansatz &a) {
  const CellProfile &c = *a.profile;
  a.lambdas.clear();
  a.support_radii.clear();
  double rmax = 0.0;
  for (std::size_t i = 0; i < a.masses.size(); ++i) {
    const double lam = lambda_for_mass(c, a.masses[i]);
    a.lambdas.push_back(lam);
    a.support_radii.push_back(support_radius(c, lam));
    rmax = std::max(rmax, a.support_radii.back());
  }
  a.cutoff_radius = rmax + 1.0;
}

inline void require_disjoint(const Ansatz &a) {
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      const double d = (a.centers_xi[i] - a.centers_xi[j]).norm();
      if (!(d > 2.0 * a.cutoff_radius))
        throw ValidationError("separation constraint violated: |xi_" + std::to_string(i) + " - xi_" +
                              std::to_string(j) + "| = " + std::to_string(d) +
                              " must exceed 2*R_cut = " + std::to_string(2.0 * a.cutoff_radius) +
                              " (cutoff balls overlap)");
    }
}

} // namespace detail

/// Builds the ansatz from ζ (order-one) coordinates. Enforces
/// |ζ_i| < μ, |ζ_i − ζ_j| > 1/μ (equivalently the ξ-scale constraints) and
/// disjointness of the cutoff balls.
inline Ansatz build(std::shared_ptr<const CellProfile> profile, const PlanarConfiguration &zeta, double omega,
                    double mu, double gamma) {
  if (!profile)
    throw ValidationError("ansatz needs a cell profile");
  if (!(omega > 0.0) || !std::isfinite(omega))
    throw ValidationError("omega must be positive");
  if (!(mu > 0.0))
    throw ValidationError("mu must be positive");
  Ansatz a;
  a.profile = std::move(profile);
  a.masses = zeta.masses();
  a.omega = omega;
  a.mu = mu;
  a.gamma = gamma;
  detail::fill_cells(a);
  const double s = std::pow(omega, -2.0 / 3.0);
  for (std::size_t i = 0; i < zeta.size(); ++i) {
    const Vec2 &z = zeta.point(i);
    if (!(z.norm() < mu))
      throw ValidationError("constraint violated: |xi_" + std::to_string(i) + "| < mu*omega^(-2/3)");
    a.centers_zeta.push_back(z);
    a.centers_xi.emplace_back(s * z.x(), s * z.y(), 0.0);
  }
  for (std::size_t i = 0; i < zeta.size(); ++i)
    for (std::size_t j = i + 1; j < zeta.size(); ++j)
      if (!((zeta.point(i) - zeta.point(j)).norm() > 1.0 / mu))
        throw ValidationError("constraint violated: |xi_" + std::to_string(i) + " - xi_" + std::to_string(j) +
                              "| > omega^(-2/3)/mu");
  detail::require_disjoint(a);
  return a;
}

/// Ansatz with explicit centers in ℝ³ and ω ≥ 0 (ω = 0: no rotation). Only the
/// disjointness of the cutoff balls is checked.
inline Ansatz from_xi(std::shared_ptr<const CellProfile> profile, const MassVector &masses,
                      const std::vector<Vec3> &xi, double omega, double gamma) {
  if (!profile)
    throw ValidationError("ansatz needs a cell profile");
  if (xi.size() != masses.size())
    throw ValidationError("number of centers must equal number of masses");
  if (!(omega >= 0.0))
    throw ValidationError("omega must be non-negative");
  Ansatz a;
  a.profile = std::move(profile);
  a.masses = masses;
  a.omega = omega;
  a.gamma = gamma;
  a.centers_xi = xi;
  detail::fill_cells(a);
  detail::require_disjoint(a);
  return a;
}

inline double eval_component(const Ansatz &a, std::size_t i, const Vec3 &x) {
  return eval_scaled(*a.profile, a.lambdas[i], (x - a.centers_xi[i]).norm()).w;
}

inline double eval_W(const Ansatz &a, const Vec3 &x) {
  double w = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    w += eval_component(a, i, x);
  return w;
}

/// W − λ_i + ½ω²|x′|²: its positive part raised to p is the density ρ_i.
inline double effective_level(const Ansatz &a, std::size_t i, const Vec3 &x) {
  return eval_W(a, x) - a.lambdas[i] + 0.5 * a.omega * a.omega * (x.x() * x.x() + x.y() * x.y());
}

inline bool in_cutoff_ball(const Ansatz &a, std::size_t i, const Vec3 &x) {
  return (x - a.centers_xi[i]).norm() < a.cutoff_radius;
}

/// 𝖤(x) = Σ_i [(W − λ_i + ½ω²|x′|²)₊^p χ_i − (w_i − λ_i)₊^p]
inline double error_field(const Ansatz &a, const Vec3 &x) {
  const double p = a.profile->p;
  double e = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!in_cutoff_ball(a, i, x))
      continue;
    const double lev = effective_level(a, i, x);
    const double own = eval_component(a, i, x) - a.lambdas[i];
    e += (lev > 0.0 ? std::pow(lev, p) : 0.0) - (own > 0.0 ? std::pow(own, p) : 0.0);
  }
  return e;
}

// ---------------------------------------------------------------------------
// Ball quadrature

struct QuadratureSpec {
  int theta_nodes = 8;  // Gauss-Legendre in cos θ
  int phi_nodes = 16;   // trapezoid in φ
  int radial_nodes = 48; // per radial panel
  double tolerance = 1e-9;

  QuadratureSpec refined() const {
    QuadratureSpec s = *this;
    s.theta_nodes *= 2;
    s.phi_nodes *= 2;
    s.radial_nodes *= 2;
    return s;
  }
};

namespace detail {

/// Σ over directions n and radial nodes t of weight · t² · f(ξ_i + t n).
/// Radial panels: [0, inner] and [inner, edge(n)] when edge(n) > inner.
template <int K, class Edge, class F>
Eigen::Matrix<double, K, 1> integrate_ball(const Vec3 &center, double inner, Edge &&edge, const QuadratureSpec &q,
                                           F &&f) {
  const QuadratureRule &gt = gauss_legendre(static_cast<std::size_t>(q.theta_nodes));
  const QuadratureRule &gr = gauss_legendre(static_cast<std::size_t>(q.radial_nodes));
  Eigen::Matrix<double, K, 1> total = Eigen::Matrix<double, K, 1>::Zero();
  const double dphi = 2.0 * kPi / q.phi_nodes;
  for (int a = 0; a < q.theta_nodes; ++a) {
    const double ct = gt.nodes[static_cast<std::size_t>(a)];
    const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    for (int b = 0; b < q.phi_nodes; ++b) {
      const double phi = dphi * (b + 0.5);
      const Vec3 n(st * std::cos(phi), st * std::sin(phi), ct);
      const double wang = gt.weights[static_cast<std::size_t>(a)] * dphi;
      Eigen::Matrix<double, K, 1> ray = Eigen::Matrix<double, K, 1>::Zero();
      auto panel = [&](double lo, double hi) {
        const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
        for (std::size_t k = 0; k < gr.nodes.size(); ++k) {
          const double t = mid + half * gr.nodes[k];
          ray += (gr.weights[k] * half * t * t) * f(Vec3(center + t * n), t);
        }
      };
      panel(0.0, inner);
      const double e = edge(n);
      if (e > inner)
        panel(inner, e);
      total += wang * ray;
    }
  }
  return total;
}

/// Radius along direction n where the effective level of component i vanishes,
/// searched in [support radius, R_cut] and capped at R_cut.
inline double positivity_edge(const Ansatz &a, std::size_t i, const Vec3 &n) {
  const double lo = a.support_radii[i];
  const double hi = a.cutoff_radius;
  auto f = [&](double t) { return effective_level(a, i, Vec3(a.centers_xi[i] + t * n)); };
  const double flo = f(lo * (1.0 + 1e-14));
  if (flo <= 0.0)
    return lo;
  const double fhi = f(hi);
  if (fhi >= 0.0)
    return hi;
  std::uintmax_t iters = 200;
  const auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, boost::math::tools::eps_tolerance<double>(52),
                                                   iters);
  return 0.5 * (r.first + r.second);
}

} // namespace detail

struct EnergyBreakdown {
  double self_gradient = 0.0;
  Eigen::MatrixXd cross_gradient; // zero diagonal
  std::vector<double> nonlinear_terms;
  double total = 0.0;
  double refinement_delta = 0.0; // |fine − coarse| of the total
  double coarse_total = 0.0;
};

namespace detail {

inline EnergyBreakdown energy_at_level(const Ansatz &a, const QuadratureSpec &q) {
  const CellProfile &c = *a.profile;
  const double p = c.p;
  const std::size_t n = a.size();
  EnergyBreakdown e;
  e.cross_gradient = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i)
    e.self_gradient += std::pow(a.lambdas[i], a.gamma) * c.grad_energy;

  // ∫∇w_i·∇w_j = ∫ (w_i − λ_i)₊^p w_j over the support of w_i.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      auto no_edge = [](const Vec3 &) { return 0.0; };
      const auto v = integrate_ball<1>(a.centers_xi[i], a.support_radii[i], no_edge, q, [&](const Vec3 &x, double) {
        const double own = eval_component(a, i, x) - a.lambdas[i];
        return Eigen::Matrix<double, 1, 1>(own > 0.0 ? std::pow(own, p) * eval_component(a, j, x) : 0.0);
      });
      e.cross_gradient(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v(0);
      e.cross_gradient(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v(0);
    }

  for (std::size_t i = 0; i < n; ++i) {
    auto edge = [&](const Vec3 &dir) { return positivity_edge(a, i, dir); };
    const auto v = integrate_ball<1>(a.centers_xi[i], a.support_radii[i], edge, q, [&](const Vec3 &x, double) {
      const double lev = effective_level(a, i, x);
      return Eigen::Matrix<double, 1, 1>(lev > 0.0 ? std::pow(lev, p + 1.0) : 0.0);
    });
    e.nonlinear_terms.push_back(v(0));
  }

  double cross = 0.0, nl = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    nl += e.nonlinear_terms[i];
    for (std::size_t j = 0; j < n; ++j)
      if (i != j)
        cross += e.cross_gradient(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  e.total = 0.5 * (e.self_gradient + cross) - nl / (p + 1.0);
  return e;
}

} // namespace detail

/// J[W_ξ] at the given rule and at the rule with all node counts doubled; the
/// refined breakdown is returned if both agree to the tolerance.
inline EnergyBreakdown energy_J(const Ansatz &a, const QuadratureSpec &q = {}) {
  const EnergyBreakdown coarse = detail::energy_at_level(a, q);
  EnergyBreakdown fine = detail::energy_at_level(a, q.refined());
  fine.coarse_total = coarse.total;
  fine.refinement_delta = std::abs(fine.total - coarse.total);
  if (fine.refinement_delta > q.tolerance * std::abs(fine.total))
    throw AccuracyError("energy quadrature refinement disagreement exceeds tolerance", coarse.total, fine.total);
  return fine;
}

// ---------------------------------------------------------------------------
// Weighted norms

/// `literal`: weights Σ_i|x−ξ_i|^k + 1. `localized`: 1 / Σ_i (1 + |x−ξ_i|^k)^{−1},
/// which measures decay away from the nearest center only. They coincide for
/// one center.
enum class WeightMode { literal, localized };

inline const char *to_string(WeightMode m) { return m == WeightMode::literal ? "literal" : "localized"; }

inline double norm_weight(const Ansatz &a, const Vec3 &x, int k, WeightMode mode) {
  if (mode == WeightMode::literal) {
    double s = 1.0;
    for (const Vec3 &c : a.centers_xi)
      s += std::pow((x - c).norm(), k);
    return s;
  }
  double s = 0.0;
  for (const Vec3 &c : a.centers_xi)
    s += 1.0 / (1.0 + std::pow((x - c).norm(), k));
  return 1.0 / s;
}

struct NormGridSpec {
  int radial_nodes = 48;
  int theta_nodes = 12;
  int phi_nodes = 24;
  int far_field_points = 64;
  WeightMode mode = WeightMode::localized;
};

/// Sample points: each cutoff ball on a (radius × θ × φ) grid including its
/// center, plus a far-field ring beyond all balls.
inline std::vector<Vec3> norm_sample_points(const Ansatz &a, const NormGridSpec &g) {
  std::vector<Vec3> pts;
  for (const Vec3 &c : a.centers_xi) {
    pts.push_back(c);
    for (int r = 1; r <= g.radial_nodes; ++r) {
      const double t = a.cutoff_radius * r / g.radial_nodes * (1.0 - 1e-12);
      for (int th = 0; th < g.theta_nodes; ++th) {
        const double theta = kPi * (th + 0.5) / g.theta_nodes;
        for (int ph = 0; ph < g.phi_nodes; ++ph) {
          const double phi = 2.0 * kPi * ph / g.phi_nodes;
          pts.emplace_back(c + t * Vec3(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
                                        std::cos(theta)));
        }
      }
    }
  }
  double far = 0.0;
  for (const Vec3 &c : a.centers_xi)
    far = std::max(far, c.norm());
  far = 2.0 * far + 2.0 * a.cutoff_radius;
  for (int k = 0; k < g.far_field_points; ++k) {
    const double phi = 2.0 * kPi * k / g.far_field_points;
    pts.emplace_back(far * std::cos(phi), far * std::sin(phi), 0.0);
  }
  return pts;
}

struct WeightedNorms {
  double star = 0.0;        // sup weight₁ |φ|
  double double_star = 0.0; // sup weight₄ |h|
};

template <class Sampler>
WeightedNorms weighted_norms(Sampler &&sampler, const Ansatz &a, const NormGridSpec &g = {}) {
  WeightedNorms n;
  for (const Vec3 &x : norm_sample_points(a, g)) {
    const double v = std::abs(sampler(x));
    n.star = std::max(n.star, norm_weight(a, x, 1, g.mode) * v);
    n.double_star = std::max(n.double_star, norm_weight(a, x, 4, g.mode) * v);
  }
  return n;
}

inline WeightedNorms error_norms(const Ansatz &a, const NormGridSpec &g = {}) {
  return weighted_norms([&](const Vec3 &x) { return error_field(a, x); }, a, g);
}

// ---------------------------------------------------------------------------
// Component mass and center

struct ComponentMoments {
  double mass = 0.0;
  Vec3 center = Vec3::Zero();
};

/// m_i^ω = ∫ρ_i and x_i^ω = (1/m_i)∫ x ρ_i with ρ_i = (W − λ_i + ½ω²|x′|²)₊^p χ_i.
inline ComponentMoments component_mass_center(const Ansatz &a, std::size_t i, const QuadratureSpec &q = {}) {
  if (i >= a.size())
    throw ValidationError("component index out of range");
  const double p = a.profile->p;
  auto edge = [&](const Vec3 &dir) { return detail::positivity_edge(a, i, dir); };
  const auto v = detail::integrate_ball<4>(a.centers_xi[i], a.support_radii[i], edge, q, [&](const Vec3 &x, double) {
    const double lev = effective_level(a, i, x);
    const double rho = lev > 0.0 ? std::pow(lev, p) : 0.0;
    Eigen::Vector4d out;
    out << rho, rho * x.x(), rho * x.y(), rho * x.z();
    return out;
  });
  ComponentMoments m;
  m.mass = v(0);
  m.center = Vec3(v(1), v(2), v(3)) / a.masses[i];
  return m;
}

// ---------------------------------------------------------------------------
// Expansion checks

struct ScanRow {
  double omega = 0.0;
  double j_total = 0.0;
  double j_predicted = 0.0;
  double residual = 0.0;
  double e_norm = 0.0;
  double e_norm_star = 0.0;
  double refinement_delta = 0.0;
};

struct ScanOptions {
  double mu = 10.0;
  double gamma = 0.0;
  QuadratureSpec quadrature;
  NormGridSpec norm_grid;
  unsigned threads = 0;
};

struct ScanTable {
  std::vector<ScanRow> rows;
  double residual_slope = 0.0;
  double e_norm_slope = 0.0;
  double self_energy = 0.0;           // Σ λ_i^γ e⋆
  double extrapolated_constant = 0.0; // ω → 0 limit of J + ω^{2/3}V(ζ)
  double extrapolation_rel_error = 0.0;
};

/// Predicted energy Σ λ_i^γ e⋆ − ω^{2/3} V_m(ζ).
inline double predicted_energy(const Ansatz &a, const PlanarConfiguration &zeta) {
  double s = 0.0;
  for (double lam : a.lambdas)
    s += std::pow(lam, a.gamma) * a.profile->e_star;
  return s - std::pow(a.omega, 2.0 / 3.0) * potential(zeta);
}

inline ScanTable expansion_scan(std::shared_ptr<const CellProfile> profile, const PlanarConfiguration &zeta,
                                std::vector<double> omegas, const ScanOptions &o) {
  if (omegas.empty())
    throw ValidationError("omega list must not be empty");
  for (double w : omegas)
    if (!(w > 0.0))
      throw ValidationError("omegas must be positive");
  std::sort(omegas.begin(), omegas.end());
  // Validate admissibility before any expensive work.
  for (double w : omegas)
    (void)build(profile, zeta, w, o.mu, o.gamma);

  ScanTable t;
  t.rows.resize(omegas.size());
  detail::parallel_for(omegas.size(), o.threads, [&](std::size_t k) {
    const Ansatz a = build(profile, zeta, omegas[k], o.mu, o.gamma);
    const EnergyBreakdown e = energy_J(a, o.quadrature);
    ScanRow &r = t.rows[k];
    r.omega = omegas[k];
    r.j_total = e.total;
    r.j_predicted = predicted_energy(a, zeta);
    r.residual = r.j_total - r.j_predicted;
    r.refinement_delta = e.refinement_delta;
    const WeightedNorms nrm = error_norms(a, o.norm_grid);
    r.e_norm = nrm.double_star;
    r.e_norm_star = nrm.star;
  });

  {
    const Ansatz a = build(profile, zeta, omegas.front(), o.mu, o.gamma);
    t.self_energy = 0.0;
    for (double lam : a.lambdas)
      t.self_energy += std::pow(lam, a.gamma) * profile->e_star;
  }
  if (t.rows.size() >= 2) {
    std::vector<double> w, res, en;
    for (const ScanRow &r : t.rows) {
      w.push_back(r.omega);
      res.push_back(r.residual);
      en.push_back(r.e_norm);
    }
    t.residual_slope = detail::loglog_slope(w, res);
    t.e_norm_slope = detail::loglog_slope(w, en);

    // The remainder expands in powers of ω^{2/3} starting at ω^{4/3}; fit
    // C + D ω^{4/3} + E ω² + F ω^{8/3}, dropping terms when points are scarce.
    const double vz = potential(zeta);
    const std::vector<double> powers{4.0 / 3.0, 2.0, 8.0 / 3.0};
    const std::size_t terms = std::min<std::size_t>(powers.size(), t.rows.size() >= 5 ? 3 : t.rows.size() - 1);
    Eigen::MatrixXd design(static_cast<Eigen::Index>(t.rows.size()), static_cast<Eigen::Index>(terms + 1));
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(t.rows.size()));
    for (std::size_t k = 0; k < t.rows.size(); ++k) {
      const ScanRow &r = t.rows[k];
      design(static_cast<Eigen::Index>(k), 0) = 1.0;
      for (std::size_t c = 0; c < terms; ++c)
        design(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(c + 1)) = std::pow(r.omega, powers[c]);
      rhs(static_cast<Eigen::Index>(k)) = r.j_total + std::pow(r.omega, 2.0 / 3.0) * vz;
    }
    t.extrapolated_constant = design.colPivHouseholderQr().solve(rhs)(0);
  } else {
    t.extrapolated_constant = t.rows[0].j_total + std::pow(t.rows[0].omega, 2.0 / 3.0) * potential(zeta);
  }
  t.extrapolation_rel_error = std::abs(t.extrapolated_constant - t.self_energy) / std::abs(t.self_energy);
  return t;
}

struct GradientComparison {
  double omega = 0.0;
  double step = 0.0;
  Eigen::VectorXd fd_gradient;   // ∂J/∂ξ, planar coordinates (ξ_1x, ξ_1y, ...)
  Eigen::VectorXd minus_grad_v;  // −∇V_m^ω(ξ)
  double max_deviation = 0.0;
  double noise_floor = 0.0; // quadrature refinement delta / step
};

/// Central differences of J[W_ξ] in each planar ξ-coordinate against −∇V_m^ω.
inline GradientComparison gradient_expansion_check(std::shared_ptr<const CellProfile> profile,
                                                   const PlanarConfiguration &zeta, double omega, double mu,
                                                   double gamma, const QuadratureSpec &q = {}, unsigned threads = 0) {
  const Ansatz base = build(profile, zeta, omega, mu, gamma);
  const std::size_t n = base.size();
  double spacing = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      spacing = std::min(spacing, (base.centers_xi[i] - base.centers_xi[j]).norm());
  if (!std::isfinite(spacing))
    spacing = base.cutoff_radius;

  GradientComparison g;
  g.omega = omega;
  g.step = 1e-3 * spacing;
  // The base-point refinement check guards the whole difference stencil.
  const EnergyBreakdown e0 = energy_J(base, q);
  g.noise_floor = e0.refinement_delta / g.step;

  const std::size_t dim = 2 * n;
  std::vector<double> plus(dim), minus(dim);
  detail::parallel_for(2 * dim, threads, [&](std::size_t k) {
    const std::size_t c = k / 2;
    const double sgn = (k % 2 == 0) ? 1.0 : -1.0;
    std::vector<Vec3> xi = base.centers_xi;
    xi[c / 2](static_cast<Eigen::Index>(c % 2)) += sgn * g.step;
    Ansatz shifted = from_xi(profile, base.masses, xi, omega, gamma);
    const double v = detail::energy_at_level(shifted, q.refined()).total;
    (sgn > 0 ? plus : minus)[c] = v;
  });
  g.fd_gradient.resize(static_cast<Eigen::Index>(dim));
  for (std::size_t c = 0; c < dim; ++c)
    g.fd_gradient(static_cast<Eigen::Index>(c)) = (plus[c] - minus[c]) / (2.0 * g.step);

  std::vector<Vec2> pts;
  for (const Vec3 &x : base.centers_xi)
    pts.emplace_back(x.x(), x.y());
  g.minus_grad_v = -scaled_gradient(PlanarConfiguration(std::move(pts), base.masses), omega);
  g.max_deviation = (g.fd_gradient - g.minus_grad_v).cwiseAbs().maxCoeff();
  return g;
}

/// Exponent of the deviation ratio between two ω values.
inline double deviation_exponent(const GradientComparison &a, const GradientComparison &b) {
  return std::log(a.max_deviation / b.max_deviation) / std::log(a.omega / b.omega);
}

} // namespace releq
