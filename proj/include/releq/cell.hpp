#pragma once

// Basic cell: the radial solution of −Δw = (w−1)₊^p, w → 0 at infinity, with
// w ≡ m⋆/(4π|x|) outside the support radius R. Solved by a single shot of the
// normalized interior problem
//   Z″ + (2/r) Z′ + Z₊^p = 0,   Z(0) = 1, Z′(0) = 0
// to its first zero r₀, followed by the exact rescaling Z_a(r) = a Z(a^{(p−1)/2} r)
// that enforces the matching condition 1 + R w′(R) = 0.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

#include "releq/errors.hpp"
#include "releq/nbody.hpp"
#include "releq/quadrature.hpp"

namespace releq {

struct CellProfile {
  double p = 0.0;
  double w0 = 0.0;
  double R = 0.0;
  double m_star = 0.0;
  double e_star = 0.0;
  double grad_energy = 0.0;        // ∫_{ℝ³} |∇w|², interior plus exterior
  double nonlinear_integral = 0.0; // ∫ (w−1)₊^{p+1}
  double tolerance = 0.0;
  std::vector<double> radial_grid;
  std::vector<double> w_values;
  std::vector<double> w_derivative_values;
};

inline constexpr std::size_t kCellGridSize = 2048;

/// Radial source term for the shooter: Z″ + (2/r)Z′ + f(Z) = 0. `g` is a
/// second integrand accumulated as ∫ r² g(Z).
struct RadialSource {
  std::function<double(double)> f;
  std::function<double(double)> df;
  std::function<double(double)> g;
};

inline RadialSource polytropic_source(double p) {
  return {[p](double z) { return z > 0.0 ? std::pow(z, p) : 0.0; },
          [p](double z) { return z > 0.0 ? p * std::pow(z, p - 1.0) : 0.0; },
          [p](double z) { return z > 0.0 ? std::pow(z, p + 1.0) : 0.0; }};
}

struct ShotResult {
  double r0 = 0.0;     // first zero of Z
  double s0 = 0.0;     // Z′(r₀)
  double i_grad = 0.0; // ∫₀^{r₀} r² Z′²
  double i_f = 0.0;    // ∫₀^{r₀} r² f(Z)
  double i_g = 0.0;    // ∫₀^{r₀} r² g(Z)
  std::size_t steps = 0;
};

namespace detail {

using ShotState = std::array<double, 5>; // Z, Z′, I_grad, I_f, I_g

struct RadialSystem {
  const RadialSource *src;
  void operator()(const ShotState &x, ShotState &dx, double r) const {
    const double fz = src->f(x[0]);
    dx[0] = x[1];
    dx[1] = -2.0 * x[1] / r - fz;
    dx[2] = r * r * x[1] * x[1];
    dx[3] = r * r * fz;
    dx[4] = r * r * src->g(x[0]);
  }
};

/// Taylor start at small r: Z = A − f r²/6 + f f′ r⁴/120.
inline ShotState series_start(const RadialSource &src, double a, double r) {
  const double f = src.f(a), df = src.df(a);
  ShotState x;
  x[0] = a - f * r * r / 6.0 + f * df * std::pow(r, 4) / 120.0;
  x[1] = -f * r / 3.0 + f * df * std::pow(r, 3) / 30.0;
  x[2] = f * f * std::pow(r, 5) / 45.0;
  x[3] = f * r * r * r / 3.0;
  x[4] = src.g(a) * r * r * r / 3.0;
  return x;
}

} // namespace detail

/// Integrates from Z(0) = a to the first zero. `length_scale` sets the series
/// start 1e−3·length_scale and the search limit 50·length_scale.
inline ShotResult shoot_radial(const RadialSource &src, double a, double length_scale, double tol) {
  namespace ode = boost::numeric::odeint;
  using Stepper = ode::runge_kutta_dopri5<detail::ShotState>;
  const double atol = tol * 1e-2, rtol = tol * 1e-2;
  const double r_start = 1e-3 * length_scale;
  const double r_max = 50.0 * length_scale;
  detail::RadialSystem sys{&src};

  auto dense = ode::make_dense_output(atol, rtol, Stepper());
  dense.initialize(detail::series_start(src, a, r_start), r_start, 1e-3 * length_scale);
  ShotResult out;
  while (dense.current_time() < r_max) {
    dense.do_step(sys);
    ++out.steps;
    if (dense.current_state()[0] > 0.0)
      continue;

    const double t_lo = dense.previous_time();
    const detail::ShotState x_lo = dense.previous_state();
    detail::ShotState tmp;
    auto z_at = [&](double r) {
      dense.calc_state(r, tmp);
      return tmp[0];
    };
    std::uintmax_t iters = 100;
    auto bracket = boost::math::tools::toms748_solve(
        z_at, t_lo, dense.current_time(), x_lo[0], dense.current_state()[0],
        boost::math::tools::eps_tolerance<double>(50), iters);
    double r = 0.5 * (bracket.first + bracket.second);

    // Controlled re-integration from the last accepted point, then Newton on
    // the zero with the integrated slope.
    detail::ShotState x{};
    for (int it = 0; it < 6; ++it) {
      x = x_lo;
      ode::integrate_adaptive(ode::make_controlled(atol, rtol, Stepper()), sys, x, t_lo, r,
                              std::min(1e-3 * length_scale, r - t_lo));
      const double dr = -x[0] / x[1];
      r += dr;
      if (std::abs(dr) <= 1e-15 * r)
        break;
    }
    x = x_lo;
    ode::integrate_adaptive(ode::make_controlled(atol, rtol, Stepper()), sys, x, t_lo, r,
                            std::min(1e-3 * length_scale, r - t_lo));
    out.r0 = r;
    out.s0 = x[1];
    out.i_grad = x[2];
    out.i_f = x[3];
    out.i_g = x[4];
    return out;
  }
  throw ConvergenceError("cell shooting found no zero crossing before r = " + std::to_string(r_max));
}

namespace detail {

inline void require_cell_exponent(double p) {
  if (!(p > 1.0 && p < 5.0))
    throw DomainError("cell exponent p must lie in (1, 5), got " + std::to_string(p));
}

/// w″ from the ODE; at r = 0 the regular limit −(w0−1)^p/3.
inline double cell_second_derivative(double p, double r, double w, double dw) {
  const double s = w > 1.0 ? std::pow(w - 1.0, p) : 0.0;
  if (r == 0.0)
    return -s / 3.0;
  return -2.0 * dw / r - s;
}

} // namespace detail

inline CellProfile solve_normalized(double p, double tol = 1e-10) {
  detail::require_cell_exponent(p);
  if (!(tol > 0.0 && tol < 1e-2))
    throw ValidationError("cell tolerance must lie in (0, 1e-2)");
  namespace ode = boost::numeric::odeint;
  const RadialSource src = polytropic_source(p);
  const ShotResult shot = shoot_radial(src, 1.0, 1.0, tol);

  CellProfile c;
  c.p = p;
  c.tolerance = tol;
  const double a = 1.0 / (shot.r0 * std::abs(shot.s0));
  const double k = std::pow(a, 0.5 * (p - 1.0));
  c.w0 = 1.0 + a;
  c.R = shot.r0 / k;
  c.m_star = kFourPi * c.R;
  c.grad_energy = kFourPi * a * a * shot.i_grad / k + c.m_star * c.m_star / (kFourPi * c.R);
  c.nonlinear_integral = kFourPi * std::pow(a, p + 1.0) * std::pow(k, -3.0) * shot.i_g;
  c.e_star = 0.5 * c.grad_energy - c.nonlinear_integral / (p + 1.0);

  // Chebyshev grid on [0, R], values from a controlled integration that steps
  // exactly onto every node (normalized radius k·r).
  const std::size_t n = kCellGridSize;
  c.radial_grid.resize(n);
  c.w_values.resize(n);
  c.w_derivative_values.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    c.radial_grid[i] = 0.5 * c.R * (1.0 - std::cos(kPi * static_cast<double>(i) / static_cast<double>(n - 1)));
  c.radial_grid.back() = c.R;

  const double r_start = 1e-3;
  std::vector<double> times;
  std::vector<std::size_t> which;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = k * c.radial_grid[i];
    if (s <= r_start) {
      const detail::ShotState x = detail::series_start(src, 1.0, s);
      c.w_values[i] = 1.0 + a * x[0];
      c.w_derivative_values[i] = a * k * x[1];
    } else if (i + 1 < n) {
      times.push_back(s);
      which.push_back(i);
    }
  }
  if (!times.empty()) {
    using Stepper = ode::runge_kutta_dopri5<detail::ShotState>;
    detail::RadialSystem sys{&src};
    std::vector<double> obs_times{r_start};
    obs_times.insert(obs_times.end(), times.begin(), times.end());
    detail::ShotState x = detail::series_start(src, 1.0, r_start);
    std::size_t idx = 0;
    ode::integrate_times(
        ode::make_controlled(tol * 1e-2, tol * 1e-2, Stepper()), sys, x, obs_times.begin(), obs_times.end(),
        1e-4, [&](const detail::ShotState &st, double) {
          if (idx > 0) {
            const std::size_t i = which[idx - 1];
            c.w_values[i] = 1.0 + a * st[0];
            c.w_derivative_values[i] = a * k * st[1];
          }
          ++idx;
        });
  }
  c.w_values.back() = 1.0;
  c.w_derivative_values.back() = -1.0 / c.R;
  c.w_values.front() = c.w0;
  c.w_derivative_values.front() = 0.0;
  return c;
}

/// Support radius of w^λ: R·λ^{−(p−1)/2}.
inline double support_radius(const CellProfile &c, double lambda) {
  return c.R * std::pow(lambda, -0.5 * (c.p - 1.0));
}

/// m⋆ λ^{(3−p)/2}
inline double mass_of(const CellProfile &c, double lambda) {
  return c.m_star * std::pow(lambda, 0.5 * (3.0 - c.p));
}

inline double lambda_for_mass(const CellProfile &c, double m) {
  if (!(m > 0.0))
    throw ValidationError("mass must be positive");
  if (c.p == 3.0)
    throw DomainError("at p = 3 the cell mass does not depend on the threshold; cannot fit a mass");
  return std::pow(m / c.m_star, 2.0 / (3.0 - c.p));
}

struct ScaledValue {
  double w = 0.0;
  double dw = 0.0;
};

/// w(s) and w′(s) for the normalized profile at s ∈ [0, R]: cubic Hermite on
/// the stored grid, derivative data from the ODE itself.
inline ScaledValue eval_normalized(const CellProfile &c, double s) {
  const auto &g = c.radial_grid;
  if (s <= 0.0)
    return {c.w0, 0.0};
  if (s >= c.R)
    return {c.m_star / (kFourPi * s), -c.m_star / (kFourPi * s * s)};
  const auto it = std::upper_bound(g.begin(), g.end(), s);
  const std::size_t j = static_cast<std::size_t>(it - g.begin());
  const std::size_t i = j - 1;
  const double h = g[j] - g[i];
  const double t = (s - g[i]) / h;
  const double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
  const double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
  const double w_i = c.w_values[i], w_j = c.w_values[j];
  const double dw_i = c.w_derivative_values[i], dw_j = c.w_derivative_values[j];
  const double ddw_i = detail::cell_second_derivative(c.p, g[i], w_i, dw_i);
  const double ddw_j = detail::cell_second_derivative(c.p, g[j], w_j, dw_j);
  ScaledValue v;
  v.w = h00 * w_i + h10 * h * dw_i + h01 * w_j + h11 * h * dw_j;
  v.dw = h00 * dw_i + h10 * h * ddw_i + h01 * dw_j + h11 * h * ddw_j;
  return v;
}

/// w^λ(r) = λ w(λ^{(p−1)/2} r) with the exact Newtonian tail m_λ/(4πr) outside
/// the support radius.
inline ScaledValue eval_scaled(const CellProfile &c, double lambda, double r) {
  const double k = std::pow(lambda, 0.5 * (c.p - 1.0));
  const double s = k * r;
  if (s >= c.R) {
    const double m = mass_of(c, lambda);
    return {m / (kFourPi * r), -m / (kFourPi * r * r)};
  }
  const ScaledValue v = eval_normalized(c, s);
  return {lambda * v.w, lambda * k * v.dw};
}

struct CellInvariants {
  double w_at_R_error = 0.0;        // |w(R) − 1|
  double matching_error = 0.0;      // |1 + R w′(R)|
  double mass_radius_error = 0.0;   // |m⋆ − 4πR| / m⋆
  double mass_identity_error = 0.0; // |4π∫r²(w−1)₊^p + 4πR²w′(R)| / m⋆
  bool monotone = false;
  bool passed = false;
};

inline CellInvariants check_invariants(const CellProfile &c) {
  CellInvariants inv;
  const std::size_t n = c.radial_grid.size();
  if (n < 2 || c.w_values.size() != n || c.w_derivative_values.size() != n)
    throw ValidationError("cell profile grid is malformed");
  inv.w_at_R_error = std::abs(c.w_values.back() - 1.0);
  inv.matching_error = std::abs(1.0 + c.R * c.w_derivative_values.back());
  inv.mass_radius_error = std::abs(c.m_star - kFourPi * c.R) / c.m_star;
  const std::vector<double> w = clenshaw_curtis_weights(n);
  double integral = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = c.radial_grid[i];
    const double u = c.w_values[i] - 1.0;
    if (u > 0.0)
      integral += w[i] * r * r * std::pow(u, c.p);
  }
  integral *= 0.5 * c.R * kFourPi;
  const double flux = -kFourPi * c.R * c.R * c.w_derivative_values.back();
  inv.mass_identity_error = std::abs(integral - flux) / c.m_star;
  inv.monotone = true;
  for (std::size_t i = 1; i < n; ++i)
    inv.monotone = inv.monotone && c.w_values[i] < c.w_values[i - 1];
  inv.passed = inv.w_at_R_error <= 1e-9 && inv.matching_error <= 1e-8 && inv.mass_radius_error <= 1e-8 &&
               inv.mass_identity_error <= 1e-6 && inv.monotone;
  return inv;
}

struct ScalingReport {
  std::vector<double> lambdas;
  std::vector<double> masses;
  std::vector<double> energies;
  double mass_slope = 0.0;
  double mass_slope_expected = 0.0;    // (3−p)/2
  double energy_slope = 0.0;
  double energy_slope_half = 0.0;      // (5−p)/2
  double energy_slope_printed = 0.0;   // 5−p
  double energy_at_one_error = 0.0;    // |E(1) − e⋆| / |e⋆|
};

namespace detail {

inline double loglog_slope(const std::vector<double> &x, const std::vector<double> &y) {
  const std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = std::log(x[i]), ly = std::log(std::abs(y[i]));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double dn = static_cast<double>(n);
  return (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
}

} // namespace detail

/// Re-shoots −Δu = (u−λ)₊^p from u(0) = λ w0 for each λ (independently of the
/// scaling formula) and fits log-log slopes of the mass and of
///   E(λ) = ½∫|∇u|² − (1/(p+1))∫(u−λ)₊^{p+1}.
inline ScalingReport verify_scaling(const CellProfile &c, std::vector<double> lambdas = {1.0, 2.0, 4.0}) {
  ScalingReport rep;
  const RadialSource src = polytropic_source(c.p);
  rep.lambdas = lambdas;
  for (double lam : lambdas) {
    const double amp = lam * (c.w0 - 1.0);
    const double scale = std::pow(amp, -0.5 * (c.p - 1.0));
    const ShotResult s = shoot_radial(src, amp, scale, c.tolerance);
    const double mass = -kFourPi * s.r0 * s.r0 * s.s0;
    const double grad = kFourPi * s.i_grad + mass * mass / (kFourPi * s.r0);
    rep.masses.push_back(kFourPi * s.i_f);
    rep.energies.push_back(0.5 * grad - kFourPi * s.i_g / (c.p + 1.0));
  }
  rep.mass_slope = detail::loglog_slope(rep.lambdas, rep.masses);
  rep.mass_slope_expected = 0.5 * (3.0 - c.p);
  rep.energy_slope = detail::loglog_slope(rep.lambdas, rep.energies);
  rep.energy_slope_half = 0.5 * (5.0 - c.p);
  rep.energy_slope_printed = 5.0 - c.p;
  for (std::size_t i = 0; i < lambdas.size(); ++i)
    if (lambdas[i] == 1.0)
      rep.energy_at_one_error = std::abs(rep.energies[i] - c.e_star) / std::abs(c.e_star);
  return rep;
}

} // namespace releq
