#pragma once

// Polytropic kinetic dictionary: γ(s) = κ_q^{−1} (−s)₊^{1/(q−1)} and its
// velocity integral g(μ) = ∫ γ(μ + ½|v|²) dv = (−μ)₊^p with p = 1/(q−1) + 3/2.

#include <cmath>
#include <string>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "releq/ansatz.hpp"
#include "releq/errors.hpp"

namespace releq {

struct PolytropeSpec {
  double q = 0.0;
  double p = 0.0;
  double kappa_q = 0.0;
};

/// κ_q = (2π)^{3/2} Γ(q/(q−1)) / Γ(3/2 + q/(q−1)), via log-gamma to stay
/// finite for q close to 1.
inline PolytropeSpec make_polytrope(double q) {
  if (!(q > 1.0) || !std::isfinite(q))
    throw ValidationError("polytropic index q must be greater than 1");
  PolytropeSpec s;
  s.q = q;
  const double b = q / (q - 1.0);
  s.p = 1.0 / (q - 1.0) + 1.5;
  s.kappa_q = std::pow(2.0 * kPi, 1.5) * std::exp(std::lgamma(b) - std::lgamma(1.5 + b));
  return s;
}

/// q from the spatial exponent: q = 1 + 1/(p − 3/2), requires p > 3/2.
inline PolytropeSpec polytrope_from_p(double p) {
  if (!(p > 1.5))
    throw DomainError("a polytropic kinetic model needs p > 3/2");
  return make_polytrope(1.0 + 1.0 / (p - 1.5));
}

inline double gamma_fn(const PolytropeSpec &s, double x) {
  return x < 0.0 ? std::pow(-x, 1.0 / (s.q - 1.0)) / s.kappa_q : 0.0;
}

struct GCheck {
  double numeric = 0.0;
  double closed_form = 0.0;
  double rel_err = 0.0;
  double error_estimate = 0.0;
};

/// 4π ∫₀^{√(−2μ)} γ(μ + s²/2) s² ds by tanh-sinh against (−μ)₊^p.
inline GCheck g_check(const PolytropeSpec &s, double mu, double quad_tol = 1e-12) {
  GCheck r;
  if (mu >= 0.0)
    return r;
  const double top = std::sqrt(-2.0 * mu);
  boost::math::quadrature::tanh_sinh<double> ts;
  double err = 0.0;
  const double v = ts.integrate([&](double x) { return gamma_fn(s, mu + 0.5 * x * x) * x * x; }, 0.0, top, quad_tol,
                                &err);
  r.numeric = kFourPi * v;
  r.error_estimate = kFourPi * err;
  r.closed_form = std::pow(-mu, s.p);
  r.rel_err = std::abs(r.numeric - r.closed_form) / r.closed_form;
  if (r.error_estimate > 1e3 * quad_tol * std::abs(r.numeric) + 1e-300)
    throw AccuracyError("velocity integral did not converge", r.numeric, r.closed_form);
  return r;
}

/// f(x, v) = γ(λ_i + ½|v|² − W(x) − ½ω²|x′|²) on component i.
inline double distribution_f(const PolytropeSpec &s, const Ansatz &a, std::size_t i, const Vec3 &x, const Vec3 &v) {
  if (i >= a.size())
    throw ValidationError("component index out of range");
  if (!in_cutoff_ball(a, i, x))
    throw DomainError("point lies outside the cutoff ball of component " + std::to_string(i));
  return gamma_fn(s, 0.5 * v.squaredNorm() - effective_level(a, i, x));
}

/// ∫ f(x, v) dv by radial velocity quadrature, to compare with ρ_i(x).
inline double velocity_marginal(const PolytropeSpec &s, const Ansatz &a, std::size_t i, const Vec3 &x,
                                double quad_tol = 1e-12) {
  const double level = effective_level(a, i, x);
  if (!in_cutoff_ball(a, i, x))
    throw DomainError("point lies outside the cutoff ball of component " + std::to_string(i));
  if (level <= 0.0)
    return 0.0;
  const double top = std::sqrt(2.0 * level);
  boost::math::quadrature::tanh_sinh<double> ts;
  const Vec3 e(1.0, 0.0, 0.0);
  return kFourPi * ts.integrate([&](double u) { return distribution_f(s, a, i, x, u * e) * u * u; }, 0.0, top,
                                quad_tol);
}

} // namespace releq
