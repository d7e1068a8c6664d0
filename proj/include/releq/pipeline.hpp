#pragma once

// End-to-end reproduction: minimizing equilibrium → cell profile → expansion
// scan → rigid-rotation dynamics, as one JSON report.

#include <memory>

#include "releq/io.hpp"

namespace releq {

/// Lowest-potential certified class of the multistart search.
inline EquilibriumClass minimizing_class(const MassVector &masses, const FindOptions &o) {
  FindResult r = find_equilibria(masses, o);
  if (r.classes.empty())
    throw ConvergenceError("equilibrium search found no certified critical point");
  return r.classes.front();
}

struct ResolvedInstance {
  AbsoluteInstance absolute;
  PlanarConfiguration zeta; // absolute units
  json source;              // how ζ was obtained
};

/// ζ in absolute units: from the config if present, otherwise the minimizing
/// class for the config masses (in config units), rescaled by m⋆^{1/3} when
/// the masses are in cell units.
inline ResolvedInstance resolve_instance(const RunConfig &c, const CellProfile &profile, unsigned threads) {
  ResolvedInstance r;
  r.absolute = to_absolute(c, profile);
  if (r.absolute.zeta) {
    r.zeta = *r.absolute.zeta;
    r.source = {{"kind", "config"}};
    return r;
  }
  FindOptions fo;
  fo.num_starts = c.starts;
  fo.seed = c.seed;
  fo.threads = threads;
  const EquilibriumClass ec = minimizing_class(MassVector(c.masses), fo);
  const double s = std::cbrt(r.absolute.mass_factor);
  std::vector<Vec2> pts;
  for (const Vec2 &z : ec.representative.points())
    pts.push_back(s * z);
  r.zeta = PlanarConfiguration(std::move(pts), r.absolute.masses);
  r.source = {{"kind", "search"}, {"class", json_of(ec)}};
  return r;
}

/// Rigidity over `periods` periods; the control run scales the initial
/// velocities by 1.05.
inline json dynamics_section(const PlanarConfiguration &zeta, double omega, double periods,
                             std::size_t steps_per_period) {
  if (!(periods > 0.0) || steps_per_period == 0)
    throw ValidationError("periods and steps per period must be positive");
  const double period = 2.0 * kPi / omega;
  const std::size_t steps = static_cast<std::size_t>(std::llround(periods * static_cast<double>(steps_per_period)));
  const double dt = period / static_cast<double>(steps_per_period);
  const std::size_t stride = std::max<std::size_t>(1, steps_per_period / 1000);
  const PhaseState s0 = releq_initial_conditions(zeta, omega);
  const RigidityReport exact = rigidity_report(integrate(s0, dt, steps, stride), zeta, omega);
  PhaseState c0 = s0;
  for (Vec3 &v : c0.velocities)
    v *= 1.05;
  const RigidityReport control = rigidity_report(integrate(c0, dt, steps, stride), zeta, omega);
  return {{"omega", omega},
          {"dt", dt},
          {"steps", steps},
          {"rigidity", json_of(exact)},
          {"control", json_of(control)},
          {"control_velocity_factor", 1.05}};
}

inline std::vector<double> default_omegas() { return parse_omegas("1e-4:1e-2:8log"); }

inline json run_pipeline(RunConfig c, unsigned threads = 0) {
  if (c.omegas.empty())
    c.omegas = default_omegas();
  auto profile = std::make_shared<const CellProfile>(solve_normalized(c.p, c.cell_tol));
  const CellInvariants inv = check_invariants(*profile);
  const ScalingReport scaling = verify_scaling(*profile);
  const ResolvedInstance inst = resolve_instance(c, *profile, threads);

  ScanOptions so;
  so.mu = c.mu;
  so.gamma = scaling.energy_slope;
  so.quadrature.tolerance = c.quad_tol;
  so.threads = threads;
  const ScanTable scan = expansion_scan(profile, inst.zeta, c.omegas, so);

  json meta = metadata(c.seed, c.echo());
  meta["exponents"] = exponent_metadata(scaling);
  return {{"meta", meta},
          {"equilibrium",
           {{"source", inst.source},
            {"zeta", json_of(inst.zeta)},
            {"mass_factor", inst.absolute.mass_factor},
            {"potential", potential(inst.zeta)}}},
          {"cell", {{"profile", json_summary(*profile)}, {"invariants", json_of(inv)}, {"scaling", json_of(scaling)}}},
          {"scan", json_of(scan)},
          {"dynamics", dynamics_section(inst.zeta, c.omegas.back(), c.periods, c.steps_per_period)}};
}

} // namespace releq
