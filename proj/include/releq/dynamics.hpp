#pragma once

// Newtonian N-body integration with G = 1/(4π):
//   ẍ_j = Σ_{k≠j} (m_k/4π) (x_k − x_j)/|x_k − x_j|³
// used to check that relative equilibria rotate rigidly.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "releq/errors.hpp"
#include "releq/nbody.hpp"

namespace releq {

using Vec3 = Eigen::Vector3d;

struct PhaseState {
  std::vector<Vec3> positions;
  std::vector<Vec3> velocities;
  MassVector masses;
  double time = 0.0;
};

inline void validate_state(const PhaseState &s) {
  if (s.positions.size() != s.masses.size() || s.velocities.size() != s.masses.size())
    throw ValidationError("phase state sizes do not match the number of masses");
  for (std::size_t i = 0; i < s.positions.size(); ++i)
    if (!s.positions[i].allFinite() || !s.velocities[i].allFinite())
      throw ValidationError("phase state contains non-finite entries");
}

inline std::vector<Vec3> accelerations(const PhaseState &s) {
  const std::size_t n = s.positions.size();
  Vec3 com = Vec3::Zero();
  for (std::size_t i = 0; i < n; ++i)
    com += s.masses[i] * s.positions[i];
  com /= s.masses.total();
  double scale = 0.0;
  for (const Vec3 &x : s.positions)
    scale = std::max(scale, (x - com).norm());
  std::vector<Vec3> acc(n, Vec3::Zero());
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = j + 1; k < n; ++k) {
      const Vec3 d = s.positions[k] - s.positions[j];
      const double r = d.norm();
      if (!(r > 0.0) || r < 1e-9 * scale)
        throw SingularityError("near-collision between bodies " + std::to_string(j) + " and " + std::to_string(k) +
                               " at t = " + std::to_string(s.time));
      const Vec3 f = d / (kFourPi * r * r * r);
      acc[j] += s.masses[k] * f;
      acc[k] -= s.masses[j] * f;
    }
  return acc;
}

/// Positions ω^{−2/3}(ζ_j, 0), velocities ω^{1/3}(iζ_j, 0).
inline PhaseState releq_initial_conditions(const PlanarConfiguration &zeta, double omega) {
  if (!(omega > 0.0))
    throw ValidationError("omega must be positive");
  PhaseState s;
  s.masses = zeta.masses();
  const double a = std::pow(omega, -2.0 / 3.0), b = std::pow(omega, 1.0 / 3.0);
  for (const Vec2 &z : zeta.points()) {
    s.positions.emplace_back(a * z.x(), a * z.y(), 0.0);
    s.velocities.emplace_back(-b * z.y(), b * z.x(), 0.0);
  }
  return s;
}

struct Conserved {
  double energy = 0.0;
  Vec3 angular_momentum = Vec3::Zero();
  Vec3 linear_momentum = Vec3::Zero();
};

inline Conserved conserved(const PhaseState &s) {
  Conserved c;
  const std::size_t n = s.positions.size();
  for (std::size_t i = 0; i < n; ++i) {
    c.energy += 0.5 * s.masses[i] * s.velocities[i].squaredNorm();
    c.angular_momentum += s.masses[i] * s.positions[i].cross(s.velocities[i]);
    c.linear_momentum += s.masses[i] * s.velocities[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      const double r = (s.positions[i] - s.positions[j]).norm();
      if (!(r > 0.0))
        throw SingularityError("coincident bodies in energy evaluation");
      c.energy -= s.masses[i] * s.masses[j] / (kFourPi * r);
    }
  }
  return c;
}

struct Trajectory {
  std::vector<PhaseState> snapshots; // initial state first, final state last
};

/// Fixed-step kick-drift-kick velocity Verlet. Snapshots every `stride` steps
/// and at the end.
inline Trajectory integrate(PhaseState s, double dt, std::size_t n_steps, std::size_t stride = 1) {
  validate_state(s);
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw ValidationError("time step must be positive");
  if (stride == 0)
    throw ValidationError("snapshot stride must be positive");
  Trajectory t;
  t.snapshots.push_back(s);
  const double t0 = s.time;
  std::vector<Vec3> acc = accelerations(s);
  const std::size_t n = s.positions.size();
  for (std::size_t step = 1; step <= n_steps; ++step) {
    for (std::size_t i = 0; i < n; ++i) {
      s.velocities[i] += 0.5 * dt * acc[i];
      s.positions[i] += dt * s.velocities[i];
    }
    s.time = t0 + static_cast<double>(step) * dt;
    acc = accelerations(s);
    for (std::size_t i = 0; i < n; ++i)
      s.velocities[i] += 0.5 * dt * acc[i];
    if (step % stride == 0 || step == n_steps)
      if (t.snapshots.back().time != s.time)
        t.snapshots.push_back(s);
  }
  return t;
}

struct RigidityReport {
  double pairwise_drift = 0.0;    // max relative change of |x_i − x_j|
  double radius_drift = 0.0;      // max relative change of |x_j′|
  double phase_deviation = 0.0;   // max |unwrapped arg x_j′(t) − arg ζ_j − ωt|
  double out_of_plane = 0.0;      // max |x_j³|
  double energy_drift = 0.0;      // max relative change of the energy
  double angular_momentum_drift = 0.0;
  double linear_momentum = 0.0;   // max |P|
  double period = 0.0;
  double duration = 0.0;
};

inline RigidityReport rigidity_report(const Trajectory &traj, const PlanarConfiguration &zeta, double omega) {
  if (traj.snapshots.empty())
    throw ValidationError("empty trajectory");
  RigidityReport r;
  r.period = 2.0 * kPi / omega;
  const PhaseState &s0 = traj.snapshots.front();
  const std::size_t n = s0.positions.size();
  if (zeta.size() != n)
    throw ValidationError("configuration and trajectory have different numbers of bodies");
  r.duration = traj.snapshots.back().time - s0.time;

  std::vector<double> d0, rad0, phase_prev(n), phase_unwrapped(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      d0.push_back((s0.positions[i] - s0.positions[j]).norm());
  for (std::size_t j = 0; j < n; ++j) {
    rad0.push_back(s0.positions[j].head<2>().norm());
    phase_prev[j] = std::atan2(s0.positions[j].y(), s0.positions[j].x());
    phase_unwrapped[j] = phase_prev[j];
  }
  const Conserved c0 = conserved(s0);
  const double rad_scale = *std::max_element(rad0.begin(), rad0.end());

  for (const PhaseState &s : traj.snapshots) {
    const double t = s.time - s0.time;
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j, ++k)
        r.pairwise_drift = std::max(r.pairwise_drift, std::abs((s.positions[i] - s.positions[j]).norm() / d0[k] - 1.0));
    for (std::size_t j = 0; j < n; ++j) {
      const Vec3 &x = s.positions[j];
      r.out_of_plane = std::max(r.out_of_plane, std::abs(x.z()));
      // Bodies at the rotation center have no meaningful radius or phase.
      if (rad0[j] <= 1e-12 * rad_scale)
        continue;
      r.radius_drift = std::max(r.radius_drift, std::abs(x.head<2>().norm() / rad0[j] - 1.0));
      const double ph = std::atan2(x.y(), x.x());
      double delta = ph - phase_prev[j];
      delta -= 2.0 * kPi * std::round(delta / (2.0 * kPi));
      phase_unwrapped[j] += delta;
      phase_prev[j] = ph;
      const double expected = std::atan2(zeta.point(j).y(), zeta.point(j).x()) + omega * t;
      r.phase_deviation = std::max(r.phase_deviation, std::abs(phase_unwrapped[j] - expected));
    }
    const Conserved c = conserved(s);
    r.energy_drift = std::max(r.energy_drift, std::abs(c.energy / c0.energy - 1.0));
    r.angular_momentum_drift = std::max(r.angular_momentum_drift,
                                        (c.angular_momentum - c0.angular_momentum).norm() / c0.angular_momentum.norm());
    r.linear_momentum = std::max(r.linear_momentum, c.linear_momentum.norm());
  }
  return r;
}

} // namespace releq
