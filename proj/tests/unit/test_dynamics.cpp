#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "releq/dynamics.hpp"
#include "releq/equilibria.hpp"

using namespace releq;

TEST(Dynamics, CircularTwoBodyOrbitMatchesRotation) {
  const PlanarConfiguration z = two_body(1.0, 3.0);
  const double omega = 1e-2;
  const double period = 2 * std::numbers::pi / omega;
  const std::size_t steps = 40000;
  const PhaseState s0 = releq_initial_conditions(z, omega);
  const Trajectory t = integrate(s0, period / 4 / steps, steps, steps);
  const PhaseState &end = t.snapshots.back();
  EXPECT_NEAR(end.time, period / 4, 1e-9 * period);
  // A quarter turn maps (x, y) to (−y, x).
  for (std::size_t j = 0; j < 2; ++j) {
    const Vec3 expect(-s0.positions[j].y(), s0.positions[j].x(), 0.0);
    EXPECT_LT((end.positions[j] - expect).norm(), 1e-7 * s0.positions[j].norm());
  }
}

TEST(Dynamics, VerletIsTimeReversible) {
  const PlanarConfiguration z = lagrange_triangle(1, 2, 3);
  PhaseState s = releq_initial_conditions(z, 1e-2);
  s.velocities[0] *= 1.1;
  const PhaseState fwd = integrate(s, 0.5, 2000, 2000).snapshots.back();
  PhaseState back = fwd;
  for (Vec3 &v : back.velocities)
    v = -v;
  const PhaseState ret = integrate(back, 0.5, 2000, 2000).snapshots.back();
  for (std::size_t j = 0; j < 3; ++j)
    EXPECT_LT((ret.positions[j] - s.positions[j]).norm(), 1e-9 * s.positions[j].norm());
}

TEST(Dynamics, RigidityOfCertifiedEquilibria) {
  for (const PlanarConfiguration &z : {two_body(1, 1), lagrange_triangle(1, 2, 3)}) {
    const double omega = 1e-2;
    const double T = 2 * std::numbers::pi / omega;
    const RigidityReport r =
        rigidity_report(integrate(releq_initial_conditions(z, omega), T / 1e5, 100000, 100), z, omega);
    EXPECT_LE(r.pairwise_drift, 1e-5);
    EXPECT_LE(r.energy_drift, 1e-8);
    EXPECT_LE(r.out_of_plane, 1e-12);
    EXPECT_LE(r.angular_momentum_drift, 1e-10);
    EXPECT_NEAR(r.duration, T, 1e-9 * T);
  }
}

TEST(Dynamics, ConservedQuantitiesOfTheInitialState) {
  const PlanarConfiguration z = two_body(1, 1);
  const PhaseState s = releq_initial_conditions(z, 1.0);
  const Conserved c = conserved(s);
  EXPECT_LT(c.linear_momentum.norm(), 1e-15);
  // Circular orbit: kinetic energy = ½|potential energy|.
  const double d = (s.positions[0] - s.positions[1]).norm();
  EXPECT_NEAR(c.energy, -0.5 / (4 * std::numbers::pi * d), 1e-14);
}

TEST(Dynamics, Errors) {
  PhaseState s = releq_initial_conditions(two_body(1, 1), 1.0);
  EXPECT_THROW(integrate(s, -1.0, 10), ValidationError);
  EXPECT_THROW(integrate(s, 1e-3, 10, 0), ValidationError);
  s.positions[1] = s.positions[0];
  EXPECT_THROW(accelerations(s), SingularityError);
  EXPECT_THROW(releq_initial_conditions(two_body(1, 1), 0.0), ValidationError);
}
