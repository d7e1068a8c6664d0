#include <cmath>
#include <memory>
#include <numbers>

#include <gtest/gtest.h>

#include "releq/ansatz.hpp"
#include "releq/equilibria.hpp"
#include "releq/kinetic.hpp"

using namespace releq;

namespace {

constexpr double kEStar25 = 27.5049976929983; // frozen e⋆ at p = 2.5

std::shared_ptr<const CellProfile> profile25() {
  static const auto c = std::make_shared<const CellProfile>(solve_normalized(2.5));
  return c;
}

Ansatz single(double mass_factor) {
  const auto c = profile25();
  return from_xi(c, MassVector({mass_factor * c->m_star}), {Vec3::Zero()}, 0.0, 1.25);
}

} // namespace

TEST(Quadrature, GaussLegendreIntegratesPolynomialsExactly) {
  const QuadratureRule &r = gauss_legendre(8);
  for (int k = 0; k <= 15; ++k) {
    double s = 0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i)
      s += r.weights[i] * std::pow(r.nodes[i], k);
    EXPECT_NEAR(s, k % 2 ? 0.0 : 2.0 / (k + 1), 1e-14);
  }
  const auto w = clenshaw_curtis_weights(33);
  double s = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double x = -std::cos(std::numbers::pi * static_cast<double>(i) / 32);
    s += w[i] * x * x * x * x;
  }
  EXPECT_NEAR(s, 0.4, 1e-14);
}

TEST(Ansatz, SingleBumpEnergyIsTheCellEnergy) {
  EXPECT_NEAR(energy_J(single(1.0)).total / kEStar25, 1.0, 1e-8);
  // λ = 2^{2/(3−p)} = 16 for twice the mass; energy scales by λ^{(5−p)/2} = 32.
  const Ansatz a = single(2.0);
  EXPECT_NEAR(a.lambdas[0], 16.0, 1e-10);
  EXPECT_NEAR(energy_J(a).total / (32 * kEStar25), 1.0, 1e-8);
}

TEST(Ansatz, CrossTermFollowsShellTheorem) {
  const auto c = profile25();
  const MassVector m({c->m_star, 2 * c->m_star});
  Ansatz probe = from_xi(c, m, {Vec3::Zero(), Vec3(1e6, 0, 0)}, 0.0, 1.25);
  const double d = 3.0 * probe.cutoff_radius;
  const Ansatz a = from_xi(c, m, {Vec3::Zero(), Vec3(0.6 * d, 0.8 * d, 0)}, 0.0, 1.25);
  const EnergyBreakdown e = energy_J(a);
  const double exact = m[0] * m[1] / (4 * std::numbers::pi * d);
  EXPECT_NEAR(e.cross_gradient(0, 1) / exact, 1.0, 1e-9);
  EXPECT_DOUBLE_EQ(e.cross_gradient(0, 1), e.cross_gradient(1, 0));
}

TEST(Ansatz, MomentsOfAStaticBump) {
  const auto c = profile25();
  const Vec3 center(3.0, -2.0, 0.5);
  const Ansatz a = from_xi(c, MassVector({c->m_star}), {center}, 0.0, 1.25);
  const ComponentMoments mo = component_mass_center(a, 0);
  EXPECT_NEAR(mo.mass / c->m_star, 1.0, 1e-9);
  EXPECT_LT((mo.center - center).norm(), 1e-9);
}

TEST(Ansatz, FieldSymmetriesAndErrorField) {
  const auto c = profile25();
  const PlanarConfiguration z = two_body(c->m_star, c->m_star);
  const Ansatz a = build(c, z, 1e-3, 10.0, 1.25);
  for (const Vec3 &x : {Vec3(1, 2, 0.3), Vec3(-40, 7, 11), Vec3(a.centers_xi[0] + Vec3(0.1, 0.2, 0.4))}) {
    const Vec3 y(x.x(), x.y(), -x.z());
    EXPECT_EQ(eval_W(a, x), eval_W(a, y));
  }
  EXPECT_EQ(error_field(single(1.0), Vec3(0.3, 0.2, 0.1)), 0.0);
  EXPECT_NE(error_field(a, a.centers_xi[0] + Vec3(0.2, 0, 0)), 0.0);
}

TEST(Ansatz, WeightModesAgreeForOneCenter) {
  const Ansatz a = single(1.0);
  for (const Vec3 &x : {Vec3(1, 0, 0), Vec3(2, 3, 4)})
    EXPECT_NEAR(norm_weight(a, x, 4, WeightMode::literal), norm_weight(a, x, 4, WeightMode::localized),
                1e-12 * norm_weight(a, x, 4, WeightMode::literal));
}

TEST(Ansatz, ConstraintViolationsAreNamed) {
  const auto c = profile25();
  const PlanarConfiguration z = two_body(c->m_star, c->m_star);
  try {
    (void)build(c, z, 0.5, 10.0, 1.25);
    FAIL() << "expected a separation error";
  } catch (const ValidationError &e) {
    EXPECT_NE(std::string(e.what()).find("separation"), std::string::npos);
  }
  EXPECT_THROW((void)build(c, z, 1e-3, 0.5, 1.25), ValidationError);
  EXPECT_THROW((void)build(c, z, -1.0, 10.0, 1.25), ValidationError);
  const MassVector one({c->m_star});
  EXPECT_THROW((void)from_xi(c, one, {Vec3::Zero(), Vec3::Zero()}, 0.0, 1.25), ValidationError);
}

TEST(Ansatz, UnattainableToleranceRaisesAccuracyError) {
  QuadratureSpec q;
  q.tolerance = 1e-18;
  const auto c = profile25();
  const PlanarConfiguration z = two_body(c->m_star, c->m_star);
  EXPECT_THROW((void)energy_J(build(c, z, 1e-3, 10.0, 1.25), q), AccuracyError);
}

TEST(Ansatz, PredictionFormula) {
  const auto c = profile25();
  const PlanarConfiguration z = two_body(c->m_star, c->m_star);
  const Ansatz a = build(c, z, 1e-3, 10.0, 1.25);
  EXPECT_NEAR(predicted_energy(a, z), 2 * kEStar25 - std::pow(1e-3, 2.0 / 3.0) * potential(z), 1e-8);
}

TEST(Kinetic, FrozenNormalizationConstants) {
  EXPECT_NEAR(make_polytrope(1.5).kappa_q, 2.7080429337346232, 1e-13);
  EXPECT_NEAR(make_polytrope(2.0).kappa_q, 4.7390751340355907, 1e-13);
  EXPECT_NEAR(make_polytrope(3.0).kappa_q, 6.9788641996388795, 1e-13);
  EXPECT_DOUBLE_EQ(make_polytrope(2.0).p, 2.5);
  EXPECT_NEAR(polytrope_from_p(2.5).q, 2.0, 1e-15);
  EXPECT_THROW(make_polytrope(1.0), ValidationError);
  EXPECT_THROW(polytrope_from_p(1.5), DomainError);
}

TEST(Kinetic, VelocityIntegralClosedForm) {
  for (double q : {1.5, 2.0, 3.0})
    for (double mu : {-0.5, -1.0, -2.0})
      EXPECT_LE(g_check(make_polytrope(q), mu).rel_err, 1e-8) << q << " " << mu;
  EXPECT_EQ(g_check(make_polytrope(2.0), 0.5).numeric, 0.0);
}

TEST(Kinetic, MarginalReproducesDensity) {
  const auto c = profile25();
  const PlanarConfiguration z = two_body(c->m_star, c->m_star);
  const Ansatz a = build(c, z, 1e-3, 10.0, 1.25);
  const PolytropeSpec s = polytrope_from_p(2.5);
  const Vec3 x = a.centers_xi[1] + Vec3(0.3, -0.2, 0.1);
  const double level = effective_level(a, 1, x);
  ASSERT_GT(level, 0.0);
  EXPECT_NEAR(velocity_marginal(s, a, 1, x) / std::pow(level, 2.5), 1.0, 1e-10);
  EXPECT_THROW(distribution_f(s, a, 0, x, Vec3::Zero()), DomainError);
}
