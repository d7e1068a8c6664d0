#include <algorithm>
#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "generators.hpp"
#include "releq/equilibria.hpp"
#include "releq/smale.hpp"

using namespace releq;

namespace {

/// Two-body potential as a function of the separation with the pair centered:
/// m1 m2 / (4π d) + ½ (m1 m2 / M) d². Its minimizer is located by bisection on
/// the sign of a central-difference derivative.
double two_body_separation_oracle(double m1, double m2) {
  const double mu = m1 * m2 / (m1 + m2);
  auto f = [&](double d) { return m1 * m2 / (4 * std::numbers::pi * d) + 0.5 * mu * d * d; };
  auto df = [&](double d) { return (f(d + 1e-6) - f(d - 1e-6)) / 2e-6; };
  double a = 1e-2, b = 10.0;
  for (int i = 0; i < 200 && b - a > 1e-15; ++i) {
    const double c = 0.5 * (a + b);
    (df(c) > 0 ? b : a) = c;
  }
  return 0.5 * (a + b);
}

double separation(const PlanarConfiguration &c, std::size_t i, std::size_t j) {
  return (c.point(i) - c.point(j)).norm();
}

} // namespace

TEST(ClosedForms, TwoBodyMatchesOneDimensionalMinimization) {
  for (auto [m1, m2] : {std::pair{1.0, 1.0}, std::pair{1.0, 3.0}, std::pair{0.2, 7.5}}) {
    const PlanarConfiguration c = two_body(m1, m2);
    EXPECT_NEAR(separation(c, 0, 1), two_body_separation_oracle(m1, m2), 1e-9);
    EXPECT_LT(gradient_norm(c), 1e-12);
    EXPECT_LT(c.center_of_mass().norm(), 1e-15);
  }
}

TEST(ClosedForms, LagrangeSideAndOrientation) {
  const double side = std::cbrt(6.0 / (4.0 * std::numbers::pi));
  for (bool mirrored : {false, true}) {
    const PlanarConfiguration c = lagrange_triangle(1, 2, 3, mirrored);
    EXPECT_NEAR(separation(c, 0, 1), side, 1e-12);
    EXPECT_NEAR(separation(c, 1, 2), side, 1e-12);
    EXPECT_NEAR(separation(c, 0, 2), side, 1e-12);
    EXPECT_LT(gradient_norm(c), 1e-12);
  }
  const auto a = lagrange_triangle(1, 2, 3, false), b = lagrange_triangle(1, 2, 3, true);
  EXPECT_GT(config_distance_mod_rotation(a, b), 0.1);
}

TEST(ClosedForms, PolygonSumsAndRadii) {
  const std::vector<std::tuple<int, double, double>> frozen{{3, 1.1547005383792515, 0.35815952291268509},
                                                            {4, 1.914213562373095, 0.42388707693219399},
                                                            {5, 2.7527638409423471, 0.47845713099668643},
                                                            {7, 4.609529741924973, 0.56816209185135753}};
  for (auto [n, a, r] : frozen) {
    EXPECT_NEAR(polygon_sum(n), a, 1e-14);
    const PlanarConfiguration c = polygon(n, 1.0);
    EXPECT_NEAR(c.point(0).norm(), r, 1e-13);
    EXPECT_LT(gradient_norm(c), 1e-12);
  }
  EXPECT_THROW(polygon(1, 1.0), ValidationError);
}

TEST(ClosedForms, RingWithCenter) {
  const PlanarConfiguration c = polygon_with_center(4, 1.0, 2.0);
  EXPECT_NEAR(c.point(0).norm(), 0.61737975070606104, 1e-12);
  EXPECT_LT(c.point(4).norm(), 1e-15);
  EXPECT_LT(gradient_norm(c), 1e-10);
}

TEST(ClosedForms, MoultonEqualMassesAndFrozenUnequal) {
  const double d = std::cbrt(5.0 / (16.0 * std::numbers::pi));
  const PlanarConfiguration e = moulton(MassVector({1, 1, 1}), {0, 1, 2});
  EXPECT_NEAR(e.point(0).x(), -d, 1e-12);
  EXPECT_NEAR(e.point(1).x(), 0.0, 1e-12);
  EXPECT_NEAR(e.point(2).x(), d, 1e-12);

  const PlanarConfiguration u = moulton(MassVector({1, 2, 3}), {0, 1, 2});
  EXPECT_NEAR(u.point(0).x(), -0.76367287545436819, 1e-11);
  EXPECT_NEAR(u.point(1).x(), -0.24550956004748883, 1e-11);
  EXPECT_NEAR(u.point(2).x(), 0.41823066518311528, 1e-11);
  EXPECT_NEAR(potential(u), 1.8427452251290488, 1e-12);
  EXPECT_THROW(moulton(MassVector({1, 2, 3}), {0, 0, 1}), ValidationError);
}

TEST(Classify, FrozenReducedSpectra) {
  const EquilibriumClass euler = classify(moulton(MassVector({1, 1, 1}), {0, 1, 2}));
  ASSERT_EQ(euler.index_report.eigenvalues.size(), 2u);
  EXPECT_NEAR(euler.index_report.eigenvalues[0], -0.139260575205, 1e-9);
  EXPECT_NEAR(euler.index_report.eigenvalues[1], 0.576936668708, 1e-9);
  EXPECT_EQ(euler.index_report.negative_count, 1);
  EXPECT_EQ(euler.index_report.positive_count, 1);
  EXPECT_EQ(euler.shape_tag, ShapeTag::collinear);

  const EquilibriumClass lag = classify(lagrange_triangle(1, 2, 3));
  EXPECT_NEAR(lag.index_report.eigenvalues[0], 0.447113511772, 1e-9);
  EXPECT_NEAR(lag.index_report.eigenvalues[1], 0.810015357237, 1e-9);
  EXPECT_EQ(lag.shape_tag, ShapeTag::lagrange_triangle);
  EXPECT_TRUE(lag.nondegenerate_up_to_rotations);
}

TEST(Classify, RejectsNonCriticalInput) {
  const PlanarConfiguration c({Vec2(1, 0), Vec2(-1, 0)}, MassVector({1, 1}));
  EXPECT_THROW(classify(c), ValidationError);
}

TEST(Classify, ReducedSpectrumIsRotationInvariant) {
  const PlanarConfiguration c = lagrange_triangle(1, 2, 3);
  const auto a = classify(c).index_report.eigenvalues;
  const auto b = classify(rotate(c, 1.234)).index_report.eigenvalues;
  for (std::size_t i = 0; i < a.size(); ++i)
    EXPECT_NEAR(a[i], b[i], 1e-10);
  EXPECT_LT(rotation_mode_residual(to_smale(c).shape), 1e-10);
}

TEST(Search, TwoBodySingleClass) {
  FindOptions o;
  o.num_starts = 200;
  const FindResult r = find_equilibria(MassVector({1, 1}), o);
  ASSERT_EQ(r.classes.size(), 1u);
  const double d = std::cbrt(2.0 / (4.0 * std::numbers::pi));
  EXPECT_NEAR(separation(r.classes[0].representative, 0, 1) / d - 1.0, 0.0, 1e-8);
}

TEST(Search, CensusForThreeBodies) {
  FindOptions o;
  o.num_starts = 500;
  const CensusRecord c = palmore_census(MassVector({1, 2, 3}), o);
  EXPECT_EQ(c.lower_bound, 5u);
  EXPECT_EQ(c.classes_found, 5u);
  EXPECT_TRUE(c.satisfied);
  std::size_t tri = 0, lines = 0;
  for (const auto &ec : c.search.classes) {
    EXPECT_LE(ec.gradient_norm, 1e-9);
    EXPECT_TRUE(ec.nondegenerate_up_to_rotations);
    tri += ec.shape_tag == ShapeTag::lagrange_triangle;
    lines += ec.shape_tag == ShapeTag::collinear;
  }
  EXPECT_EQ(tri, 2u);
  EXPECT_EQ(lines, 3u);
  // Sorted by potential: the Lagrange minima come first.
  EXPECT_EQ(c.search.classes.front().shape_tag, ShapeTag::lagrange_triangle);
}

TEST(Search, IndependentOfThreadCount) {
  FindOptions o;
  o.num_starts = 120;
  o.threads = 1;
  const FindResult a = find_equilibria(MassVector({1, 2, 3}), o);
  o.threads = 4;
  const FindResult b = find_equilibria(MassVector({1, 2, 3}), o);
  ASSERT_EQ(a.classes.size(), b.classes.size());
  for (std::size_t i = 0; i < a.classes.size(); ++i) {
    EXPECT_EQ(a.classes[i].multiplicity, b.classes[i].multiplicity);
    EXPECT_EQ(a.classes[i].representative.flat(), b.classes[i].representative.flat());
  }
}

TEST(Search, PalmoreBound) {
  EXPECT_EQ(palmore_lower_bound(3), 5u);
  EXPECT_EQ(palmore_lower_bound(4), 34u);
  EXPECT_EQ(palmore_lower_bound(5), 294u);
  EXPECT_THROW(palmore_lower_bound(2), ValidationError);
}

TEST(HessianBlocks, TwoBodyStructure) {
  const HessianBlockReport r = hessian_block_check(two_body(1, 1));
  EXPECT_NEAR(r.alpha_alpha, r.alpha_alpha_expected, 1e-5 * r.alpha_alpha_expected);
  EXPECT_NEAR(r.alpha_alpha_expected, 6.0, 1e-12);
  for (double s : r.shift_eigenvalues)
    EXPECT_NEAR(s / r.total_mass, 1.0, 1e-6);
  EXPECT_LT(r.cross_alpha_shift, 1e-4 * r.block_scale);
}

TEST(Classify, EqualMassTriangleCarriesBothTags) {
  const EquilibriumClass ec = classify(lagrange_triangle(1, 1, 1));
  const auto has = [&](ShapeTag t) {
    return std::find(ec.detected_tags.begin(), ec.detected_tags.end(), t) != ec.detected_tags.end();
  };
  EXPECT_TRUE(has(ShapeTag::lagrange_triangle));
  EXPECT_TRUE(has(ShapeTag::regular_polygon));
  EXPECT_EQ(classify(polygon(5, 1.0)).shape_tag, ShapeTag::regular_polygon);
}

TEST(ClosedForms, RingWithVanishingCenterTendsToPolygon) {
  const PlanarConfiguration c = polygon_with_center(6, 2.0, 1e-12);
  EXPECT_NEAR(c.point(0).norm(), polygon(6, 2.0).point(0).norm(), 1e-6);
}
