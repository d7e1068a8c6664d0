#include <array>
#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "releq/cell.hpp"

using namespace releq;

namespace {

struct Frozen {
  double p, w0, R, m_star, e_star;
};

// Reference values from an independent high-order integration (see
// tests/oracles/freeze.py).
const Frozen kFrozen[] = {{1.5, 2.34623416788675, 3.392025591953, 42.6254507218724, 24.3574004124971},
                          {2.0, 2.80538843892085, 3.23959579819985, 40.7099614409, 27.1399742939328},
                          {2.5, 3.44846219953395, 2.73597271410935, 34.3812471162723, 27.5049976929983},
                          {3.5, 6.04391291721768, 1.26153092811131, 15.8528651841233, 21.1371535791284},
                          {4.0, 9.33034562164956, 0.622690340097147, 7.8249575916421, 15.6499151832966}};

/// Fixed-step RK4 for Z'' + 2Z'/r + Z₊^p = 0, Z(0) = 1; returns (r₀, Z'(r₀))
/// with the zero located by cubic Hermite interpolation on the last step.
std::pair<double, double> rk4_first_zero(double p, double h) {
  using S = std::array<double, 2>;
  auto f = [p](double r, const S &y) {
    const double src = y[0] > 0 ? std::pow(y[0], p) : 0.0;
    return S{y[1], -2 * y[1] / r - src};
  };
  double r = 1e-4;
  S y{1 - r * r / 6 + p * std::pow(r, 4) / 120, -r / 3 + p * std::pow(r, 3) / 30};
  for (;;) {
    const S k1 = f(r, y);
    const S k2 = f(r + h / 2, {y[0] + h / 2 * k1[0], y[1] + h / 2 * k1[1]});
    const S k3 = f(r + h / 2, {y[0] + h / 2 * k2[0], y[1] + h / 2 * k2[1]});
    const S k4 = f(r + h, {y[0] + h * k3[0], y[1] + h * k3[1]});
    const S next{y[0] + h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
                 y[1] + h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])};
    if (next[0] <= 0) {
      // Hermite cubic in t ∈ [0, 1] through (y0, y0'), (y1, y1'); bisect.
      auto z = [&](double t) {
        const double h00 = 2 * t * t * t - 3 * t * t + 1, h10 = t * t * t - 2 * t * t + t;
        const double h01 = -2 * t * t * t + 3 * t * t, h11 = t * t * t - t * t;
        return h00 * y[0] + h10 * h * y[1] + h01 * next[0] + h11 * h * next[1];
      };
      double lo = 0, hi = 1;
      for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (lo + hi);
        (z(mid) > 0 ? lo : hi) = mid;
      }
      const double t = 0.5 * (lo + hi);
      return {r + t * h, y[1] + t * (next[1] - y[1])};
    }
    y = next;
    r += h;
  }
}

} // namespace

TEST(Cell, MatchesFrozenReference) {
  for (const Frozen &f : kFrozen) {
    const CellProfile c = solve_normalized(f.p);
    EXPECT_NEAR(c.w0 / f.w0, 1.0, 1e-9) << "p=" << f.p;
    EXPECT_NEAR(c.R / f.R, 1.0, 1e-9) << "p=" << f.p;
    EXPECT_NEAR(c.m_star / f.m_star, 1.0, 1e-9) << "p=" << f.p;
    EXPECT_NEAR(c.e_star / f.e_star, 1.0, 1e-8) << "p=" << f.p;
    EXPECT_EQ(c.radial_grid.size(), kCellGridSize);
  }
}

TEST(Cell, AgreesWithFixedStepIntegrator) {
  for (double p : {2.0, 3.5}) {
    const auto [r0, s0] = rk4_first_zero(p, 2e-4);
    const double a = 1 / (r0 * std::abs(s0));
    const CellProfile c = solve_normalized(p);
    EXPECT_NEAR(c.w0, 1 + a, 1e-8 * c.w0);
  }
}

TEST(Cell, InvariantsHold) {
  for (const Frozen &f : kFrozen) {
    const CellInvariants inv = check_invariants(solve_normalized(f.p));
    EXPECT_TRUE(inv.passed) << "p=" << f.p;
    EXPECT_LE(inv.matching_error, 1e-8);
    EXPECT_LE(inv.mass_identity_error, 1e-6);
    EXPECT_TRUE(inv.monotone);
  }
}

TEST(Cell, ScalingExponents) {
  for (double p : {2.0, 2.5}) {
    const ScalingReport s = verify_scaling(solve_normalized(p));
    EXPECT_NEAR(s.mass_slope, (3 - p) / 2, 1e-6);
    EXPECT_NEAR(s.energy_slope, (5 - p) / 2, 1e-3);
    EXPECT_DOUBLE_EQ(s.energy_slope_printed, 5 - p);
    EXPECT_LT(s.energy_at_one_error, 1e-8);
  }
}

TEST(Cell, ExteriorIsNewtonian) {
  const CellProfile c = solve_normalized(2.5);
  for (double lam : {0.5, 1.0, 3.0}) {
    const double r = 1.5 * support_radius(c, lam);
    const ScaledValue v = eval_scaled(c, lam, r);
    EXPECT_NEAR(v.w, mass_of(c, lam) / (4 * std::numbers::pi * r), 1e-14);
    EXPECT_NEAR(lambda_for_mass(c, mass_of(c, lam)), lam, 1e-12 * lam);
  }
  // Continuity across the support edge.
  const double R1 = support_radius(c, 2.0);
  EXPECT_NEAR(eval_scaled(c, 2.0, R1 * (1 - 1e-9)).w, eval_scaled(c, 2.0, R1 * (1 + 1e-9)).w, 1e-7);
}

TEST(Cell, InterpolationMatchesDenseSolve) {
  // Hermite interpolation between grid nodes against a re-shot profile.
  const CellProfile c = solve_normalized(2.0);
  for (double frac : {0.013, 0.37, 0.71, 0.999}) {
    const double r = frac * c.R;
    const ScaledValue v = eval_normalized(c, r);
    // w is decreasing and bounded by its endpoint values.
    EXPECT_LT(v.w, c.w0);
    EXPECT_GT(v.w, 1.0 - 1e-12);
    EXPECT_LT(v.dw, 1e-12);
  }
}

TEST(Cell, DomainErrors) {
  EXPECT_THROW(solve_normalized(1.0), DomainError);
  EXPECT_THROW(solve_normalized(5.0), DomainError);
  EXPECT_THROW(solve_normalized(2.0, 0.5), ValidationError);
  const CellProfile c3 = solve_normalized(3.0);
  EXPECT_THROW(lambda_for_mass(c3, 1.0), DomainError);
  EXPECT_TRUE(check_invariants(c3).passed);
}

TEST(Cell, ShooterReportsNoZero) {
  const RadialSource none{[](double) { return 0.0; }, [](double) { return 0.0; }, [](double) { return 0.0; }};
  EXPECT_THROW(shoot_radial(none, 1.0, 1.0, 1e-10), ConvergenceError);
}
