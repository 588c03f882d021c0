#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "wfdelay/delayfields.hpp"
#include "wfdelay/schild.hpp"

using namespace wfdelay;

namespace {

// Independent high-precision solution of the symmetric balance (m = 1, e1 e2 = -1, r = 1).
constexpr double kOmega = 0.6645357858817137;
constexpr double kDelta = 1.6921268675751993;

}  // namespace

TEST(SchildSolve, SymmetricOrbit) {
  const SchildSolution s = schild_solve_report(1.0, 1.0, 1.0, -1.0, 1.0);
  const SchildParams& p = s.params;
  EXPECT_EQ(p.r2, 1.0);
  EXPECT_NEAR(p.omega, kOmega, 1e-13);
  EXPECT_NEAR(p.delta_t, kDelta, 1e-13);
  EXPECT_EQ(s.sign_changes, 1);
}

TEST(SchildSolve, InvariantsHold) {
  for (double m2 : {1.0, 2.0, 0.5}) {
    const SchildParams p = schild_solve(1.0, m2, 1.0, -1.0, 1.0);
    const SchildChecks c = schild_checks(p);
    EXPECT_TRUE(c.attractive);
    EXPECT_TRUE(c.subluminal);
    EXPECT_TRUE(c.in_window) << c.omega_dt;
    EXPECT_LE(c.light_cone, 1e-10);
    EXPECT_LE(c.balance_1, 1e-10);
    EXPECT_LE(c.balance_2, 1e-10);
  }
}

TEST(SchildSolve, EqualGammaRadiusOnlyForEqualMasses) {
  // m1 gamma1 r1 = m2 gamma2 r2 is exact when r1 = r2 and off otherwise
  EXPECT_LE(schild_checks(schild_solve(1.0, 1.0, 1.0, -1.0, 1.0)).equal_gamma_r, 1e-14);
  EXPECT_GT(schild_checks(schild_solve(1.0, 2.0, 1.0, -1.0, 1.0)).equal_gamma_r, 1e-3);
}

TEST(SchildSolve, AlternativeDelayFormDisagrees) {
  // the closed form (r1^2 + r2^2) / (1 + r1 r2 m1 gamma1 r1 omega^2 / (e1 e2)) does not reproduce dT
  const SchildChecks c = schild_checks(schild_solve(1.0, 1.0, 1.0, -1.0, 1.0));
  EXPECT_GT(c.delay_squared_alt, 0.1);
}

TEST(SchildSolve, Errors) {
  try {
    schild_solve(1.0, 1.0, 1.0, 1.0, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidArgument);
  }
  try {
    schild_solve(1e-3, 1e-3, 1.0, -1.0, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NoSolutionInWindow);
  }
}

TEST(SchildFromOmega, SlowOrbit) {
  const SchildParams p = schild_from_omega(1.0, 1.0, 1.0, 1.0, 0.01);
  EXPECT_DOUBLE_EQ(p.omega * p.r1, 0.01);
  const SchildChecks c = schild_checks(p);
  EXPECT_LE(c.balance_1, 1e-12);
  EXPECT_LE(c.balance_2, 1e-12);
  EXPECT_LT(p.e2, 0.0);
}

TEST(SchildTrajectories, Geometry) {
  const SchildParams p = schild_solve(1.0, 2.0, 1.0, -1.0, 1.0);
  const SolutionPair sol = schild_trajectories(p, 0.0, 3.0 * schild_period(p));
  EXPECT_LE((sol.lines[0].position(0.0) - Vec3(p.r1, 0, 0)).norm(), 1e-15);
  EXPECT_LE((sol.lines[1].position(0.0) - Vec3(-p.r2, 0, 0)).norm(), 1e-15);
  for (double t = 0.0; t < 3.0 * schild_period(p); t += 0.173) {
    EXPECT_NEAR(sol.lines[0].position(t).norm(), p.r1, 1e-14);
    EXPECT_NEAR(sol.lines[1].position(t).norm(), p.r2, 1e-14);
    EXPECT_NEAR(sol.lines[0].velocity(t).norm(), p.omega * p.r1, 1e-13);
    EXPECT_NEAR(sol.lines[1].velocity(t).norm(), p.omega * p.r2, 1e-13);
    EXPECT_EQ(sol.lines[0].position(t).z(), 0.0);
  }
}

TEST(SchildResidual, BalancedOrbit) {
  const SchildParams p = schild_solve(1.0, 1.0, 1.0, -1.0, 1.0);
  EXPECT_LE(schild_residual(p, 512), 1e-9 * schild_force_scale(p));
  const auto rows = schild_residual_samples(p, 64);
  for (const auto& r : rows) {
    EXPECT_NEAR(r.residual_1, rows[0].residual_1, 1e-12);
    EXPECT_NEAR(r.residual_2, rows[0].residual_2, 1e-12);
  }
}

TEST(SchildResidual, DetunedOrbit) {
  SchildParams p = schild_solve(1.0, 1.0, 1.0, -1.0, 1.0);
  p.omega *= 1.01;
  EXPECT_GE(schild_residual(p, 64), 1e-3 * schild_force_scale(p));
}

TEST(SchildDelay, NumericMatchesClosedForm) {
  const SchildParams p = schild_solve(1.0, 2.0, 1.0, -1.0, 1.0);
  EXPECT_LE(schild_delay_check(p), 1e-10);
  const SolutionPair sol = schild_trajectories(p, 0.0, 10.0);
  const Vec3 x = sol.lines[0].position(5.0);
  const double adv = delay_time(sol.lines[1], 5.0, x, Sign::advanced).t_delayed - 5.0;
  const double ret = 5.0 - delay_time(sol.lines[1], 5.0, x, Sign::retarded).t_delayed;
  EXPECT_NEAR(adv, ret, 1e-12);
}

TEST(SchildDelay, ShortHorizonIsOutOfDomain) {
  const SchildParams p = schild_solve(1.0, 1.0, 1.0, -1.0, 1.0);
  const SolutionPair sol = schild_trajectories(p, 0.0, 0.5 * p.delta_t);
  EXPECT_THROW(schild_delay_check(p, sol), OutOfDomainError);
}

TEST(SchildDelay, SmallOmegaLimit) {
  const SchildParams p = schild_from_omega(1.0, 1.0, 1.0, 1.0, 1e-4);
  EXPECT_NEAR(p.r2, 1.0, 1e-12);
  EXPECT_NEAR(p.delta_t, 2.0, 1e-7);
}

TEST(SchildInitialData, StripsFollowTheLightCone) {
  const SchildParams p = schild_solve(1.0, 1.0, 1.0, -1.0, 1.0);
  const InitialData d = schild_initial_data(p, 0.0);
  EXPECT_EQ(d.t0[1], 0.0);
  EXPECT_NEAR(d.t0[0], p.delta_t, 0.0);
  EXPECT_EQ(d.strips[1].lo(), 0.0);
  EXPECT_EQ(d.strips[0].hi(), d.t1[0]);
}
