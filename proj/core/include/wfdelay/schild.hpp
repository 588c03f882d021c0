#pragma once

#include <vector>

#include "wfdelay/solution.hpp"

namespace wfdelay {

struct SchildParams {
  double m1 = 1.0, m2 = 1.0;
  double e1 = 1.0, e2 = -1.0;
  double r1 = 1.0, r2 = 1.0;
  double omega = 0.0;
  double delta_t = 0.0;
};

struct SchildSolution {
  SchildParams params;
  double omega_window = 0.0;  // end of the scanned window (omega * delta_t reaches pi/2)
  int sign_changes = 0;       // balance sign changes seen inside the window
};

// Residuals of the defining relations. The exact force balance is
//   m_i gamma(omega r_i) omega^2 r_i = 2k (r_i + r_j cos(omega dT)) / dT^3,  k = -e1 e2,
// with dT^2 = r1^2 + r2^2 + 2 r1 r2 cos(omega dT).
struct SchildChecks {
  double light_cone = 0.0;   // |dT^2 - r1^2 - r2^2 - 2 r1 r2 cos| / dT^2
  double balance_1 = 0.0;    // relative force balance defect, particle 1
  double balance_2 = 0.0;
  double equal_gamma_r = 0.0;     // |m1 g1 r1 - m2 g2 r2| / (m1 g1 r1); zero only when r1 = r2
  double delay_squared_alt = 0.0; // relative defect of the alternative dT^2 closed form
  double omega_dt = 0.0;
  bool in_window = false;    // 0 < omega dT < pi/2
  bool subluminal = false;
  bool attractive = false;
};

SchildSolution schild_solve_report(double m1, double m2, double e1, double e2, double r1);
SchildParams schild_solve(double m1, double m2, double e1, double e2, double r1);
// Picks e2 (and r2) so that particle 1 circles at the requested angular velocity.
SchildParams schild_from_omega(double m1, double m2, double e1, double r1, double omega);

SchildChecks schild_checks(const SchildParams& p);
double schild_period(const SchildParams& p);
double schild_force_scale(const SchildParams& p);  // m1 gamma(omega r1) omega^2 r1

Vec3 schild_position(const SchildParams& p, int label, double t);
Vec3 schild_velocity(const SchildParams& p, int label, double t);

WorldLine schild_worldline(const SchildParams& p, int label, double t_lo, double t_hi, int segments_per_period = 8,
                           int degree = kDefaultDegree);
SolutionPair schild_trajectories(const SchildParams& p, double t_lo, double t_hi, int segments_per_period = 8,
                                 int degree = kDefaultDegree);

// Strips cut to one light-cone exchange: particle j (label seed) on [t0, t0 + 2 dT],
// particle i on [t0 + dT, t0 + 3 dT].
InitialData schild_initial_data(const SchildParams& p, double t0 = 0.0, int seed_label = 2,
                                int degree = kDefaultDegree);

struct ResidualSample {
  double t;
  double residual_1;
  double residual_2;
};

std::vector<ResidualSample> schild_residual_samples(const SchildParams& p, int samples);
double schild_residual(const SchildParams& p, int samples);

// Max |numeric delay - dT| over both particles and both signs.
double schild_delay_check(const SchildParams& p);
double schild_delay_check(const SchildParams& p, const SolutionPair& sol, int samples = 64);

}  // namespace wfdelay
