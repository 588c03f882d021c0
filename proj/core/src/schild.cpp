#include "wfdelay/schild.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/core.h>

#include "wfdelay/chebyshev.hpp"
#include "wfdelay/delayfields.hpp"
#include "wfdelay/roots.hpp"

namespace wfdelay {

namespace {

constexpr double kHalfPi = 0.5 * std::numbers::pi;

// dT from the light-cone relation; f is increasing on [|r1 - r2|, r1 + r2].
double solve_delay(double r1, double r2, double omega) {
  auto fdf = [&](double t) {
    return std::pair{t * t - r1 * r1 - r2 * r2 - 2.0 * r1 * r2 * std::cos(omega * t),
                     2.0 * t + 2.0 * r1 * r2 * omega * std::sin(omega * t)};
  };
  const double lo = std::abs(r1 - r2), hi = r1 + r2;
  const double flo = fdf(lo).first, fhi = fdf(hi).first;
  RootOptions ro;
  ro.guess = std::sqrt(r1 * r1 + r2 * r2 + 2.0 * r1 * r2 * std::cos(omega * hi));
  return safeguarded_newton(fdf, lo, hi, flo, fhi, ro);
}

struct Inner {
  bool ok = false;
  double r2 = 0.0;
  double dt = 0.0;
};

// Ratio of the two balances: m1 g1 r1 (r2 + r1 c) = m2 g2 r2 (r1 + r2 c).
Inner solve_r2(double m1, double m2, double r1, double omega) {
  auto ratio = [&](double r2) {
    const double dt = solve_delay(r1, r2, omega);
    const double c = std::cos(omega * dt);
    return m1 * lorentz_gamma(omega * r1) * r1 * (r2 + r1 * c) - m2 * lorentz_gamma(omega * r2) * r2 * (r1 + r2 * c);
  };
  Inner in;
  if (!(omega * r1 < 1.0)) return in;
  if (ratio(r1) == 0.0) {
    in.r2 = r1;
  } else {
    // first sign change on a grid in (0, 1/omega), then bisection
    const int n = 256;
    const double top = 1.0 / omega;
    double lo = 1e-9 * std::min(r1, top), flo = ratio(lo);
    bool found = false;
    for (int m = 1; m <= n && !found; ++m) {
      const double hi = m == n ? top * (1.0 - 1e-12) : top * m / n;
      const double fhi = ratio(hi);
      if (!std::isfinite(fhi)) break;
      if ((flo > 0.0) != (fhi > 0.0)) {
        in.r2 = bisect(ratio, lo, hi, flo);
        found = true;
      }
      lo = hi, flo = fhi;
    }
    if (!found) return in;
  }
  in.dt = solve_delay(r1, in.r2, omega);
  in.ok = true;
  return in;
}

double balance_1(double m1, double k, double r1, double r2, double omega, double dt) {
  const double c = std::cos(omega * dt);
  return m1 * lorentz_gamma(omega * r1) * omega * omega * r1 * dt * dt * dt - 2.0 * k * (r1 + r2 * c);
}

void check_inputs(double m1, double m2, double e1, double e2, double r1) {
  if (!(m1 > 0.0) || !(m2 > 0.0)) fail(ErrorKind::InvalidArgument, "Schild orbits need positive masses");
  if (!(r1 > 0.0) || !std::isfinite(r1)) fail(ErrorKind::InvalidArgument, "Schild orbits need r1 > 0");
  if (!(e1 * e2 < 0.0)) fail(ErrorKind::InvalidArgument, "Schild orbits need attractive charges (e1 e2 < 0)");
}

}  // namespace

SchildSolution schild_solve_report(double m1, double m2, double e1, double e2, double r1) {
  check_inputs(m1, m2, e1, e2, r1);
  const double k = -e1 * e2;
  auto b1 = [&](double omega, Inner* out) {
    const Inner in = solve_r2(m1, m2, r1, omega);
    if (out) *out = in;
    if (!in.ok) return std::numeric_limits<double>::quiet_NaN();
    return balance_1(m1, k, r1, in.r2, omega, in.dt);
  };

  // Scan upward from omega = 0+ while the orbit stays in the window omega dT < pi/2.
  const int n = 1000;
  const double cap = 1.0 / r1;
  SchildSolution sol;
  double prev_w = 0.0, prev_f = std::numeric_limits<double>::quiet_NaN();
  double root_lo = 0.0, root_hi = 0.0, root_flo = 0.0;
  bool found = false;
  for (int m = 1; m < n; ++m) {
    const double w = cap * m / n;
    Inner in;
    const double f = b1(w, &in);
    if (!in.ok || !(w * in.dt < kHalfPi) || !(w * in.r2 < 1.0)) break;
    sol.omega_window = w;
    if (std::isfinite(prev_f) && (prev_f > 0.0) != (f > 0.0)) {
      ++sol.sign_changes;
      if (!found) {
        found = true;
        root_lo = prev_w, root_hi = w, root_flo = prev_f;
      }
    }
    prev_w = w;
    prev_f = f;
  }
  if (!found)
    fail(ErrorKind::NoSolutionInWindow,
         fmt::format("no force balance with 0 < omega dT < pi/2 for m1={}, m2={}, e1 e2={}, r1={}", m1, m2, -k, r1));

  const double omega = bisect([&](double w) { return b1(w, nullptr); }, root_lo, root_hi, root_flo);
  const Inner in = solve_r2(m1, m2, r1, omega);
  sol.params = SchildParams{m1, m2, e1, e2, r1, in.r2, omega, in.dt};
  return sol;
}

SchildParams schild_solve(double m1, double m2, double e1, double e2, double r1) {
  return schild_solve_report(m1, m2, e1, e2, r1).params;
}

SchildParams schild_from_omega(double m1, double m2, double e1, double r1, double omega) {
  if (!(m1 > 0.0) || !(m2 > 0.0) || !(r1 > 0.0) || e1 == 0.0)
    fail(ErrorKind::InvalidArgument, "schild_from_omega: bad masses, radius or charge");
  if (!(omega > 0.0) || !(omega * r1 < 1.0)) fail(ErrorKind::InvalidArgument, "schild_from_omega: need 0 < omega r1 < 1");
  const Inner in = solve_r2(m1, m2, r1, omega);
  if (!in.ok) fail(ErrorKind::NoSolutionInWindow, "schild_from_omega: no partner radius balances the orbit");
  const double c = std::cos(omega * in.dt);
  if (!(omega * in.dt < kHalfPi) || !(r1 + in.r2 * c > 0.0))
    fail(ErrorKind::NoSolutionInWindow, "schild_from_omega: omega dT leaves (0, pi/2)");
  const double k = m1 * lorentz_gamma(omega * r1) * omega * omega * r1 * std::pow(in.dt, 3) / (2.0 * (r1 + in.r2 * c));
  return SchildParams{m1, m2, e1, -k / e1, r1, in.r2, omega, in.dt};
}

SchildChecks schild_checks(const SchildParams& p) {
  SchildChecks c;
  const double w = p.omega, dt = p.delta_t;
  const double cs = std::cos(w * dt);
  const double k = -p.e1 * p.e2;
  c.attractive = p.e1 * p.e2 < 0.0;
  c.subluminal = std::abs(w * p.r1) < 1.0 && std::abs(w * p.r2) < 1.0;
  c.omega_dt = w * dt;
  c.in_window = c.omega_dt > 0.0 && c.omega_dt < kHalfPi;
  c.light_cone = std::abs(dt * dt - p.r1 * p.r1 - p.r2 * p.r2 - 2.0 * p.r1 * p.r2 * cs) / (dt * dt);
  if (!c.subluminal) return c;
  const double g1 = lorentz_gamma(std::abs(w * p.r1)), g2 = lorentz_gamma(std::abs(w * p.r2));
  const double lhs1 = p.m1 * g1 * w * w * p.r1, lhs2 = p.m2 * g2 * w * w * p.r2;
  const double d3 = dt * dt * dt;
  c.balance_1 = std::abs(lhs1 - 2.0 * k * (p.r1 + p.r2 * cs) / d3) / lhs1;
  c.balance_2 = std::abs(lhs2 - 2.0 * k * (p.r2 + p.r1 * cs) / d3) / lhs2;
  c.equal_gamma_r = std::abs(p.m1 * g1 * p.r1 - p.m2 * g2 * p.r2) / (p.m1 * g1 * p.r1);
  const double alt = (p.r1 * p.r1 + p.r2 * p.r2) / (1.0 + p.r1 * p.r2 / (p.e1 * p.e2) * p.m1 * g1 * p.r1 * w * w);
  c.delay_squared_alt = std::abs(alt - dt * dt) / (dt * dt);
  return c;
}

double schild_period(const SchildParams& p) { return 2.0 * std::numbers::pi / std::abs(p.omega); }

double schild_force_scale(const SchildParams& p) {
  return p.m1 * lorentz_gamma(std::abs(p.omega * p.r1)) * p.omega * p.omega * p.r1;
}

Vec3 schild_position(const SchildParams& p, int label, double t) {
  const double r = label == 1 ? p.r1 : -p.r2;
  return Vec3(r * std::cos(p.omega * t), r * std::sin(p.omega * t), 0.0);
}

Vec3 schild_velocity(const SchildParams& p, int label, double t) {
  const double r = label == 1 ? p.r1 : -p.r2;
  return Vec3(-r * p.omega * std::sin(p.omega * t), r * p.omega * std::cos(p.omega * t), 0.0);
}

WorldLine schild_worldline(const SchildParams& p, int label, double t_lo, double t_hi, int segments_per_period,
                           int degree) {
  if (!(t_lo < t_hi)) fail(ErrorKind::InvalidArgument, "schild_worldline: empty horizon");
  if (segments_per_period < 1 || degree < 2) fail(ErrorKind::InvalidArgument, "schild_worldline: bad sampling");
  const double len = schild_period(p) / segments_per_period;
  const int n = std::max(1, static_cast<int>(std::ceil((t_hi - t_lo) / len - 1e-9)));
  std::vector<Segment> segs;
  segs.reserve(static_cast<std::size_t>(n));
  double a = t_lo;
  for (int k = 0; k < n; ++k) {
    const double b = k + 1 == n ? t_hi : t_lo + (t_hi - t_lo) * (k + 1) / n;
    ParamSamples s;
    s.s = cheb::lobatto_nodes(degree, a, b);
    for (double t : s.s) s.y.push_back(schild_position(p, label, t));
    segs.push_back(fit_segment(s, degree).segment);
    a = b;
  }
  const ChargeParams c{label == 1 ? p.m1 : p.m2, label == 1 ? p.e1 : p.e2, label};
  return WorldLine(c, std::move(segs));
}

SolutionPair schild_trajectories(const SchildParams& p, double t_lo, double t_hi, int segments_per_period,
                                 int degree) {
  return solution_from_lines({schild_worldline(p, 1, t_lo, t_hi, segments_per_period, degree),
                              schild_worldline(p, 2, t_lo, t_hi, segments_per_period, degree)});
}

InitialData schild_initial_data(const SchildParams& p, double t0, int seed_label, int degree) {
  if (seed_label != 1 && seed_label != 2) fail(ErrorKind::InvalidArgument, "seed label must be 1 or 2");
  const int j = seed_label, i = 3 - seed_label;
  const double dt = p.delta_t;
  InitialData d;
  auto& sj = d.strips[static_cast<std::size_t>(j - 1)];
  auto& si = d.strips[static_cast<std::size_t>(i - 1)];
  sj = schild_worldline(p, j, t0, t0 + 2.0 * dt, 1, degree);
  si = schild_worldline(p, i, t0 + dt, t0 + 3.0 * dt, 1, degree);
  d.t0[static_cast<std::size_t>(j - 1)] = t0;
  d.t1[static_cast<std::size_t>(j - 1)] = t0 + 2.0 * dt;
  d.t0[static_cast<std::size_t>(i - 1)] = t0 + dt;
  d.t1[static_cast<std::size_t>(i - 1)] = t0 + 3.0 * dt;
  return d;
}

std::vector<ResidualSample> schild_residual_samples(const SchildParams& p, int samples) {
  if (samples < 1) fail(ErrorKind::InvalidArgument, "schild_residual: need at least one sample");
  const double period = schild_period(p);
  const double ee = p.e1 * p.e2;
  const double g1 = lorentz_gamma(std::abs(p.omega * p.r1)), g2 = lorentz_gamma(std::abs(p.omega * p.r2));
  const double w2 = p.omega * p.omega;
  std::vector<ResidualSample> out;
  out.reserve(static_cast<std::size_t>(samples));
  for (int k = 0; k < samples; ++k) {
    const double t = period * k / samples;
    const Vec3 q1 = schild_position(p, 1, t), q2 = schild_position(p, 2, t);
    // uniform circular motion: d/dt(m gamma v) = -m gamma omega^2 q
    const Vec3 pdot1 = -p.m1 * g1 * w2 * q1;
    const Vec3 pdot2 = -p.m2 * g2 * w2 * q2;
    const Vec3 f1 = ee * (coulomb_force(q1 - schild_position(p, 2, t + p.delta_t)) +
                          coulomb_force(q1 - schild_position(p, 2, t - p.delta_t)));
    const Vec3 f2 = ee * (coulomb_force(q2 - schild_position(p, 1, t + p.delta_t)) +
                          coulomb_force(q2 - schild_position(p, 1, t - p.delta_t)));
    out.push_back(ResidualSample{t, (pdot1 - f1).norm(), (pdot2 - f2).norm()});
  }
  return out;
}

double schild_residual(const SchildParams& p, int samples) {
  double m = 0.0;
  for (const auto& s : schild_residual_samples(p, samples)) m = std::max({m, s.residual_1, s.residual_2});
  return m;
}

double schild_delay_check(const SchildParams& p, const SolutionPair& sol, int samples) {
  const double dt = p.delta_t;
  const double lo = std::max(sol.lines[0].lo(), sol.lines[1].lo());
  const double hi = std::min(sol.lines[0].hi(), sol.lines[1].hi());
  if (!(hi - lo > 2.0 * dt))
    throw OutOfDomainError(fmt::format("worldline horizon [{}, {}] is too short for delay {}", lo, hi, dt), lo, hi,
                           Side::future);
  double worst = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double t = lo + dt + (hi - lo - 2.0 * dt) * k / std::max(samples - 1, 1);
    for (int i = 0; i < 2; ++i) {
      const WorldLine& wi = sol.lines[static_cast<std::size_t>(i)];
      const WorldLine& wj = sol.lines[static_cast<std::size_t>(1 - i)];
      const Vec3 x = wi.position(t);
      for (Sign s : {Sign::advanced, Sign::retarded}) {
        const DelayResult d = delay_time(wj, t, x, s);
        worst = std::max(worst, std::abs(sgn(s) * (d.t_delayed - t) - dt));
      }
    }
  }
  return worst;
}

double schild_delay_check(const SchildParams& p) {
  const SolutionPair sol = schild_trajectories(p, 0.0, 4.0 * p.delta_t + 0.25 * schild_period(p));
  return schild_delay_check(p, sol);
}

}  // namespace wfdelay
