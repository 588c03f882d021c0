#include "wfdelay/conserved.hpp"

#include <cmath>
#include <optional>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/core.h>

#include "wfdelay/delayfields.hpp"
#include "wfdelay/parallel.hpp"

namespace wfdelay {

void check_quadrature(const QuadratureConfig& q) {
  if (!(q.rel_tol > 0.0) || !(q.abs_tol > 0.0) || q.max_subdivisions < 1)
    fail(ErrorKind::InvalidArgument, "quadrature tolerances must be positive");
}

namespace {

struct Integral {
  double value = 0.0;
  double error = 0.0;
  double l1 = 0.0;
};

// One 15-point Kronrod panel with the embedded 7-point Gauss rule as error estimate.
// Even abscissa indices are shared with the Gauss rule.
template <class F>
Integral kronrod_panel(const F& f, double a, double b) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  using G = boost::math::quadrature::gauss<double, 7>;
  const auto& x = GK::abscissa();
  const auto& wk = GK::weights();
  const auto& wg = G::weights();
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  const double f0 = f(mid);
  double k = f0 * wk[0], g = f0 * wg[0], l1 = std::abs(f0) * wk[0];
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double fp = f(mid + half * x[i]), fm = f(mid - half * x[i]);
    k += (fp + fm) * wk[i];
    l1 += (std::abs(fp) + std::abs(fm)) * wk[i];
    if (i % 2 == 0) g += (fp + fm) * wg[i / 2];
  }
  return {half * k, half * std::abs(k - g), half * l1};
}

template <class F>
Integral adaptive(const F& f, double a, double b, double abs_tol, double rel_tol, int depth) {
  const Integral whole = kronrod_panel(f, a, b);
  if (depth == 0 || whole.error <= std::max(abs_tol, rel_tol * whole.l1)) return whole;
  const double mid = 0.5 * (a + b);
  const Integral l = adaptive(f, a, mid, 0.5 * abs_tol, rel_tol, depth - 1);
  const Integral r = adaptive(f, mid, b, 0.5 * abs_tol, rel_tol, depth - 1);
  return {l.value + r.value, l.error + r.error, l.l1 + r.l1};
}

// Signed integral of F(q_i(s) - q_j(t_j^sign(s))) . qdot_i(s) over [a, b].
Integral light_cone_integral(const WorldLine& wi, const WorldLine& wj, Sign sign, double a, double b,
                             const QuadratureConfig& q) {
  if (a == b) return {};
  const double lo = std::min(a, b), hi = std::max(a, b);
  auto f = [&](double s) {
    Vec3 d[2];
    wi.eval_into(s, 1, d);
    const DelayResult r = delay_time(wj, s, d[0], sign);
    return coulomb_force(d[0] - wj.position(r.t_delayed)).dot(d[1]);
  };
  const Integral r = adaptive(f, lo, hi, q.abs_tol, q.rel_tol, q.max_subdivisions);
  const double target = std::max(q.abs_tol, q.rel_tol * r.l1);
  if (!std::isfinite(r.value) || r.error > target)
    fail(ErrorKind::QuadratureFailure, fmt::format("light-cone integral over [{}, {}] reached error {:.3e} (target {:.3e})",
                                                   lo, hi, r.error, target));
  return {b > a ? r.value : -r.value, r.error, r.l1};
}

void require_domain(const SolutionPair& sol, int idx, double t) {
  const Interval& d = sol.domains[static_cast<std::size_t>(idx)];
  if (d.empty() || !d.contains(t))
    throw OutOfDomainError(fmt::format("t{} = {} outside the solution domain [{}, {}] of particle {}", idx + 1, t,
                                       d.lo, d.hi, idx + 1),
                           d.lo, d.hi, t < d.lo ? Side::past : Side::future);
}

}  // namespace

EnergyBreakdown energy(const SolutionPair& sol, double t1, double t2, const QuadratureConfig& q) {
  check_quadrature(q);
  require_domain(sol, 0, t1);
  require_domain(sol, 1, t2);
  const double ts[2] = {t1, t2};
  EnergyBreakdown e;
  e.t1 = t1;
  e.t2 = t2;
  for (int i = 0; i < 2; ++i) {
    const int j = 1 - i;
    const WorldLine& wi = sol.lines[static_cast<std::size_t>(i)];
    const WorldLine& wj = sol.lines[static_cast<std::size_t>(j)];
    const double ee = wi.charge().charge * wj.charge().charge;
    const Vec3 qi = wi.position(ts[i]);
    const Vec3 qj = wj.position(ts[j]);
    e.kinetic += std::hypot(wi.momentum(ts[i]).norm(), wi.charge().mass);
    for (Sign sign : {Sign::advanced, Sign::retarded}) {
      const DelayResult dj = delay_time(wj, ts[i], qi, sign);
      e.potential += 0.5 * ee / dj.separation;
      // t_i^-+(t_j) is where the partner image t_j^+-(s) reaches t_j
      const double upper = delay_time(wi, ts[j], qj, opposite(sign)).t_delayed;
      const Integral in = light_cone_integral(wi, wj, sign, ts[i], upper, q);
      e.interaction += 0.5 * ee * in.value;
      e.quad_error += 0.5 * std::abs(ee) * in.error;
    }
  }
  e.total = e.kinetic + e.potential + e.interaction;
  return e;
}

DriftReport energy_drift(const SolutionPair& sol, const std::vector<double>& grid_1, const std::vector<double>& grid_2,
                         const QuadratureConfig& q) {
  check_quadrature(q);
  const std::size_t n2 = grid_2.size();
  const std::size_t n = grid_1.size() * n2;
  std::vector<std::optional<EnergyBreakdown>> out(n);
  parallel_for(n, [&](std::size_t k) {
    const double t1 = grid_1[k / n2], t2 = grid_2[k % n2];
    if (!sol.domains[0].contains(t1) || !sol.domains[1].contains(t2)) return;
    out[k] = energy(sol, t1, t2, q);
  });
  DriftReport r;
  for (auto& e : out) {
    if (e)
      r.rows.push_back(*e);
    else
      ++r.skipped;
  }
  if (r.rows.empty()) {
    const Interval& a = sol.domains[0];
    const Interval& b = sol.domains[1];
    throw OutOfDomainError(fmt::format("no grid pair lies in the domains [{}, {}] x [{}, {}]", a.lo, a.hi, b.lo, b.hi),
                           a.lo, a.hi, Side::future);
  }
  r.reference = r.rows.front().total;
  const double scale = std::abs(r.reference);
  double sum = 0.0;
  for (const auto& e : r.rows) {
    const double d = std::abs(e.total - r.reference) / scale;
    r.max_drift = std::max(r.max_drift, d);
    sum += d;
  }
  r.mean_drift = sum / static_cast<double>(r.rows.size());
  return r;
}

}  // namespace wfdelay
