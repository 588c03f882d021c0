#include "wfdelay/delayfields.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

#include "wfdelay/roots.hpp"

namespace wfdelay {

std::string_view to_string(Sign s) { return s == Sign::advanced ? "advanced" : "retarded"; }

DelayResult delay_time(const WorldLine& src, double t, const Vec3& x, Sign sign, double edge_rel) {
  if (src.empty()) throw OutOfDomainError("delay_time on an empty worldline", 0.0, 0.0, Side::future);
  if (!std::isfinite(t) || !x.allFinite()) fail(ErrorKind::InvalidArgument, "delay_time: non-finite input");
  const double vbar = src.speed_bound();
  if (!(vbar < 1.0))
    fail(ErrorKind::InvalidWorldline, fmt::format("source speed certificate {} is not below 1", vbar));
  const int s = sgn(sign);
  const double lo = src.lo(), hi = src.hi();
  const double slope = 1.0 - vbar;

  auto g = [&](double u) { return u - t - s * (x - src.position(u)).norm(); };
  auto gdg = [&](double u) {
    Vec3 d[2];
    src.eval_into(u, 1, d);
    const Vec3 y = x - d[0];
    const double r = y.norm();
    const double dr = r > 0.0 ? -y.dot(d[1]) / r : 0.0;
    return std::pair{u - t - s * r, 1.0 - s * dr};
  };

  const double edge_tol = edge_rel * (1.0 + std::abs(t));
  auto out_of_domain = [&](Side side) {
    throw OutOfDomainError(
        fmt::format("{} light cone of t={} misses particle {} coverage [{}, {}] on the {} side", to_string(sign), t,
                    src.charge().label, lo, hi, to_string(side)),
        lo, hi, side);
  };

  double guess = std::clamp(t, lo, hi);
  guess = std::clamp(t + s * (x - src.position(guess)).norm(), lo, hi);
  const double g0 = g(guess);
  double root;
  if (g0 == 0.0) {
    root = guess;
  } else {
    // g is increasing with slope >= 1 - vbar; step past the root and grow if needed
    const double dir = g0 < 0.0 ? 1.0 : -1.0;
    const double edge = dir > 0.0 ? hi : lo;
    double step = std::abs(g0) / slope * (1.0 + 1e-9) + 4.0 * edge_tol;
    double other = std::clamp(guess + dir * step, lo, hi);
    double g1 = g(other);
    while ((g1 < 0.0) == (g0 < 0.0) && g1 != 0.0) {
      if (other == edge) {
        if (std::abs(g1) <= edge_tol) break;
        out_of_domain(dir > 0.0 ? Side::future : Side::past);
      }
      step *= 2.0;
      other = std::clamp(guess + dir * step, lo, hi);
      g1 = g(other);
    }
    if ((g1 < 0.0) == (g0 < 0.0) && g1 != 0.0) {
      root = other;  // within edge tolerance of the coverage boundary
    } else {
      RootOptions ro;
      ro.guess = guess;
      root = safeguarded_newton(gdg, guess, other, g0, g1, ro);
    }
  }

  DelayResult d;
  d.sign = sign;
  d.t_delayed = root;
  const Vec3 y = x - src.position(root);
  d.separation = y.norm();
  if (d.separation < kTinyNorm) fail(ErrorKind::SingularSeparation, "field point lies on the source worldline");
  d.n = y / d.separation;
  const double res = std::abs(root - t - s * d.separation);
  // a root on a join cannot beat the position jump the join tolerance let through
  double jump = 0.0;
  for (std::size_t k = 0; k + 1 < src.size(); ++k) {
    const double tj = src.segment(k).hi();
    if (std::abs(root - tj) <= 1e-12 * (1.0 + std::abs(tj)))
      jump = std::max(jump, (src.segment(k).value(tj) - src.segment(k + 1).value(tj)).norm());
  }
  if (res > std::max(1e-12, 2.0 * edge_rel) * (1.0 + std::abs(t)) + jump)
    fail(ErrorKind::InternalInvariant, fmt::format("delay residual {:.3e} at t={}", res, t));
  return d;
}

double delay_rate(const WorldLine& source, const Vec3& observer_velocity, const DelayResult& d) {
  const int s = sgn(d.sign);
  const Vec3 vs = source.velocity(d.t_delayed);
  const double num = 1.0 + s * d.n.dot(observer_velocity);
  const double den = 1.0 + s * d.n.dot(vs);
  if (!(den > 0.0) || !(num > 0.0))
    fail(ErrorKind::InternalInvariant, fmt::format("delay rate factors not positive ({}, {})", num, den));
  return num / den;
}

namespace {

void check_separation(const DelayResult& d, double d_min) {
  if (d.separation < d_min)
    fail(ErrorKind::SingularSeparation,
         fmt::format("{} separation {} below guard {}", to_string(d.sign), d.separation, d_min));
}

}  // namespace

FieldPair coulomb_delayed_field(const WorldLine& source, double e_src, double t, const Vec3& x, Sign sign,
                                double d_min) {
  const DelayResult d = delay_time(source, t, x, sign);
  check_separation(d, d_min);
  return FieldPair{e_src * coulomb_force(x - source.position(d.t_delayed)), Vec3::Zero()};
}

FieldPair lienard_wiechert_field(const WorldLine& source, double e_src, double t, const Vec3& x, Sign sign,
                                 double d_min) {
  if (source.min_degree() < 2)
    fail(ErrorKind::InvalidWorldline, "Lienard-Wiechert fields need worldlines of degree >= 2");
  const DelayResult d = delay_time(source, t, x, sign);
  check_separation(d, d_min);
  Vec3 q[3];
  source.eval_into(d.t_delayed, 2, q);
  const double s = sgn(sign);
  const Vec3 y = x - q[0];
  const double r = d.separation;
  const Vec3& v = q[1];
  const Vec3& a = q[2];
  const double kappa = 1.0 + s * d.n.dot(v);
  const double k3 = kappa * kappa * kappa;
  // near field written with y = r n so a static source reproduces coulomb_force bit for bit
  const Vec3 near = (y + s * r * v) * (1.0 - v.squaredNorm()) / (r * r * r * k3);
  const Vec3 w = d.n + s * v;
  const Vec3 rad = d.n.cross(w.cross(a)) / (r * k3);
  FieldPair f;
  f.electric = e_src * (near + rad);
  f.magnetic = -s * d.n.cross(f.electric);
  return f;
}

Rhs toy_rhs(const PhasePoint& state, const ChargeParams& self, const ChargeParams& partner,
            const WorldLine& partner_line, double d_min) {
  const double ee = self.charge * partner.charge;
  Vec3 f = Vec3::Zero();
  for (Sign sign : {Sign::advanced, Sign::retarded}) {
    const DelayResult d = delay_time(partner_line, state.time, state.position, sign);
    check_separation(d, d_min);
    f += coulomb_force(state.position - partner_line.position(d.t_delayed));
  }
  return Rhs{velocity_of_momentum(state.momentum, self.mass), ee * f};
}

Vec3 wf_force(bool full, const PhasePoint& state, const ChargeParams& self, const ChargeParams& partner,
              const WorldLine& partner_line, double d_min) {
  if (!full) return toy_rhs(state, self, partner, partner_line, d_min).pdot;
  const Vec3 v = velocity_of_momentum(state.momentum, self.mass);
  Vec3 f = Vec3::Zero();
  for (Sign sign : {Sign::advanced, Sign::retarded}) {
    const FieldPair e = lienard_wiechert_field(partner_line, partner.charge, state.time, state.position, sign, d_min);
    f += e.electric + v.cross(e.magnetic);
  }
  return self.charge * f;
}

LongitudinalCheck longitudinal_check(const WorldLine& source, double e_src, double t, const Vec3& x, Sign sign,
                                     double d_min) {
  const double sep = delay_time(source, t, x, sign).separation;
  const double h = 1e-5 * sep;
  Eigen::Matrix3d jp, jt;  // Jacobians of E_par and of E_LW - E_par
  for (int c = 0; c < 3; ++c) {
    Vec3 e = Vec3::Zero();
    e[c] = h;
    const Vec3 pp = coulomb_delayed_field(source, e_src, t, x + e, sign, d_min).electric;
    const Vec3 pm = coulomb_delayed_field(source, e_src, t, x - e, sign, d_min).electric;
    const Vec3 fp = lienard_wiechert_field(source, e_src, t, x + e, sign, d_min).electric;
    const Vec3 fm = lienard_wiechert_field(source, e_src, t, x - e, sign, d_min).electric;
    jp.col(c) = (pp - pm) / (2.0 * h);
    jt.col(c) = ((fp - pp) - (fm - pm)) / (2.0 * h);
  }
  const Vec3 par = coulomb_delayed_field(source, e_src, t, x, sign, d_min).electric;
  const Vec3 full = lienard_wiechert_field(source, e_src, t, x, sign, d_min).electric;
  const double scale = par.norm();
  const Vec3 curl(jp(2, 1) - jp(1, 2), jp(0, 2) - jp(2, 0), jp(1, 0) - jp(0, 1));
  LongitudinalCheck out;
  out.deviation = (full - par).norm() / scale;
  out.curl = curl.norm() * sep / scale;
  out.divergence = std::abs(jt.trace()) * sep / scale;
  return out;
}

DelayJet delay_jet(const VecJet& b, double tau0, const VecJet& x, double t0, Sign sign) {
  const int order = x.order();
  const int s = sgn(sign);
  if (b.order() < 1) fail(ErrorKind::InvalidArgument, "delay_jet needs the partner velocity");
  const VecJet partner = b.truncated(order);
  const Vec3 y0 = x[0] - partner[0];
  const double r0 = y0.norm();
  if (r0 < kTinyNorm) fail(ErrorKind::SingularSeparation, "delay jet at zero separation");
  const double slope = 1.0 + s * (y0 / r0).dot(b[1]);
  if (!(slope > 0.0)) fail(ErrorKind::InternalInvariant, "delay jet slope not positive");

  const Jet h = Jet::variable(order);
  Jet sigma(order);
  // each pass fixes one more Taylor order of G(sigma) = sigma + tau0 - t0 - h -+ |x - q(tau0 + sigma)|
  for (int it = 0; it < order; ++it) {
    const Jet r = norm(x - compose(partner, sigma));
    Jet gres = sigma - h - s * r + (tau0 - t0);
    gres[0] = 0.0;
    sigma = sigma - gres * (1.0 / slope);
    sigma[0] = 0.0;
  }
  return DelayJet{tau0, sigma, compose(partner, sigma)};
}

DelayJet delay_jet(const WorldLine& partner, const VecJet& observer, double t0, Sign sign, double edge_tol) {
  const DelayResult d = delay_time(partner, t0, observer[0], sign, edge_tol);
  return delay_jet(taylor(partner, d.t_delayed, std::max(1, observer.order())), d.t_delayed, observer, t0, sign);
}

VecJet force_jet(const WorldLine& partner, const VecJet& observer, double t0, double ee) {
  VecJet f(observer.order());
  for (Sign sign : {Sign::advanced, Sign::retarded}) {
    const DelayJet dj = delay_jet(partner, observer, t0, sign);
    f = f + coulomb_force(observer - dj.partner);
  }
  return ee * f;
}

}  // namespace wfdelay
