#include "wfdelay/construction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "wfdelay/chebyshev.hpp"
#include "wfdelay/jet.hpp"
#include "wfdelay/roots.hpp"

namespace wfdelay {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Source intervals end where a partner light cone meets a coverage edge; constructed
// edges carry fit error, so the boundary root is accepted with this relative slack.
constexpr double kStepEdgeTol = 1e-9;

std::size_t ix(int i) { return static_cast<std::size_t>(i); }

double rel_defect(const Vec3& a, const Vec3& b, double floor) {
  return (a - b).norm() / std::max({a.norm(), b.norm(), floor, 1e-300});
}

// Jet of the time derivative of p = m gamma(qdot) qdot, one order below the position jet minus two.
VecJet pdot_jet(const VecJet& q, double mass) {
  return momentum_of_velocity(q.derivative(), mass).derivative();
}

// Evaluation of the inverted force relation at one parameter time of the source particle.
struct NodeEval {
  double t = 0.0;
  double tau = 0.0;     // time of the constructed partner point
  double rate = 0.0;    // dtau/dt
  Vec3 q = Vec3::Zero();
  double sep_new = 0.0;
  double sep_known = 0.0;
  double speed = 0.0;   // speed of the constructed particle
};

NodeEval eval_node(const Segment& yseg, const WorldLine& x, double t, double ee, double m_y, Sign unknown) {
  const VecJet yj = taylor(yseg, t, 3);
  const VecJet pdot = pdot_jet(yj, m_y);  // order 1
  const VecJet y1 = yj.truncated(1);
  const DelayJet known = delay_jet(x, y1, t, opposite(unknown), kStepEdgeTol);
  const VecJet field = (1.0 / ee) * pdot - coulomb_force(y1 - known.partner);
  const VecJet z = coulomb_inverse(field);
  const Jet r = norm(z);
  const double s = sgn(unknown);
  NodeEval e;
  e.t = t;
  e.tau = t + s * r[0];
  e.rate = 1.0 + s * r[1];
  const VecJet q = y1 - z;
  e.q = q[0];
  e.speed = e.rate > 0.0 ? q[1].norm() / e.rate : kInf;
  e.sep_new = r[0];
  e.sep_known = (y1[0] - known.partner[0]).norm();
  return e;
}

// Positive while both guards hold.
double guard_margin(const NodeEval& e, const GuardParams& g) {
  return std::min({e.sep_new - g.d, e.sep_known - g.d, g.v_bar - e.speed});
}

StopReason breach_kind(const NodeEval& e, const GuardParams& g) {
  return g.v_bar - e.speed < std::min(e.sep_new, e.sep_known) - g.d ? StopReason::guard_speed
                                                                     : StopReason::guard_separation;
}

struct StepContext {
  const GuardParams& g;
  Side side;
  int xi;  // extended particle
  int yi;  // source particle
  double ee;
  Sign unknown;
  WorldLine x;
  const WorldLine& y;
  StepReport report;
  bool stopped = false;
  StopReason stop = StopReason::reached_horizon;
  double source_end = 0.0;  // last source time actually used
};

std::vector<NodeEval> eval_piece(StepContext& c, const Segment& yseg, double a, double b) {
  const auto ts = cheb::lobatto_nodes(2 * c.g.step_degree, a, b);
  std::vector<NodeEval> out;
  out.reserve(ts.size());
  for (double t : ts) out.push_back(eval_node(yseg, c.x, t, c.ee, c.y.charge().mass, c.unknown));
  return out;
}

// Fits one constructed segment from the nodes of a source piece and appends it.
// Returns false when the held-out residual asks for subdivision.
bool fit_and_append(StepContext& c, const std::vector<NodeEval>& nodes, bool allow_split) {
  const bool future = c.side == Side::future;
  ParametricSamples ps;
  double qmax = 0.0;
  for (const auto& n : nodes) {
    if (!(n.rate > 0.0))
      fail(ErrorKind::MonotonicityViolation, fmt::format("constructed time stops increasing near t={}", n.t));
    ps.t.push_back(n.t);
    ps.tau.push_back(n.tau);
    ps.rate.push_back(n.rate);
    ps.y.push_back(n.q);
    qmax = std::max(qmax, n.q.norm());
  }
  const double tau_lo = ps.tau.front(), tau_hi = ps.tau.back();
  const double edge = future ? c.x.hi() : c.x.lo();
  const int deg = c.g.step_degree;
  const ReparamResult rp = reparameterize(ps, cheb::lobatto_nodes(deg, tau_lo, tau_hi));

  const double basis_lo = future ? std::min(edge, tau_lo) : tau_lo;
  const double basis_hi = future ? tau_hi : std::max(edge, tau_hi);
  const FitResult fr = fit_segment(rp.samples, deg, basis_lo, basis_hi);
  double held_out = 0.0;
  for (const auto& n : nodes) held_out = std::max(held_out, (fr.segment.value(n.tau) - n.q).norm());
  held_out /= 1.0 + qmax;
  if (held_out > c.g.fit_tol && allow_split) return false;

  const double lo = future ? edge : tau_lo;
  const double hi = future ? tau_hi : edge;
  if (!(lo < hi)) fail(ErrorKind::InternalInvariant, fmt::format("constructed piece [{}, {}] is empty", lo, hi));
  Segment seg(lo, hi, basis_lo, basis_hi, fr.segment.coeffs());
  AppendResult ar = [&] {
    try {
      return append_segment(c.x, std::move(seg), c.side);
    } catch (const SmoothnessError& e) {
      fail(ErrorKind::ConstructionInconsistency,
           fmt::format("particle {} {} step: {}", c.x.charge().label, to_string(c.side), e.what()));
    }
  }();
  c.x = std::move(ar.line);
  for (std::size_t k = 0; k < std::min<std::size_t>(4, ar.join.mismatch.size()); ++k)
    c.report.join_mismatch[k] = std::max(c.report.join_mismatch[k], ar.join.mismatch[k]);
  c.report.fit_residual = std::max(c.report.fit_residual, held_out);
  ++c.report.pieces;
  return true;
}

void process_piece(StepContext& c, const Segment& yseg, double a, double b, int depth) {
  if (c.stopped) return;
  const bool future = c.side == Side::future;
  std::vector<NodeEval> nodes = eval_piece(c, yseg, a, b);

  // scan from the end adjacent to the current coverage edge
  const std::size_t n = nodes.size();
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t idx = future ? k : n - 1 - k;
    if (guard_margin(nodes[idx], c.g) >= 0.0) continue;
    c.stopped = true;
    c.stop = breach_kind(nodes[idx], c.g);
    c.report.truncated = true;
    if (k == 0) return;  // guard already violated at the edge
    const std::size_t prev = future ? idx - 1 : idx + 1;
    double good = nodes[prev].t, bad = nodes[idx].t;
    for (int it = 0; it < 100 && std::abs(bad - good) > 1e-14 * (1.0 + std::abs(good)); ++it) {
      const double mid = 0.5 * (good + bad);
      if (guard_margin(eval_node(yseg, c.x, mid, c.ee, c.y.charge().mass, c.unknown), c.g) >= 0.0) good = mid;
      else bad = mid;
    }
    const double ta = future ? a : good, tb = future ? good : b;
    if (!(tb - ta > 1e-9 * (b - a))) return;
    nodes = eval_piece(c, yseg, ta, tb);
    fit_and_append(c, nodes, false);
    c.source_end = good;
    return;
  }

  if (!fit_and_append(c, nodes, depth < c.g.max_subdivisions)) {
    const double mid = 0.5 * (a + b);
    if (future) {
      process_piece(c, yseg, a, mid, depth + 1);
      process_piece(c, yseg, mid, b, depth + 1);
    } else {
      process_piece(c, yseg, mid, b, depth + 1);
      process_piece(c, yseg, a, mid, depth + 1);
    }
    return;
  }
  c.source_end = future ? b : a;
}

// Max relative defect of d/dt p against the delayed Coulomb force on w_i at the given times.
double eom_defect(const WorldLine& wi, const WorldLine& wj, const std::vector<double>& ts) {
  const double ee = wi.charge().charge * wj.charge().charge;
  double worst = 0.0;
  for (double t : ts) {
    const VecJet q = taylor(wi, t, 2);
    const Vec3 pdot = pdot_jet(q, wi.charge().mass)[0];
    Vec3 f = Vec3::Zero();
    double scale = 0.0;
    for (Sign s : {Sign::advanced, Sign::retarded}) {
      const DelayResult d = delay_time(wj, t, q[0], s, kStepEdgeTol);
      const Vec3 fs = ee * coulomb_force(q[0] - wj.position(d.t_delayed));
      f += fs;
      scale += fs.norm();
    }
    worst = std::max(worst, (pdot - f).norm() / std::max(scale, 1e-300));
  }
  return worst;
}

}  // namespace

void check_guards(const GuardParams& g) {
  if (!(g.d > 0.0)) fail(ErrorKind::InvalidArgument, "guard separation d must be positive");
  if (!(g.v_bar > 0.0 && g.v_bar < 1.0)) fail(ErrorKind::InvalidArgument, "guard speed cap must lie in (0, 1)");
  if (g.n_c < 0 || g.gen_order < 2) fail(ErrorKind::InvalidArgument, "compatibility orders must be non-negative");
  if (g.step_degree < 4) fail(ErrorKind::InvalidArgument, "step degree must be at least 4");
  if (!(g.join_tol > 0.0) || !(g.fit_tol > 0.0) || !(g.compat_tol > 0.0) || !(g.cone_tol > 0.0))
    fail(ErrorKind::InvalidArgument, "tolerances must be positive");
}

bool ValidationReport::ok() const {
  return std::all_of(entries.begin(), entries.end(), [](const ValidationEntry& e) { return e.pass; });
}

std::string ValidationReport::summary() const {
  std::string s;
  for (const auto& e : entries) {
    if (e.pass) continue;
    if (!s.empty()) s += "; ";
    s += fmt::format("{}: residual {:.3e} at t={}", e.condition, e.residual, e.location);
  }
  return s;
}

int seed_index(const InitialData& data) { return data.t0[1] < data.t0[0] ? 1 : 0; }

ValidationReport validate_initial_data(const InitialData& data, const GuardParams& g) {
  check_guards(g);
  ValidationReport rep;
  const int j = seed_index(data), i = 1 - j;
  const WorldLine& wi = data.strips[ix(i)];
  const WorldLine& wj = data.strips[ix(j)];

  // coverage of the declared boundary times
  {
    double worst = 0.0, where = 0.0;
    for (int k = 0; k < 2; ++k) {
      const WorldLine& w = data.strips[ix(k)];
      if (w.empty()) {
        worst = kInf;
        break;
      }
      const double gap = std::max(w.lo() - data.t0[ix(k)], data.t1[ix(k)] - w.hi());
      if (gap > worst) worst = gap, where = gap == w.lo() - data.t0[ix(k)] ? data.t0[ix(k)] : data.t1[ix(k)];
      if (!(data.t0[ix(k)] < data.t1[ix(k)])) worst = kInf;
    }
    rep.entries.push_back({"coverage", worst <= 0.0, std::max(worst, 0.0), where});
    if (!rep.entries.back().pass) return rep;
  }

  // (i) separation on the time overlap
  {
    const double a = std::max(data.t0[0], data.t0[1]), b = std::min(data.t1[0], data.t1[1]);
    double sep = kInf, where = a;
    if (a <= b) {
      const int n = 64 * static_cast<int>(wi.size() + wj.size());
      for (int k = 0; k <= n; ++k) {
        const double t = a + (b - a) * k / n;
        const double s = (wi.position(t) - wj.position(t)).norm();
        if (s < sep) sep = s, where = t;
      }
    }
    rep.entries.push_back({"separation", sep >= g.d, sep, where});
  }

  // (ii) speed bound; momenta are derived from velocities, so the velocity relation is exact
  for (int k = 0; k < 2; ++k) {
    const WorldLine& w = data.strips[ix(k)];
    rep.entries.push_back({fmt::format("speed-{}", w.charge().label), w.speed_bound() <= g.v_bar, w.speed_bound(),
                           data.t0[ix(k)]});
  }

  // (iii) light-cone chaining of the boundary times
  auto cone = [&](const std::string& name, const WorldLine& target, double expect, double from_t,
                  const WorldLine& from) {
    double res = kInf;
    try {
      res = std::abs(delay_time(target, from_t, from.position(from_t), Sign::advanced).t_delayed - expect);
    } catch (const Error&) {
    }
    rep.entries.push_back({name, res <= g.cone_tol, res, expect});
  };
  cone("light-cone-start", wi, data.t0[ix(i)], data.t0[ix(j)], wj);
  cone("light-cone-seed-end", wj, data.t1[ix(j)], data.t0[ix(i)], wi);
  cone("light-cone-end", wi, data.t1[ix(i)], data.t1[ix(j)], wj);
  for (std::size_t k = rep.entries.size() - 3; k < rep.entries.size(); ++k)
    if (!rep.entries[k].pass) return rep;  // compatibility is meaningless off the cones

  // (iv), (v) derivatives of the equation of motion at the two anchor times
  auto compat = [&](const std::string& name, const WorldLine& w, const WorldLine& partner, double t) {
    const double ee = w.charge().charge * partner.charge().charge;
    std::vector<double> res(ix(g.n_c + 1), kInf);
    try {
      const VecJet q = taylor(w, t, g.n_c + 2);
      const VecJet pdot = pdot_jet(q, w.charge().mass);
      const VecJet f = force_jet(partner, q.truncated(g.n_c), t, ee);
      const double f0 = f[0].norm();
      for (int n = 0; n <= g.n_c; ++n)
        res[ix(n)] = rel_defect(pdot.derivative_value(n), f.derivative_value(n), f0);
    } catch (const Error&) {
    }
    for (int n = 0; n <= g.n_c; ++n)
      rep.entries.push_back({fmt::format("{}-order-{}", name, n), res[ix(n)] <= g.compat_tol, res[ix(n)], t});
  };
  compat("compatibility-start", wi, wj, data.t0[ix(i)]);
  compat("compatibility-seed-end", wj, wi, data.t1[ix(j)]);
  return rep;
}

// ---- generation -------------------------------------------------------------

Anchor cone_intersection_point(const WorldLine& seed, const Vec3& direction) {
  if (direction.norm() < kTinyNorm) fail(ErrorKind::InvalidArgument, "cone intersection needs a direction");
  const double t0 = seed.lo(), t1 = seed.hi();
  const Vec3 q0 = seed.position(t0), q1 = seed.position(t1);
  const double span = t1 - t0;
  if (!((q1 - q0).norm() < span)) fail(ErrorKind::InvalidAnchor, "seed end points are not timelike separated");
  const Vec3 c = 0.5 * (q0 + q1);
  const Vec3 u = direction.normalized();
  auto f = [&](double lam) {
    const Vec3 x = c + lam * u;
    return (x - q0).norm() + (x - q1).norm() - span;
  };
  const double hi = span;  // f(span) >= 2 span - |q1 - q0| - span > 0
  const double lam = bisect(f, 0.0, hi, f(0.0));
  const Vec3 x = c + lam * u;
  return Anchor{t0 + (x - q0).norm(), x, Vec3::Zero()};
}

namespace {

// Position jet at the first anchor with derivatives fixed by the equation of motion.
VecJet start_jet(const WorldLine& seed, const ChargeParams& ci, const Anchor& a, int order) {
  const double ee = ci.charge * seed.charge().charge;
  const double v2 = a.v.squaredNorm();
  if (!(v2 < 1.0)) fail(ErrorKind::InvalidAnchor, "anchor velocity is not subluminal");
  const double gam = 1.0 / std::sqrt(1.0 - v2);
  // inverse of dp/dv = m gamma (1 + gamma^2 v v^T)
  const Eigen::Matrix3d minv = (Eigen::Matrix3d::Identity() - a.v * a.v.transpose()) / (ci.mass * gam);
  VecJet q(order);
  q[0] = a.q;
  q[1] = a.v;
  for (int n = 0; n + 2 <= order; ++n) {
    const VecJet f = force_jet(seed, q.truncated(n), a.t, ee);
    const VecJet p = momentum_of_velocity(q.derivative().truncated(n + 1), ci.mass);  // top velocity term still zero
    q[n + 2] = minv * (f[n] / (n + 1) - p[n + 1]) / (n + 2);
  }
  return q;
}

struct EndJet {
  double t = 0.0;
  VecJet q;
};

// Advanced partner of the seed end, as a Taylor series in its own time.
EndJet end_jet(const WorldLine& seed, const ChargeParams& ci, const VecJet& start, double t_start, int order) {
  const double ee = ci.charge * seed.charge().charge;
  const double t1 = seed.hi();
  const VecJet yj = taylor(seed, t1, order + 2);
  const VecJet pdot = pdot_jet(yj, seed.charge().mass);
  const VecJet y = yj.truncated(order);
  const DelayJet ret = delay_jet(start, t_start, y, t1, Sign::retarded);
  const VecJet z = coulomb_inverse((1.0 / ee) * pdot - coulomb_force(y - ret.partner));
  Jet sigma = Jet::variable(order) + norm(z);
  const double t_end = t1 + sigma[0];
  sigma[0] = 0.0;
  return EndJet{t_end, compose(y - z, revert(sigma))};
}

// Two-point Hermite interpolant: (1-u)^m [A (1-u)^-m]_m + u^m [B u^-m]_m, u = (t - a)/(b - a).
Segment hermite_segment(const VecJet& ja, double a, const VecJet& jb, double b, int degree) {
  const int order = ja.order();
  const int m = order + 1;
  const double len = b - a;
  const Jet h = Jet::variable(order);
  const VecJet ahat = pow(Jet(order, 1.0) - h * (1.0 / len), -m) * ja;
  const VecJet bhat = pow(Jet(order, 1.0) + h * (1.0 / len), -m) * jb;
  auto horner = [](const VecJet& c, double x) {
    Vec3 acc = c[c.order()];
    for (int k = c.order() - 1; k >= 0; --k) acc = acc * x + c[k];
    return acc;
  };
  const int deg = std::max(degree, 2 * m - 1);
  ParamSamples s;
  s.s = cheb::lobatto_nodes(deg, a, b);
  for (double t : s.s) {
    const double u = (t - a) / len;
    s.y.push_back(std::pow(1.0 - u, m) * horner(ahat, t - a) + std::pow(u, m) * horner(bhat, t - b));
  }
  s.y.front() = ja[0];
  s.y.back() = jb[0];
  return fit_segment(s, deg).segment;
}

}  // namespace

InitialData generate_initial_data(const WorldLine& seed, const ChargeParams& partner, const Anchor& first,
                                  const std::optional<Anchor>& second, const GuardParams& g) {
  check_guards(g);
  check_charge(partner);
  if (seed.empty()) fail(ErrorKind::InvalidArgument, "empty seed strip");
  if (partner.label == seed.charge().label || (partner.label != 1 && partner.label != 2))
    fail(ErrorKind::InvalidArgument, "partner label must be the other of 1 and 2");
  if (seed.speed_bound() > g.v_bar)
    fail(ErrorKind::GuardSpeed, fmt::format("seed speed {} exceeds cap {}", seed.speed_bound(), g.v_bar));

  const double tj0 = seed.lo(), tj1 = seed.hi();
  const Vec3 qj0 = seed.position(tj0), qj1 = seed.position(tj1);
  const double tol = g.cone_tol * (1.0 + std::abs(first.t));
  const double fwd = first.t - tj0 - (first.q - qj0).norm();
  const double bwd = tj1 - first.t - (qj1 - first.q).norm();
  if (std::abs(fwd) > tol || std::abs(bwd) > tol)
    fail(ErrorKind::InvalidAnchor,
         fmt::format("first anchor misses the seed light cones (forward {:.3e}, backward {:.3e})", fwd, bwd));
  if (first.v.norm() > g.v_bar) fail(ErrorKind::GuardSpeed, "anchor velocity exceeds the speed cap");

  const int order = g.gen_order;
  const VecJet js = start_jet(seed, partner, first, order);
  const EndJet je = end_jet(seed, partner, js, first.t, order);

  const double reach = je.t - first.t - (je.q[0] - first.q).norm();
  if (!(reach > 0.0))
    fail(ErrorKind::InvalidAnchor,
         fmt::format("implied second anchor ({}, [{}, {}, {}]) is not inside the forward cone of the first", je.t,
                     je.q[0].x(), je.q[0].y(), je.q[0].z()));
  if (second) {
    const double dt = std::abs(second->t - je.t);
    const double dq = (second->q - je.q[0]).norm();
    const double on_cone = std::abs(second->t - tj1 - (second->q - qj1).norm());
    if (on_cone > tol)
      fail(ErrorKind::InvalidAnchor, fmt::format("second anchor is off the seed end cone by {:.3e}", on_cone));
    if (dt > 1e-8 * (1.0 + std::abs(je.t)) || dq > 1e-8 * (1.0 + je.q[0].norm()))
      fail(ErrorKind::InvalidAnchor,
           fmt::format("second anchor differs from the point implied by the seed motion (dt {:.3e}, dq {:.3e})", dt,
                       dq));
  }

  Segment strip = hermite_segment(js, first.t, je.q, je.t, g.step_degree);
  if (strip.max_speed() > g.v_bar)
    fail(ErrorKind::GuardSpeed,
         fmt::format("generated strip reaches speed {} above cap {}", strip.max_speed(), g.v_bar));

  InitialData d;
  const int j = seed.charge().label - 1, i = partner.label - 1;
  d.strips[ix(j)] = seed;
  d.strips[ix(i)] = WorldLine(partner, {std::move(strip)}, seed.join_order(), g.join_tol);
  d.t0[ix(j)] = tj0;
  d.t1[ix(j)] = tj1;
  d.t0[ix(i)] = first.t;
  d.t1[ix(i)] = je.t;
  const ValidationReport rep = validate_initial_data(d, g);
  if (!rep.ok()) fail(ErrorKind::ValidationFailure, "generated initial data fails validation: " + rep.summary());
  return d;
}

// ---- construction -----------------------------------------------------------

SolutionPair half_step(SolutionPair sol, Side side, const GuardParams& g) {
  const bool future = side == Side::future;
  if (!(future ? sol.future_open : sol.past_open)) return sol;
  auto close = [&](StopReason r) {
    if (future) sol.future_stop = r, sol.future_open = false;
    else sol.past_stop = r, sol.past_open = false;
    if (sol.stop_reason == StopReason::reached_horizon) sol.stop_reason = r;
  };

  const WorldLine& w0 = sol.lines[0];
  const WorldLine& w1 = sol.lines[1];
  const int xi = future ? (w0.hi() <= w1.hi() ? 0 : 1) : (w0.lo() >= w1.lo() ? 0 : 1);
  const int yi = 1 - xi;
  const WorldLine& y = sol.lines[ix(yi)];
  const double edge = future ? sol.lines[ix(xi)].hi() : sol.lines[ix(xi)].lo();
  const Vec3 xe = sol.lines[ix(xi)].position(edge);

  // source interval: partner times whose light cone reaches past the edge
  double a, b;
  try {
    if (future) {
      a = delay_time(y, edge, xe, Sign::retarded, kStepEdgeTol).t_delayed;
      b = y.hi();
      try {
        b = std::min(b, delay_time(y, edge, xe, Sign::advanced, kStepEdgeTol).t_delayed);
      } catch (const OutOfDomainError&) {
      }
    } else {
      b = delay_time(y, edge, xe, Sign::advanced, kStepEdgeTol).t_delayed;
      a = y.lo();
      try {
        a = std::max(a, delay_time(y, edge, xe, Sign::retarded, kStepEdgeTol).t_delayed);
      } catch (const OutOfDomainError&) {
      }
    }
  } catch (const OutOfDomainError&) {
    close(StopReason::out_of_domain);
    return sol;
  }
  if (!(a < b)) {
    close(StopReason::out_of_domain);
    return sol;
  }

  StepContext c{g, side, xi, yi, y.charge().charge * sol.lines[ix(xi)].charge().charge,
                future ? Sign::advanced : Sign::retarded, sol.lines[ix(xi)], y, StepReport{}};
  c.report.side = side;
  c.report.particle = c.x.charge().label;
  c.source_end = future ? a : b;

  // split the source interval at the partner's own joins
  std::vector<double> cuts{a};
  for (std::size_t k = 0; k + 1 < y.size(); ++k) {
    const double t = y.segment(k).hi();
    const double tol = 1e-12 * (1.0 + std::abs(t));
    if (t > a + tol && t < b - tol) cuts.push_back(t);
  }
  cuts.push_back(b);
  const std::size_t np = cuts.size() - 1;
  for (std::size_t k = 0; k < np && !c.stopped; ++k) {
    const std::size_t p = future ? k : np - 1 - k;
    const double pa = cuts[p], pb = cuts[p + 1];
    const Segment& yseg = y.segment(y.locate(0.5 * (pa + pb)));
    process_piece(c, yseg, pa, pb, 0);
  }

  const double created_lo = future ? edge : c.x.lo();
  const double created_hi = future ? c.x.hi() : edge;
  c.report.source = future ? Interval{a, c.source_end} : Interval{c.source_end, b};
  c.report.created = Interval{created_lo, created_hi};
  if (!c.report.truncated && created_hi - created_lo < (1.0 - g.v_bar) * g.d / 2.0)
    fail(ErrorKind::InternalInvariant,
         fmt::format("half-step extended particle {} by only {:.3e}", c.report.particle, created_hi - created_lo));

  sol.lines[ix(xi)] = std::move(c.x);
  if (c.report.pieces > 0 && c.report.source.hi > c.report.source.lo) {
    const int n = 2 * g.step_degree;
    std::vector<double> ts;
    for (int k = 0; k < n; ++k)
      ts.push_back(c.report.source.lo + (k + 0.5) * (c.report.source.hi - c.report.source.lo) / n);
    c.report.eom_residual = eom_defect(sol.lines[ix(yi)], sol.lines[ix(xi)], ts);
  }
  sol.steps.push_back(c.report);
  if (c.stopped) close(c.stop);
  sol.domains = compute_domains(sol.lines);
  return sol;
}

SolutionPair advance_step(SolutionPair sol, Side side, const GuardParams& g) {
  check_guards(g);
  sol = half_step(std::move(sol), side, g);
  return half_step(std::move(sol), side, g);
}

SolutionPair construct(const InitialData& data, const GuardParams& g, const Horizons& h) {
  const ValidationReport rep = validate_initial_data(data, g);
  if (!rep.ok()) fail(ErrorKind::ValidationFailure, "initial data rejected: " + rep.summary());
  std::array<WorldLine, 2> lines = data.strips;
  for (auto& w : lines) {
    std::vector<Segment> segs;
    for (std::size_t k = 0; k < w.size(); ++k) segs.push_back(w.segment(k));
    w = WorldLine(w.charge(), std::move(segs), w.join_order(), g.join_tol, w.origin());
  }
  SolutionPair sol = solution_from_lines(std::move(lines));
  while (sol.future_open && std::min(sol.lines[0].hi(), sol.lines[1].hi()) < h.future)
    sol = half_step(std::move(sol), Side::future, g);
  while (sol.past_open && std::max(sol.lines[0].lo(), sol.lines[1].lo()) > h.past)
    sol = half_step(std::move(sol), Side::past, g);
  // a side that reached its horizon is reported as such even if it closed early
  if (std::min(sol.lines[0].hi(), sol.lines[1].hi()) >= h.future) sol.future_stop = StopReason::reached_horizon;
  if (std::max(sol.lines[0].lo(), sol.lines[1].lo()) <= h.past) sol.past_stop = StopReason::reached_horizon;
  sol.stop_reason = sol.future_stop != StopReason::reached_horizon ? sol.future_stop : sol.past_stop;
  sol.domains = compute_domains(sol.lines);
  return sol;
}

double eom_residual(const SolutionPair& sol, int idx, double a, double b, int n) {
  if (idx != 0 && idx != 1) fail(ErrorKind::InvalidArgument, "particle index must be 0 or 1");
  if (n < 1 || !(a <= b)) fail(ErrorKind::InvalidArgument, "eom_residual needs a non-empty sample set");
  std::vector<double> ts;
  for (int k = 0; k < n; ++k) ts.push_back(n == 1 ? 0.5 * (a + b) : a + (b - a) * k / (n - 1));
  return eom_defect(sol.lines[ix(idx)], sol.lines[ix(1 - idx)], ts);
}

}  // namespace wfdelay
