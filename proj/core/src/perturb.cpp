#include "wfdelay/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include <fmt/core.h>

#include "wfdelay/chebyshev.hpp"

namespace wfdelay {

std::string_view to_string(BumpShape) { return "polynomial"; }

BumpShape bump_shape_from_string(std::string_view s) {
  if (s == "polynomial") return BumpShape::polynomial;
  fail(ErrorKind::InvalidArgument, fmt::format("unknown bump shape '{}' (only 'polynomial' is offered)", s));
}

double bump_value(BumpShape, double u) {
  const double w = 1.0 - u * u;
  if (!(w > 0.0)) return 0.0;
  const double w2 = w * w, w4 = w2 * w2;
  return w4 * w4;
}

double bump_slope_max(BumpShape) {
  // 16 u (1 - u^2)^7 peaks at u^2 = 1/15
  return 16.0 / std::sqrt(15.0) * std::pow(14.0 / 15.0, 7);
}

namespace {

// The bump is a degree-16 polynomial in t, so interpolation at Lobatto nodes reproduces seg + bump.
Segment fit_sum(const std::function<Vec3(double)>& f, double a, double b, int degree) {
  ParamSamples ps;
  ps.s = cheb::lobatto_nodes(degree, a, b);
  double scale = 1.0;
  for (double t : ps.s) {
    ps.y.push_back(f(t));
    scale = std::max(scale, ps.y.back().norm());
  }
  FitResult fr = fit_segment(ps, degree, a, b);
  double err = 0.0;
  for (std::size_t k = 0; k + 1 < ps.s.size(); ++k) {
    const double m = 0.5 * (ps.s[k] + ps.s[k + 1]);
    err = std::max(err, (fr.segment.value(m) - f(m)).norm());
  }
  if (err > 1e-13 * scale) fail(ErrorKind::FitFailure, fmt::format("perturbed piece misfit {:.3e}", err));
  return std::move(fr.segment);
}

}  // namespace

PerturbResult perturb_initial_data(const InitialData& data, const PerturbSpec& spec, const GuardParams& g) {
  check_guards(g);
  const double lo = spec.s - spec.delta, hi = spec.s + spec.delta;
  if (!(spec.delta > 0.0) || !std::isfinite(spec.s) || !(spec.lambda >= 0.0) || !std::isfinite(spec.lambda))
    fail(ErrorKind::InvalidArgument, "perturbation needs delta > 0 and a finite lambda >= 0");
  if (!(spec.direction.norm() > 0.0)) fail(ErrorKind::InvalidArgument, "perturbation direction is zero");
  const double ov_lo = std::max(data.t0[0], data.t0[1]), ov_hi = std::min(data.t1[0], data.t1[1]);
  if (!(lo >= ov_lo && hi <= ov_hi))
    fail(ErrorKind::InvalidArgument, fmt::format("support [{}, {}] escapes the strip overlap [{}, {}]", lo, hi,
                                                 ov_lo, ov_hi));
  if (spec.t_star > lo && spec.t_star < hi)
    fail(ErrorKind::InvalidArgument, fmt::format("t* = {} lies inside the support", spec.t_star));

  PerturbResult out;
  out.data = data;
  if (spec.lambda == 0.0) {
    out.report = validate_initial_data(data, g);
    for (const auto& w : data.strips) out.max_speed = std::max(out.max_speed, w.speed_bound());
    return out;
  }

  const Vec3 dir = spec.direction.normalized();
  const double amp = spec.lambda * spec.delta / bump_slope_max(spec.shape);
  const BumpShape shape = spec.shape;
  const double s = spec.s, delta = spec.delta;

  for (int idx = 0; idx < 2; ++idx) {
    if (!spec.particles[idx]) continue;
    const WorldLine& w = data.strips[idx];
    std::vector<Segment> segs;
    int origin = 0;
    for (std::size_t k = 0; k < w.size(); ++k) {
      const Segment& seg = w.segment(k);
      if (static_cast<int>(k) == w.origin()) origin = static_cast<int>(segs.size());
      const double a = std::max(seg.lo(), lo), b = std::min(seg.hi(), hi);
      if (!(a < b)) {
        segs.push_back(seg);
        continue;
      }
      if (seg.lo() < a) segs.push_back(seg.restricted(seg.lo(), a));
      auto f = [&](double t) -> Vec3 { return seg.value(t) + amp * bump_value(shape, (t - s) / delta) * dir; };
      Segment mid = fit_sum(f, a, b, std::max(seg.degree(), 16));
      out.max_speed = std::max(out.max_speed, mid.max_speed());
      segs.push_back(std::move(mid));
      if (b < seg.hi()) segs.push_back(seg.restricted(b, seg.hi()));
    }
    out.data.strips[idx] = WorldLine(w.charge(), std::move(segs), w.join_order(), w.join_tol(), origin);
  }
  if (out.max_speed > g.v_bar)
    fail(ErrorKind::GuardSpeed,
         fmt::format("perturbed speed {} exceeds the cap {}; lower lambda", out.max_speed, g.v_bar));
  out.report = validate_initial_data(out.data, g);
  return out;
}

}  // namespace wfdelay
