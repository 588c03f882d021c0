#include "wfdelay/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <fmt/core.h>

#include "wfdelay/chebyshev.hpp"
#include "wfdelay/roots.hpp"

namespace wfdelay {

namespace {

double rel_slack(double t) { return 1e-12 * (1.0 + std::abs(t)); }

}  // namespace

// ---- Segment ---------------------------------------------------------------

Segment::Segment(double a, double b, Eigen::MatrixXd coeffs)
    : a_(a), b_(b), alpha_(a), beta_(b), coeffs_(std::move(coeffs)) {
  init();
}

Segment::Segment(double a, double b, double alpha, double beta, Eigen::MatrixXd coeffs)
    : a_(a), b_(b), alpha_(alpha), beta_(beta), coeffs_(std::move(coeffs)) {
  init();
}

void Segment::init() {
  if (!(std::isfinite(a_) && std::isfinite(b_) && a_ < b_))
    fail(ErrorKind::InvalidArgument, fmt::format("segment interval [{}, {}] is empty or non-finite", a_, b_));
  if (!(alpha_ < beta_) || a_ < alpha_ - rel_slack(alpha_) || b_ > beta_ + rel_slack(beta_))
    fail(ErrorKind::InvalidArgument, "segment validity interval escapes its basis interval");
  if (coeffs_.rows() != 3 || coeffs_.cols() < 1)
    fail(ErrorKind::InvalidArgument, "segment coefficients must be 3 x (D+1)");
  if (!coeffs_.allFinite()) fail(ErrorKind::InvalidArgument, "segment coefficients must be finite");

  const double scale = 2.0 / (beta_ - alpha_);
  deriv_.clear();
  deriv_.reserve(static_cast<std::size_t>(coeffs_.cols()));
  deriv_.push_back(coeffs_);
  for (int k = 1; k <= degree(); ++k) deriv_.push_back(cheb::derivative(deriv_.back()) * scale);

  const int n = std::max(4 * std::max(degree(), 1), 64);
  max_speed_ = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double t = a_ + (b_ - a_) * static_cast<double>(i) / n;
    max_speed_ = std::max(max_speed_, value(t, 1).norm());
  }
}

Vec3 Segment::value(double t, int k) const {
  if (k > degree()) return Vec3::Zero();
  Vec3 out;
  cheb::clenshaw(deriv_[static_cast<std::size_t>(k)], cheb::to_unit(t, alpha_, beta_), out);
  return out;
}

void Segment::eval_into(double t, int order, Vec3* out) const {
  for (int k = 0; k <= order; ++k) out[k] = value(t, k);
}

std::vector<Vec3> Segment::eval(double t, int order) const {
  std::vector<Vec3> out(static_cast<std::size_t>(order) + 1);
  eval_into(t, order, out.data());
  return out;
}

Segment Segment::restricted(double a, double b) const {
  if (a < a_ - rel_slack(a_) || b > b_ + rel_slack(b_))
    fail(ErrorKind::InvalidArgument, fmt::format("restriction [{}, {}] escapes segment [{}, {}]", a, b, a_, b_));
  return Segment(a, b, alpha_, beta_, coeffs_);
}

// ---- joins -----------------------------------------------------------------

double JoinReport::max() const {
  double m = 0.0;
  for (double x : mismatch) m = std::max(m, x);
  return m;
}

JoinReport join_mismatch(const Segment& left, const Segment& right, double t, int order) {
  JoinReport r;
  r.time = t;
  for (int k = 0; k <= order; ++k) {
    const Vec3 l = left.value(t, k);
    const Vec3 rr = right.value(t, k);
    const double den = std::max({1.0, l.norm(), rr.norm()});
    r.mismatch.push_back((l - rr).norm() / den);
  }
  return r;
}

namespace {

[[noreturn]] void throw_smoothness(const JoinReport& r, double tol) {
  std::string msg = fmt::format("join at t={} exceeds tolerance {}:", r.time, tol);
  for (std::size_t k = 0; k < r.mismatch.size(); ++k) msg += fmt::format(" order {}={:.3e}", k, r.mismatch[k]);
  throw SmoothnessError(msg, r.mismatch);
}

}  // namespace

// ---- WorldLine -------------------------------------------------------------

struct WorldLineAccess {
  static WorldLine make(const WorldLine& base, std::vector<std::shared_ptr<const Segment>> segs, int origin) {
    WorldLine w;
    w.charge_ = base.charge_;
    w.join_order_ = base.join_order_;
    w.join_tol_ = base.join_tol_;
    w.segs_ = std::move(segs);
    w.origin_ = origin;
    w.speed_bound_ = 0.0;
    for (const auto& s : w.segs_) w.speed_bound_ = std::max(w.speed_bound_, s->max_speed());
    return w;
  }

  static WorldLine append(const WorldLine& base, std::shared_ptr<const Segment> s, Side side) {
    auto segs = base.segs_;
    int origin = base.origin_;
    if (side == Side::future) {
      segs.push_back(std::move(s));
    } else {
      segs.insert(segs.begin(), std::move(s));
      ++origin;
    }
    return make(base, std::move(segs), origin);
  }
};

WorldLine::WorldLine(ChargeParams charge, std::vector<Segment> segments, int join_order, double join_tol,
                     int origin)
    : charge_(charge), join_order_(join_order), join_tol_(join_tol), origin_(origin) {
  check_charge(charge_);
  if (segments.empty()) fail(ErrorKind::InvalidArgument, "worldline needs at least one segment");
  if (join_order < 0 || !(join_tol > 0.0)) fail(ErrorKind::InvalidArgument, "bad join order or tolerance");
  if (origin < 0 || origin >= static_cast<int>(segments.size()))
    fail(ErrorKind::InvalidArgument, "worldline origin index out of range");
  for (std::size_t k = 0; k + 1 < segments.size(); ++k) {
    if (segments[k].hi() != segments[k + 1].lo())
      fail(ErrorKind::IntervalMismatch,
           fmt::format("segments {} and {} do not abut ({} vs {})", k, k + 1, segments[k].hi(), segments[k + 1].lo()));
    const JoinReport r = join_mismatch(segments[k], segments[k + 1], segments[k].hi(), join_order_);
    if (r.max() > join_tol_) throw_smoothness(r, join_tol_);
  }
  for (auto& s : segments) {
    speed_bound_ = std::max(speed_bound_, s.max_speed());
    segs_.push_back(std::make_shared<const Segment>(std::move(s)));
  }
}

double WorldLine::lo() const {
  if (segs_.empty()) fail(ErrorKind::InvalidWorldline, "empty worldline");
  return segs_.front()->lo();
}

double WorldLine::hi() const {
  if (segs_.empty()) fail(ErrorKind::InvalidWorldline, "empty worldline");
  return segs_.back()->hi();
}

int WorldLine::min_degree() const {
  int d = 1 << 30;
  for (const auto& s : segs_) d = std::min(d, s->degree());
  return d;
}

std::size_t WorldLine::locate(double t) const {
  if (segs_.empty()) throw OutOfDomainError("empty worldline", 0.0, 0.0, Side::future);
  const double lo_ = lo(), hi_ = hi();
  if (!(t >= lo_ && t <= hi_)) {
    throw OutOfDomainError(fmt::format("t={} outside covered interval [{}, {}] of particle {}", t, lo_, hi_,
                                       charge_.label),
                           lo_, hi_, t < lo_ ? Side::past : Side::future);
  }
  auto it = std::lower_bound(segs_.begin(), segs_.end(), t,
                             [](const std::shared_ptr<const Segment>& s, double x) { return s->hi() < x; });
  auto k = static_cast<std::size_t>(it - segs_.begin());
  if (k + 1 < segs_.size() && t == segs_[k]->hi() && static_cast<int>(k) + 1 <= origin_) ++k;
  return k;
}

void WorldLine::eval_into(double t, int order, Vec3* out) const {
  segs_[locate(t)]->eval_into(t, order, out);
}

std::vector<Vec3> WorldLine::eval(double t, int order) const {
  if (order < 0) fail(ErrorKind::InvalidArgument, "negative derivative order");
  std::vector<Vec3> out(static_cast<std::size_t>(order) + 1);
  eval_into(t, order, out.data());
  return out;
}

Vec3 WorldLine::position(double t) const { return segs_[locate(t)]->value(t, 0); }
Vec3 WorldLine::velocity(double t) const { return segs_[locate(t)]->value(t, 1); }
Vec3 WorldLine::momentum(double t) const { return momentum_of_velocity(velocity(t), charge_.mass); }

PhasePoint WorldLine::phase(double t) const {
  Vec3 d[2];
  eval_into(t, 1, d);
  return PhasePoint{t, d[0], momentum_of_velocity(d[1], charge_.mass)};
}

WorldLine WorldLine::restricted(double a, double b) const {
  if (!(a < b) || a < lo() || b > hi()) fail(ErrorKind::InvalidArgument, "restriction outside coverage");
  std::vector<std::shared_ptr<const Segment>> out;
  int origin = -1;
  for (std::size_t k = 0; k < segs_.size(); ++k) {
    const Segment& s = *segs_[k];
    if (s.hi() <= a || s.lo() >= b) continue;
    const double lo_ = std::max(a, s.lo()), hi_ = std::min(b, s.hi());
    if (static_cast<int>(k) <= origin_) origin = static_cast<int>(out.size());
    out.push_back(lo_ == s.lo() && hi_ == s.hi() ? segs_[k] : std::make_shared<const Segment>(s.restricted(lo_, hi_)));
  }
  return WorldLineAccess::make(*this, std::move(out), std::max(origin, 0));
}

// ---- fitting ---------------------------------------------------------------

FitResult fit_segment(const ParamSamples& samples, int degree, const FitOptions& opt) {
  if (samples.s.empty()) fail(ErrorKind::InvalidArgument, "fit_segment: no samples");
  return fit_segment(samples, degree, samples.s.front(), samples.s.back(), opt);
}

FitResult fit_segment(const ParamSamples& samples, int degree, double a, double b, const FitOptions& opt) {
  const std::size_t n = samples.s.size();
  if (degree < 0) fail(ErrorKind::InvalidArgument, "fit_segment: negative degree");
  if (samples.y.size() != n) fail(ErrorKind::InvalidArgument, "fit_segment: parameter/value count mismatch");
  if (n < static_cast<std::size_t>(degree) + 1)
    fail(ErrorKind::InvalidArgument, fmt::format("fit_segment: {} samples cannot determine degree {}", n, degree));
  for (std::size_t k = 0; k < n; ++k) {
    if (!std::isfinite(samples.s[k]) || !samples.y[k].allFinite())
      fail(ErrorKind::InvalidArgument, "fit_segment: non-finite sample");
    if (k > 0 && !(samples.s[k] > samples.s[k - 1]))
      fail(ErrorKind::InvalidArgument, "fit_segment: sample parameters must be strictly increasing");
  }
  if (!(a < b)) fail(ErrorKind::InvalidArgument, "fit_segment: empty interval");

  std::vector<double> x(n);
  Eigen::MatrixXd vals(3, static_cast<Eigen::Index>(n));
  double ymax = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    x[k] = cheb::to_unit(samples.s[k], a, b);
    vals.col(static_cast<Eigen::Index>(k)) = samples.y[k];
    ymax = std::max(ymax, samples.y[k].norm());
  }
  Eigen::MatrixXd c = cheb::fit(x, vals, degree);
  if (!c.allFinite()) fail(ErrorKind::FitFailure, "fit_segment: non-finite coefficients");

  Segment seg(a, b, c);
  double res = 0.0;
  for (std::size_t k = 0; k < n; ++k) res = std::max(res, (seg.value(samples.s[k]) - samples.y[k]).norm());
  res /= 1.0 + ymax;
  double tail = c.col(degree).norm();
  if (degree >= 1) tail += c.col(degree - 1).norm();
  tail /= 1.0 + ymax;
  if (res > opt.max_residual)
    fail(ErrorKind::FitFailure, fmt::format("fit_segment: node residual {:.3e} above {:.3e}", res, opt.max_residual));
  return FitResult{std::move(seg), res, tail};
}

// ---- reparameterization ----------------------------------------------------

ReparamResult reparameterize(const ParametricSamples& p, const std::vector<double>& target) {
  const std::size_t n = p.t.size();
  if (n < 2 || p.tau.size() != n || p.rate.size() != n || p.y.size() != n)
    fail(ErrorKind::InvalidArgument, "reparameterize: inconsistent sample arrays");
  for (std::size_t k = 0; k < n; ++k) {
    if (k > 0 && !(p.t[k] > p.t[k - 1])) fail(ErrorKind::InvalidArgument, "reparameterize: t not increasing");
    if (!(p.rate[k] > 0.0))
      fail(ErrorKind::MonotonicityViolation, fmt::format("reparameterize: rate {} at t={} is not positive", p.rate[k], p.t[k]));
    if (k > 0 && !(p.tau[k] > p.tau[k - 1]))
      fail(ErrorKind::MonotonicityViolation, fmt::format("reparameterize: tau decreases near t={}", p.t[k]));
  }

  const double a = p.t.front(), b = p.t.back();
  const int deg = static_cast<int>(std::min<std::size_t>(n - 1, 64));
  std::vector<double> x(n);
  Eigen::MatrixXd tau_vals(1, static_cast<Eigen::Index>(n));
  Eigen::MatrixXd y_vals(3, static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) {
    x[k] = cheb::to_unit(p.t[k], a, b);
    tau_vals(0, static_cast<Eigen::Index>(k)) = p.tau[k];
    y_vals.col(static_cast<Eigen::Index>(k)) = p.y[k];
  }
  const Eigen::VectorXd ctau = cheb::fit(x, tau_vals, deg).row(0).transpose();
  const Eigen::VectorXd dtau = cheb::derivative(ctau.transpose()).row(0).transpose() * (2.0 / (b - a));
  const Eigen::MatrixXd cy = cheb::fit(x, y_vals, deg);

  auto tau_at = [&](double t) { return cheb::clenshaw(ctau, cheb::to_unit(t, a, b)); };
  auto rate_at = [&](double t) { return cheb::clenshaw(dtau, cheb::to_unit(t, a, b)); };

  ReparamResult out;
  out.samples.s.reserve(target.size());
  const double tau_lo = p.tau.front(), tau_hi = p.tau.back();
  for (double ts : target) {
    const double slack = 1e-12 * (1.0 + std::abs(ts));
    if (!(ts >= tau_lo - slack && ts <= tau_hi + slack)) {
      throw OutOfDomainError(fmt::format("reparameterize: target {} outside [{}, {}]", ts, tau_lo, tau_hi), tau_lo,
                             tau_hi, ts < tau_lo ? Side::past : Side::future);
    }
    auto k = static_cast<std::size_t>(std::upper_bound(p.tau.begin(), p.tau.end(), ts) - p.tau.begin());
    std::size_t i0 = k == 0 ? 0 : k - 1;
    std::size_t i1 = std::min(k, n - 1);
    if (i1 == i0) i0 = i0 > 0 ? i0 - 1 : 0, i1 = std::min(i0 + 1, n - 1);
    auto f = [&](double t) { return tau_at(t) - ts; };
    double lo = p.t[i0], hi = p.t[i1];
    double flo = f(lo), fhi = f(hi);
    if ((flo > 0.0) == (fhi > 0.0) && flo != 0.0 && fhi != 0.0) {
      lo = a, hi = b, flo = f(a), fhi = f(b);
    }
    double tstar;
    if (std::abs(flo) <= slack && (flo > 0.0) == (fhi > 0.0)) {
      tstar = lo;
    } else if (std::abs(fhi) <= slack && (flo > 0.0) == (fhi > 0.0)) {
      tstar = hi;
    } else if ((flo > 0.0) == (fhi > 0.0) && flo != 0.0 && fhi != 0.0) {
      fail(ErrorKind::MonotonicityViolation, fmt::format("reparameterize: interpolated tau misses {}", ts));
    } else {
      RootOptions ro;
      ro.guess = p.t[i0] + (ts - p.tau[i0]) / p.rate[i0];
      tstar = safeguarded_newton([&](double t) { return std::pair{f(t), rate_at(t)}; }, lo, hi, flo, fhi, ro);
    }
    if (!(rate_at(tstar) > 0.0))
      fail(ErrorKind::MonotonicityViolation, fmt::format("reparameterize: interpolated rate not positive at t={}", tstar));
    const double res = std::abs(f(tstar));
    out.max_residual = std::max(out.max_residual, res);
    if (res > slack)
      fail(ErrorKind::InternalInvariant, fmt::format("reparameterize: residual {:.3e} at target {}", res, ts));
    Vec3 y;
    cheb::clenshaw(cy, cheb::to_unit(tstar, a, b), y);
    out.samples.s.push_back(ts);
    out.samples.y.push_back(y);
    out.t_of.push_back(tstar);
  }
  return out;
}

// ---- appending -------------------------------------------------------------

AppendResult append_segment(const WorldLine& w, Segment s, Side side) {
  if (w.empty()) {
    WorldLine fresh(w.charge(), {std::move(s)}, w.join_order(), w.join_tol());
    return AppendResult{std::move(fresh), JoinReport{}};
  }
  const double edge = side == Side::future ? w.hi() : w.lo();
  const double mine = side == Side::future ? s.lo() : s.hi();
  if (std::abs(mine - edge) > 1e-12 * (1.0 + std::abs(edge)))
    fail(ErrorKind::IntervalMismatch,
         fmt::format("segment {} {} does not abut coverage edge {} (gap {:.3e})", side == Side::future ? "start" : "end",
                     mine, edge, mine - edge));
  if (mine != edge) {
    s = side == Side::future ? Segment(edge, s.hi(), s.basis_lo(), s.basis_hi(), s.coeffs())
                             : Segment(s.lo(), edge, s.basis_lo(), s.basis_hi(), s.coeffs());
  }

  JoinReport r;
  auto fresh = std::make_shared<const Segment>(std::move(s));
  if (side == Side::future) {
    r = join_mismatch(w.segment(w.size() - 1), *fresh, edge, w.join_order());
  } else {
    r = join_mismatch(*fresh, w.segment(0), edge, w.join_order());
  }
  if (r.max() > w.join_tol()) throw_smoothness(r, w.join_tol());
  return AppendResult{WorldLineAccess::append(w, std::move(fresh), side), r};
}

}  // namespace wfdelay
