#include "wfdelay/jet.hpp"

#include <algorithm>
#include <cmath>

#include "wfdelay/errors.hpp"
#include "wfdelay/trajectory.hpp"

namespace wfdelay {

namespace {

int common(const Jet& a, const Jet& b) { return std::min(a.order(), b.order()); }
int common(const VecJet& a, const VecJet& b) { return std::min(a.order(), b.order()); }

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace

Jet::Jet(int order, double c0) : c_(static_cast<std::size_t>(std::max(order, 0)) + 1, 0.0) { c_[0] = c0; }

Jet Jet::variable(int order, double t0) {
  Jet j(order, t0);
  if (order >= 1) j[1] = 1.0;
  return j;
}

Jet Jet::truncated(int order) const {
  Jet j(order);
  for (int k = 0; k <= std::min(order, this->order()); ++k) j[k] = (*this)[k];
  return j;
}

Jet Jet::derivative() const {
  Jet d(std::max(order() - 1, 0));
  for (int k = 1; k <= order(); ++k) d[k - 1] = k * (*this)[k];
  return d;
}

double Jet::derivative_value(int k) const { return factorial(k) * (*this)[k]; }

Jet operator+(const Jet& a, const Jet& b) {
  Jet r(common(a, b));
  for (int k = 0; k <= r.order(); ++k) r[k] = a[k] + b[k];
  return r;
}

Jet operator-(const Jet& a, const Jet& b) {
  Jet r(common(a, b));
  for (int k = 0; k <= r.order(); ++k) r[k] = a[k] - b[k];
  return r;
}

Jet operator-(const Jet& a) { return a * -1.0; }

Jet operator*(const Jet& a, const Jet& b) {
  Jet r(common(a, b));
  for (int k = 0; k <= r.order(); ++k) {
    double s = 0.0;
    for (int i = 0; i <= k; ++i) s += a[i] * b[k - i];
    r[k] = s;
  }
  return r;
}

Jet operator/(const Jet& a, const Jet& b) {
  if (b[0] == 0.0) fail(ErrorKind::InternalInvariant, "jet division by a series with zero constant term");
  Jet r(common(a, b));
  for (int k = 0; k <= r.order(); ++k) {
    double s = a[k];
    for (int i = 1; i <= k; ++i) s -= b[i] * r[k - i];
    r[k] = s / b[0];
  }
  return r;
}

Jet operator+(const Jet& a, double s) {
  Jet r = a;
  r[0] += s;
  return r;
}

Jet operator*(const Jet& a, double s) {
  Jet r = a;
  for (int k = 0; k <= r.order(); ++k) r[k] *= s;
  return r;
}

Jet operator*(double s, const Jet& a) { return a * s; }

Jet sqrt(const Jet& a) {
  if (!(a[0] > 0.0)) fail(ErrorKind::InternalInvariant, "jet sqrt of a non-positive series");
  Jet r(a.order());
  r[0] = std::sqrt(a[0]);
  for (int k = 1; k <= r.order(); ++k) {
    double s = a[k];
    for (int i = 1; i < k; ++i) s -= r[i] * r[k - i];
    r[k] = s / (2.0 * r[0]);
  }
  return r;
}

Jet pow(const Jet& a, double alpha) {
  if (!(a[0] > 0.0)) fail(ErrorKind::InternalInvariant, "jet pow of a non-positive series");
  Jet r(a.order());
  r[0] = std::pow(a[0], alpha);
  // k a_0 r_k = sum_{i=1..k} (alpha i - (k - i)) a_i r_{k-i}
  for (int k = 1; k <= r.order(); ++k) {
    double s = 0.0;
    for (int i = 1; i <= k; ++i) s += (alpha * i - (k - i)) * a[i] * r[k - i];
    r[k] = s / (k * a[0]);
  }
  return r;
}

Jet compose(const Jet& outer, const Jet& inner) {
  const int order = inner.order();
  Jet r(order, outer[outer.order()]);
  Jet g = inner;
  g[0] = 0.0;
  for (int m = outer.order() - 1; m >= 0; --m) r = r * g + outer[m];
  return r;
}

Jet revert(const Jet& f) {
  if (f.order() < 1 || f[1] == 0.0) fail(ErrorKind::InternalInvariant, "series reversion needs f'(0) != 0");
  const Jet h = Jet::variable(f.order());
  Jet g = h * (1.0 / f[1]);
  for (int it = 1; it < f.order(); ++it) {
    Jet e = compose(f, g) - h;
    e[0] = 0.0;
    g = g - e * (1.0 / f[1]);
  }
  return g;
}

// ---- vector jets -----------------------------------------------------------

VecJet::VecJet(int order, const Vec3& c0) : c_(static_cast<std::size_t>(std::max(order, 0)) + 1, Vec3::Zero()) {
  c_[0] = c0;
}

VecJet::VecJet(std::vector<Vec3> coeffs) : c_(std::move(coeffs)) {
  if (c_.empty()) c_.push_back(Vec3::Zero());
}

VecJet VecJet::truncated(int order) const {
  VecJet j(order);
  for (int k = 0; k <= std::min(order, this->order()); ++k) j[k] = (*this)[k];
  return j;
}

VecJet VecJet::derivative() const {
  VecJet d(std::max(order() - 1, 0));
  for (int k = 1; k <= order(); ++k) d[k - 1] = k * (*this)[k];
  return d;
}

Vec3 VecJet::derivative_value(int k) const { return factorial(k) * (*this)[k]; }

VecJet operator+(const VecJet& a, const VecJet& b) {
  VecJet r(common(a, b));
  for (int k = 0; k <= r.order(); ++k) r[k] = a[k] + b[k];
  return r;
}

VecJet operator-(const VecJet& a, const VecJet& b) {
  VecJet r(common(a, b));
  for (int k = 0; k <= r.order(); ++k) r[k] = a[k] - b[k];
  return r;
}

VecJet operator-(const VecJet& a) { return -1.0 * a; }

VecJet operator*(const Jet& s, const VecJet& a) {
  VecJet r(std::min(s.order(), a.order()));
  for (int k = 0; k <= r.order(); ++k) {
    Vec3 acc = Vec3::Zero();
    for (int i = 0; i <= k; ++i) acc += s[i] * a[k - i];
    r[k] = acc;
  }
  return r;
}

VecJet operator*(double s, const VecJet& a) {
  VecJet r = a;
  for (int k = 0; k <= r.order(); ++k) r[k] *= s;
  return r;
}

Jet dot(const VecJet& a, const VecJet& b) {
  Jet r(common(a, b));
  for (int k = 0; k <= r.order(); ++k) {
    double s = 0.0;
    for (int i = 0; i <= k; ++i) s += a[i].dot(b[k - i]);
    r[k] = s;
  }
  return r;
}

Jet norm(const VecJet& a) { return sqrt(dot(a, a)); }

VecJet compose(const VecJet& outer, const Jet& inner) {
  const int order = inner.order();
  VecJet r(order, outer[outer.order()]);
  Jet g = inner;
  g[0] = 0.0;
  for (int m = outer.order() - 1; m >= 0; --m) {
    r = g * r;
    r[0] += outer[m];
  }
  return r;
}

VecJet coulomb_force(const VecJet& x) {
  const double r0 = x[0].norm();
  if (r0 < kTinyNorm) fail(ErrorKind::SingularSeparation, "coulomb_force at zero separation");
  return pow(dot(x, x), -1.5) * x;
}

VecJet coulomb_inverse(const VecJet& y) {
  const double r0 = y[0].norm();
  if (r0 < kTinyNorm) fail(ErrorKind::SingularSeparation, "coulomb_inverse of zero field");
  return pow(dot(y, y), -0.75) * y;
}

VecJet momentum_of_velocity(const VecJet& v, double m) {
  const double v2 = v[0].squaredNorm();
  if (v2 >= 1.0) fail(ErrorKind::SuperluminalVelocity, "jet velocity reaches the speed of light");
  Jet one_minus = Jet(v.order(), 1.0) - dot(v, v);
  return m * (pow(one_minus, -0.5) * v);
}

VecJet taylor(const Segment& s, double t, int order) {
  VecJet j(order);
  double fact = 1.0;
  for (int k = 0; k <= order; ++k) {
    if (k > 0) fact *= k;
    j[k] = s.value(t, k) / fact;
  }
  return j;
}

VecJet taylor(const WorldLine& w, double t, int order) { return taylor(w.segment(w.locate(t)), t, order); }

}  // namespace wfdelay
