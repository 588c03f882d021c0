#include "wfdelay/kinematics.hpp"

#include <cmath>
#include <string>

#include "wfdelay/errors.hpp"

namespace wfdelay {

namespace {

bool finite(const Vec3& x) { return x.allFinite(); }

}  // namespace

void check_charge(const ChargeParams& c) {
  if (!(c.mass > 0.0) || !std::isfinite(c.mass))
    fail(ErrorKind::InvalidArgument, "mass must be positive and finite");
  if (c.charge == 0.0 || !std::isfinite(c.charge))
    fail(ErrorKind::InvalidArgument, "charge must be nonzero and finite");
  if (c.label != 1 && c.label != 2)
    fail(ErrorKind::InvalidArgument, "particle label must be 1 or 2");
}

Vec3 velocity_of_momentum(const Vec3& p, double m) {
  if (!finite(p) || !(m > 0.0) || !std::isfinite(m))
    fail(ErrorKind::InvalidArgument, "velocity_of_momentum needs finite p and m > 0");
  // sqrt(m^2 + p^2) via hypot keeps |p| ~ 1e300 from overflowing
  return p / std::hypot(m, p.norm());
}

Vec3 momentum_of_velocity(const Vec3& v, double m) {
  if (!finite(v) || !(m > 0.0) || !std::isfinite(m))
    fail(ErrorKind::InvalidArgument, "momentum_of_velocity needs finite v and m > 0");
  const double v2 = v.squaredNorm();
  if (v2 >= 1.0) fail(ErrorKind::SuperluminalVelocity, "speed " + std::to_string(std::sqrt(v2)) + " >= 1");
  return m * v / std::sqrt(1.0 - v2);
}

double lorentz_gamma(double speed) {
  if (!std::isfinite(speed) || speed < 0.0)
    fail(ErrorKind::InvalidArgument, "lorentz_gamma needs a finite non-negative speed");
  if (speed >= 1.0) fail(ErrorKind::SuperluminalVelocity, "speed " + std::to_string(speed) + " >= 1");
  return 1.0 / std::sqrt(1.0 - speed * speed);
}

Vec3 coulomb_force(const Vec3& x) {
  if (!finite(x)) fail(ErrorKind::InvalidArgument, "coulomb_force of non-finite vector");
  const double r = x.norm();
  if (r < kTinyNorm) fail(ErrorKind::SingularSeparation, "coulomb_force at zero separation");
  return x / (r * r * r);
}

Vec3 coulomb_inverse(const Vec3& y) {
  if (!finite(y)) fail(ErrorKind::InvalidArgument, "coulomb_inverse of non-finite vector");
  const double r = y.norm();
  if (r < kTinyNorm) fail(ErrorKind::SingularSeparation, "coulomb_inverse of zero field");
  return y / (r * std::sqrt(r));
}

}  // namespace wfdelay
