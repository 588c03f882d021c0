#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace wfdelay {

using Vec3 = Eigen::Vector3d;

struct ChargeParams {
  double mass = 1.0;
  double charge = 1.0;
  int label = 1;  // particle index, 1 or 2
};

void check_charge(const ChargeParams& c);

struct PhasePoint {
  double time = 0.0;
  Vec3 position = Vec3::Zero();
  Vec3 momentum = Vec3::Zero();
};

// Norms below this are treated as zero separations.
inline constexpr double kTinyNorm = 1e-300;

Vec3 velocity_of_momentum(const Vec3& p, double m);
Vec3 momentum_of_velocity(const Vec3& v, double m);
double lorentz_gamma(double speed);

// F(x) = x / |x|^3 and its global inverse I(y) = y / |y|^(3/2).
Vec3 coulomb_force(const Vec3& x);
Vec3 coulomb_inverse(const Vec3& y);

}  // namespace wfdelay
