#pragma once

#include <vector>

#include "wfdelay/kinematics.hpp"

namespace wfdelay {

class Segment;
class WorldLine;

// Truncated Taylor series c_0 + c_1 h + ... + c_K h^K in a local variable h.
class Jet {
 public:
  Jet() : c_(1, 0.0) {}
  explicit Jet(int order, double c0 = 0.0);
  static Jet variable(int order, double t0 = 0.0);  // t0 + h

  int order() const { return static_cast<int>(c_.size()) - 1; }
  double& operator[](int k) { return c_[static_cast<std::size_t>(k)]; }
  double operator[](int k) const { return c_[static_cast<std::size_t>(k)]; }
  const std::vector<double>& coeffs() const { return c_; }

  Jet truncated(int order) const;
  Jet derivative() const;
  double derivative_value(int k) const;  // k! c_k

 private:
  std::vector<double> c_;
};

Jet operator+(const Jet& a, const Jet& b);
Jet operator-(const Jet& a, const Jet& b);
Jet operator-(const Jet& a);
Jet operator*(const Jet& a, const Jet& b);
Jet operator/(const Jet& a, const Jet& b);
Jet operator+(const Jet& a, double s);
Jet operator*(const Jet& a, double s);
Jet operator*(double s, const Jet& a);
Jet sqrt(const Jet& a);
Jet pow(const Jet& a, double alpha);
// outer(inner(h)); needs inner[0] == 0
Jet compose(const Jet& outer, const Jet& inner);
// g with f(g(h)) = h; needs f[0] == 0 and f[1] != 0
Jet revert(const Jet& f);

class VecJet {
 public:
  VecJet() : c_(1, Vec3::Zero()) {}
  explicit VecJet(int order, const Vec3& c0 = Vec3::Zero());
  explicit VecJet(std::vector<Vec3> coeffs);

  int order() const { return static_cast<int>(c_.size()) - 1; }
  Vec3& operator[](int k) { return c_[static_cast<std::size_t>(k)]; }
  const Vec3& operator[](int k) const { return c_[static_cast<std::size_t>(k)]; }
  const std::vector<Vec3>& coeffs() const { return c_; }

  VecJet truncated(int order) const;
  VecJet derivative() const;
  Vec3 derivative_value(int k) const;

 private:
  std::vector<Vec3> c_;
};

VecJet operator+(const VecJet& a, const VecJet& b);
VecJet operator-(const VecJet& a, const VecJet& b);
VecJet operator-(const VecJet& a);
VecJet operator*(const Jet& s, const VecJet& a);
VecJet operator*(double s, const VecJet& a);
Jet dot(const VecJet& a, const VecJet& b);
Jet norm(const VecJet& a);
VecJet compose(const VecJet& outer, const Jet& inner);

VecJet coulomb_force(const VecJet& x);
VecJet coulomb_inverse(const VecJet& y);
// p = m v / sqrt(1 - v.v)
VecJet momentum_of_velocity(const VecJet& v, double m);

// Taylor coefficients of a segment (or worldline) around t.
VecJet taylor(const Segment& s, double t, int order);
VecJet taylor(const WorldLine& w, double t, int order);

}  // namespace wfdelay
