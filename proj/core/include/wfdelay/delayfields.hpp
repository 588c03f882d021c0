#pragma once

#include <limits>
#include <string_view>

#include "wfdelay/jet.hpp"
#include "wfdelay/kinematics.hpp"
#include "wfdelay/trajectory.hpp"

namespace wfdelay {

enum class Sign { retarded = -1, advanced = +1 };

inline int sgn(Sign s) { return s == Sign::advanced ? 1 : -1; }
inline Sign opposite(Sign s) { return s == Sign::advanced ? Sign::retarded : Sign::advanced; }
std::string_view to_string(Sign s);

inline constexpr double kDefaultMinSeparation = 1e-3;

struct DelayResult {
  double t_delayed = 0.0;
  Vec3 n = Vec3::Zero();  // unit vector from the source point to the field point
  double separation = 0.0;
  Sign sign = Sign::advanced;
  double rate = std::numeric_limits<double>::quiet_NaN();  // filled by delay_rate callers when needed
};

struct FieldPair {
  Vec3 electric = Vec3::Zero();
  Vec3 magnetic = Vec3::Zero();
};

inline constexpr double kDelayEdgeTol = 0.5e-12;

// Solves s = t +- |x - q(s)| on the source worldline. A root within edge_tol (1 + |t|)
// beyond the coverage boundary is reported at the boundary.
DelayResult delay_time(const WorldLine& source, double t, const Vec3& x, Sign sign, double edge_tol = kDelayEdgeTol);

// d t_delayed / dt for an observer moving with the given velocity.
double delay_rate(const WorldLine& source, const Vec3& observer_velocity, const DelayResult& d);

FieldPair coulomb_delayed_field(const WorldLine& source, double e_src, double t, const Vec3& x, Sign sign,
                                double d_min = kDefaultMinSeparation);
FieldPair lienard_wiechert_field(const WorldLine& source, double e_src, double t, const Vec3& x, Sign sign,
                                 double d_min = kDefaultMinSeparation);

struct Rhs {
  Vec3 qdot;
  Vec3 pdot;
};

Rhs toy_rhs(const PhasePoint& state, const ChargeParams& self, const ChargeParams& partner,
            const WorldLine& partner_line, double d_min = kDefaultMinSeparation);

// Lorentz force of the partner's advanced plus retarded fields; the toy
// variant keeps only the Coulomb-delayed parts.
Vec3 wf_force(bool full, const PhasePoint& state, const ChargeParams& self, const ChargeParams& partner,
              const WorldLine& partner_line, double d_min = kDefaultMinSeparation);

// Diagnostics comparing the full field with its Coulomb-delayed part at a field point.
// Derivatives are central differences with step 1e-5 times the delayed separation;
// curl and divergence are scaled by separation / |E_parallel|.
struct LongitudinalCheck {
  double deviation = 0.0;   // |E_LW - E_par| / |E_par|
  double curl = 0.0;        // |curl E_par|, relative
  double divergence = 0.0;  // |div (E_LW - E_par)|, relative
};

LongitudinalCheck longitudinal_check(const WorldLine& source, double e_src, double t, const Vec3& x, Sign sign,
                                     double d_min = kDefaultMinSeparation);

// Light-cone delay as a jet in the observer's local time h (t = t0 + h).
struct DelayJet {
  double tau0 = 0.0;  // delayed time at h = 0
  Jet sigma;          // tau(h) - tau0
  VecJet partner;     // partner position at tau(h)
};

DelayJet delay_jet(const VecJet& partner_taylor, double tau0, const VecJet& observer, double t0, Sign sign);
DelayJet delay_jet(const WorldLine& partner, const VecJet& observer, double t0, Sign sign,
                   double edge_tol = kDelayEdgeTol);

// ee * (F(x - q_adv) + F(x - q_ret)) along the observer jet.
VecJet force_jet(const WorldLine& partner, const VecJet& observer, double t0, double ee);

}  // namespace wfdelay
