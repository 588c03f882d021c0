#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "wfdelay/delayfields.hpp"
#include "wfdelay/solution.hpp"

namespace wfdelay {

struct GuardParams {
  double d = kDefaultMinSeparation;  // minimum separation
  double v_bar = 0.99;               // speed cap
  int n_c = 3;                       // compatibility order checked by the validator
  double join_tol = 1e-6;
  int step_degree = kDefaultDegree;
  double compat_tol = 1e-7;   // relative defect allowed in the compatibility conditions
  double cone_tol = 1e-10;    // light-cone chaining residual
  double fit_tol = 1e-11;     // held-out residual that triggers subdivision of a step piece
  int max_subdivisions = 6;
  int gen_order = 7;          // derivative order matched at both ends of a generated strip
};

void check_guards(const GuardParams& g);

struct ValidationEntry {
  std::string condition;
  bool pass = true;
  double residual = 0.0;
  double location = 0.0;  // time where the worst residual occurred
};

struct ValidationReport {
  std::vector<ValidationEntry> entries;
  bool ok() const;
  // "condition: residual at t" for the failing entries, or empty.
  std::string summary() const;
};

// Particle index (0 or 1) playing the role of j: the strip that starts first.
int seed_index(const InitialData& data);

ValidationReport validate_initial_data(const InitialData& data, const GuardParams& g);

struct Anchor {
  double t = 0.0;
  Vec3 q = Vec3::Zero();
  Vec3 v = Vec3::Zero();  // velocity at the anchor; the equations leave it free
};

// Point on the forward cone of the seed start and the backward cone of the seed end,
// found along the ray from the midpoint of the two seed positions.
Anchor cone_intersection_point(const WorldLine& seed, const Vec3& direction);

// Builds the partner strip from a seed strip. The second anchor is implied by the
// equation of motion of the seed at its end; when given it must agree.
InitialData generate_initial_data(const WorldLine& seed, const ChargeParams& partner, const Anchor& first,
                                  const std::optional<Anchor>& second, const GuardParams& g);

// One half-step: extends the lagging particle on the given side.
SolutionPair half_step(SolutionPair sol, Side side, const GuardParams& g);
// One leapfrog exchange (two half-steps).
SolutionPair advance_step(SolutionPair sol, Side side, const GuardParams& g);

struct Horizons {
  double past = 0.0;
  double future = 0.0;
};

SolutionPair construct(const InitialData& data, const GuardParams& g, const Horizons& h);

// Max relative equation-of-motion defect of particle idx at n points of [a, b].
double eom_residual(const SolutionPair& sol, int idx, double a, double b, int n);

}  // namespace wfdelay
