#pragma once

#include <array>
#include <string_view>

#include "wfdelay/construction.hpp"

namespace wfdelay {

// Compactly supported profile on u in [-1, 1], zero outside: (1 - u^2)^8.
// It is C^7 at the edges and exact in a degree-16 basis.
enum class BumpShape { polynomial };

std::string_view to_string(BumpShape b);
BumpShape bump_shape_from_string(std::string_view s);

double bump_value(BumpShape b, double u);
// max |d/du bump| over [-1, 1].
double bump_slope_max(BumpShape b);

struct PerturbSpec {
  double t_star = 0.0;  // phase points here stay untouched
  double s = 0.0;       // support centre
  double delta = 0.0;   // support half-width
  double lambda = 0.0;  // sup |d'| of the added displacement
  BumpShape shape = BumpShape::polynomial;
  Vec3 direction = Vec3::UnitZ();
  std::array<bool, 2> particles{true, true};
};

struct PerturbResult {
  InitialData data;
  ValidationReport report;  // validation re-run on the perturbed data
  double max_speed = 0.0;   // over the modified segments
};

// Adds lambda-scaled bumps supported on [s - delta, s + delta] to the selected strips.
// Segments outside the support are kept as restricted copies, so every value outside
// (s - delta, s + delta) is bit-identical to the input.
PerturbResult perturb_initial_data(const InitialData& data, const PerturbSpec& spec, const GuardParams& g);

}  // namespace wfdelay
