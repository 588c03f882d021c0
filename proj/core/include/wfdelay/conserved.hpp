#pragma once

#include <vector>

#include "wfdelay/solution.hpp"

namespace wfdelay {

struct QuadratureConfig {
  double rel_tol = 1e-12;
  double abs_tol = 1e-14;
  int max_subdivisions = 15;  // bisection depth of the adaptive panels
};

void check_quadrature(const QuadratureConfig& q);

struct EnergyBreakdown {
  double t1 = 0.0, t2 = 0.0;
  double kinetic = 0.0;      // sum of sqrt(p^2 + m^2)
  double potential = 0.0;    // 1/2 sum e_i e_j / |q_i - q_j(delayed)| over both signs
  double interaction = 0.0;  // 1/2 sum of the signed light-cone integrals
  double total = 0.0;
  double quad_error = 0.0;   // summed error estimates of the integrals
};

// H(t1, t2). The integral paired with the partner's advanced (retarded) image runs from
// t_i to the retarded (advanced) time of particle i seen from (t_j, q_j(t_j)).
EnergyBreakdown energy(const SolutionPair& sol, double t1, double t2, const QuadratureConfig& q = {});

struct DriftReport {
  std::vector<EnergyBreakdown> rows;  // admissible pairs, grid_1 outer, grid_2 inner
  std::size_t skipped = 0;            // grid pairs outside the domains
  double reference = 0.0;             // H at the first admissible pair
  double max_drift = 0.0;             // relative to |reference|
  double mean_drift = 0.0;
};

DriftReport energy_drift(const SolutionPair& sol, const std::vector<double>& grid_1, const std::vector<double>& grid_2,
                         const QuadratureConfig& q = {});

}  // namespace wfdelay
