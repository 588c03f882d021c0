#pragma once

#include <array>
#include <string_view>
#include <vector>

#include "wfdelay/trajectory.hpp"

namespace wfdelay {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool empty() const { return !(lo <= hi); }
  bool contains(double t) const { return t >= lo && t <= hi; }
};

enum class StopReason { reached_horizon, guard_speed, guard_separation, out_of_domain };

std::string_view to_string(StopReason r);
StopReason stop_reason_from_string(std::string_view s);

// Diagnostics for one half-step of the leapfrog exchange.
struct StepReport {
  Side side = Side::future;
  int particle = 0;            // label of the extended particle
  Interval source;             // partner times used as the parameter t
  Interval created;            // newly covered times of the extended particle
  int pieces = 0;              // segments appended
  double join_mismatch[4] = {0.0, 0.0, 0.0, 0.0};  // worst relative defect per order 0..3
  double fit_residual = 0.0;   // held-out residual of the reparameterized fit
  double eom_residual = 0.0;   // partner equation-of-motion residual on the source interval
  bool truncated = false;
};

struct SolutionPair {
  std::array<WorldLine, 2> lines;  // index 0 is particle 1
  std::array<Interval, 2> domains;
  StopReason stop_reason = StopReason::reached_horizon;
  StopReason future_stop = StopReason::reached_horizon;
  StopReason past_stop = StopReason::reached_horizon;
  bool future_open = true;  // false once a guard or domain stop ended that side
  bool past_open = true;
  std::vector<StepReport> steps;
};

// Strip initial data for both particles; strips[0] belongs to particle 1.
struct InitialData {
  std::array<WorldLine, 2> strips;
  std::array<double, 2> t0{0.0, 0.0};  // t_i^(0) per particle
  std::array<double, 2> t1{0.0, 0.0};  // t_i^(1) per particle
};

// D_i = [max(S_i, t_i^+(S_j)), min(T_i, t_i^-(T_j))].
std::array<Interval, 2> compute_domains(const std::array<WorldLine, 2>& lines);

SolutionPair solution_from_lines(std::array<WorldLine, 2> lines);

}  // namespace wfdelay
