#include "wfdelay/solution.hpp"

#include <algorithm>

#include "wfdelay/delayfields.hpp"

namespace wfdelay {

std::string_view to_string(StopReason r) {
  switch (r) {
    case StopReason::reached_horizon: return "reached-horizon";
    case StopReason::guard_speed: return "guard-speed";
    case StopReason::guard_separation: return "guard-separation";
    case StopReason::out_of_domain: return "out-of-domain";
  }
  return "reached-horizon";
}

StopReason stop_reason_from_string(std::string_view s) {
  if (s == "reached-horizon") return StopReason::reached_horizon;
  if (s == "guard-speed") return StopReason::guard_speed;
  if (s == "guard-separation") return StopReason::guard_separation;
  if (s == "out-of-domain") return StopReason::out_of_domain;
  fail(ErrorKind::SchemaError, "unknown stop reason '" + std::string(s) + "'");
}

std::array<Interval, 2> compute_domains(const std::array<WorldLine, 2>& lines) {
  std::array<Interval, 2> d;
  for (int i = 0; i < 2; ++i) {
    const WorldLine& wi = lines[static_cast<std::size_t>(i)];
    const WorldLine& wj = lines[static_cast<std::size_t>(1 - i)];
    double lo = wi.lo(), hi = wi.hi();
    try {
      lo = std::max(lo, delay_time(wi, wj.lo(), wj.position(wj.lo()), Sign::advanced).t_delayed);
    } catch (const OutOfDomainError& e) {
      if (e.failing_side() == Side::future) lo = hi + 1.0;  // nothing of i sees j's start
    }
    try {
      hi = std::min(hi, delay_time(wi, wj.hi(), wj.position(wj.hi()), Sign::retarded).t_delayed);
    } catch (const OutOfDomainError& e) {
      if (e.failing_side() == Side::past) hi = lo - 1.0;
    }
    d[static_cast<std::size_t>(i)] = Interval{lo, hi};
  }
  return d;
}

SolutionPair solution_from_lines(std::array<WorldLine, 2> lines) {
  SolutionPair s;
  s.lines = std::move(lines);
  s.domains = compute_domains(s.lines);
  return s;
}

}  // namespace wfdelay
