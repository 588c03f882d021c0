#include <algorithm>
#include <cmath>
#include <iostream>
#include <random>
#include <string>

#include <fmt/format.h>

#include <wfdelay/chebyshev.hpp>
#include <wfdelay/delayfields.hpp>
#include <wfdelay/kinematics.hpp>

#include "wfdelay_cli/cli.hpp"

namespace fs = std::filesystem;

namespace wfdelay::cli {
namespace {

[[noreturn]] void schema(const std::string& what) { fail(ErrorKind::SchemaError, what); }

void check_keys(const Json& j, std::string_view ctx, std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) schema(fmt::format("{}: expected an object", ctx));
  for (const auto& [key, _] : j.items())
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      schema(fmt::format("{}.{}: unknown field", ctx, key));
}

template <class T>
T get(const Json& j, const char* key, T def, std::string_view ctx) {
  if (!j.contains(key)) return def;
  return parse_as<T>(j.at(key), fmt::format("{}.{}", ctx, key));
}

template <class T>
T require(const Json& j, const char* key, std::string_view ctx) {
  if (!j.contains(key)) schema(fmt::format("{}.{}: missing field", ctx, key));
  return parse_as<T>(j.at(key), fmt::format("{}.{}", ctx, key));
}

Vec3 get_vec(const Json& j, const char* key, const Vec3& def, std::string_view ctx) {
  const auto v = get<std::vector<double>>(j, key, {def.x(), def.y(), def.z()}, ctx);
  if (v.size() != 3) schema(fmt::format("{}.{}: expected three numbers", ctx, key));
  return Vec3(v[0], v[1], v[2]);
}

struct Context {
  fs::path base_dir;
  RunOptions opt;
  RunResult result;

  fs::path resolve(const std::string& p) const {
    constexpr std::string_view out_prefix = "${out_dir}/";
    if (p.starts_with(out_prefix)) return opt.out_dir / p.substr(out_prefix.size());
    const fs::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  }

  void log(const std::string& msg) const {
    if (opt.verbose) std::cerr << "wfdelay: " << msg << '\n';
  }

  void write(const std::string& name, std::string_view text) {
    const fs::path path = opt.out_dir / name;
    write_text_file(path, text);
    result.outputs.push_back(name);
    log("wrote " + path.string());
  }
};

struct SchildInput {
  double m1 = 1.0, m2 = 1.0, e1 = 1.0, e2 = -1.0, r1 = 1.0;
};

SchildInput schild_input(const Json& j, std::string_view ctx, std::initializer_list<std::string_view> extra = {}) {
  std::vector<std::string_view> keys{"m1", "m2", "e1", "e2", "r1"};
  keys.insert(keys.end(), extra.begin(), extra.end());
  if (!j.is_object()) schema(fmt::format("{}: expected an object", ctx));
  for (const auto& [key, _] : j.items())
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) schema(fmt::format("{}.{}: unknown field", ctx, key));
  SchildInput s;
  s.m1 = get(j, "m1", s.m1, ctx);
  s.m2 = get(j, "m2", s.m2, ctx);
  s.e1 = get(j, "e1", s.e1, ctx);
  s.e2 = get(j, "e2", s.e2, ctx);
  s.r1 = get(j, "r1", s.r1, ctx);
  return s;
}

SchildSolution solve(const SchildInput& s) { return schild_solve_report(s.m1, s.m2, s.e1, s.e2, s.r1); }

GuardParams guards(const Json& scenario, GuardParams def = {}) {
  if (!scenario.contains("guards")) return def;
  Json merged = def;
  const Json& g = scenario.at("guards");
  check_keys(g, "guards", {"d", "v_bar", "n_c", "join_tol", "step_degree", "compat_tol", "cone_tol", "fit_tol",
                           "max_subdivisions", "gen_order"});
  merged.update(g);
  GuardParams out = parse_as<GuardParams>(merged, "guards");
  check_guards(out);
  return out;
}

Json summary_base(std::string_view kind) { return Json{{"kind", kind}, {"status", "ok"}}; }

double common_lo(const SolutionPair& s) { return std::max(s.lines[0].lo(), s.lines[1].lo()); }
double common_hi(const SolutionPair& s) { return std::min(s.lines[0].hi(), s.lines[1].hi()); }

// Trajectory sampling step: explicit, else 400 intervals over the common coverage.
double csv_step(const Json& j, const SolutionPair& s, std::string_view ctx) {
  if (j.contains("csv_dt")) {
    const double dt = require<double>(j, "csv_dt", ctx);
    if (!(dt > 0.0)) fail(ErrorKind::InvalidArgument, fmt::format("{}.csv_dt must be positive", ctx));
    return dt;
  }
  const double span = common_hi(s) - common_lo(s);
  return span > 0.0 ? span / 400.0 : 1.0;
}

// ---------------------------------------------------------------- schild

void run_schild(const Json& j, Context& cx) {
  check_keys(j, "scenario", {"kind", "m1", "m2", "e1", "e2", "r1", "horizon_periods", "residual_samples",
                             "samples_per_period", "segments_per_period"});
  SchildInput s;
  s.m1 = get(j, "m1", s.m1, "scenario");
  s.m2 = get(j, "m2", s.m2, "scenario");
  s.e1 = get(j, "e1", s.e1, "scenario");
  s.e2 = get(j, "e2", s.e2, "scenario");
  s.r1 = get(j, "r1", s.r1, "scenario");
  const int periods = get(j, "horizon_periods", 3, "scenario");
  const int residual_samples = get(j, "residual_samples", 1000, "scenario");
  const int per_period = get(j, "samples_per_period", 100, "scenario");
  const int segments = get(j, "segments_per_period", 8, "scenario");
  if (periods < 1 || residual_samples < 1 || per_period < 1 || segments < 1)
    fail(ErrorKind::InvalidArgument, "scenario: counts must be positive");

  cx.log("solving for the circular orbit");
  const SchildSolution sol = solve(s);
  const SchildParams& p = sol.params;
  const SchildChecks checks = schild_checks(p);
  const double period = schild_period(p);
  const double scale = schild_force_scale(p);

  // the CSV holds residuals relative to the centripetal force scale
  std::vector<ResidualSample> samples = schild_residual_samples(p, residual_samples);
  double worst = 0.0;
  for (auto& r : samples) {
    r.residual_1 /= scale;
    r.residual_2 /= scale;
    worst = std::max({worst, r.residual_1, r.residual_2});
  }

  cx.log(fmt::format("building worldlines over {} periods", periods));
  const SolutionPair traj = schild_trajectories(p, 0.0, periods * period, segments);
  const double delay_err = schild_delay_check(p, traj);

  Json params{{"params", p},
              {"period", period},
              {"force_scale", scale},
              {"sign_changes", sol.sign_changes},
              {"omega_window", sol.omega_window},
              {"checks",
               {{"light_cone", checks.light_cone},
                {"balance_1", checks.balance_1},
                {"balance_2", checks.balance_2},
                {"equal_gamma_r", checks.equal_gamma_r},
                {"delay_squared_alt", checks.delay_squared_alt},
                {"omega_dt", checks.omega_dt},
                {"in_window", checks.in_window},
                {"subluminal", checks.subluminal},
                {"attractive", checks.attractive}}},
              {"residual_max", worst},
              {"delay_check", delay_err}};
  cx.write("schild_params.json", dump_json(params));
  cx.write("schild_solution.json", dump_json(Json(traj)));
  cx.write("schild_residual.csv", residual_csv(samples));
  cx.write("schild_trajectory.csv", trajectory_csv(traj, period / per_period));

  Json& out = cx.result.summary;
  out["omega"] = p.omega;
  out["delta_t"] = p.delta_t;
  out["r2"] = p.r2;
  out["period"] = period;
  out["residual_max"] = worst;
  out["residual_ok"] = worst <= 1e-9;
  out["omega_dt_in_window"] = checks.in_window;
  out["delay_check"] = delay_err;
  out["delay_ok"] = delay_err <= 1e-10;
}

// -------------------------------------------------------------- construct

WorldLine wobble_seed(const SchildParams& p, double amplitude, double frequency, int pieces) {
  const double a = 0.0, b = 2.0 * p.delta_t;
  std::vector<Segment> segs;
  for (int k = 0; k < pieces; ++k) {
    const double lo = a + (b - a) * k / pieces;
    const double hi = k + 1 == pieces ? b : a + (b - a) * (k + 1) / pieces;
    ParamSamples smp;
    smp.s = cheb::lobatto_nodes(kDefaultDegree, lo, hi);
    for (double t : smp.s) {
      Vec3 q = schild_position(p, 2, t);
      q.z() += amplitude * std::sin(frequency * t);
      smp.y.push_back(q);
    }
    segs.push_back(fit_segment(smp, kDefaultDegree).segment);
  }
  return WorldLine(ChargeParams{p.m2, p.e2, 2}, std::move(segs));
}

Anchor anchor_from(const Json& j, std::string_view ctx) {
  check_keys(j, ctx, {"t", "q", "v"});
  Anchor a;
  a.t = require<double>(j, "t", ctx);
  a.q = get_vec(j, "q", Vec3::Zero(), ctx);
  a.v = get_vec(j, "v", Vec3::Zero(), ctx);
  return a;
}

InitialData initial_data_from(const Json& j, const Context& cx, const GuardParams& g) {
  const std::string_view ctx = "initial_data";
  if (!j.is_object() || j.size() != 1)
    schema("initial_data: expected exactly one of \"schild\", \"file\", \"generate\"");
  if (j.contains("schild")) {
    const Json& s = j.at("schild");
    const SchildInput in = schild_input(s, "initial_data.schild", {"t0", "seed_label"});
    const double t0 = get(s, "t0", 0.0, "initial_data.schild");
    const int label = get(s, "seed_label", 2, "initial_data.schild");
    if (label != 1 && label != 2) fail(ErrorKind::InvalidArgument, "initial_data.schild.seed_label must be 1 or 2");
    return schild_initial_data(solve(in).params, t0, label);
  }
  if (j.contains("file")) {
    const fs::path path = cx.resolve(require<std::string>(j, "file", ctx));
    return parse_as<InitialData>(read_json_file(path), path.string());
  }
  if (j.contains("generate")) {
    const Json& gen = j.at("generate");
    const std::string_view gctx = "initial_data.generate";
    if (gen.contains("schild_wobble")) {
      check_keys(gen, gctx, {"schild_wobble"});
      const Json& w = gen.at("schild_wobble");
      const std::string_view wctx = "initial_data.generate.schild_wobble";
      const SchildInput in = schild_input(w, wctx, {"amplitude", "frequency", "pieces"});
      const SchildParams p = solve(in).params;
      const WorldLine seed = wobble_seed(p, get(w, "amplitude", 1e-3, wctx), get(w, "frequency", 0.9, wctx),
                                         get(w, "pieces", 2, wctx));
      Anchor a = cone_intersection_point(seed, schild_position(p, 1, p.delta_t));
      a.v = schild_velocity(p, 1, a.t);
      return generate_initial_data(seed, ChargeParams{p.m1, p.e1, 1}, a, std::nullopt, g);
    }
    check_keys(gen, gctx, {"seed_file", "partner", "direction", "anchor_velocity", "second_anchor"});
    const fs::path path = cx.resolve(require<std::string>(gen, "seed_file", gctx));
    const WorldLine seed = parse_as<WorldLine>(read_json_file(path), path.string());
    const ChargeParams partner = require<ChargeParams>(gen, "partner", gctx);
    Anchor a = cone_intersection_point(seed, get_vec(gen, "direction", Vec3::UnitX(), gctx));
    a.v = get_vec(gen, "anchor_velocity", Vec3::Zero(), gctx);
    std::optional<Anchor> second;
    if (gen.contains("second_anchor")) second = anchor_from(gen.at("second_anchor"), "initial_data.generate.second_anchor");
    return generate_initial_data(seed, partner, a, second, g);
  }
  schema("initial_data: expected one of \"schild\", \"file\", \"generate\"");
}

Horizons horizons_from(const Json& j, const InitialData& d, double unit) {
  Horizons h{std::min(d.t0[0], d.t0[1]), std::max(d.t1[0], d.t1[1])};
  if (!j.contains("horizons")) return h;
  const Json& hz = j.at("horizons");
  check_keys(hz, "horizons", {"past", "future"});
  h.past = get(hz, "past", h.past / unit, "horizons") * unit;
  h.future = get(hz, "future", h.future / unit, "horizons") * unit;
  return h;
}

int stop_exit(StopReason r) {
  switch (r) {
    case StopReason::reached_horizon: return 0;
    case StopReason::guard_speed:
    case StopReason::guard_separation: return 3;
    case StopReason::out_of_domain: return 4;
  }
  return 4;
}

Json step_summary(const SolutionPair& s) {
  double join[4] = {0, 0, 0, 0};
  double eom = 0.0;
  for (const auto& st : s.steps) {
    for (int k = 0; k < 4; ++k) join[k] = std::max(join[k], st.join_mismatch[k]);
    eom = std::max(eom, st.eom_residual);
  }
  return Json{{"half_steps", s.steps.size()},
              {"join_mismatch_max", {join[0], join[1], join[2], join[3]}},
              {"eom_residual_max", eom},
              {"stop_reason", to_string(s.stop_reason)},
              {"coverage", {{"particle_1", Interval{s.lines[0].lo(), s.lines[0].hi()}},
                            {"particle_2", Interval{s.lines[1].lo(), s.lines[1].hi()}}}}};
}

void run_construct(const Json& j, Context& cx) {
  check_keys(j, "scenario", {"kind", "initial_data", "guards", "horizons", "csv_dt"});
  const GuardParams g = guards(j);
  const InitialData data = initial_data_from(require<Json>(j, "initial_data", "scenario"), cx, g);
  cx.write("initial_data.json", dump_json(Json(data)));
  const ValidationReport rep = validate_initial_data(data, g);
  cx.write("validation.json", dump_json(Json(rep)));
  if (!rep.ok()) fail(ErrorKind::ValidationFailure, "initial data rejected: " + rep.summary());

  const Horizons h = horizons_from(j, data, 1.0);
  cx.log(fmt::format("constructing on [{}, {}]", h.past, h.future));
  const SolutionPair sol = construct(data, g, h);
  cx.write("solution.json", dump_json(Json(sol)));
  cx.write("trajectory.csv", trajectory_csv(sol, csv_step(j, sol, "scenario")));

  Json& out = cx.result.summary;
  out["construction"] = step_summary(sol);
  out["horizons"] = {{"past", h.past}, {"future", h.future}};
  cx.result.exit_code = stop_exit(sol.stop_reason);
  if (cx.result.exit_code != 0) out["status"] = "stopped";
}

// ----------------------------------------------------------- energy audit

std::vector<double> grid(double a, double b, int n) {
  std::vector<double> g;
  for (int k = 0; k < n; ++k) g.push_back(n == 1 ? a : a + (b - a) * k / (n - 1));
  return g;
}

void run_energy(const Json& j, Context& cx) {
  check_keys(j, "scenario", {"kind", "solution", "grid", "quadrature", "max_drift"});
  const Json& src = require<Json>(j, "solution", "scenario");
  SolutionPair sol;
  std::optional<Interval> span[2];
  if (src.contains("file")) {
    check_keys(src, "solution", {"file"});
    const fs::path path = cx.resolve(require<std::string>(src, "file", "solution"));
    cx.log("reading " + path.string());
    sol = parse_as<SolutionPair>(read_json_file(path), path.string());
  } else if (src.contains("schild")) {
    check_keys(src, "solution", {"schild"});
    const Json& s = src.at("schild");
    const SchildParams p = solve(schild_input(s, "solution.schild", {"horizon_periods"})).params;
    const int periods = get(s, "horizon_periods", 3, "solution.schild");
    const double period = schild_period(p);
    sol = schild_trajectories(p, 0.0, periods * period);
    // one period from the start of each domain
    for (int k = 0; k < 2; ++k) span[k] = Interval{sol.domains[k].lo, sol.domains[k].lo + period};
  } else {
    schema("solution: expected \"file\" or \"schild\"");
  }

  int n[2] = {5, 5};
  if (j.contains("grid")) {
    const Json& gj = j.at("grid");
    check_keys(gj, "grid", {"n1", "n2", "t1", "t2"});
    n[0] = get(gj, "n1", 5, "grid");
    n[1] = get(gj, "n2", 5, "grid");
    const char* names[2] = {"t1", "t2"};
    for (int k = 0; k < 2; ++k)
      if (gj.contains(names[k])) {
        const auto r = require<std::vector<double>>(gj, names[k], "grid");
        if (r.size() != 2) schema(fmt::format("grid.{}: expected [lo, hi]", names[k]));
        span[k] = Interval{r[0], r[1]};
      }
  }
  if (n[0] < 1 || n[1] < 1) fail(ErrorKind::InvalidArgument, "grid: point counts must be positive");
  std::vector<double> g[2];
  for (int k = 0; k < 2; ++k) {
    const Interval iv = span[k].value_or(sol.domains[k]);
    g[k] = grid(iv.lo, iv.hi, n[k]);
  }
  QuadratureConfig q;
  if (j.contains("quadrature")) {
    check_keys(j.at("quadrature"), "quadrature", {"rel_tol", "abs_tol", "max_subdivisions"});
    q = parse_as<QuadratureConfig>(j.at("quadrature"), "quadrature");
    check_quadrature(q);
  }

  cx.log(fmt::format("evaluating H on a {}x{} grid", n[0], n[1]));
  const DriftReport r = energy_drift(sol, g[0], g[1], q);
  cx.write("drift.csv", drift_csv(r));
  cx.write("drift.json", dump_json(Json(r)));

  Json& out = cx.result.summary;
  out["grid_points"] = r.rows.size();
  out["skipped"] = r.skipped;
  out["reference"] = r.reference;
  out["max_drift"] = r.max_drift;
  out["mean_drift"] = r.mean_drift;
  if (j.contains("max_drift")) {
    const double tol = require<double>(j, "max_drift", "scenario");
    out["max_drift_tolerance"] = tol;
    out["within_tolerance"] = r.max_drift <= tol;
  }
}

// -------------------------------------------------------- uniqueness demo

double sup_diff(const WorldLine& a, const WorldLine& b, double lo, double hi, int n = 2000) {
  double d = 0.0;
  if (!(hi > lo)) return d;
  for (int k = 0; k <= n; ++k) {
    const double t = lo + (hi - lo) * k / n;
    d = std::max(d, (a.position(t) - b.position(t)).norm());
  }
  return d;
}

void run_uniqueness(const Json& j, Context& cx) {
  check_keys(j, "scenario", {"kind", "schild", "perturbation", "time_unit", "guards", "horizons",
                             "construction_tol", "threshold_factor", "csv_dt"});
  const SchildParams p = solve(schild_input(j.contains("schild") ? j.at("schild") : Json::object(), "schild")).params;
  const std::string unit_name = get<std::string>(j, "time_unit", "delay", "scenario");
  if (unit_name != "delay" && unit_name != "absolute")
    schema("scenario.time_unit: expected \"delay\" or \"absolute\"");
  const double unit = unit_name == "delay" ? p.delta_t : 1.0;

  const Json pj = get(j, "perturbation", Json::object(), "scenario");
  check_keys(pj, "perturbation", {"t_star", "s", "delta", "lambda", "shape", "direction", "particles"});
  PerturbSpec sp;
  sp.t_star = get(pj, "t_star", 1.1, "perturbation") * unit;
  sp.s = get(pj, "s", 1.5, "perturbation") * unit;
  sp.delta = get(pj, "delta", 0.25, "perturbation") * unit;
  sp.lambda = get(pj, "lambda", 1e-4, "perturbation");
  sp.shape = bump_shape_from_string(get<std::string>(pj, "shape", "polynomial", "perturbation"));
  sp.direction = get_vec(pj, "direction", Vec3::UnitZ(), "perturbation");
  const auto parts = get<std::vector<int>>(pj, "particles", {1, 2}, "perturbation");
  sp.particles = {false, false};
  for (int k : parts) {
    if (k != 1 && k != 2) fail(ErrorKind::InvalidArgument, "perturbation.particles: labels must be 1 or 2");
    sp.particles[static_cast<std::size_t>(k - 1)] = true;
  }

  // the bump edges leave order-3 join noise near 1e-4 regardless of lambda
  GuardParams def;
  def.join_tol = 1e-3;
  const GuardParams g = guards(j, def);
  const double tol = get(j, "construction_tol", 1e-8, "scenario");
  const double factor = get(j, "threshold_factor", 1e3, "scenario");
  const double threshold = factor * tol;

  const InitialData base = schild_initial_data(p);
  const PerturbResult pert = perturb_initial_data(base, sp, g);
  cx.write("perturbed_initial_data.json", dump_json(Json(pert.data)));
  if (!pert.report.ok()) fail(ErrorKind::ValidationFailure, "perturbed data rejected: " + pert.report.summary());

  Horizons h{0.0, 3.0 * p.delta_t};
  if (j.contains("horizons")) h = horizons_from(j, base, unit);
  cx.log("constructing both solutions");
  const SolutionPair a = construct(base, g, h);
  const SolutionPair b = construct(pert.data, g, h);
  cx.write("base_trajectory.csv", trajectory_csv(a, csv_step(j, a, "scenario")));
  cx.write("perturbed_trajectory.csv", trajectory_csv(b, csv_step(j, a, "scenario")));

  double phase_diff = 0.0;
  for (int k = 0; k < 2; ++k) {
    const PhasePoint pa = a.lines[k].phase(sp.t_star), pb = b.lines[k].phase(sp.t_star);
    phase_diff = std::max({phase_diff, (pa.position - pb.position).norm(), (pa.momentum - pb.momentum).norm()});
  }
  double past = 0.0, future = 0.0;
  for (int k = 0; k < 2; ++k) {
    const WorldLine& la = a.lines[k];
    const WorldLine& lb = b.lines[k];
    future = std::max(future, sup_diff(la, lb, base.t1[k], std::min(la.hi(), lb.hi())));
    past = std::max(past, sup_diff(la, lb, std::max(la.lo(), lb.lo()), base.t0[k]));
  }

  Json report{{"params", p},
              {"perturbation",
               {{"t_star", sp.t_star},
                {"s", sp.s},
                {"delta", sp.delta},
                {"lambda", sp.lambda},
                {"shape", to_string(sp.shape)},
                {"direction", {sp.direction.x(), sp.direction.y(), sp.direction.z()}},
                {"particles", parts},
                {"max_speed", pert.max_speed}}},
              {"phase_diff_at_t_star", phase_diff},
              {"phase_identical", phase_diff <= 1e-14},
              {"divergence_past", past},
              {"divergence_future", future},
              {"threshold", threshold},
              {"diverges", past >= threshold && future >= threshold},
              {"base", step_summary(a)},
              {"perturbed", step_summary(b)}};
  cx.write("uniqueness_report.json", dump_json(report));

  Json& out = cx.result.summary;
  out["phase_diff_at_t_star"] = phase_diff;
  out["divergence_past"] = past;
  out["divergence_future"] = future;
  out["threshold"] = threshold;
  out["phase_identical"] = phase_diff <= 1e-14;
  out["diverges"] = past >= threshold && future >= threshold;
  cx.result.exit_code = std::max(stop_exit(a.stop_reason), stop_exit(b.stop_reason));
  if (cx.result.exit_code != 0) out["status"] = "stopped";
}

// ---------------------------------------------------------- field compare

void run_fields(const Json& j, Context& cx) {
  check_keys(j, "scenario", {"kind", "m1", "m2", "e1", "r1", "omega_r", "points", "seed", "radius"});
  const double m1 = get(j, "m1", 1.0, "scenario"), m2 = get(j, "m2", 1.0, "scenario");
  const double e1 = get(j, "e1", 1.0, "scenario"), r1 = get(j, "r1", 1.0, "scenario");
  const auto speeds = get<std::vector<double>>(j, "omega_r", {0.04, 0.02, 0.01}, "scenario");
  const int points = get(j, "points", 16, "scenario");
  const auto seed = get<std::uint64_t>(j, "seed", 1, "scenario");
  const auto radius = get<std::vector<double>>(j, "radius", {2.0, 4.0}, "scenario");
  if (radius.size() != 2 || !(radius[0] > 0.0 && radius[1] >= radius[0]))
    fail(ErrorKind::InvalidArgument, "scenario.radius: expected 0 < lo <= hi");
  if (points < 1 || speeds.empty()) fail(ErrorKind::InvalidArgument, "scenario: need points and omega_r values");

  // field points shared by every speed so the rows are comparable
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(radius[0], radius[1]);
  std::vector<Vec3> xs;
  for (int k = 0; k < points; ++k) {
    const Vec3 dir = Vec3(normal(rng), normal(rng), normal(rng)).normalized();
    xs.push_back(uniform(rng) * r1 * dir);
  }

  std::string csv = "omega_r,omega,delta_t,deviation,curl_max,divergence_max\n";
  std::vector<double> dev;
  double curl_all = 0.0, div_all = 0.0;
  for (double wr : speeds) {
    const SchildParams p = schild_from_omega(m1, m2, e1, r1, wr / r1);
    const double reach = radius[1] * r1 + p.r1 + p.r2 + 2.0 * p.delta_t + 1.0;
    const SolutionPair sol = schild_trajectories(p, -reach, reach);
    const WorldLine& src = sol.lines[1];
    double deviation = 0.0, curl = 0.0, div = 0.0;
    for (Sign s : {Sign::advanced, Sign::retarded}) {
      deviation = std::max(deviation, longitudinal_check(src, p.e2, 0.0, sol.lines[0].position(0.0), s).deviation);
      for (const Vec3& x : xs) {
        const LongitudinalCheck c = longitudinal_check(src, p.e2, 0.0, x, s);
        curl = std::max(curl, c.curl);
        div = std::max(div, c.divergence);
      }
    }
    dev.push_back(deviation);
    curl_all = std::max(curl_all, curl);
    div_all = std::max(div_all, div);
    csv += fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", wr, p.omega, p.delta_t, deviation, curl, div);
  }
  cx.write("field_compare.csv", csv);

  bool monotone = true;
  for (std::size_t k = 1; k < dev.size(); ++k) monotone = monotone && dev[k] < dev[k - 1];
  Json& out = cx.result.summary;
  out["deviation"] = dev;
  out["deviation_decreasing"] = monotone;
  out["curl_max"] = curl_all;
  out["divergence_max"] = div_all;
  out["curl_within_1e-6"] = curl_all <= 1e-6;
  out["divergence_within_1e-5"] = div_all <= 1e-5;
}

}  // namespace

RunResult run_scenario(const Json& scenario, const fs::path& base_dir, const RunOptions& opt) {
  Context cx{base_dir, opt, {}};
  if (!scenario.is_object()) schema("scenario: expected a JSON object");
  const std::string kind = require<std::string>(scenario, "kind", "scenario");
  std::error_code ec;
  fs::create_directories(opt.out_dir, ec);
  if (ec) fail(ErrorKind::IoError, fmt::format("cannot create {}: {}", opt.out_dir.string(), ec.message()));
  cx.result.summary = summary_base(kind);
  cx.log("scenario kind " + kind);
  if (kind == "schild")
    run_schild(scenario, cx);
  else if (kind == "construct")
    run_construct(scenario, cx);
  else if (kind == "energy-audit")
    run_energy(scenario, cx);
  else if (kind == "uniqueness-demo")
    run_uniqueness(scenario, cx);
  else if (kind == "field-compare")
    run_fields(scenario, cx);
  else
    schema(fmt::format("scenario.kind: unknown kind \"{}\"", kind));
  Json files = Json::array();
  for (const auto& f : cx.result.outputs) files.push_back(f.string());
  cx.result.summary["outputs"] = files;
  cx.result.summary["exit_code"] = cx.result.exit_code;
  cx.write("summary.json", dump_json(cx.result.summary));
  return cx.result;
}

RunResult run_scenario_file(const fs::path& path, const RunOptions& opt) {
  const Json j = read_json_file(path);
  return run_scenario(j, path.parent_path(), opt);
}

}  // namespace wfdelay::cli
