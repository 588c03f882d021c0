#include "wfdelay/io.hpp"

#include <cmath>
#include <fstream>

#include <fmt/core.h>

namespace wfdelay {

void to_json(Json& j, const ChargeParams& c) { j = Json{{"mass", c.mass}, {"charge", c.charge}, {"label", c.label}}; }

void from_json(const Json& j, ChargeParams& c) {
  c.mass = j.at("mass").get<double>();
  c.charge = j.at("charge").get<double>();
  c.label = j.value("label", c.label);
}

void to_json(Json& j, const Segment& s) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < s.coeffs().rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < s.coeffs().cols(); ++c) row.push_back(s.coeffs()(r, c));
    rows.push_back(std::move(row));
  }
  j = Json{{"lo", s.lo()}, {"hi", s.hi()}, {"basis_lo", s.basis_lo()}, {"basis_hi", s.basis_hi()}, {"coeffs", rows}};
}

Segment segment_from_json(const Json& j) {
  const Json& rows = j.at("coeffs");
  if (!rows.is_array() || rows.size() != 3) fail(ErrorKind::SchemaError, "segment coeffs must hold 3 rows");
  const std::size_t n = rows[0].size();
  if (n == 0) fail(ErrorKind::SchemaError, "segment coeffs are empty");
  Eigen::MatrixXd c(3, static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < 3; ++r) {
    if (rows[r].size() != n) fail(ErrorKind::SchemaError, "segment coeff rows differ in length");
    for (std::size_t k = 0; k < n; ++k) c(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = rows[r][k].get<double>();
  }
  const double lo = j.at("lo").get<double>(), hi = j.at("hi").get<double>();
  return Segment(lo, hi, j.value("basis_lo", lo), j.value("basis_hi", hi), std::move(c));
}

void to_json(Json& j, const WorldLine& w) {
  Json segs = Json::array();
  for (std::size_t k = 0; k < w.size(); ++k) segs.push_back(w.segment(k));
  j = Json{{"charge", w.charge()},
           {"join_order", w.join_order()},
           {"join_tol", w.join_tol()},
           {"origin", w.origin()},
           {"segments", segs}};
}

void from_json(const Json& j, WorldLine& w) {
  std::vector<Segment> segs;
  for (const auto& s : j.at("segments")) segs.push_back(segment_from_json(s));
  w = WorldLine(j.at("charge").get<ChargeParams>(), std::move(segs), j.value("join_order", 3), j.value("join_tol", 1e-6),
                j.value("origin", 0));
}

void to_json(Json& j, const Interval& i) { j = Json{{"lo", i.lo}, {"hi", i.hi}}; }

void from_json(const Json& j, Interval& i) {
  i.lo = j.at("lo").get<double>();
  i.hi = j.at("hi").get<double>();
}

void to_json(Json& j, const InitialData& d) {
  j = Json{{"strips", {d.strips[0], d.strips[1]}},
           {"boundary_times", {{"t1_0", d.t0[0]}, {"t1_1", d.t1[0]}, {"t2_0", d.t0[1]}, {"t2_1", d.t1[1]}}}};
}

void from_json(const Json& j, InitialData& d) {
  const Json& s = j.at("strips");
  if (!s.is_array() || s.size() != 2) fail(ErrorKind::SchemaError, "initial data needs exactly two strips");
  d.strips[0] = s[0].get<WorldLine>();
  d.strips[1] = s[1].get<WorldLine>();
  if (const auto bt = j.find("boundary_times"); bt != j.end()) {
    d.t0 = {bt->at("t1_0").get<double>(), bt->at("t2_0").get<double>()};
    d.t1 = {bt->at("t1_1").get<double>(), bt->at("t2_1").get<double>()};
  } else {
    // strips cut exactly at the boundary times
    for (std::size_t k = 0; k < 2; ++k) {
      d.t0[k] = d.strips[k].lo();
      d.t1[k] = d.strips[k].hi();
    }
  }
}

void to_json(Json& j, const StepReport& s) {
  j = Json{{"side", to_string(s.side)},
           {"particle", s.particle},
           {"source", s.source},
           {"created", s.created},
           {"pieces", s.pieces},
           {"join_mismatch", {s.join_mismatch[0], s.join_mismatch[1], s.join_mismatch[2], s.join_mismatch[3]}},
           {"fit_residual", s.fit_residual},
           {"eom_residual", s.eom_residual},
           {"truncated", s.truncated}};
}

namespace {

StepReport step_from_json(const Json& j) {
  StepReport s;
  s.side = j.at("side").get<std::string>() == "past" ? Side::past : Side::future;
  s.particle = j.at("particle").get<int>();
  s.source = j.at("source").get<Interval>();
  s.created = j.at("created").get<Interval>();
  s.pieces = j.at("pieces").get<int>();
  const Json& m = j.at("join_mismatch");
  for (std::size_t k = 0; k < 4 && k < m.size(); ++k) s.join_mismatch[k] = m[k].get<double>();
  s.fit_residual = j.at("fit_residual").get<double>();
  s.eom_residual = j.at("eom_residual").get<double>();
  s.truncated = j.at("truncated").get<bool>();
  return s;
}

}  // namespace

void to_json(Json& j, const SolutionPair& s) {
  Json steps = Json::array();
  for (const auto& st : s.steps) steps.push_back(st);
  j = Json{{"lines", {s.lines[0], s.lines[1]}},
           {"domains", {s.domains[0], s.domains[1]}},
           {"stop_reason", to_string(s.stop_reason)},
           {"future_stop", to_string(s.future_stop)},
           {"past_stop", to_string(s.past_stop)},
           {"steps", steps}};
}

void from_json(const Json& j, SolutionPair& s) {
  const Json& l = j.at("lines");
  if (!l.is_array() || l.size() != 2) fail(ErrorKind::SchemaError, "solution needs exactly two lines");
  s.lines = {l[0].get<WorldLine>(), l[1].get<WorldLine>()};
  if (const auto d = j.find("domains"); d != j.end())
    s.domains = {(*d)[0].get<Interval>(), (*d)[1].get<Interval>()};
  else
    s.domains = compute_domains(s.lines);
  s.stop_reason = stop_reason_from_string(j.value("stop_reason", std::string("reached-horizon")));
  s.future_stop = stop_reason_from_string(j.value("future_stop", std::string("reached-horizon")));
  s.past_stop = stop_reason_from_string(j.value("past_stop", std::string("reached-horizon")));
  s.steps.clear();
  if (const auto st = j.find("steps"); st != j.end())
    for (const auto& e : *st) s.steps.push_back(step_from_json(e));
}

void to_json(Json& j, const SchildParams& p) {
  j = Json{{"m1", p.m1}, {"m2", p.m2}, {"e1", p.e1}, {"e2", p.e2}, {"r1", p.r1}, {"r2", p.r2}, {"omega", p.omega},
           {"delta_t", p.delta_t}};
}

void from_json(const Json& j, SchildParams& p) {
  p.m1 = j.at("m1").get<double>();
  p.m2 = j.at("m2").get<double>();
  p.e1 = j.at("e1").get<double>();
  p.e2 = j.at("e2").get<double>();
  p.r1 = j.at("r1").get<double>();
  p.r2 = j.at("r2").get<double>();
  p.omega = j.at("omega").get<double>();
  p.delta_t = j.at("delta_t").get<double>();
}

void to_json(Json& j, const GuardParams& g) {
  j = Json{{"d", g.d},
           {"v_bar", g.v_bar},
           {"n_c", g.n_c},
           {"join_tol", g.join_tol},
           {"step_degree", g.step_degree},
           {"compat_tol", g.compat_tol},
           {"cone_tol", g.cone_tol},
           {"fit_tol", g.fit_tol},
           {"max_subdivisions", g.max_subdivisions},
           {"gen_order", g.gen_order}};
}

// Every field is optional and defaults to GuardParams{}.
void from_json(const Json& j, GuardParams& g) {
  const GuardParams def;
  g.d = j.value("d", def.d);
  g.v_bar = j.value("v_bar", def.v_bar);
  g.n_c = j.value("n_c", def.n_c);
  g.join_tol = j.value("join_tol", def.join_tol);
  g.step_degree = j.value("step_degree", def.step_degree);
  g.compat_tol = j.value("compat_tol", def.compat_tol);
  g.cone_tol = j.value("cone_tol", def.cone_tol);
  g.fit_tol = j.value("fit_tol", def.fit_tol);
  g.max_subdivisions = j.value("max_subdivisions", def.max_subdivisions);
  g.gen_order = j.value("gen_order", def.gen_order);
}

void to_json(Json& j, const QuadratureConfig& q) {
  j = Json{{"rel_tol", q.rel_tol}, {"abs_tol", q.abs_tol}, {"max_subdivisions", q.max_subdivisions}};
}

void from_json(const Json& j, QuadratureConfig& q) {
  const QuadratureConfig def;
  q.rel_tol = j.value("rel_tol", def.rel_tol);
  q.abs_tol = j.value("abs_tol", def.abs_tol);
  q.max_subdivisions = j.value("max_subdivisions", def.max_subdivisions);
}

void to_json(Json& j, const ValidationReport& r) {
  Json entries = Json::array();
  for (const auto& e : r.entries)
    entries.push_back(Json{{"condition", e.condition}, {"pass", e.pass}, {"residual", e.residual}, {"location", e.location}});
  j = Json{{"ok", r.ok()}, {"entries", entries}};
}

void to_json(Json& j, const EnergyBreakdown& e) {
  j = Json{{"t1", e.t1},
           {"t2", e.t2},
           {"kinetic", e.kinetic},
           {"potential", e.potential},
           {"interaction", e.interaction},
           {"total", e.total},
           {"quad_error", e.quad_error}};
}

void to_json(Json& j, const DriftReport& r) {
  j = Json{{"reference", r.reference},
           {"max_drift", r.max_drift},
           {"mean_drift", r.mean_drift},
           {"skipped", r.skipped},
           {"rows", r.rows}};
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::IoError, fmt::format("cannot read {}", path.string()));
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorKind::SchemaError, fmt::format("{}: {}", path.string(), e.what()));
  }
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::IoError, fmt::format("cannot write {}", path.string()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.close();
  if (!out) fail(ErrorKind::IoError, fmt::format("write to {} failed", path.string()));
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

std::string trajectory_csv(const SolutionPair& sol, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) fail(ErrorKind::InvalidArgument, "trajectory sampling step must be positive");
  std::string out = "t,q1x,q1y,q1z,q2x,q2y,q2z,p1x,p1y,p1z,p2x,p2y,p2z\n";
  if (sol.lines[0].empty() || sol.lines[1].empty()) return out;
  const double lo = std::max(sol.lines[0].lo(), sol.lines[1].lo());
  const double hi = std::min(sol.lines[0].hi(), sol.lines[1].hi());
  if (!(lo <= hi)) return out;
  // a last node within rounding of hi is kept and clamped onto it
  const auto n = static_cast<long long>(std::floor((hi - lo) / dt * (1.0 + 1e-12)));
  for (long long k = 0; k <= n; ++k) {
    const double t = std::min(hi, lo + static_cast<double>(k) * dt);
    const PhasePoint a = sol.lines[0].phase(t), b = sol.lines[1].phase(t);
    out += fmt::format("{:.17g}", t);
    for (const Vec3* v : {&a.position, &b.position, &a.momentum, &b.momentum})
      out += fmt::format(",{:.17g},{:.17g},{:.17g}", v->x(), v->y(), v->z());
    out += '\n';
  }
  return out;
}

void emit_trajectory_csv(const SolutionPair& sol, double dt, const std::filesystem::path& path) {
  write_text_file(path, trajectory_csv(sol, dt));
}

std::string drift_csv(const DriftReport& r) {
  std::string out = "t1,t2,kinetic,potential,interaction,total\n";
  for (const auto& e : r.rows)
    out += fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", e.t1, e.t2, e.kinetic, e.potential,
                       e.interaction, e.total);
  return out;
}

std::string residual_csv(const std::vector<ResidualSample>& samples) {
  std::string out = "t,residual_1,residual_2\n";
  for (const auto& s : samples) out += fmt::format("{:.17g},{:.17g},{:.17g}\n", s.t, s.residual_1, s.residual_2);
  return out;
}

}  // namespace wfdelay
