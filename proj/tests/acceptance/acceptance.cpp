// Acceptance run: one PASS/FAIL line per criterion, with measured values.
// Exit status is nonzero when any criterion fails.
#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "test_util.hpp"
#include "wfdelay/conserved.hpp"
#include "wfdelay/construction.hpp"
#include "wfdelay/delayfields.hpp"
#include "wfdelay/kinematics.hpp"
#include "wfdelay/schild.hpp"
#include "wfdelay_cli/cli.hpp"

using namespace wfdelay;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& name, double time_limit, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = Outcome{false, std::string("error: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = time_limit <= 0.0 || secs < time_limit;
  const bool pass = o.pass && in_time;
  if (!pass) ++failures;
  std::string limit = time_limit > 0.0 ? fmt::format(" (limit {} s)", time_limit) : "";
  if (o.pass && !in_time) limit += " TOO SLOW";
  std::printf("%s %2d %-28s %s [%.2f s%s]\n", pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str(), secs,
              limit.c_str());
  std::fflush(stdout);
}

const SchildParams& schild() {
  static const SchildParams p = schild_solve(1.0, 1.0, 1.0, -1.0, 1.0);
  return p;
}

std::vector<double> spaced(double a, double b, int n) {
  std::vector<double> g;
  for (int k = 0; k < n; ++k) g.push_back(a + (b - a) * k / (n - 1));
  return g;
}

double sup_to_orbit(const SolutionPair& s, const SchildParams& p, int samples = 4000) {
  double worst = 0.0;
  for (int k = 0; k < 2; ++k) {
    const WorldLine& w = s.lines[static_cast<std::size_t>(k)];
    for (int n = 0; n <= samples; ++n) {
      const double t = w.lo() + (w.hi() - w.lo()) * n / samples;
      worst = std::max(worst, (w.position(t) - schild_position(p, k + 1, t)).norm());
    }
  }
  return worst;
}

Outcome inversion() {
  std::mt19937_64 rng(20260101);
  std::uniform_real_distribution<double> logr(-3.0, 3.0);
  double worst = 0.0;
  for (int k = 0; k < 100000; ++k) {
    const Vec3 x = std::pow(10.0, logr(rng)) * testutil::random_unit(rng);
    worst = std::max(worst, (coulomb_inverse(coulomb_force(x)) - x).norm() / x.norm());
  }
  return {worst <= 1e-12, fmt::format("max rel err {:.3e} <= 1e-12", worst)};
}

Outcome delay_vs_quadratic() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0), sp(0.0, 0.9), tt(-5.0, 5.0);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const Vec3 q0(3 * u(rng), 3 * u(rng), 3 * u(rng));
    const Vec3 v = sp(rng) * testutil::random_unit(rng);
    const WorldLine src = testutil::linear_line(q0, v, -200.0, 200.0);
    const double t = tt(rng);
    Vec3 x(3 * u(rng), 3 * u(rng), 3 * u(rng));
    if ((x - q0 - v * t).norm() < 0.1) x += Vec3(0.5, 0.0, 0.0);
    // (t - s)^2 = |d - v s|^2 with d = x - q0
    const Vec3 d = x - q0;
    const double a = 1.0 - v.squaredNorm(), b = -2.0 * (t - d.dot(v)), c = t * t - d.squaredNorm();
    const double disc = std::sqrt(b * b - 4.0 * a * c);
    const double qq = -0.5 * (b + std::copysign(disc, b));
    const double r1 = qq / a, r2 = c / qq;
    const double ret = std::min(r1, r2), adv = std::max(r1, r2);
    worst = std::max(worst, std::abs(delay_time(src, t, x, Sign::retarded).t_delayed - ret) / (1.0 + std::abs(t)));
    worst = std::max(worst, std::abs(delay_time(src, t, x, Sign::advanced).t_delayed - adv) / (1.0 + std::abs(t)));
  }
  return {worst <= 1e-12, fmt::format("max err/(1+|t|) {:.3e} <= 1e-12 over 1000 configs", worst)};
}

Outcome schild_orbit() {
  const SchildParams& p = schild();
  const SchildChecks c = schild_checks(p);
  const double rel = schild_residual(p, 2000) / schild_force_scale(p);
  return {rel <= 1e-9 && c.in_window,
          fmt::format("residual {:.3e} <= 1e-9 of force scale, omega dT = {:.6f} in (0, pi/2): {}", rel, c.omega_dt,
                      c.in_window)};
}

Outcome delay_cross_check() {
  const SchildParams& p = schild();
  const double err = schild_delay_check(p, schild_trajectories(p, 0.0, 3.0 * schild_period(p)), 256);
  return {err <= 1e-10, fmt::format("max |delay - dT| {:.3e} <= 1e-10", err)};
}

Outcome energy_conservation() {
  const SchildParams& p = schild();
  const double period = schild_period(p);
  const SolutionPair s = schild_trajectories(p, 0.0, 4.0 * period);
  const DriftReport r = energy_drift(s, spaced(s.domains[0].lo, s.domains[0].lo + period, 5),
                                     spaced(s.domains[1].lo, s.domains[1].lo + period, 5));
  const bool schild_ok = r.rows.size() == 25 && r.max_drift <= 1e-6;

  // generic: generated strips, three exchanges each way
  const WorldLine seed = testutil::sampled_line(
      [&](double t) -> Vec3 {
        Vec3 q = schild_position(p, 2, t);
        q.z() += 1e-3 * std::sin(0.9 * t);
        return q;
      },
      0.0, 2.0 * p.delta_t, 2, ChargeParams{p.m2, p.e2, 2});
  Anchor a = cone_intersection_point(seed, schild_position(p, 1, p.delta_t));
  a.v = schild_velocity(p, 1, a.t);
  GuardParams g;
  g.join_tol = 1e-5;
  const InitialData d = generate_initial_data(seed, ChargeParams{p.m1, p.e1, 1}, a, std::nullopt, g);
  // horizons inside both strips: no step yet
  SolutionPair sol = construct(d, g, Horizons{std::max(d.t0[0], d.t0[1]), std::min(d.t1[0], d.t1[1])});
  int done[2] = {0, 0};
  std::string stop;
  // three exchanges are six half-steps per side
  for (Side side : {Side::future, Side::past}) {
    try {
      for (int k = 0; k < 6; ++k) {
        sol = half_step(sol, side, g);
        ++done[side == Side::future ? 0 : 1];
      }
    } catch (const Error& e) {
      stop += std::string(stop.empty() ? "" : ", ") + e.what();
    }
  }
  std::string generic;
  bool generic_ok = false;
  if (done[0] == 6 && done[1] == 6) {
    const DriftReport gr = energy_drift(sol, spaced(sol.domains[0].lo, sol.domains[0].hi, 4),
                                        spaced(sol.domains[1].lo, sol.domains[1].hi, 4));
    generic_ok = gr.max_drift <= 1e-5;
    generic = fmt::format("generic 4x4 drift {:.3e} <= 1e-5", gr.max_drift);
  } else {
    generic = fmt::format("generic: {}/6 future and {}/6 past half-steps built ({}), drift not measurable",
                          done[0], done[1], stop);
  }
  return {schild_ok && generic_ok, fmt::format("Schild 5x5 drift {:.3e} <= 1e-6; {}", r.max_drift, generic)};
}

// Exchanges past the Schild strips with the join check relaxed, so the error can be measured at all.
struct Rebuilt {
  SolutionPair sol;
  int exchanges = 0;
  std::string stop;
};

const Rebuilt& rebuilt() {
  static const Rebuilt r = [] {
    const SchildParams& p = schild();
    const InitialData d = schild_initial_data(p);
    GuardParams g;
    g.join_tol = 1e6;
    Rebuilt out;
    out.sol = construct(d, g, Horizons{std::max(d.t0[0], d.t0[1]), std::min(d.t1[0], d.t1[1])});
    try {
      for (int k = 0; k < 2; ++k) {
        out.sol = advance_step(out.sol, Side::future, g);
        ++out.exchanges;
      }
    } catch (const Error& e) {
      out.stop = std::string(to_string(e.kind()));
    }
    return out;
  }();
  return r;
}

Outcome construction() {
  const Rebuilt& r = rebuilt();
  const double err = sup_to_orbit(r.sol, schild());
  std::string per_step;
  // error after each half-step, measured on what existed at that point
  const SchildParams& p = schild();
  for (const auto& st : r.sol.steps) {
    const WorldLine& w = r.sol.lines[static_cast<std::size_t>(st.particle - 1)];
    double e = 0.0;
    for (int n = 0; n <= 1000; ++n) {
      const double t = st.created.lo + (st.created.hi - st.created.lo) * n / 1000;
      e = std::max(e, (w.position(t) - schild_position(p, st.particle, t)).norm());
    }
    per_step += fmt::format(" {:.1e}", e);
  }
  return {r.exchanges >= 2 && err <= 1e-8,
          fmt::format("{} exchanges, sup err {:.3e} <= 1e-8; per half-step:{}{}", r.exchanges, err, per_step,
                      r.stop.empty() ? "" : " stop " + r.stop)};
}

Outcome joins() {
  const Rebuilt& r = rebuilt();
  double worst[4] = {0, 0, 0, 0};
  for (const auto& st : r.sol.steps)
    for (int o = 0; o < 4; ++o) worst[o] = std::max(worst[o], st.join_mismatch[o]);
  const double m = *std::max_element(worst, worst + 4);
  double first = 0.0;
  for (std::size_t k = 0; k < std::min<std::size_t>(2, r.sol.steps.size()); ++k)
    for (double x : r.sol.steps[k].join_mismatch) first = std::max(first, x);
  return {m <= 1e-6 && !r.sol.steps.empty(),
          fmt::format("max mismatch by order {:.1e} {:.1e} {:.1e} {:.1e} <= 1e-6 over {} half-steps (first exchange "
                      "{:.1e})",
                      worst[0], worst[1], worst[2], worst[3], r.sol.steps.size(), first)};
}

Outcome non_uniqueness() {
  const fs::path out = fs::temp_directory_path() / "wfdelay_acceptance_unique";
  fs::remove_all(out);
  const Json sc{{"kind", "uniqueness-demo"}, {"perturbation", {{"lambda", 1e-4}}}};
  const cli::RunResult r = cli::run_scenario(sc, out, cli::RunOptions{out, false});
  const double phase = r.summary.at("phase_diff_at_t_star").get<double>();
  const double past = r.summary.at("divergence_past").get<double>(), fut = r.summary.at("divergence_future").get<double>();
  const double thr = r.summary.at("threshold").get<double>();
  return {r.exit_code == 0 && phase <= 1e-14 && past >= thr && fut >= thr,
          fmt::format("phase diff at t* {:.1e} <= 1e-14; divergence past {:.3e} future {:.3e} >= {:.0e}", phase, past,
                      fut, thr)};
}

Outcome longitudinal() {
  const fs::path out = fs::temp_directory_path() / "wfdelay_acceptance_fields";
  fs::remove_all(out);
  const Json sc{{"kind", "field-compare"}, {"omega_r", {0.04, 0.02, 0.01}}, {"points", 32}, {"seed", 11}};
  const Json s = cli::run_scenario(sc, out, cli::RunOptions{out, false}).summary;
  const auto dev = s.at("deviation").get<std::vector<double>>();
  const double curl = s.at("curl_max").get<double>(), div = s.at("divergence_max").get<double>();
  const bool mono = s.at("deviation_decreasing").get<bool>();
  return {mono && curl <= 1e-6 && div <= 1e-5,
          fmt::format("deviation {:.3e} > {:.3e} > {:.3e}: {}; curl E_par {:.2e} <= 1e-6; div(E - E_par) {:.2e} <= 1e-5",
                      dev[0], dev[1], dev[2], mono, curl, div)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism() {
  const fs::path scenarios = fs::path(WFDELAY_SOURCE_DIR) / "scenarios";
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(scenarios))
    if (e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  // energy_audit reads the schild run from the same output directory
  std::stable_partition(files.begin(), files.end(), [](const fs::path& f) { return f.stem() == "schild"; });
  const fs::path root = fs::temp_directory_path() / "wfdelay_acceptance_determinism";
  fs::remove_all(root);
  int compared = 0;
  std::string bad;
  for (const char* run : {"a", "b"})
    for (const auto& f : files) {
      const std::string cmd = fmt::format("\"{}\" run \"{}\" --out-dir \"{}\" >/dev/null 2>&1", WFDELAY_CLI_PATH,
                                          f.string(), (root / run).string());
      const int st = std::system(cmd.c_str());
      if (!WIFEXITED(st) || WEXITSTATUS(st) != 0) bad += " " + f.filename().string() + " exited nonzero;";
    }
  for (const auto& e : fs::directory_iterator(root / "a")) {
    ++compared;
    if (slurp(e.path()) != slurp(root / "b" / e.path().filename())) bad += " " + e.path().filename().string();
  }
  return {bad.empty() && compared > 0,
          fmt::format("{} scenarios, {} output files byte-identical across runs{}", files.size(), compared,
                      bad.empty() ? "" : "; differ:" + bad)};
}

}  // namespace

int main() {
  criterion(1, "inversion identity", 1.0, inversion);
  criterion(2, "delay vs closed form", 5.0, delay_vs_quadratic);
  criterion(3, "Schild orbit residual", 10.0, schild_orbit);
  criterion(4, "delay cross-check", 5.0, delay_cross_check);
  criterion(5, "energy conservation", 60.0, energy_conservation);
  criterion(6, "construction correctness", 60.0, construction);
  criterion(7, "join smoothness", 0.0, joins);
  criterion(8, "non-uniqueness", 0.0, non_uniqueness);
  criterion(9, "longitudinal approximation", 0.0, longitudinal);
  criterion(10, "determinism", 0.0, determinism);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
