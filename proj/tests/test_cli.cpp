#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "wfdelay_cli/cli.hpp"

using namespace wfdelay;
namespace fs = std::filesystem;

namespace {

const fs::path kScenarios = fs::path(WFDELAY_SOURCE_DIR) / "scenarios";

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("wfdelay_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::vector<double>> read_csv(const fs::path& p, std::string* header = nullptr) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  if (header) *header = line;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

cli::RunResult run(const std::string& scenario, const fs::path& out) {
  return cli::run_scenario_file(kScenarios / scenario, cli::RunOptions{out, false});
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::InternalInvariant;
}

struct Proc {
  int status;
  std::string out, err;
};

Proc sh(const std::string& args, const fs::path& dir) {
  const fs::path o = dir / "stdout.txt", e = dir / "stderr.txt";
  const std::string cmd = fmt::format("\"{}\" {} >\"{}\" 2>\"{}\"", WFDELAY_CLI_PATH, args, o.string(), e.string());
  const int raw = std::system(cmd.c_str());
  return Proc{WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, slurp(o), slurp(e)};
}

}  // namespace

TEST(Cli, SchildScenario) {
  const fs::path out = scratch("schild");
  const cli::RunResult r = run("schild.json", out);
  EXPECT_EQ(r.exit_code, 0);
  for (const char* f : {"schild_params.json", "schild_solution.json", "schild_residual.csv", "schild_trajectory.csv",
                        "summary.json"})
    EXPECT_TRUE(fs::exists(out / f)) << f;

  std::string header;
  const auto res = read_csv(out / "schild_residual.csv", &header);
  EXPECT_EQ(header, "t,residual_1,residual_2");
  double worst = 0.0;
  for (const auto& row : res) worst = std::max({worst, row[1], row[2]});
  EXPECT_LE(worst, 1e-9);

  const auto traj = read_csv(out / "schild_trajectory.csv");
  EXPECT_EQ(traj.size(), 301u);  // 3 periods at 100 samples each, both ends included

  const Json params = read_json_file(out / "schild_params.json");
  EXPECT_TRUE(params.at("checks").at("in_window").get<bool>());
  EXPECT_NEAR(params.at("params").at("omega").get<double>(), 0.6645357858817137, 1e-12);
  EXPECT_NEAR(params.at("params").at("delta_t").get<double>(), 1.6921268675751993, 1e-12);
  EXPECT_LE(params.at("delay_check").get<double>(), 1e-10);

  // the worldline file is usable input
  const SolutionPair sol = parse_as<SolutionPair>(read_json_file(out / "schild_solution.json"), "solution");
  const SchildParams sp = parse_as<SchildParams>(params.at("params"), "params");
  for (double t : {0.5, 2.0, 7.5}) EXPECT_LE((sol.lines[0].position(t) - schild_position(sp, 1, t)).norm(), 1e-12);
}

TEST(Cli, EnergyAuditOnSchildOutput) {
  const fs::path out = scratch("energy");
  ASSERT_EQ(run("schild.json", out).exit_code, 0);
  const cli::RunResult r = run("energy_audit.json", out);
  EXPECT_EQ(r.exit_code, 0);
  std::string header;
  const auto rows = read_csv(out / "drift.csv", &header);
  EXPECT_EQ(header, "t1,t2,kinetic,potential,interaction,total");
  ASSERT_EQ(rows.size(), 25u);
  const double ref = rows.front()[5];
  for (const auto& row : rows) EXPECT_LE(std::abs(row[5] - ref) / std::abs(ref), 1e-6);
  EXPECT_TRUE(r.summary.at("within_tolerance").get<bool>());
}

TEST(Cli, ConstructFromSchildStrips) {
  const fs::path out = scratch("construct");
  const cli::RunResult r = run("construct_schild.json", out);
  EXPECT_EQ(r.exit_code, 0);
  const Json s = r.summary.at("construction");
  EXPECT_EQ(s.at("stop_reason"), "reached-horizon");
  EXPECT_EQ(s.at("half_steps").get<int>(), 2);
  EXPECT_TRUE(read_json_file(out / "validation.json").at("ok").get<bool>());
}

TEST(Cli, ConstructFromGeneratedStrips) {
  const fs::path out = scratch("generic");
  const cli::RunResult r = run("construct_generic.json", out);
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_EQ(r.summary.at("construction").at("stop_reason"), "reached-horizon");
}

TEST(Cli, UniquenessDemo) {
  const fs::path out = scratch("unique");
  const cli::RunResult r = run("uniqueness_demo.json", out);
  EXPECT_EQ(r.exit_code, 0);
  const Json rep = read_json_file(out / "uniqueness_report.json");
  EXPECT_LE(rep.at("phase_diff_at_t_star").get<double>(), 1e-14);
  EXPECT_GE(rep.at("divergence_past").get<double>(), 1e-5);
  EXPECT_GE(rep.at("divergence_future").get<double>(), 1e-5);
  EXPECT_TRUE(rep.at("diverges").get<bool>());
}

TEST(Cli, UniquenessDivergenceIsLinearInLambda) {
  const fs::path out = scratch("linear");
  double div[2];
  const double lambdas[2] = {1e-6, 1e-4};
  for (int k = 0; k < 2; ++k) {
    const Json j{{"kind", "uniqueness-demo"}, {"perturbation", {{"lambda", lambdas[k]}}}};
    div[k] = cli::run_scenario(j, kScenarios, cli::RunOptions{out, false}).summary.at("divergence_future").get<double>();
  }
  EXPECT_NEAR(div[1] / div[0], 100.0, 1.0);
}

TEST(Cli, FieldCompare) {
  const fs::path out = scratch("fields");
  const cli::RunResult r = run("field_compare.json", out);
  EXPECT_EQ(r.exit_code, 0);
  const auto rows = read_csv(out / "field_compare.csv");
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_GT(rows[0][3], rows[1][3]);
  EXPECT_GT(rows[1][3], rows[2][3]);
  // halving the speed roughly halves the transverse part
  EXPECT_NEAR(rows[1][3] / rows[2][3], 2.0, 0.3);
}

TEST(Cli, SchemaErrorsNameTheField) {
  const fs::path out = scratch("schema");
  auto kind_msg = [&](const Json& j) -> std::pair<ErrorKind, std::string> {
    try {
      cli::run_scenario(j, kScenarios, cli::RunOptions{out, false});
    } catch (const Error& e) {
      return {e.kind(), e.what()};
    }
    return {ErrorKind::InternalInvariant, "no error"};
  };
  auto [k1, m1] = kind_msg(Json{{"kind", "orbit"}});
  EXPECT_EQ(k1, ErrorKind::SchemaError);
  EXPECT_NE(m1.find("kind"), std::string::npos);
  auto [k2, m2] = kind_msg(Json{{"kind", "schild"}, {"mass", 1.0}});
  EXPECT_EQ(k2, ErrorKind::SchemaError);
  EXPECT_NE(m2.find("scenario.mass"), std::string::npos);
  auto [k3, m3] = kind_msg(Json{{"kind", "schild"}, {"m1", "heavy"}});
  EXPECT_EQ(k3, ErrorKind::SchemaError);
  EXPECT_NE(m3.find("scenario.m1"), std::string::npos);
  auto [k4, m4] = kind_msg(Json{{"kind", "construct"}});
  EXPECT_EQ(k4, ErrorKind::SchemaError);
  EXPECT_NE(m4.find("initial_data"), std::string::npos);
  auto [k5, m5] = kind_msg(Json{{"kind", "construct"},
                                {"initial_data", {{"schild", Json::object()}}},
                                {"guards", {{"join_toll", 1e-3}}}});
  EXPECT_EQ(k5, ErrorKind::SchemaError);
  EXPECT_NE(m5.find("guards.join_toll"), std::string::npos);
  EXPECT_EQ(kind_of([&] { cli::run_scenario(Json{{"kind", "energy-audit"}, {"solution", {{"file", "missing.json"}}}},
                                            kScenarios, cli::RunOptions{out, false}); }),
            ErrorKind::IoError);
}

TEST(Cli, ExitCodesAndStructuredFailure) {
  const fs::path dir = scratch("proc");
  Proc p = sh(fmt::format("run \"{}\" --out-dir \"{}\"", (kScenarios / "schild.json").string(), (dir / "a").string()), dir);
  EXPECT_EQ(p.status, 0) << p.err;
  EXPECT_TRUE(Json::parse(p.out).at("residual_ok").get<bool>());

  write_text_file(dir / "bad.json", R"({"kind": "schild", "r1": "one"})");
  p = sh(fmt::format("run \"{}\" --out-dir \"{}\"", (dir / "bad.json").string(), (dir / "b").string()), dir);
  EXPECT_EQ(p.status, 2);
  const Json err = Json::parse(p.err);
  EXPECT_EQ(err.at("kind"), "schema-error");
  EXPECT_EQ(err.at("exit_code"), 2);

  write_text_file(dir / "broken.json", "{ not json");
  EXPECT_EQ(sh(fmt::format("run \"{}\"", (dir / "broken.json").string()), dir).status, 2);
  EXPECT_EQ(sh("run", dir).status, 2);
  EXPECT_EQ(sh("--help", dir).status, 0);

  // like charges violate the orbit precondition
  p = sh(fmt::format("schild --e2 1 --out-dir \"{}\"", (dir / "c").string()), dir);
  EXPECT_EQ(p.status, 2) << p.err;
  EXPECT_EQ(Json::parse(p.err).at("kind"), "invalid-argument");
  EXPECT_FALSE(Json::parse(p.err).at("message").get<std::string>().empty());

  // a large bump drives the rebuilt partner past the speed cap
  write_text_file(dir / "fast.json", R"({"kind": "uniqueness-demo", "perturbation": {"lambda": 0.01}})");
  p = sh(fmt::format("run \"{}\" --out-dir \"{}\"", (dir / "fast.json").string(), (dir / "e").string()), dir);
  EXPECT_EQ(p.status, 3) << p.err;
  EXPECT_EQ(Json::parse(p.out).at("status"), "stopped");

  // a wide bump leaves joins the construction cannot smooth at this tolerance
  write_text_file(dir / "rough.json",
                  R"({"kind": "uniqueness-demo", "perturbation": {"t_star": 1.02, "delta": 0.45, "lambda": 1e-3}})");
  p = sh(fmt::format("run \"{}\" --out-dir \"{}\"", (dir / "rough.json").string(), (dir / "f").string()), dir);
  EXPECT_EQ(p.status, 4) << p.err;
  EXPECT_EQ(Json::parse(p.err).at("kind"), "construction-inconsistency");

  p = sh(fmt::format("schild --horizon-periods 1 --out-dir \"{}\"", (dir / "d").string()), dir);
  EXPECT_EQ(p.status, 0) << p.err;
  EXPECT_EQ(read_csv(dir / "d" / "schild_trajectory.csv").size(), 101u);
}

TEST(Cli, ValidateSubcommand) {
  const fs::path dir = scratch("validate");
  const SchildParams p = schild_solve(1.0, 1.0, 1.0, -1.0, 1.0);
  InitialData d = schild_initial_data(p);
  write_text_file(dir / "good.json", dump_json(Json(d)));
  Proc r = sh(fmt::format("validate \"{}\"", (dir / "good.json").string()), dir);
  EXPECT_EQ(r.status, 0) << r.err;
  EXPECT_TRUE(Json::parse(r.out).at("ok").get<bool>());

  // moving particle 1 off its light cone breaks the strip compatibility
  Json j = d;
  for (auto& seg : j.at("strips").at(0).at("segments"))
    for (auto& row : seg.at("coeffs")) row[0] = row[0].get<double>() + 0.05;
  write_text_file(dir / "bad.json", dump_json(j));
  r = sh(fmt::format("validate \"{}\"", (dir / "bad.json").string()), dir);
  EXPECT_EQ(r.status, 2);
  EXPECT_FALSE(Json::parse(r.out).at("ok").get<bool>());
}

TEST(Cli, RerunIsByteIdentical) {
  for (const char* sc : {"schild.json", "construct_schild.json", "field_compare.json"}) {
    const fs::path a = scratch(std::string("det_a_") + sc), b = scratch(std::string("det_b_") + sc);
    const cli::RunResult ra = run(sc, a), rb = run(sc, b);
    ASSERT_EQ(ra.outputs, rb.outputs);
    for (const auto& f : ra.outputs) EXPECT_EQ(slurp(a / f), slurp(b / f)) << sc << ": " << f;
  }
}
