#include <gtest/gtest.h>

#include <filesystem>
#include <random>
#include <sstream>

#include "test_util.hpp"
#include "wfdelay/io.hpp"

using namespace wfdelay;

namespace {

const SchildParams& schild() {
  static const SchildParams p = schild_solve(1.0, 1.0, 1.0, -1.0, 1.0);
  return p;
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST(Json, WorldLineRoundTripBitExact) {
  const SolutionPair sol = schild_trajectories(schild(), -1.0, 12.0);
  const WorldLine& w = sol.lines[1];
  const std::string text = dump_json(Json(w));
  const WorldLine back = parse_as<WorldLine>(Json::parse(text), "worldline");
  ASSERT_EQ(back.size(), w.size());
  EXPECT_EQ(back.charge().charge, w.charge().charge);
  EXPECT_EQ(back.origin(), w.origin());
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(w.lo(), w.hi());
  for (int k = 0; k < 1000; ++k) {
    const double t = u(rng);
    const auto a = w.eval(t, 2), b = back.eval(t, 2);
    for (int o = 0; o <= 2; ++o) ASSERT_EQ(a[o], b[o]) << "t=" << t << " order " << o;
  }
  EXPECT_EQ(dump_json(Json(back)), text);
}

TEST(Json, SolutionAndInitialDataRoundTrip) {
  const InitialData d = schild_initial_data(schild());
  const InitialData d2 = parse_as<InitialData>(Json::parse(dump_json(Json(d))), "initial data");
  EXPECT_EQ(d2.t0, d.t0);
  EXPECT_EQ(d2.t1, d.t1);
  EXPECT_EQ(dump_json(Json(d2)), dump_json(Json(d)));

  const SolutionPair s = construct(d, GuardParams{}, Horizons{0.0, 3.0 * schild().delta_t});
  const SolutionPair s2 = parse_as<SolutionPair>(Json::parse(dump_json(Json(s))), "solution");
  EXPECT_EQ(s2.steps.size(), s.steps.size());
  EXPECT_EQ(s2.stop_reason, s.stop_reason);
  EXPECT_EQ(s2.domains[0].lo, s.domains[0].lo);
  EXPECT_EQ(dump_json(Json(s2)), dump_json(Json(s)));
}

TEST(Json, ParamsAndConfigs) {
  const SchildParams p = parse_as<SchildParams>(Json(schild()), "schild");
  EXPECT_EQ(p.omega, schild().omega);
  EXPECT_EQ(p.delta_t, schild().delta_t);
  const GuardParams g = parse_as<GuardParams>(Json::parse(R"({"join_tol": 1e-3})"), "guards");
  EXPECT_EQ(g.join_tol, 1e-3);
  EXPECT_EQ(g.v_bar, GuardParams{}.v_bar);
  const QuadratureConfig q = parse_as<QuadratureConfig>(Json::object(), "quadrature");
  EXPECT_EQ(q.rel_tol, QuadratureConfig{}.rel_tol);
  const Json rep = validate_initial_data(schild_initial_data(schild()), GuardParams{});
  EXPECT_TRUE(rep.at("ok").get<bool>());
  EXPECT_TRUE(rep.at("entries")[0].contains("residual"));
}

TEST(Json, SchemaErrorsNameTheField) {
  try {
    parse_as<SchildParams>(Json::parse(R"({"m1": 1})"), "schild");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SchemaError);
    EXPECT_NE(std::string(e.what()).find("m2"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_as<WorldLine>(Json::parse(R"({"charge": {"mass": 1, "charge": 1}, "segments": [{"lo": 0, "hi": 1, "coeffs": [[1], [2]]}]})"), "w"),
               Error);
  EXPECT_THROW(parse_as<GuardParams>(Json::parse(R"({"v_bar": "fast"})"), "guards"), Error);
}

TEST(Files, ReadAndWriteErrors) {
  const auto dir = std::filesystem::temp_directory_path() / "wfdelay_test_io";
  std::filesystem::create_directories(dir);
  const auto bad = dir / "bad.json";
  write_text_file(bad, "{ not json");
  try {
    read_json_file(bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SchemaError);
  }
  try {
    read_json_file(dir / "missing.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::IoError);
  }
  try {
    write_text_file(dir / "no_such_dir" / "x.csv", "x");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::IoError);
  }
  std::filesystem::remove_all(dir);
}

TEST(Csv, SchildThreePeriodsHas301Rows) {
  const double P = schild_period(schild());
  const SolutionPair s = schild_trajectories(schild(), 0.0, 3.0 * P);
  const std::string csv = trajectory_csv(s, P / 100.0);
  EXPECT_EQ(count_lines(csv), 302u);  // header plus 3 * 100 + 1 rows
  EXPECT_EQ(csv.back(), '\n');
  EXPECT_EQ(csv.rfind("t,q1x", 0), 0u);
  EXPECT_EQ(trajectory_csv(s, P / 100.0), csv);
  // first data row is the t = 0 phase point q1 = (r1, 0, 0), q2 = (-r2, 0, 0)
  std::istringstream in(csv.substr(csv.find('\n') + 1));
  std::vector<double> cells;
  std::string cell;
  for (int k = 0; k < 5 && std::getline(in, cell, ','); ++k) cells.push_back(std::stod(cell));
  ASSERT_EQ(cells.size(), 5u);
  EXPECT_EQ(cells[0], 0.0);
  EXPECT_NEAR(cells[1], 1.0, 1e-14);
  EXPECT_NEAR(cells[2], 0.0, 1e-14);
  EXPECT_NEAR(cells[4], -1.0, 1e-14);
}

TEST(Csv, RowsRoundTripAtFullPrecision) {
  const SolutionPair s = schild_trajectories(schild(), 0.0, 2.0);
  const std::string csv = trajectory_csv(s, 0.37);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::istringstream cells(line);
    std::string cell;
    std::getline(cells, cell, ',');
    const double t = std::stod(cell);
    std::getline(cells, cell, ',');
    EXPECT_EQ(std::stod(cell), s.lines[0].position(t).x());
  }
}

TEST(Csv, DisjointCoverageGivesHeaderOnly) {
  SolutionPair s;
  s.lines[0] = testutil::linear_line(Vec3::Zero(), Vec3(0.1, 0, 0), 0.0, 1.0);
  s.lines[1] = testutil::linear_line(Vec3(5, 0, 0), Vec3::Zero(), 2.0, 3.0, ChargeParams{1.0, -1.0, 2});
  EXPECT_EQ(trajectory_csv(s, 0.1), "t,q1x,q1y,q1z,q2x,q2y,q2z,p1x,p1y,p1z,p2x,p2y,p2z\n");
  EXPECT_THROW(trajectory_csv(s, 0.0), Error);
}

TEST(Csv, DriftAndResidualTables) {
  DriftReport r;
  r.rows.push_back(EnergyBreakdown{0.1, 0.2, 2.0, -1.0, 0.5, 1.5, 0.0});
  EXPECT_EQ(drift_csv(r), "t1,t2,kinetic,potential,interaction,total\n0.10000000000000001,0.20000000000000001,2,-1,0.5,1.5\n");
  EXPECT_EQ(residual_csv({{1.0, 0.0, 1e-17}}), "t,residual_1,residual_2\n1,0,1.0000000000000001e-17\n");
}
