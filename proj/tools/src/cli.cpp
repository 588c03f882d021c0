#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "wfdelay_cli/cli.hpp"

namespace fs = std::filesystem;

namespace wfdelay::cli {
namespace {

// One JSON object on stderr per failure; the exit code follows the error kind.
int report_failure(const Error& e) {
  Json j{{"status", "error"}, {"kind", to_string(e.kind())}, {"exit_code", exit_code(e.kind())}, {"message", e.what()}};
  if (const auto* od = dynamic_cast<const OutOfDomainError*>(&e)) {
    j["covered"] = Interval{od->covered_lo(), od->covered_hi()};
    j["failing_side"] = to_string(od->failing_side());
  }
  if (const auto* se = dynamic_cast<const SmoothnessError*>(&e)) j["mismatch"] = se->mismatch();
  std::cerr << j.dump() << '\n';
  return exit_code(e.kind());
}

template <class F>
int guarded(F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    return report_failure(e);
  } catch (const std::exception& e) {
    // anything escaping the library is a broken invariant, not a user error
    return report_failure(Error(ErrorKind::InternalInvariant, e.what()));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-charge delay dynamics: scenarios, validation and circular orbits"};
  app.require_subcommand(1);

  std::string scenario_path;
  RunOptions opt;
  auto* run = app.add_subcommand("run", "Run a scenario file");
  run->add_option("scenario", scenario_path, "Scenario JSON")->required();
  run->add_option("--out-dir", opt.out_dir, "Output directory");
  run->add_flag("--verbose", opt.verbose, "Progress on stderr");

  std::string data_path, guards_path;
  auto* validate = app.add_subcommand("validate", "Check strip initial data");
  validate->add_option("initial_data", data_path, "Initial data JSON")->required();
  validate->add_option("--guards", guards_path, "Guard parameters JSON");

  Json schild{{"kind", "schild"}};
  double m1 = 1.0, m2 = 1.0, e1 = 1.0, e2 = -1.0, r1 = 1.0;
  int periods = 3;
  RunOptions schild_opt;
  auto* sch = app.add_subcommand("schild", "Solve for the circular orbit and write its artifacts");
  sch->add_option("--m1", m1)->capture_default_str();
  sch->add_option("--m2", m2)->capture_default_str();
  sch->add_option("--e1", e1)->capture_default_str();
  sch->add_option("--e2", e2)->capture_default_str();
  sch->add_option("--r1", r1)->capture_default_str();
  sch->add_option("--horizon-periods", periods)->capture_default_str();
  sch->add_option("--out-dir", schild_opt.out_dir, "Output directory");
  sch->add_flag("--verbose", schild_opt.verbose, "Progress on stderr");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_code(ErrorKind::InvalidArgument);
  }

  if (*run) {
    return guarded([&] {
      const RunResult r = run_scenario_file(scenario_path, opt);
      std::cout << dump_json(r.summary);
      return r.exit_code;
    });
  }
  if (*validate) {
    return guarded([&] {
      const InitialData d = parse_as<InitialData>(read_json_file(data_path), data_path);
      GuardParams g;
      if (!guards_path.empty()) {
        g = parse_as<GuardParams>(read_json_file(guards_path), guards_path);
        check_guards(g);
      }
      const ValidationReport rep = validate_initial_data(d, g);
      std::cout << dump_json(Json(rep));
      return rep.ok() ? 0 : exit_code(ErrorKind::ValidationFailure);
    });
  }
  schild["m1"] = m1;
  schild["m2"] = m2;
  schild["e1"] = e1;
  schild["e2"] = e2;
  schild["r1"] = r1;
  schild["horizon_periods"] = periods;
  return guarded([&] {
    const RunResult r = run_scenario(schild, fs::current_path(), schild_opt);
    std::cout << dump_json(r.summary);
    return r.exit_code;
  });
}

}  // namespace wfdelay::cli
