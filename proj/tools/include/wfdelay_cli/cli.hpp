#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <wfdelay/io.hpp>

namespace wfdelay::cli {

struct RunOptions {
  std::filesystem::path out_dir = ".";
  bool verbose = false;
};

struct RunResult {
  int exit_code = 0;
  Json summary;
  std::vector<std::filesystem::path> outputs;  // in write order
};

// Runs a parsed scenario. Relative paths inside it resolve against base_dir;
// a leading "${out_dir}/" resolves against the output directory.
RunResult run_scenario(const Json& scenario, const std::filesystem::path& base_dir, const RunOptions& opt);
RunResult run_scenario_file(const std::filesystem::path& path, const RunOptions& opt);

// Full command line: run, validate, schild. Returns the process exit code.
int main(int argc, char** argv);

}  // namespace wfdelay::cli
