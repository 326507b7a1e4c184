#pragma once

/// @file commands.hpp
/// @brief Command implementations behind the nsdamp executable. Each returns
/// the process exit code and writes its reports plus manifest.json into the
/// output directory.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace nsdamp::cli {

enum ExitCode : int { kPass = 0, kCheckFailure = 1, kUsage = 2, kBlowUp = 3 };

struct CommonOptions {
  std::string config_path;
  std::string out_dir = ".";
  int jobs = 1;
  std::optional<std::uint64_t> seed_override;
  double tolerance_scale = 1.0;
};

int cmd_certify_law(const CommonOptions& o, std::ostream& log);
int cmd_simulate(const CommonOptions& o, std::ostream& log);
int cmd_energy_budget(const CommonOptions& o, std::ostream& log);
int cmd_twin_run(const CommonOptions& o, const std::optional<std::vector<double>>& deltas,
                 std::ostream& log);
int cmd_continuity(const CommonOptions& o, const std::optional<std::vector<double>>& epsilons,
                   std::ostream& log);
int cmd_equicontinuity(const CommonOptions& o, std::ostream& log);
/// Runs energy-budget on every *.cfg file in config_dir, at most o.jobs at a
/// time, each into out_dir/<file stem>/. Returns the most severe exit code.
int cmd_sweep(const CommonOptions& o, const std::string& config_dir, std::ostream& log);

/// Full command-line entry point.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace nsdamp::cli
