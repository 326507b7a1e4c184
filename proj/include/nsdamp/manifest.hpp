#pragma once

/// @file manifest.hpp
/// @brief Per-run record: config hash, tool version, timestamps, verdicts,
/// tolerances and output paths, written as JSON.

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace nsdamp {

inline constexpr const char* kToolVersion = "nsdamp 0.1.0";

enum class VerdictStatus { Pass, Fail, Skip };
std::string to_string(VerdictStatus s);

struct Verdict {
  VerdictStatus status = VerdictStatus::Skip;
  /// Signed distance from the threshold; >= 0 means the check holds.
  double margin = 0.0;
  std::string detail;
};

/// UTC timestamp, ISO 8601 with seconds.
std::string utc_timestamp();

struct RunManifest {
  std::string command;
  std::string config_hash;
  std::string tool_version = kToolVersion;
  std::string started;
  std::string finished;
  double wall_seconds = 0.0;
  std::vector<std::pair<std::string, Verdict>> verdicts;
  std::map<std::string, double> tolerances;
  std::map<std::string, double> metrics;
  std::vector<std::string> output_paths;

  /// Adds or replaces a verdict; each name appears once.
  void set_verdict(const std::string& name, Verdict v);
  /// Pass if every verdict passes or is skipped.
  bool all_pass() const;

  std::string to_json() const;
  void write(const std::string& path) const;
};

}  // namespace nsdamp
