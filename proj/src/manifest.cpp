#include "nsdamp/manifest.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace nsdamp {

std::string to_string(VerdictStatus s) {
  switch (s) {
    case VerdictStatus::Pass: return "pass";
    case VerdictStatus::Fail: return "fail";
    case VerdictStatus::Skip: return "skip";
  }
  return "?";
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void RunManifest::set_verdict(const std::string& name, Verdict v) {
  for (auto& [k, existing] : verdicts) {
    if (k == name) {
      existing = std::move(v);
      return;
    }
  }
  verdicts.emplace_back(name, std::move(v));
}

bool RunManifest::all_pass() const {
  for (const auto& [k, v] : verdicts) {
    if (v.status == VerdictStatus::Fail) return false;
  }
  return true;
}

namespace {

// JSON has no NaN or infinity.
nlohmann::json number(double v) {
  if (std::isfinite(v)) return v;
  return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

}  // namespace

std::string RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["config_hash"] = config_hash;
  j["tool_version"] = tool_version;
  j["started"] = started;
  j["finished"] = finished;
  j["wall_seconds"] = wall_seconds;
  auto& v = j["verdicts"] = nlohmann::ordered_json::object();
  for (const auto& [name, verdict] : verdicts) {
    nlohmann::ordered_json e;
    e["status"] = to_string(verdict.status);
    e["margin"] = number(verdict.margin);
    if (!verdict.detail.empty()) e["detail"] = verdict.detail;
    v[name] = e;
  }
  auto& t = j["tolerances"] = nlohmann::ordered_json::object();
  for (const auto& [k, x] : tolerances) t[k] = number(x);
  auto& m = j["metrics"] = nlohmann::ordered_json::object();
  for (const auto& [k, x] : metrics) m[k] = number(x);
  j["output_paths"] = output_paths;
  return j.dump(2) + "\n";
}

void RunManifest::write(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write manifest " + path);
  os << to_json();
}

}  // namespace nsdamp
