#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "nsdamp/commands.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using namespace nsdamp;

namespace {

const char* kSmall =
    "nu = 0.5\ndt = 0.01\nt_end = 0.1\nsample_every = 2\ngrid.n = 8\n"
    "law.family = polynomial\nlaw.alpha = 1\nlaw.beta = 5\ninitial.kind = taylor_green\n";

std::string write_cfg(const std::string& dir, const std::string& name, const std::string& body) {
  const auto path = (fs::path(dir) / name).string();
  std::ofstream(path) << body;
  return path;
}

struct CliResult {
  int code;
  std::string out, err;
};

CliResult run(std::vector<std::string> args) {
  args.insert(args.begin(), "nsdamp");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = nsdamp::cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

nlohmann::json manifest(const std::string& dir) {
  std::ifstream is(fs::path(dir) / "manifest.json");
  return nlohmann::json::parse(is);
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), {}};
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("certify-law exit codes") {
  const auto dir = test::scratch_dir("cli_certify");
  const auto good = write_cfg(dir, "good.cfg", kSmall);
  CHECK(run({"--config", good, "--out-dir", dir + "/good", "certify-law"}).code == 0);
  const auto m = manifest(dir + "/good");
  for (const char* name : {"admissible", "lower_bound", "monotonicity_battery", "lipschitz_battery_R1"})
    CHECK(m["verdicts"][name]["status"] == "pass");

  const auto sine = write_cfg(dir, "sin.cfg", "law.family = custom\nlaw.custom = sin\nlaw.c = 1\nlaw.p = 3\n");
  CHECK(run({"--config", sine, "--out-dir", dir + "/sin", "certify-law"}).code == 1);
  CHECK(manifest(dir + "/sin")["verdicts"]["admissible"]["status"] == "fail");

  // The closed-form constant fails for beta < 1 and the report records it.
  const auto ex = write_cfg(dir, "exp.cfg", "law.family = exponential\nlaw.alpha = 1\nlaw.beta = 0.01\nlaw.r = 1\n");
  CHECK(run({"--config", ex, "--out-dir", dir + "/exp", "certify-law"}).code == 1);
  const auto csv = slurp(fs::path(dir) / "exp" / "lower_bound.csv");
  CHECK(csv.find(",1\n") != std::string::npos);
  CHECK(manifest(dir + "/exp")["verdicts"]["uniqueness_applicable"]["status"] == "skip");
}

TEST_CASE("usage and parse errors exit 2") {
  const auto dir = test::scratch_dir("cli_usage");
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"simulate"}).code == 2);
  CHECK(run({"--config", dir + "/missing.cfg", "simulate"}).code == 2);
  const auto bad = write_cfg(dir, "bad.cfg", "nu = 0.1\nnu = 0.2\n");
  CHECK(run({"--config", bad, "simulate"}).code == 2);
  const auto good = write_cfg(dir, "good.cfg", kSmall);
  CHECK(run({"--config", good, "--tolerance-scale", "-1", "simulate"}).code == 2);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("simulate with t_end = 0 has one sample") {
  const auto dir = test::scratch_dir("cli_t0");
  // Appending a second t_end is a duplicate key, not an override.
  const auto cfg = write_cfg(dir, "c.cfg", std::string(kSmall) + "t_end = 0\n");
  std::string body = kSmall;
  body.replace(body.find("t_end = 0.1"), 11, "t_end = 0");
  const auto clean = write_cfg(dir, "clean.cfg", body);
  CHECK(run({"--config", cfg, "simulate"}).code == 2);
  CHECK(run({"--config", clean, "--out-dir", dir + "/o", "simulate"}).code == 0);
  CHECK(manifest(dir + "/o")["metrics"]["samples"] == 1);
  const auto index = slurp(fs::path(dir) / "o" / "index.csv");
  CHECK(std::count(index.begin(), index.end(), '\n') == 2);
}

TEST_CASE("energy-budget writes the ledger and passes") {
  const auto dir = test::scratch_dir("cli_budget");
  const auto cfg = write_cfg(dir, "c.cfg", kSmall);
  CHECK(run({"--config", cfg, "--out-dir", dir, "energy-budget"}).code == 0);
  const auto m = manifest(dir);
  CHECK(m["command"] == "energy-budget");
  CHECK(m["verdicts"]["budget_residual"]["status"] == "pass");
  CHECK(fs::exists(fs::path(dir) / "ledger.csv"));
  CHECK(m["config_hash"].get<std::string>().size() == 64);
}

TEST_CASE("twin-run with delta 0 reports an identically zero difference") {
  const auto dir = test::scratch_dir("cli_twin");
  const auto cfg = write_cfg(dir, "c.cfg", kSmall);
  CHECK(run({"--config", cfg, "--out-dir", dir, "twin-run", "--delta", "0"}).code == 0);
  std::istringstream csv(slurp(fs::path(dir) / "contraction.csv"));
  std::string line;
  std::getline(csv, line);
  int rows = 0;
  while (std::getline(csv, line)) {
    ++rows;
    CHECK(line.find(",0,0,0") != std::string::npos);
  }
  CHECK(rows > 1);

  const auto no_cert = write_cfg(dir, "p3.cfg", "law.family = polynomial\nlaw.alpha = 1\nlaw.beta = 3\ngrid.n = 8\n");
  CHECK(run({"--config", no_cert, "--out-dir", dir + "/p3", "twin-run"}).code == 1);
}

TEST_CASE("continuity and equicontinuity") {
  const auto dir = test::scratch_dir("cli_cont");
  std::string body = kSmall;
  body.replace(body.find("t_end = 0.1"), 11, "t_end = 0.4");
  const auto cfg = write_cfg(dir, "c.cfg", body);
  CHECK(run({"--config", cfg, "--out-dir", dir + "/c", "continuity", "--epsilons", "0.02,0.04,0.08"}).code == 0);
  CHECK(fs::exists(fs::path(dir) / "c" / "continuity.csv"));
  const int eq = run({"--config", cfg, "--out-dir", dir + "/e", "equicontinuity"}).code;
  CHECK((eq == 0 || eq == 1));
  CHECK(fs::exists(fs::path(dir) / "e" / "modulus.csv"));
  CHECK(manifest(dir + "/e")["verdicts"].contains("gamma_in_window"));
}

TEST_CASE("blow-up exits 3 and keeps partial output") {
  const auto dir = test::scratch_dir("cli_blowup");
  const auto cfg = write_cfg(dir, "c.cfg",
                             "nu = 0.01\ndt = 0.1\nt_end = 5\nsample_every = 1\ngrid.n = 8\n"
                             "law.family = polynomial\nlaw.alpha = 1\nlaw.beta = 5\ninitial.amplitude = 50\n");
  CHECK(run({"--config", cfg, "--out-dir", dir, "simulate"}).code == 3);
  CHECK(fs::exists(fs::path(dir) / "index.csv"));
  CHECK(manifest(dir)["verdicts"]["no_blow_up"]["status"] == "fail");
}

TEST_CASE("seed override changes the hash") {
  const auto dir = test::scratch_dir("cli_seed");
  const auto cfg = write_cfg(dir, "c.cfg", std::string(kSmall) + "initial.seed = 1\n");
  REQUIRE(run({"--config", cfg, "--out-dir", dir + "/a", "simulate"}).code == 0);
  REQUIRE(run({"--config", cfg, "--out-dir", dir + "/b", "--seed-override", "2", "simulate"}).code == 0);
  CHECK(manifest(dir + "/a")["config_hash"] != manifest(dir + "/b")["config_hash"]);
}

TEST_CASE("sweep output does not depend on --jobs") {
  const auto dir = test::scratch_dir("cli_sweep");
  const auto cfgs = dir + "/cfgs";
  fs::create_directories(cfgs);
  write_cfg(cfgs, "a.cfg", kSmall);
  write_cfg(cfgs, "b.cfg", std::string(kSmall) + "initial.amplitude = 0.5\n");
  write_cfg(cfgs, "c.cfg", "nu = 0.2\ndt = 0.01\nt_end = 0.1\ngrid.n = 8\nlaw.family = exponential\n"
                           "law.alpha = 1\nlaw.beta = 1\nlaw.r = 2\ninitial.kind = random_spectrum\ninitial.amplitude = 0.3\n");
  CHECK(run({"--out-dir", dir + "/j1", "--jobs", "1", "sweep", cfgs}).code == 0);
  CHECK(run({"--out-dir", dir + "/j3", "--jobs", "3", "sweep", cfgs}).code == 0);
  for (const char* stem : {"a", "b", "c"}) {
    CHECK(fs::exists(fs::path(dir) / "j1" / stem / "manifest.json"));
    CHECK(slurp(fs::path(dir) / "j1" / stem / "ledger.csv") == slurp(fs::path(dir) / "j3" / stem / "ledger.csv"));
    CHECK(manifest(dir + "/j1/" + stem)["config_hash"] == manifest(dir + "/j3/" + stem)["config_hash"]);
  }
  CHECK(run({"--out-dir", dir + "/none", "sweep", dir + "/nothing"}).code == 2);
}

}  // TEST_SUITE
