#include "nsdamp/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include "nsdamp/config.hpp"
#include "nsdamp/diagnostics.hpp"
#include "nsdamp/errors.hpp"
#include "nsdamp/field_io.hpp"
#include "nsdamp/manifest.hpp"
#include "nsdamp/solver.hpp"
#include "nsdamp/text.hpp"

namespace fs = std::filesystem;

namespace nsdamp::cli {

namespace {

using text::format_double;
using Clock = std::chrono::steady_clock;

RunConfig load(const CommonOptions& o) {
  if (o.config_path.empty()) throw ParseError("no config file given (--config)");
  RunConfig cfg = load_config(o.config_path);
  if (o.seed_override) cfg.solver.initial.seed = *o.seed_override;
  if (!(o.tolerance_scale > 0.0)) throw ParseError("--tolerance-scale must be positive");
  cfg.tol = cfg.tol.scaled(o.tolerance_scale);
  return cfg;
}

std::string prepare_out_dir(const std::string& dir) {
  fs::create_directories(dir);
  return dir;
}

std::string path_in(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  return os;
}

// Starts a manifest for `command` on `cfg`.
RunManifest begin_manifest(const std::string& command, const RunConfig& cfg) {
  RunManifest m;
  m.command = command;
  m.config_hash = config_hash(cfg);
  m.started = utc_timestamp();
  const auto& t = cfg.tol;
  m.tolerances = {{"budget_rel", t.budget_rel},           {"pointwise", t.pointwise},
                  {"divergence", t.divergence},           {"contraction_rel", t.contraction_rel},
                  {"shift_rel", t.shift_rel},             {"gronwall_rel", t.gronwall_rel},
                  {"gamma_min", t.gamma_min},             {"gamma_max", t.gamma_max},
                  {"order_min", t.order_min},             {"order_max", t.order_max},
                  {"linear_response", t.linear_response}};
  return m;
}

void finish_manifest(RunManifest& m, const std::string& dir, Clock::time_point t0) {
  m.finished = utc_timestamp();
  m.wall_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  const auto path = path_in(dir, "manifest.json");
  m.output_paths.push_back(path);
  m.write(path);
}

Verdict check(bool ok, double margin, std::string detail = {}) {
  return {ok ? VerdictStatus::Pass : VerdictStatus::Fail, margin, std::move(detail)};
}

Verdict skip(std::string detail) { return {VerdictStatus::Skip, 0.0, std::move(detail)}; }

int verdict_exit(const RunManifest& m) { return m.all_pass() ? kPass : kCheckFailure; }

// Largest |coefficient| outside the Friedrich ball.
double outside_support(const VectorFieldK& u, double R) {
  const auto& g = u.grid();
  const auto xi2 = xi_squared_table(g);
  double worst = 0.0;
  for (int a = 0; a < 3; ++a) {
    const auto& c = u.component(a);
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (!kept_by_cutoff(xi2[i], R)) worst = std::max(worst, std::abs(c[i]));
    }
  }
  return worst;
}

struct RunChecks {
  double max_divergence = 0.0;
  double max_outside = 0.0;
  bool energy_nonincreasing = true;
};

RunChecks trajectory_checks(const Trajectory& traj, double R) {
  RunChecks c;
  double prev = std::numeric_limits<double>::infinity();
  for (const auto& s : traj.samples) {
    if (!s.u_hat.components()[0].empty()) {
      c.max_divergence = std::max(c.max_divergence, s.u_hat.divergence_defect());
      c.max_outside = std::max(c.max_outside, outside_support(s.u_hat, R));
    }
    // Relative slack for rounding in the norm itself.
    if (s.energy > prev * (1.0 + 1e-13)) c.energy_nonincreasing = false;
    prev = s.energy;
  }
  return c;
}

void add_run_verdicts(RunManifest& m, const Trajectory& traj, const RunConfig& cfg) {
  const auto c = trajectory_checks(traj, cfg.solver.cutoff());
  m.set_verdict("no_blow_up", check(!traj.blow_up, traj.blow_up ? -1.0 : 0.0,
                                    traj.blow_up ? "non-finite coefficients at t = " +
                                                       format_double(traj.blow_up->t)
                                                 : ""));
  m.set_verdict("divergence_free", check(c.max_divergence <= cfg.tol.divergence,
                                         cfg.tol.divergence - c.max_divergence));
  m.set_verdict("support_in_ball", check(c.max_outside == 0.0, c.max_outside == 0.0 ? 0.0 : -c.max_outside));
  m.set_verdict("energy_nonincreasing", check(c.energy_nonincreasing, 0.0));
  m.metrics["max_divergence_defect"] = c.max_divergence;
}

// Runs the configured solve, writing index.csv and optional snapshots.
RunResult simulate_into(const RunConfig& cfg, const std::string& dir, RunManifest& m) {
  RunOptions opts;
  opts.config_hash = m.config_hash;
  RunResult r = run(cfg.solver, opts);
  std::vector<std::string> snaps;
  if (cfg.write_snapshots) {
    for (std::size_t i = 0; i < r.trajectory.samples.size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof(name), "snap_%05zu.bin", i);
      const auto path = path_in(dir, name);
      write_field_file(path, r.trajectory.samples[i].u_hat);
      snaps.emplace_back(name);
      m.output_paths.push_back(path);
    }
  }
  const auto index = path_in(dir, "index.csv");
  auto os = open_out(index);
  write_index_csv(os, r.trajectory, snaps);
  m.output_paths.push_back(index);
  for (const auto& [k, v] : r.manifest.metrics) m.metrics[k] = v;
  add_run_verdicts(m, r.trajectory, cfg);
  return r;
}

// Shared error handling: parse problems exit 2, blow-up exits 3.
template <class Body>
int guarded(std::ostream& log, Body&& body) {
  try {
    return body();
  } catch (const ParseError& e) {
    log << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const BlowUpError& e) {
    log << "blow-up: " << e.what() << "\n";
    return kBlowUp;
  } catch (const RefusalError& e) {
    log << "refused: " << e.what() << "\n";
    return kCheckFailure;
  } catch (const DomainError& e) {
    log << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kCheckFailure;
  }
}

}  // namespace

// ---------------------------------------------------------------------------

int cmd_certify_law(const CommonOptions& o, std::ostream& log) {
  return guarded(log, [&] {
    const auto t0 = Clock::now();
    const RunConfig cfg = load(o);
    const auto dir = prepare_out_dir(o.out_dir);
    auto m = begin_manifest("certify-law", cfg);
    const auto& law = cfg.solver.law;
    const auto& cs = cfg.cert;
    const double tol = cfg.tol.pointwise;
    log << "law: " << law.describe() << "\n";

    const auto adm = verify_admissible(law, cs.x_max, cs.samples);
    m.set_verdict("admissible", check(adm.ok(), -static_cast<double>(adm.violations.size()),
                                      adm.ok() ? "" : to_string(adm.violations.front().issue) +
                                                          " at x = " + format_double(adm.violations.front().x)));
    {
      auto os = open_out(path_in(dir, "admissibility.csv"));
      os << "issue,x,value\n";
      for (const auto& v : adm.violations) {
        os << to_string(v.issue) << ',' << format_double(v.x) << ',' << format_double(v.value) << '\n';
      }
      m.output_paths.push_back(path_in(dir, "admissibility.csv"));
    }

    std::optional<LowerBoundCert> constants;
    if (cs.c && cs.p) {
      constants = LowerBoundCert{};
      constants->c = *cs.c;
      constants->p = *cs.p;
      constants->uniqueness_applicable = *cs.p > 2.0;
    } else {
      try {
        constants = lower_bound_constants(law);
      } catch (const UnsupportedError&) {
        constants.reset();
      }
    }
    if (!constants) {
      m.set_verdict("lower_bound", skip("no (c, p) for this law; set law.c and law.p"));
      m.set_verdict("uniqueness_applicable", skip("no (c, p)"));
      m.set_verdict("monotonicity_battery", skip("no (c, p)"));
    } else {
      const double c = constants->c, p = constants->p;
      m.metrics["c"] = c;
      m.metrics["p"] = p;
      const auto rows = sample_lower_bound(law, c, p, cs.x_max, cs.samples);
      const auto cert = verify_lower_bound(law, c, p, cs.x_max, cs.samples);
      {
        const auto path = path_in(dir, "lower_bound.csv");
        auto os = open_out(path);
        write_bound_csv(os, rows);
        m.output_paths.push_back(path);
      }
      m.set_verdict("lower_bound",
                    check(cert.verified(), -static_cast<double>(cert.violations.size()),
                          cert.verified() ? "verified up to x = " + format_double(cert.verified_up_to)
                                          : std::to_string(cert.violations.size()) +
                                                " sampled violations, first at x = " +
                                                format_double(cert.violations.front().x)));
      if (cert.uniqueness_applicable) {
        m.set_verdict("uniqueness_applicable", check(true, p - 2.0));
        m.metrics["young_constant"] = young_constant(cfg.solver.nu, c, p);
      } else {
        m.set_verdict("uniqueness_applicable", skip("p <= 2: contraction argument inconclusive"));
      }
      const auto mono = monotonicity_battery(law, c, p, cfg.battery.pairs, cfg.battery.box,
                                             cfg.battery.seed, tol);
      m.set_verdict("monotonicity_battery",
                    check(mono.ok(), mono.worst_margin, std::to_string(mono.violations) + " of " +
                                                            std::to_string(mono.trials) + " pairs violate"));
    }
    for (double R : cfg.battery.radii) {
      const auto lip = lipschitz_battery(law, R, cfg.battery.pairs, cfg.battery.seed + 1, tol);
      m.set_verdict("lipschitz_battery_R" + format_double(R),
                    check(lip.ok(), lip.worst_margin, std::to_string(lip.violations) + " of " +
                                                          std::to_string(lip.trials) + " pairs violate"));
    }
    finish_manifest(m, dir, t0);
    for (const auto& [name, v] : m.verdicts) log << name << ": " << to_string(v.status) << "\n";
    return verdict_exit(m);
  });
}

int cmd_simulate(const CommonOptions& o, std::ostream& log) {
  return guarded(log, [&] {
    const auto t0 = Clock::now();
    const RunConfig cfg = load(o);
    const auto dir = prepare_out_dir(o.out_dir);
    auto m = begin_manifest("simulate", cfg);
    const auto r = simulate_into(cfg, dir, m);
    const auto ledger = energy_budget(r.trajectory, cfg.solver.nu);
    m.metrics["max_rel_budget_residual"] = ledger.max_rel_residual;
    finish_manifest(m, dir, t0);
    log << "samples: " << r.trajectory.samples.size() << "\n";
    if (r.trajectory.blow_up) return static_cast<int>(kBlowUp);
    return verdict_exit(m);
  });
}

int cmd_energy_budget(const CommonOptions& o, std::ostream& log) {
  return guarded(log, [&] {
    const auto t0 = Clock::now();
    const RunConfig cfg = load(o);
    const auto dir = prepare_out_dir(o.out_dir);
    auto m = begin_manifest("energy-budget", cfg);
    const auto r = simulate_into(cfg, dir, m);
    const auto L = energy_budget(r.trajectory, cfg.solver.nu);
    {
      const auto path = path_in(dir, "ledger.csv");
      auto os = open_out(path);
      write_ledger_csv(os, L);
      m.output_paths.push_back(path);
    }
    const double scale = L.initial_energy > 0.0 ? L.initial_energy : 1.0;
    m.set_verdict("budget_residual", check(L.max_rel_residual <= cfg.tol.budget_rel,
                                           cfg.tol.budget_rel - L.max_rel_residual));
    m.set_verdict("budget_overshoot", check(L.max_positive_residual / scale <= cfg.tol.budget_rel,
                                            cfg.tol.budget_rel - L.max_positive_residual / scale));
    m.set_verdict("integrals_nondecreasing", check(L.integrals_nondecreasing, 0.0));
    m.metrics["max_rel_budget_residual"] = L.max_rel_residual;
    m.metrics["quadrature_disagreement"] = L.quadrature_disagreement;
    finish_manifest(m, dir, t0);
    log << "max |residual| / ||u0||^2 = " << format_double(L.max_rel_residual) << "\n";
    if (r.trajectory.blow_up) return static_cast<int>(kBlowUp);
    return verdict_exit(m);
  });
}

int cmd_twin_run(const CommonOptions& o, const std::optional<std::vector<double>>& deltas,
                 std::ostream& log) {
  return guarded(log, [&] {
    const auto t0 = Clock::now();
    const RunConfig cfg = load(o);
    const auto dir = prepare_out_dir(o.out_dir);
    auto m = begin_manifest("twin-run", cfg);
    const auto ds = deltas ? *deltas : cfg.twin.deltas;
    std::vector<ContractionReport> reports;
    try {
      reports = twin_run_contraction(cfg, ds, cfg.twin.seed);
    } catch (const RefusalError& e) {
      m.set_verdict("certificate", check(false, -1.0, e.what()));
      finish_manifest(m, dir, t0);
      log << "refused: " << e.what() << "\n";
      return static_cast<int>(kCheckFailure);
    }
    m.set_verdict("certificate", check(true, 0.0));
    {
      const auto path = path_in(dir, "contraction.csv");
      auto os = open_out(path);
      write_contraction_csv(os, reports);
      m.output_paths.push_back(path);
    }
    for (const auto& rep : reports) {
      m.set_verdict("contraction_delta_" + format_double(rep.delta),
                    check(rep.holds, rep.min_rel_margin));
      m.metrics["sup_w_delta_" + format_double(rep.delta)] = rep.sup_w;
    }
    if (!reports.empty()) m.metrics["young_constant"] = reports.front().c_nu_p;
    std::size_t positive = 0;
    for (double d : ds) positive += d > 0.0;
    if (positive >= 2) {
      const double dev = linear_response_deviation(reports);
      m.set_verdict("linear_response", check(dev <= cfg.tol.linear_response, cfg.tol.linear_response - dev));
      m.metrics["linear_response_deviation"] = dev;
    } else {
      m.set_verdict("linear_response", skip("needs two positive deltas"));
    }
    finish_manifest(m, dir, t0);
    for (const auto& [name, v] : m.verdicts) log << name << ": " << to_string(v.status) << "\n";
    return verdict_exit(m);
  });
}

int cmd_continuity(const CommonOptions& o, const std::optional<std::vector<double>>& epsilons,
                   std::ostream& log) {
  return guarded(log, [&] {
    const auto t0 = Clock::now();
    const RunConfig cfg = load(o);
    const auto dir = prepare_out_dir(o.out_dir);
    auto m = begin_manifest("continuity", cfg);
    const auto eps = epsilons ? *epsilons : cfg.continuity.epsilons;
    const auto r = continuity_probe(cfg, eps);
    {
      const auto path = path_in(dir, "continuity.csv");
      auto os = open_out(path);
      write_continuity_csv(os, r);
      m.output_paths.push_back(path);
    }
    m.set_verdict("monotone_in_eps", check(r.monotone, 0.0));
    const bool order_ok = r.order >= cfg.tol.order_min && r.order <= cfg.tol.order_max;
    m.set_verdict("order_in_eps", check(order_ok, std::min(r.order - cfg.tol.order_min,
                                                           cfg.tol.order_max - r.order)));
    m.metrics["order"] = r.order;
    if (r.shift_checked) {
      double margin = std::numeric_limits<double>::infinity();
      for (const auto& s : r.shift_rows) margin = std::min(margin, (s.bound - s.sup_shift) / s.bound);
      m.set_verdict("shift_bound", check(r.shift_holds, margin));
      m.metrics["young_constant"] = r.c_nu_p;
    } else {
      m.set_verdict("shift_bound", skip("no certificate with p > 2, or no eps on the sample grid"));
    }
    finish_manifest(m, dir, t0);
    for (const auto& [name, v] : m.verdicts) log << name << ": " << to_string(v.status) << "\n";
    return verdict_exit(m);
  });
}

int cmd_equicontinuity(const CommonOptions& o, std::ostream& log) {
  return guarded(log, [&] {
    const auto t0 = Clock::now();
    const RunConfig cfg = load(o);
    const auto dir = prepare_out_dir(o.out_dir);
    auto m = begin_manifest("equicontinuity", cfg);
    const auto run_result = simulate_into(cfg, dir, m);
    if (run_result.trajectory.blow_up) {
      finish_manifest(m, dir, t0);
      return static_cast<int>(kBlowUp);
    }
    const auto r = equicontinuity_modulus(run_result.trajectory, cfg.equicontinuity.fit_fraction);
    {
      const auto path = path_in(dir, "modulus.csv");
      auto os = open_out(path);
      write_modulus_csv(os, r);
      m.output_paths.push_back(path);
    }
    const bool in_window = r.gamma >= cfg.tol.gamma_min && r.gamma <= cfg.tol.gamma_max;
    m.set_verdict("gamma_in_window", check(in_window, std::min(r.gamma - cfg.tol.gamma_min,
                                                               cfg.tol.gamma_max - r.gamma)));
    // Vanishing at zero lag: the smallest-lag modulus sits below the
    // largest-lag one by at least the gamma_min power of the lag ratio.
    const auto& lo = r.rows.front();
    const auto& hi = r.rows.back();
    const double allowed = hi.modulus * std::pow(lo.lag / hi.lag, cfg.tol.gamma_min);
    m.set_verdict("modulus_vanishes", check(lo.modulus <= allowed, allowed - lo.modulus));
    m.metrics["gamma"] = r.gamma;
    m.metrics["amplitude"] = r.amplitude;
    finish_manifest(m, dir, t0);
    for (const auto& [name, v] : m.verdicts) log << name << ": " << to_string(v.status) << "\n";
    return verdict_exit(m);
  });
}

int cmd_sweep(const CommonOptions& o, const std::string& config_dir, std::ostream& log) {
  return guarded(log, [&] {
    if (!fs::is_directory(config_dir)) throw ParseError("sweep: not a directory: " + config_dir);
    std::vector<fs::path> configs;
    for (const auto& e : fs::directory_iterator(config_dir)) {
      if (e.is_regular_file() && e.path().extension() == ".cfg") configs.push_back(e.path());
    }
    std::sort(configs.begin(), configs.end());
    if (configs.empty()) throw ParseError("sweep: no .cfg files in " + config_dir);
    if (o.jobs < 1) throw ParseError("--jobs must be >= 1");

    std::vector<int> codes(configs.size(), kPass);
    std::vector<std::string> logs(configs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i = next++; i < configs.size(); i = next++) {
        CommonOptions each = o;
        each.config_path = configs[i].string();
        each.out_dir = (fs::path(o.out_dir) / configs[i].stem()).string();
        std::ostringstream os;
        codes[i] = cmd_energy_budget(each, os);
        logs[i] = os.str();
      }
    };
    const int workers = std::min<int>(o.jobs, static_cast<int>(configs.size()));
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    // Most severe code wins: blow-up, then usage, then check failure.
    auto rank = [](int c) { return c == kBlowUp ? 3 : c == kUsage ? 2 : c == kCheckFailure ? 1 : 0; };
    int worst = kPass;
    for (std::size_t i = 0; i < configs.size(); ++i) {
      log << configs[i].filename().string() << ": exit " << codes[i] << "\n" << logs[i];
      if (rank(codes[i]) > rank(worst)) worst = codes[i];
    }
    return worst;
  });
}

// ---------------------------------------------------------------------------

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pseudo-spectral damped Navier-Stokes simulator and certification suite", "nsdamp"};
  app.require_subcommand(1);
  app.fallthrough();
  CommonOptions o;
  std::uint64_t seed = 0;
  app.add_option("--config", o.config_path, "Config file (key = value)");
  app.add_option("--out-dir", o.out_dir, "Directory for reports and manifest")->capture_default_str();
  app.add_option("--jobs", o.jobs, "Concurrent runs for sweep")->capture_default_str()->check(CLI::PositiveNumber);
  auto* seed_opt = app.add_option("--seed-override", seed, "Replace initial.seed");
  app.add_option("--tolerance-scale", o.tolerance_scale, "Multiply every tolerance slack")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  auto* certify = app.add_subcommand("certify-law", "Certify the configured damping law");
  auto* simulate = app.add_subcommand("simulate", "Run the solver and write samples");
  auto* budget = app.add_subcommand("energy-budget", "Run and check the energy budget");
  auto* twin = app.add_subcommand("twin-run", "Uniqueness contraction from perturbed twins");
  std::vector<double> deltas;
  auto* delta_opt = twin->add_option("--delta", deltas, "Perturbation sizes")->delimiter(',');
  auto* cont = app.add_subcommand("continuity", "Continuity of u(t) at t = 0");
  std::vector<double> eps;
  auto* eps_opt = cont->add_option("--epsilons", eps, "Times at which to measure")->delimiter(',');
  auto* equi = app.add_subcommand("equicontinuity", "H^-2 modulus of continuity in time");
  auto* sweep = app.add_subcommand("sweep", "energy-budget over a directory of configs");
  std::string sweep_dir;
  sweep->add_option("config_dir", sweep_dir, "Directory of .cfg files")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kPass;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n" << app.help();
    return kUsage;
  }
  if (*seed_opt) o.seed_override = seed;

  if (*certify) return cmd_certify_law(o, err);
  if (*simulate) return cmd_simulate(o, err);
  if (*budget) return cmd_energy_budget(o, err);
  if (*twin) return cmd_twin_run(o, *delta_opt ? std::optional(deltas) : std::nullopt, err);
  if (*cont) return cmd_continuity(o, *eps_opt ? std::optional(eps) : std::nullopt, err);
  if (*equi) return cmd_equicontinuity(o, err);
  if (*sweep) return cmd_sweep(o, sweep_dir, err);
  return kUsage;
}

}  // namespace nsdamp::cli
