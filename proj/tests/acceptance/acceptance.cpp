// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 only if
// every criterion passes. Thresholds are fixed below, not read from config.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "nsdamp/diagnostics.hpp"
#include "nsdamp/solver.hpp"
#include "nsdamp/spectral_ops.hpp"

using namespace nsdamp;

namespace {

// Pinned thresholds.
constexpr double kBudgetRel = 1e-6;
constexpr double kBudgetShrink = 8.0;
constexpr double kPointwiseRel = 1e-12;
constexpr int kBatteryPairs = 100000;
constexpr double kBatteryBox = 5.0;
constexpr double kCertXMax = 50.0;
constexpr int kCertSamples = 10000;
constexpr int kRandomFields = 100;
constexpr double kLerayRel = 1e-12;
constexpr double kLinearResponse = 0.10;
constexpr double kOrderMin = 0.9, kOrderMax = 1.1;
constexpr double kGammaMin = 0.5, kGammaMax = 1.1;
constexpr double kDecayRel = 1e-12;
constexpr double kTemporalOrder = 3.9;

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

VectorFieldK white_noise(const TorusGrid& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  VectorSamples s;
  for (auto& c : s) {
    c.resize(g.size());
    for (auto& x : c) x = d(rng);
  }
  auto u = forward_transform(g, s);
  for (auto& c : u.components()) c[0] = 0;
  return u;
}

double budget_residual(const SolverConfig& cfg) {
  const auto r = run(cfg);
  if (!r.ok()) return INFINITY;
  return energy_budget(r.trajectory, cfg.nu).max_rel_residual;
}

SolverConfig tg_poly15() {
  SolverConfig c;
  c.grid = TorusGrid(32, 2 * std::numbers::pi, 2.0);
  c.nu = 0.1;
  c.law = DampingLaw::polynomial(1, 5);
  c.integrator = Integrator::RK4_IF;
  c.initial.kind = InitialKind::TaylorGreen;
  c.initial.amplitude = 1.0;
  return c;
}

const std::vector<DampingLaw>& battery_laws() {
  static const std::vector<DampingLaw> laws = {DampingLaw::polynomial(1, 5), DampingLaw::polynomial(2, 4),
                                               DampingLaw::exponential(1, 1, 2)};
  return laws;
}

// ---------------------------------------------------------------------------

Outcome energy_inequality() {
  auto cfg = tg_poly15();
  cfg.dt = 1e-3;
  cfg.t_end = 1.0;
  cfg.sample_every = 10;
  const double r1 = budget_residual(cfg);
  cfg.dt = 5e-4;
  cfg.sample_every = 20;
  const double r2 = budget_residual(cfg);
  const double shrink = r1 / r2;
  return {r1 <= kBudgetRel && shrink >= kBudgetShrink,
          fmt("max rel residual %.3e at dt=1e-3 (<= %.0e), %.3e at dt=5e-4, shrink %.2fx (>= %.0fx)", r1,
              kBudgetRel, r2, shrink, kBudgetShrink)};
}

Outcome monotonicity_battery_all() {
  std::ostringstream os;
  bool ok = true;
  for (const auto& law : battery_laws()) {
    const auto k = lower_bound_constants(law);
    const bool cert = verify_lower_bound(law, k.c, k.p, kCertXMax, kCertSamples).verified();
    const auto b = monotonicity_battery(law, k.c, k.p, kBatteryPairs, kBatteryBox, 2024, kPointwiseRel);
    ok = ok && cert && b.ok() && b.trials == static_cast<std::size_t>(kBatteryPairs);
    os << law.describe() << ": " << b.violations << "/" << b.trials << " violations; ";
  }
  return {ok, os.str()};
}

Outcome lipschitz_battery_all() {
  std::ostringstream os;
  bool ok = true;
  for (const auto& law : battery_laws()) {
    std::size_t v = 0, n = 0;
    for (double R : {1.0, 3.0, 10.0}) {
      const auto b = lipschitz_battery(law, R, kBatteryPairs, 4048 + static_cast<int>(R), kPointwiseRel);
      v += b.violations;
      n += b.trials;
      ok = ok && b.ok();
    }
    os << law.describe() << ": " << v << "/" << n << " violations; ";
  }
  return {ok, os.str()};
}

Outcome lower_bound_constant_checks() {
  bool ok = true;
  std::ostringstream os;
  for (const auto& law : {DampingLaw::polynomial(1, 5), DampingLaw::polynomial(2, 4)}) {
    const auto k = lower_bound_constants(law);
    std::size_t unequal = 0;
    for (const auto& row : sample_lower_bound(law, k.c, k.p, kCertXMax, kCertSamples)) unequal += row.f_x != row.bound;
    ok = ok && unequal == 0;
    os << law.describe() << " unequal samples " << unequal << "; ";
  }
  for (double r : {1.0, 2.0}) {
    const auto law = DampingLaw::exponential(1, 1, r);
    const auto k = lower_bound_constants(law);
    const auto cert = verify_lower_bound(law, k.c, k.p, kCertXMax, kCertSamples);
    ok = ok && cert.verified();
    os << law.describe() << " violations " << cert.violations.size() << "; ";
  }
  const auto neg = DampingLaw::exponential(1, 0.01, 1);
  const auto k = lower_bound_constants(neg);
  const auto cert = verify_lower_bound(neg, k.c, k.p, kCertXMax, kCertSamples);
  ok = ok && !cert.verified() && !cert.violations.empty();
  os << neg.describe() << " (c=" << k.c << ") violations " << cert.violations.size() << " (required > 0)";
  return {ok, os.str()};
}

Outcome truncation_bound() {
  const TorusGrid g(32);
  int violations = 0;
  double worst = 0;
  for (int i = 0; i < kRandomFields; ++i) {
    const auto w = white_noise(g, 700 + i);
    const double rhs_base = sobolev_norm(w, -0.5, true);
    for (double R : {2.0, 4.0, 8.0}) {
      const double lhs = sobolev_norm(w - friedrich_cutoff(w, R), -1.5, true);
      const double rhs = rhs_base / R;
      worst = std::max(worst, lhs / rhs);
      if (lhs > rhs) ++violations;
    }
  }
  return {violations == 0, fmt("%d violations over %d fields x 3 radii, max lhs/rhs %.4f", violations,
                               kRandomFields, worst)};
}

Outcome leray_properties() {
  const TorusGrid g(32);
  int violations = 0;
  double worst_idem = 0, worst_grad = 0, worst_div = 0;
  for (int i = 0; i < kRandomFields; ++i) {
    const auto u = white_noise(g, 900 + i);
    const auto p = leray_project(u);
    const auto pp = leray_project(p);
    const double idem = (pp - p).coefficient_norm() / p.coefficient_norm();
    std::mt19937_64 rng(1900 + i);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    ScalarSamples s(g.size());
    for (auto& x : s) x = d(rng);
    auto phi = forward_transform(g, s);
    phi.coeffs()[0] = 0;
    const auto grad = gradient(phi);
    const double gr = leray_project(grad).coefficient_norm() / grad.coefficient_norm();
    const double div = p.divergence_defect();
    worst_idem = std::max(worst_idem, idem);
    worst_grad = std::max(worst_grad, gr);
    worst_div = std::max(worst_div, div);
    if (idem > kLerayRel || gr > kLerayRel || div > kLerayRel) ++violations;
  }
  return {violations == 0, fmt("%d violations; max idempotence %.2e, gradient %.2e, divergence %.2e", violations,
                               worst_idem, worst_grad, worst_div)};
}

Outcome uniqueness_contraction() {
  RunConfig cfg;
  cfg.solver = tg_poly15();
  cfg.solver.nu = 1.0;
  cfg.solver.dt = 2e-3;
  cfg.solver.t_end = 1.0;
  cfg.solver.sample_every = 10;
  const auto reps = twin_run_contraction(cfg, {1e-6, 5e-7}, 777);
  bool ok = reps.size() == 2;
  std::ostringstream os;
  for (const auto& r : reps) {
    ok = ok && r.holds && r.min_rel_margin >= 0.0;
    os << "delta " << r.delta << ": min rel margin " << r.min_rel_margin << ", sup|w| " << r.sup_w << "; ";
  }
  const double c = reps.front().c_nu_p;
  ok = ok && std::abs(c - 1.0 / 32) <= 1e-15;
  const double dev = linear_response_deviation(reps);
  ok = ok && dev <= kLinearResponse;
  os << "c_nu_p " << c << ", linear response deviation " << dev;
  return {ok, os.str()};
}

Outcome continuity() {
  RunConfig cfg;
  cfg.solver = tg_poly15();
  cfg.solver.dt = 0.00125;
  cfg.solver.t_end = 0.5;
  cfg.solver.sample_every = 10;
  const auto r = continuity_probe(cfg, {0.1, 0.05, 0.025, 0.0125});
  std::ostringstream os;
  for (const auto& row : r.rows) os << "eps " << row.eps << " -> " << row.distance << "; ";
  const bool order_ok = r.order >= kOrderMin && r.order <= kOrderMax;
  os << "order " << r.order << ", shift checked " << r.shift_checked << " holds " << r.shift_holds;
  return {r.monotone && order_ok && r.shift_checked && r.shift_holds, os.str()};
}

Outcome equicontinuity() {
  SolverConfig cfg = tg_poly15();
  cfg.initial.kind = InitialKind::RandomSpectrum;
  cfg.initial.amplitude = 1.0;
  cfg.initial.seed = 2718;
  cfg.dt = 1e-3;
  cfg.t_end = 0.5;
  cfg.sample_every = 5;
  const auto run_result = run(cfg);
  if (!run_result.ok()) return {false, "run blew up"};
  const auto r = equicontinuity_modulus(run_result.trajectory, 0.5);
  const auto& lo = r.rows.front();
  const auto& hi = r.rows.back();
  const bool vanishes = lo.modulus > 0.0 && lo.modulus <= hi.modulus * std::pow(lo.lag / hi.lag, kGammaMin);
  const bool window = r.gamma >= kGammaMin && r.gamma <= kGammaMax;
  return {window && vanishes, fmt("gamma %.4f in [%.1f, %.1f]; modulus %.3e at lag %.3g, %.3e at lag %.3g",
                                  r.gamma, kGammaMin, kGammaMax, lo.modulus, lo.lag, hi.modulus, hi.lag)};
}

Outcome solver_self_tests() {
  // Pure viscous decay of a random solenoidal field.
  SolverConfig v;
  v.grid = TorusGrid(32);
  v.nu = 0.1;
  v.dt = 0.01;
  v.t_end = 0.01;
  v.enable_nonlinear = false;
  v.enable_damping = false;
  GalerkinSolver vs(v);
  const auto u0 = friedrich_cutoff(leray_project(white_noise(v.grid, 5)), v.cutoff());
  auto st = vs.state_from(u0);
  vs.advance(st);
  const auto xi2 = xi_squared_table(v.grid);
  double decay_err = 0;
  for (int a = 0; a < 3; ++a)
    for (std::size_t i = 0; i < xi2.size(); ++i) {
      const Complex expected = u0.component(a)[i] * std::exp(-v.nu * xi2[i] * v.dt);
      if (std::abs(expected) > 0)
        decay_err = std::max(decay_err, std::abs(st.u_hat.component(a)[i] - expected) / std::abs(expected));
    }

  // Temporal order on Taylor-Green, 16^3, against a fine reference.
  SolverConfig o = tg_poly15();
  o.grid = TorusGrid(16);
  o.t_end = 0.4;
  o.sample_every = 1000000;
  auto final_state = [&](double dt) {
    o.dt = dt;
    return run(o).trajectory.samples.back().u_hat;
  };
  const auto ref = final_state(0.00125);
  const double e1 = l2_norm(final_state(0.02) - ref), e2 = l2_norm(final_state(0.01) - ref);
  const double order = std::log2(e1 / e2);

  // Bit-identical reruns, including serial against parallel kernels.
  o.dt = 0.01;
  o.sample_every = 5;
  RunOptions serial;
  serial.mode = KernelMode::Serial;
  const auto a = run(o), b = run(o), c = run(o, serial);
  bool identical = a.trajectory.samples.size() == b.trajectory.samples.size();
  for (std::size_t i = 0; identical && i < a.trajectory.samples.size(); ++i) {
    const auto& x = a.trajectory.samples[i];
    identical = x.u_hat == b.trajectory.samples[i].u_hat && x.u_hat == c.trajectory.samples[i].u_hat &&
                x.visc_accum == b.trajectory.samples[i].visc_accum && x.damp_accum == c.trajectory.samples[i].damp_accum;
  }
  return {decay_err <= kDecayRel && order >= kTemporalOrder && identical,
          fmt("viscous decay max rel error %.2e (<= %.0e); RK4_IF order %.3f (>= %.1f); reruns bit-identical: %s",
              decay_err, kDecayRel, order, kTemporalOrder, identical ? "yes" : "no")};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"energy inequality and dt refinement", energy_inequality},
      {"monotonicity battery", monotonicity_battery_all},
      {"lipschitz battery", lipschitz_battery_all},
      {"lower-bound constants", lower_bound_constant_checks},
      {"friedrich truncation bound", truncation_bound},
      {"leray projector", leray_properties},
      {"uniqueness contraction", uniqueness_contraction},
      {"continuity at t = 0", continuity},
      {"equicontinuity modulus", equicontinuity},
      {"solver self-tests", solver_self_tests},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s  %2zu  %-38s %s  [%.1fs]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
