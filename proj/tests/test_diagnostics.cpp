#include <doctest.h>

#include <cmath>
#include <sstream>

#include "nsdamp/diagnostics.hpp"
#include "nsdamp/errors.hpp"
#include "nsdamp/field_io.hpp"
#include "support.hpp"

using namespace nsdamp;

namespace {

VectorFieldK shear_mode(const TorusGrid& g, double A) {
  VectorFieldK u(g);
  const double n3 = static_cast<double>(g.size());
  u.at(1, 1, 0, 0) = Complex(0, -0.5 * A * n3);
  u.at(1, -1, 0, 0) = Complex(0, 0.5 * A * n3);
  u.set_divergence_free(true);
  return u;
}

// Pure viscous run of the shear mode sin(x) e_y, read from a field file.
RunConfig viscous_run(const std::string& dir, double nu, double dt, double t_end, double A) {
  RunConfig cfg;
  auto& s = cfg.solver;
  s.grid = TorusGrid(8);
  s.nu = nu;
  s.dt = dt;
  s.t_end = t_end;
  s.sample_every = 1;
  s.law = DampingLaw::zero();
  s.enable_nonlinear = false;
  s.enable_damping = false;
  s.initial.kind = InitialKind::FromFile;
  s.initial.file_path = dir + "/shear.bin";
  write_field_file(s.initial.file_path, shear_mode(s.grid, A));
  return cfg;
}

}  // namespace

TEST_SUITE("diagnostics") {

TEST_CASE("budget of a single-sample trajectory is zero") {
  auto cfg = test::small_tg_config(8).solver;
  cfg.t_end = 0;
  const auto L = energy_budget(run(cfg).trajectory, cfg.nu);
  REQUIRE(L.rows.size() == 1);
  CHECK(L.rows[0].residual == 0.0);
  CHECK(L.max_abs_residual == 0.0);
}

TEST_CASE("viscous single mode budget against the closed form") {
  const auto dir = test::scratch_dir("budget");
  const double nu = 0.2, A = 1.3;
  const auto cfg = viscous_run(dir, nu, 0.01, 1.0, A);
  const auto L = energy_budget(run(cfg.solver).trajectory, nu);
  const double e0 = 0.5 * A * A * cfg.solver.grid.volume();
  CHECK(L.initial_energy == doctest::Approx(e0).epsilon(1e-14));
  CHECK(L.max_rel_residual <= 1e-12);
  for (const auto& r : L.rows) {
    // ||u||^2 = e0 e^{-2 nu t}; 2 nu int ||grad u||^2 = e0 (1 - e^{-2 nu t}).
    CHECK(r.l2_sq == doctest::Approx(e0 * std::exp(-2 * nu * r.t)).epsilon(1e-12));
    CHECK(r.visc_int == doctest::Approx(e0 * -std::expm1(-2 * nu * r.t)).epsilon(1e-10));
    CHECK(r.damp_int == 0.0);
  }
  CHECK(L.integrals_nondecreasing);
  CHECK(L.quadrature_disagreement <= 1e-4);
}

TEST_CASE("ledger csv has one row per sample") {
  auto cfg = test::small_tg_config(8).solver;
  const auto tr = run(cfg).trajectory;
  std::ostringstream os;
  write_ledger_csv(os, energy_budget(tr, cfg.nu));
  const auto text = os.str();
  CHECK(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')) == tr.samples.size() + 1);
}

TEST_CASE("constant-in-time trajectory has zero modulus") {
  Trajectory tr;
  tr.dt = 0.1;
  const auto u = test::random_solenoidal(TorusGrid(8), 3, 3.0);
  for (int i = 0; i < 6; ++i) {
    Sample s;
    s.t = 0.1 * i;
    s.step = i;
    s.u_hat = u;
    tr.samples.push_back(s);
  }
  const auto r = equicontinuity_modulus(tr);
  REQUIRE_FALSE(r.rows.empty());
  for (const auto& row : r.rows) CHECK(row.modulus == 0.0);
}

TEST_CASE("viscous single mode modulus against the closed form") {
  const auto dir = test::scratch_dir("modulus");
  const double nu = 0.5, A = 2.0;
  const auto cfg = viscous_run(dir, nu, 0.02, 1.0, A);
  const auto r = equicontinuity_modulus(run(cfg.solver).trajectory);
  // sup over pairs is attained at t1 = 0; the H^-2 weight of |xi| = 1 is 1/2.
  const double l2 = A * std::sqrt(0.5 * cfg.solver.grid.volume());
  for (const auto& row : r.rows) {
    CHECK(row.modulus == doctest::Approx(-std::expm1(-nu * row.lag) * l2 / 2).epsilon(1e-11));
  }
  // Nearly linear for small lags.
  CHECK(r.gamma == doctest::Approx(1.0).epsilon(0.2));
}

TEST_CASE("power-law fit recovers exact data") {
  std::vector<double> x, y;
  for (int i = 1; i <= 10; ++i) {
    x.push_back(0.1 * i);
    y.push_back(3.0 * std::pow(0.1 * i, 0.7));
  }
  const auto f = fit_power_law(x, y);
  CHECK(f.exponent == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(f.amplitude == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("gronwall check") {
  std::vector<double> t, g, h;
  for (int i = 0; i <= 20; ++i) t.push_back(0.05 * i);
  SUBCASE("constant g, zero h") {
    g.assign(t.size(), 2.0);
    h.assign(t.size(), 0.0);
    const auto r = gronwall_check(t, g, h, 2.0);
    CHECK(r.verdict());
    for (double m : r.conclusion_margin) CHECK(m == 0.0);
  }
  SUBCASE("exponential, margins vanish under refinement") {
    auto max_margin = [](int pts) {
      std::vector<double> tt, gg, hh;
      for (int i = 0; i <= pts; ++i) {
        tt.push_back(1.0 * i / pts);
        gg.push_back(1.5 * std::exp(0.8 * tt.back()));
        hh.push_back(0.8);
      }
      const auto r = gronwall_check(tt, gg, hh, 1.5);
      REQUIRE(r.verdict());
      double m = 0;
      for (double v : r.hypothesis_margin) m = std::max(m, std::abs(v));
      for (double v : r.conclusion_margin) CHECK(std::abs(v) <= 1e-12);
      return m;
    };
    const double a = max_margin(20), b = max_margin(40);
    CHECK(a > 0.0);
    CHECK(a / b == doctest::Approx(4.0).epsilon(0.05));
  }
  SUBCASE("violated hypothesis") {
    g.assign(t.size(), 1.0);
    h.assign(t.size(), 0.0);
    g[10] = 1.5;
    const auto r = gronwall_check(t, g, h, 1.0);
    CHECK_FALSE(r.hypothesis);
    CHECK_FALSE(r.verdict());
  }
  SUBCASE("domain errors") {
    g.assign(t.size(), 1.0);
    h.assign(t.size(), -1.0);
    CHECK_THROWS_AS(gronwall_check(t, g, h, 1.0), DomainError);
    h.assign(t.size(), 0.0);
    CHECK_THROWS_AS(gronwall_check(t, g, h, -1.0), DomainError);
  }
}

TEST_CASE("twin runs") {
  auto cfg = test::small_tg_config(8);
  cfg.solver.nu = 1.0;
  SUBCASE("delta = 0 gives identical runs") {
    const auto reps = twin_run_contraction(cfg, {0.0}, 5);
    REQUIRE(reps.size() == 1);
    for (const auto& row : reps[0].rows) CHECK(row.w_sq == 0.0);
    CHECK(reps[0].holds);
    CHECK(reps[0].c_nu_p == doctest::Approx(1.0 / 32));
  }
  SUBCASE("contraction bound and linear response") {
    const auto reps = twin_run_contraction(cfg, {1e-6, 5e-7}, 5);
    for (const auto& r : reps) {
      CHECK(r.holds);
      CHECK(r.min_rel_margin >= 0.0);
      CHECK(r.w0_sq == doctest::Approx(r.delta * r.delta).epsilon(1e-10));
    }
    CHECK(linear_response_deviation(reps) <= 0.1);
  }
  SUBCASE("refused without a usable certificate") {
    cfg.solver.law = DampingLaw::polynomial(1, 3);
    CHECK_THROWS_AS(twin_run_contraction(cfg, {1e-6}, 5), RefusalError);
    cfg.solver.law = DampingLaw::named_custom("sin");
    CHECK_THROWS_AS(twin_run_contraction(cfg, {1e-6}, 5), RefusalError);
  }
}

TEST_CASE("continuity probe on a viscous single mode") {
  const auto dir = test::scratch_dir("continuity");
  const double nu = 0.3, A = 1.0;
  const auto cfg = viscous_run(dir, nu, 0.01, 0.5, A);
  const auto r = continuity_probe(cfg, {0.01, 0.05, 0.1, 0.2});
  const double l2 = A * std::sqrt(0.5 * cfg.solver.grid.volume());
  REQUIRE(r.rows.size() == 4);
  for (const auto& row : r.rows)
    CHECK(row.distance == doctest::Approx(l2 * -std::expm1(-nu * row.eps)).epsilon(1e-11));
  CHECK(r.monotone);
  CHECK(r.order == doctest::Approx(1.0).epsilon(0.05));
  // No certificate for f = 0.
  CHECK_FALSE(r.shift_checked);
  CHECK_THROWS_AS(continuity_probe(cfg, {0.015}), DomainError);
}

TEST_CASE("continuity probe with the shift bound") {
  auto cfg = test::small_tg_config(8);
  cfg.solver.nu = 1.0;
  cfg.solver.t_end = 0.4;
  const auto r = continuity_probe(cfg, {0.02, 0.04, 0.08});
  CHECK(r.monotone);
  CHECK(r.shift_checked);
  CHECK(r.shift_holds);
}

TEST_CASE("distances") {
  const TorusGrid g(8);
  const auto a = test::random_solenoidal(g, 1, 3.0), b = test::random_solenoidal(g, 2, 3.0);
  CHECK(l2_distance(a, a) == 0.0);
  CHECK(l2_distance(a, b) == doctest::Approx(l2_norm(a - b)));
  CHECK(sobolev_distance(a, b, -2) < l2_distance(a, b));
}

}  // TEST_SUITE
