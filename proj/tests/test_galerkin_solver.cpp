#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nsdamp/errors.hpp"
#include "nsdamp/solver.hpp"
#include "support.hpp"

using namespace nsdamp;

namespace {

// u = A (0, sin(k x), 0): divergence-free, a single wavenumber pair.
VectorFieldK shear_mode(const TorusGrid& g, int k, double A) {
  VectorFieldK u(g);
  const double n3 = static_cast<double>(g.size());
  u.at(1, k, 0, 0) = Complex(0, -0.5 * A * n3);
  u.at(1, -k, 0, 0) = Complex(0, 0.5 * A * n3);
  u.set_divergence_free(true);
  return u;
}

SolverConfig viscous_config(int n, double nu, double dt) {
  SolverConfig c;
  c.grid = TorusGrid(n);
  c.nu = nu;
  c.dt = dt;
  c.t_end = 10 * dt;
  c.enable_nonlinear = false;
  c.enable_damping = false;
  return c;
}

double outside_support(const VectorFieldK& u, double R) {
  const auto xi2 = xi_squared_table(u.grid());
  double m = 0;
  for (const auto& c : u.components())
    for (std::size_t i = 0; i < c.size(); ++i)
      if (!kept_by_cutoff(xi2[i], R)) m = std::max(m, std::abs(c[i]));
  return m;
}

}  // namespace

TEST_SUITE("galerkin_solver") {

TEST_CASE("zero state stays zero") {
  const auto cfg = test::small_tg_config(8).solver;
  GalerkinSolver s(cfg);
  auto st = s.state_from(VectorFieldK(cfg.grid));
  CHECK(s.rhs(st).coefficient_norm() == 0.0);
  s.advance(st);
  CHECK(st.u_hat.coefficient_norm() == 0.0);
  CHECK(st.t == doctest::Approx(cfg.dt));
}

TEST_CASE("pure viscous decay is exact") {
  for (auto integ : {Integrator::RK4_IF, Integrator::RK2_IF}) {
    auto cfg = viscous_config(8, 0.3, 0.05);
    cfg.integrator = integ;
    GalerkinSolver s(cfg);
    const auto u0 = shear_mode(cfg.grid, 2, 1.0);
    auto st = s.state_from(u0);
    s.advance(st);
    const double factor = std::exp(-0.3 * 4 * 0.05);
    const Complex expected = u0.at(1, 2, 0, 0) * factor;
    CHECK(std::abs(st.u_hat.at(1, 2, 0, 0) - expected) <= 1e-12 * std::abs(expected));
    CHECK(st.u_hat.coefficient_norm() == doctest::Approx(u0.coefficient_norm() * factor).epsilon(1e-12));
  }
}

TEST_CASE("single low mode rhs against a hand convolution") {
  // u = (sin y, sin x, 0): u . grad u = (sin x cos y, sin y cos x, 0), whose
  // projection is zero, since it is grad(-cos x cos y). rhs = -nu |xi|^2 u.
  SolverConfig cfg;
  cfg.grid = TorusGrid(8);
  cfg.nu = 1.0;
  cfg.law = DampingLaw::zero();
  GalerkinSolver s(cfg);
  const auto g = cfg.grid;
  const double n3 = static_cast<double>(g.size());
  VectorFieldK u(g);
  u.at(0, 0, 1, 0) = Complex(0, -0.5 * n3);
  u.at(0, 0, -1, 0) = Complex(0, 0.5 * n3);
  u.at(1, 1, 0, 0) = Complex(0, -0.5 * n3);
  u.at(1, -1, 0, 0) = Complex(0, 0.5 * n3);
  u.set_divergence_free(true);

  // Hand convolution of the unprojected term: sin x cos y has coefficients
  // -i n^3/4 at (1, +-1, 0) and +i n^3/4 at (-1, +-1, 0).
  const auto N = nonlinear_term(u);
  CHECK(std::abs(N.at(0, 1, 1, 0) - Complex(0, -0.25 * n3)) <= 1e-12 * n3);
  CHECK(std::abs(N.at(0, -1, 1, 0) - Complex(0, 0.25 * n3)) <= 1e-12 * n3);
  CHECK(std::abs(N.at(1, 1, 1, 0) - Complex(0, -0.25 * n3)) <= 1e-12 * n3);

  auto st = s.state_from(u);
  const auto r = s.rhs(st);
  auto expected = u;
  expected *= -1.0;
  CHECK((r - expected).coefficient_norm() <= 1e-12 * u.coefficient_norm());
}

TEST_CASE("rhs satisfies the energy derivative identity") {
  SolverConfig cfg;
  cfg.grid = TorusGrid(12);
  cfg.nu = 0.37;
  for (const auto& law : {DampingLaw::polynomial(1, 5), DampingLaw::exponential(1, 1, 2), DampingLaw::zero()}) {
    cfg.law = law;
    GalerkinSolver s(cfg);
    for (int i = 0; i < 4; ++i) {
      auto u = random_perturbation(cfg.grid, cfg.cutoff(), -1.0, 31 + i, 3.0);
      auto st = s.state_from(u);
      const auto r = s.rhs(st);
      const auto rates = s.rates(st.u_hat);
      const double expected = -cfg.nu * rates.enstrophy - rates.dissipation;
      CHECK(inner_product(r, st.u_hat) == doctest::Approx(expected).epsilon(1e-10));
      CHECK(rates.enstrophy == doctest::Approx(enstrophy(st.u_hat)).epsilon(1e-12));
    }
  }
}

TEST_CASE("initial data post-conditions") {
  const TorusGrid g(12);
  const double R = g.default_cutoff();
  InitialSpec tg;
  const auto u = make_initial(tg, g, R);
  // Quadrature oracle: (V/N^3) sum |u(x)|^2 on an independent 10^3 grid.
  const int m = 10;
  double q = 0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k) {
        const double x = 2 * std::numbers::pi * i / m, y = 2 * std::numbers::pi * j / m,
                     z = 2 * std::numbers::pi * k / m;
        const double a = std::sin(x) * std::cos(y) * std::cos(z), b = std::cos(x) * std::sin(y) * std::cos(z);
        q += a * a + b * b;
      }
  q *= g.volume() / (m * m * m);
  CHECK(l2_norm(u) * l2_norm(u) == doctest::Approx(q).epsilon(1e-13));
  CHECK(q == doctest::Approx(std::pow(2 * std::numbers::pi, 3) / 4).epsilon(1e-13));

  InitialSpec rs;
  rs.kind = InitialKind::RandomSpectrum;
  rs.seed = 17;
  rs.amplitude = 0.8;
  const auto r1 = make_initial(rs, g, R), r2 = make_initial(rs, g, R);
  CHECK(r1 == r2);
  rs.seed = 18;
  CHECK_FALSE(make_initial(rs, g, R) == r1);
  for (const auto* f : {&u, &r1}) {
    CHECK(f->divergence_defect() <= 1e-12);
    CHECK(std::abs(f->at(0, 0, 0, 0)) + std::abs(f->at(1, 0, 0, 0)) + std::abs(f->at(2, 0, 0, 0)) == 0.0);
    CHECK(outside_support(*f, R) == 0.0);
    CHECK(f->hermitian_defect() <= 1e-12 * f->coefficient_norm());
  }
  CHECK(outside_support(make_initial(rs, g, 3.0), 3.0) == 0.0);
}

TEST_CASE("t_end = 0 gives the initial state only") {
  auto cfg = test::small_tg_config(8).solver;
  cfg.t_end = 0;
  const auto r = run(cfg);
  REQUIRE(r.trajectory.samples.size() == 1);
  CHECK(r.trajectory.samples[0].t == 0.0);
  CHECK(r.trajectory.samples[0].u_hat == make_initial(cfg.initial, cfg.grid, cfg.cutoff()));
}

TEST_CASE("runs are deterministic and kernel modes agree") {
  const auto cfg = test::small_tg_config(12).solver;
  const auto a = run(cfg), b = run(cfg);
  RunOptions serial;
  serial.mode = KernelMode::Serial;
  const auto c = run(cfg, serial);
  REQUIRE(a.trajectory.samples.size() == b.trajectory.samples.size());
  for (std::size_t i = 0; i < a.trajectory.samples.size(); ++i) {
    CHECK(a.trajectory.samples[i].u_hat == b.trajectory.samples[i].u_hat);
    CHECK(a.trajectory.samples[i].u_hat == c.trajectory.samples[i].u_hat);
    CHECK(a.trajectory.samples[i].visc_accum == c.trajectory.samples[i].visc_accum);
    CHECK(a.trajectory.samples[i].damp_accum == c.trajectory.samples[i].damp_accum);
  }
}

TEST_CASE("invariants over a smoke suite of runs") {
  std::vector<SolverConfig> suite;
  auto base = test::small_tg_config(12).solver;
  suite.push_back(base);
  base.law = DampingLaw::exponential(1, 1, 2);
  suite.push_back(base);
  base.law = DampingLaw::zero();
  suite.push_back(base);
  base.initial.kind = InitialKind::RandomSpectrum;
  base.initial.amplitude = 0.5;
  base.law = DampingLaw::polynomial(2, 4);
  suite.push_back(base);
  base.integrator = Integrator::RK2_IF;
  base.cutoff_R = 3.5;
  base.grid = TorusGrid(12, 2 * std::numbers::pi, 1.5);
  suite.push_back(base);

  for (const auto& cfg : suite) {
    const auto r = run(cfg);
    REQUIRE(r.ok());
    double prev = INFINITY;
    for (const auto& s : r.trajectory.samples) {
      CHECK(s.energy <= prev);
      prev = s.energy;
      CHECK(s.u_hat.divergence_defect() <= 1e-11);
      CHECK(outside_support(s.u_hat, cfg.cutoff()) == 0.0);
      if (cfg.law.is_zero()) CHECK(s.damp_accum == 0.0);
    }
  }
}

TEST_CASE("temporal order of RK4 with integrating factor") {
  auto cfg = test::small_tg_config(16).solver;
  cfg.t_end = 0.4;
  cfg.sample_every = 1000000;
  auto final_state = [&](double dt) {
    cfg.dt = dt;
    return run(cfg).trajectory.samples.back().u_hat;
  };
  const auto ref = final_state(0.00125);
  const double e1 = l2_norm(final_state(0.02) - ref);
  const double e2 = l2_norm(final_state(0.01) - ref);
  const double order = std::log2(e1 / e2);
  MESSAGE("errors " << e1 << " " << e2 << ", order " << order);
  CHECK(order >= 3.9);
}

TEST_CASE("budget residual shrinks with dt above the rounding floor") {
  auto cfg = test::small_tg_config(16).solver;
  cfg.t_end = 0.4;
  cfg.sample_every = 5;
  auto residual = [&](double dt) {
    cfg.dt = dt;
    const auto tr = run(cfg).trajectory;
    double m = 0;
    const double e0 = tr.samples[0].energy;
    for (const auto& s : tr.samples)
      m = std::max(m, std::abs(s.energy + 2 * cfg.nu * s.visc_accum + 2 * s.damp_accum - e0) / e0);
    return m;
  };
  const double r1 = residual(0.04), r2 = residual(0.02);
  MESSAGE("residuals " << r1 << " " << r2);
  CHECK(r1 / r2 >= 8.0);
}

TEST_CASE("blow-up is reported with partial samples") {
  auto cfg = test::small_tg_config(8).solver;
  cfg.initial.amplitude = 50.0;
  cfg.dt = 0.1;
  cfg.t_end = 5.0;
  const auto r = run(cfg);
  REQUIRE(r.trajectory.blow_up.has_value());
  CHECK_FALSE(r.ok());
  CHECK(r.trajectory.samples.size() >= 1);
}

TEST_CASE("config validation") {
  auto cfg = test::small_tg_config(8).solver;
  cfg.dt = 0.03;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  cfg = test::small_tg_config(8).solver;
  cfg.cutoff_R = 100.0;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  cfg = test::small_tg_config(8).solver;
  cfg.nu = -1;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
}

}  // TEST_SUITE
