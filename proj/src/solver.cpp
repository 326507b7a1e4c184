#include "nsdamp/solver.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include "nsdamp/errors.hpp"
#include "nsdamp/field_io.hpp"
#include "nsdamp/random.hpp"
#include "nsdamp/text.hpp"

namespace nsdamp {

namespace {

std::string blow_up_message(double t, double l2, double mx) {
  std::ostringstream os;
  os << "non-finite coefficients at t = " << text::format_double(t)
     << " (last ||u||^2 = " << text::format_double(l2)
     << ", max |u_hat| = " << text::format_double(mx) << ")";
  return os.str();
}

// Index of -k for spectral index i.
int mirror(int i, int n) { return (n - i) % n; }

VectorFieldK random_field(const TorusGrid& g, double R, double slope, std::uint64_t seed) {
  const int n = g.n();
  const double kap = g.kappa();
  std::mt19937_64 rng(seed);
  VectorFieldK u(g);
  for (int i0 = 0; i0 < n; ++i0) {
    for (int i1 = 0; i1 < n; ++i1) {
      for (int i2 = 0; i2 < n; ++i2) {
        const int j0 = mirror(i0, n), j1 = mirror(i1, n), j2 = mirror(i2, n);
        const std::size_t idx = g.flat(i0, i1, i2);
        const std::size_t midx = g.flat(j0, j1, j2);
        // Draw once per conjugate pair, at the member visited first.
        if (midx < idx) continue;
        std::array<Complex, 3> c{};
        for (auto& v : c) {
          const double phase = 2.0 * std::numbers::pi * uniform01(rng);
          v = std::polar(1.0, phase);
        }
        if (g.is_nyquist(i0) || g.is_nyquist(i1) || g.is_nyquist(i2) || midx == idx) continue;
        const double x0 = kap * g.wavenumber(i0), x1 = kap * g.wavenumber(i1),
                     x2 = kap * g.wavenumber(i2);
        const double k2 = x0 * x0 + x1 * x1 + x2 * x2;
        if (!kept_by_cutoff(k2, R)) continue;
        const double mag = std::pow(k2, 0.5 * slope);
        for (int a = 0; a < 3; ++a) {
          u.component(a)[idx] = mag * c[a];
          u.component(a)[midx] = mag * std::conj(c[a]);
        }
      }
    }
  }
  return friedrich_cutoff(leray_project(u), R);
}

VectorFieldK taylor_green(const TorusGrid& g, double amplitude) {
  const int n = g.n();
  const double h = g.period() / n;
  const double kap = g.kappa();
  VectorSamples s;
  for (auto& c : s) c.resize(g.size());
  for (int i0 = 0; i0 < n; ++i0) {
    for (int i1 = 0; i1 < n; ++i1) {
      for (int i2 = 0; i2 < n; ++i2) {
        const double x = kap * h * i0, y = kap * h * i1, z = kap * h * i2;
        const std::size_t idx = g.flat(i0, i1, i2);
        s[0][idx] = amplitude * std::sin(x) * std::cos(y) * std::cos(z);
        s[1][idx] = -amplitude * std::cos(x) * std::sin(y) * std::cos(z);
        s[2][idx] = 0.0;
      }
    }
  }
  return forward_transform(g, s);
}

// Compensated running sum: `carry` holds the low-order bits lost so far.
void kahan_add(double& sum, double& carry, double x) {
  const double y = x - carry;
  const double t = sum + y;
  carry = (t - sum) - y;
  sum = t;
}

void zero_mean(VectorFieldK& u) {
  for (auto& c : u.components()) c[0] = Complex{};
}

}  // namespace

BlowUpError::BlowUpError(double t, double last_l2_sq, double max_coeff)
    : std::runtime_error(blow_up_message(t, last_l2_sq, max_coeff)),
      t_(t),
      l2_sq_(last_l2_sq),
      max_coeff_(max_coeff) {}

VectorFieldK make_initial(const InitialSpec& spec, const TorusGrid& grid, double cutoff_R) {
  VectorFieldK u;
  switch (spec.kind) {
    case InitialKind::TaylorGreen:
      u = taylor_green(grid, spec.amplitude);
      break;
    case InitialKind::RandomSpectrum: {
      u = random_field(grid, cutoff_R, spec.spectrum_slope, spec.seed);
      const double l2 = l2_norm(u);
      // amplitude is the RMS of |u| over the box.
      if (l2 > 0.0) u *= spec.amplitude * std::sqrt(grid.volume()) / l2;
      break;
    }
    case InitialKind::FromFile: {
      auto v = read_field_file(spec.file_path, grid.pad_factor());
      if (v.grid().n() != grid.n() || v.grid().period() != grid.period()) {
        throw ParseError("field file " + spec.file_path + " does not match the configured grid");
      }
      u = std::move(v);
      break;
    }
  }
  zero_mean(u);
  u = friedrich_cutoff(leray_project(u), cutoff_R);
  u.set_divergence_free(true);
  return u;
}

VectorFieldK random_perturbation(const TorusGrid& grid, double cutoff_R, double slope,
                                 std::uint64_t seed, double l2) {
  if (l2 == 0.0) {
    VectorFieldK z(grid);
    z.set_divergence_free(true);
    return z;
  }
  auto w = random_field(grid, cutoff_R, slope, seed);
  const double norm = l2_norm(w);
  if (norm == 0.0) throw DomainError("random_perturbation: cutoff admits no modes");
  w *= l2 / norm;
  w.set_divergence_free(true);
  return w;
}

// ---------------------------------------------------------------------------

GalerkinSolver::GalerkinSolver(SolverConfig cfg, KernelMode mode)
    : cfg_(std::move(cfg)), engine_(cfg_.grid, cfg_.law, mode), xi_sq_(xi_squared_table(cfg_.grid)) {
  cfg_.validate();
  decay_full_.resize(xi_sq_.size());
  decay_half_.resize(xi_sq_.size());
  for (std::size_t i = 0; i < xi_sq_.size(); ++i) {
    decay_full_[i] = std::expm1(-cfg_.nu * xi_sq_[i] * cfg_.dt);
    decay_half_[i] = std::expm1(-0.5 * cfg_.nu * xi_sq_[i] * cfg_.dt);
  }
  for (auto* f : {&a_, &b_, &c_, &d_, &tmp_}) *f = VectorFieldK(cfg_.grid);
}

SolverState GalerkinSolver::initial_state() const {
  return state_from(make_initial(cfg_.initial, cfg_.grid, cfg_.cutoff()));
}

SolverState GalerkinSolver::state_from(VectorFieldK u0) const {
  if (!(u0.grid() == cfg_.grid)) throw ShapeError("initial field lives on a different grid");
  SolverState s;
  s.u_hat = std::move(u0);
  s.u_hat.set_divergence_free(true);
  return s;
}

ForcingScalars GalerkinSolver::forcing(const VectorFieldK& u, VectorFieldK& out) {
  return engine_.forcing(u, cfg_.cutoff(), cfg_.enable_nonlinear,
                         cfg_.enable_damping && !cfg_.law.is_zero(), out);
}

ForcingScalars GalerkinSolver::rates(const VectorFieldK& u) {
  return engine_.forcing(u, cfg_.cutoff(), false, cfg_.enable_damping && !cfg_.law.is_zero(), tmp_);
}

VectorFieldK GalerkinSolver::rhs(const SolverState& s) {
  VectorFieldK out(cfg_.grid);
  forcing(s.u_hat, out);
  for (int a = 0; a < 3; ++a) {
    auto& o = out.component(a);
    const auto& u = s.u_hat.component(a);
    for (std::size_t i = 0; i < o.size(); ++i) o[i] -= cfg_.nu * xi_sq_[i] * u[i];
  }
  out.set_divergence_free(true);
  return out;
}

void GalerkinSolver::advance(SolverState& s) {
  const double dt = cfg_.dt;
  const std::size_t size = xi_sq_.size();
  // The factors are stored as e^x - 1 and applied as v + (e^x - 1) v: a
  // rounded e^x would bias every mode's decay rate by a fixed relative
  // error that compounds over steps and shows up in the energy budget.
  const auto& Em1 = decay_full_;
  const auto& Ehm1 = decay_half_;
  auto E = [&](std::size_t i, Complex v) { return v + Em1[i] * v; };
  auto Eh = [&](std::size_t i, Complex v) { return v + Ehm1[i] * v; };
  auto& u = s.u_hat;
  double visc = 0.0, damp = 0.0;
  const double l2_before = l2_norm(u);

  if (cfg_.integrator == Integrator::RK4_IF) {
    const auto g1 = forcing(u, a_);
    for (int k = 0; k < 3; ++k) {
      auto& t = tmp_.component(k);
      const auto& un = u.component(k);
      const auto& a = a_.component(k);
      for (std::size_t i = 0; i < size; ++i) t[i] = Eh(i, un[i] + 0.5 * dt * a[i]);
    }
    const auto g2 = forcing(tmp_, b_);
    for (int k = 0; k < 3; ++k) {
      auto& t = tmp_.component(k);
      const auto& un = u.component(k);
      const auto& b = b_.component(k);
      for (std::size_t i = 0; i < size; ++i) t[i] = Eh(i, un[i]) + 0.5 * dt * b[i];
    }
    const auto g3 = forcing(tmp_, c_);
    for (int k = 0; k < 3; ++k) {
      auto& t = tmp_.component(k);
      const auto& un = u.component(k);
      const auto& c = c_.component(k);
      for (std::size_t i = 0; i < size; ++i) t[i] = E(i, un[i]) + dt * Eh(i, c[i]);
    }
    const auto g4 = forcing(tmp_, d_);
    for (int k = 0; k < 3; ++k) {
      auto& un = u.component(k);
      const auto& a = a_.component(k);
      const auto& b = b_.component(k);
      const auto& c = c_.component(k);
      const auto& d = d_.component(k);
      for (std::size_t i = 0; i < size; ++i) {
        un[i] = E(i, un[i]) + (dt / 6.0) * (E(i, a[i]) + 2.0 * Eh(i, b[i] + c[i]) + d[i]);
      }
    }
    visc = (dt / 6.0) * (g1.enstrophy + 2.0 * g2.enstrophy + 2.0 * g3.enstrophy + g4.enstrophy);
    damp = (dt / 6.0) *
           (g1.dissipation + 2.0 * g2.dissipation + 2.0 * g3.dissipation + g4.dissipation);
  } else {
    const auto g1 = forcing(u, a_);
    for (int k = 0; k < 3; ++k) {
      auto& t = tmp_.component(k);
      const auto& un = u.component(k);
      const auto& a = a_.component(k);
      for (std::size_t i = 0; i < size; ++i) t[i] = E(i, un[i] + dt * a[i]);
    }
    const auto g2 = forcing(tmp_, b_);
    for (int k = 0; k < 3; ++k) {
      auto& un = u.component(k);
      const auto& a = a_.component(k);
      const auto& b = b_.component(k);
      for (std::size_t i = 0; i < size; ++i) un[i] = E(i, un[i]) + 0.5 * dt * (E(i, a[i]) + b[i]);
    }
    visc = 0.5 * dt * (g1.enstrophy + g2.enstrophy);
    damp = 0.5 * dt * (g1.dissipation + g2.dissipation);
  }

  s.step += 1;
  s.t = s.step * dt;
  if (!u.all_finite() || !std::isfinite(visc) || !std::isfinite(damp)) {
    throw BlowUpError(s.t, l2_before * l2_before, u.max_abs_coefficient());
  }
  kahan_add(s.visc_accum, s.visc_carry, visc);
  kahan_add(s.damp_accum, s.damp_carry, damp);
  u.set_divergence_free(true);
}

SolverState GalerkinSolver::step(const SolverState& s) {
  SolverState next = s;
  advance(next);
  return next;
}

VectorFieldK rhs(const SolverState& state, const SolverConfig& cfg) {
  GalerkinSolver solver(cfg);
  return solver.rhs(state);
}

SolverState step(const SolverState& state, const SolverConfig& cfg) {
  GalerkinSolver solver(cfg);
  return solver.step(state);
}

// ---------------------------------------------------------------------------

Sample make_sample(GalerkinSolver& solver, const SolverState& s, bool keep_field) {
  Sample out;
  out.t = s.t;
  out.step = s.step;
  const double l2 = l2_norm(s.u_hat);
  out.energy = l2 * l2;
  const auto r = solver.rates(s.u_hat);
  out.enstrophy = r.enstrophy;
  out.damping_rate = r.dissipation;
  out.visc_accum = s.visc_accum;
  out.damp_accum = s.damp_accum;
  if (keep_field) out.u_hat = s.u_hat;
  return out;
}

RunResult run(const SolverConfig& cfg, const RunOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  RunResult result;
  auto& m = result.manifest;
  m.command = "run";
  m.started = utc_timestamp();
  if (opts.config_hash.empty()) {
    RunConfig rc;
    rc.solver = cfg;
    m.config_hash = config_hash(rc);
  } else {
    m.config_hash = opts.config_hash;
  }

  GalerkinSolver solver(cfg, opts.mode);
  auto& traj = result.trajectory;
  traj.dt = cfg.dt;
  traj.nu = cfg.nu;
  SolverState state = opts.initial ? solver.state_from(*opts.initial) : solver.initial_state();
  traj.samples.push_back(make_sample(solver, state, opts.keep_fields));
  if (opts.observer) opts.observer(state);
  const long steps = cfg.step_count();
  double last_energy = traj.samples.front().energy;
  for (long k = 1; k <= steps; ++k) {
    try {
      solver.advance(state);
    } catch (const BlowUpError& e) {
      traj.blow_up = BlowUpInfo{e.t(), last_energy, e.max_coeff()};
      break;
    }
    if (opts.observer) opts.observer(state);
    if (k % cfg.sample_every == 0 || k == steps) {
      traj.samples.push_back(make_sample(solver, state, opts.keep_fields));
      last_energy = traj.samples.back().energy;
    }
  }

  const auto& first = traj.samples.front();
  const auto& last = traj.samples.back();
  const double budget = last.energy + 2.0 * cfg.nu * last.visc_accum + 2.0 * last.damp_accum;
  m.metrics["final_budget_residual"] = first.energy > 0.0 ? (budget - first.energy) / first.energy
                                                          : budget - first.energy;
  m.metrics["steps"] = static_cast<double>(state.step);
  m.metrics["samples"] = static_cast<double>(traj.samples.size());
  m.metrics["initial_energy"] = first.energy;
  if (traj.blow_up) m.metrics["blow_up_t"] = traj.blow_up->t;
  m.finished = utc_timestamp();
  m.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

}  // namespace nsdamp
