#pragma once

/// @file solver.hpp
/// @brief Time integration of the truncated system
///   du/dt = nu Lap u - J_R P[div(u (x) u) + f(|u|)u],   u(0) = J_R u0
/// with an exact viscous integrating factor, plus the two dissipation
/// integrals carried as extra ODE components.

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nsdamp/config.hpp"
#include "nsdamp/field.hpp"
#include "nsdamp/manifest.hpp"
#include "nsdamp/spectral_ops.hpp"

namespace nsdamp {

/// A coefficient became NaN or infinite.
class BlowUpError : public std::runtime_error {
public:
  BlowUpError(double t, double last_l2_sq, double max_coeff);
  double t() const { return t_; }
  double last_l2_sq() const { return l2_sq_; }
  double max_coeff() const { return max_coeff_; }

private:
  double t_;
  double l2_sq_;
  double max_coeff_;
};

struct SolverState {
  double t = 0.0;
  long step = 0;
  VectorFieldK u_hat;
  /// int_0^t ||grad u||^2
  double visc_accum = 0.0;
  /// int_0^t int f(|u|)|u|^2
  double damp_accum = 0.0;
  /// Compensation terms of the two running sums.
  double visc_carry = 0.0;
  double damp_carry = 0.0;
};

/// Real, mean-free, divergence-free initial field supported in |xi| < R.
VectorFieldK make_initial(const InitialSpec& spec, const TorusGrid& grid, double cutoff_R);

/// Deterministic random divergence-free field with ||w||_{L2} = l2 (zero
/// field for l2 = 0), used as a twin-run perturbation.
VectorFieldK random_perturbation(const TorusGrid& grid, double cutoff_R, double slope,
                                 std::uint64_t seed, double l2);

class GalerkinSolver {
public:
  explicit GalerkinSolver(SolverConfig cfg, KernelMode mode = KernelMode::Parallel);

  const SolverConfig& config() const { return cfg_; }

  SolverState initial_state() const;
  SolverState state_from(VectorFieldK u0) const;

  /// nu Lap u - J_R P[N(u) + D(u)].
  VectorFieldK rhs(const SolverState& s);
  /// One step of size dt. Throws BlowUpError on non-finite coefficients.
  void advance(SolverState& s);
  SolverState step(const SolverState& s);

  /// ||grad u||^2 and the damping collocation integral of u.
  ForcingScalars rates(const VectorFieldK& u);

private:
  ForcingScalars forcing(const VectorFieldK& u, VectorFieldK& out);

  SolverConfig cfg_;
  PseudoSpectralEngine engine_;
  std::vector<double> xi_sq_;
  // exp(-nu |xi|^2 dt) - 1 and exp(-nu |xi|^2 dt / 2) - 1.
  std::vector<double> decay_full_;
  std::vector<double> decay_half_;
  // Stage workspace.
  VectorFieldK a_, b_, c_, d_, tmp_;
};

VectorFieldK rhs(const SolverState& state, const SolverConfig& cfg);
SolverState step(const SolverState& state, const SolverConfig& cfg);

struct Sample {
  double t = 0.0;
  long step = 0;
  VectorFieldK u_hat;
  /// ||u||^2
  double energy = 0.0;
  /// ||grad u||^2
  double enstrophy = 0.0;
  /// int f(|u|)|u|^2 at this instant
  double damping_rate = 0.0;
  double visc_accum = 0.0;
  double damp_accum = 0.0;
};

struct BlowUpInfo {
  double t;
  double last_l2_sq;
  double max_coeff;
};

struct Trajectory {
  std::vector<Sample> samples;
  std::optional<BlowUpInfo> blow_up;
  double dt = 0.0;
  double nu = 0.0;
};

using StepObserver = std::function<void(const SolverState&)>;

struct RunOptions {
  KernelMode mode = KernelMode::Parallel;
  /// Called after the initial state and after every step.
  StepObserver observer;
  /// Keep the coefficient field of every sample (otherwise only scalars).
  bool keep_fields = true;
  /// Recorded in the manifest; computed from the solver config if empty.
  std::string config_hash;
  /// Start from this field instead of the configured initial data.
  std::optional<VectorFieldK> initial;
};

struct RunResult {
  Trajectory trajectory;
  RunManifest manifest;
  bool ok() const { return !trajectory.blow_up.has_value(); }
};

/// Integrates to t_end, sampling every sample_every steps (and always the
/// final state). Blow-up stops the run and keeps the samples taken so far.
RunResult run(const SolverConfig& cfg, const RunOptions& opts = {});

Sample make_sample(GalerkinSolver& solver, const SolverState& s, bool keep_field);

}  // namespace nsdamp
