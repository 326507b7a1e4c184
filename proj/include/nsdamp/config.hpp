#pragma once

/// @file config.hpp
/// @brief Run configuration: solver settings, initial data, tolerances and
/// diagnostic parameters, read from a `key = value` text file.
///
/// Lines are `key = value`; `#` starts a comment. Unknown keys are an error,
/// so a typo never silently falls back to a default. The canonical text
/// (every key, fixed order, defaults filled in) is what the config hash
/// covers.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nsdamp/damping_law.hpp"
#include "nsdamp/grid.hpp"

namespace nsdamp {

enum class Integrator { RK4_IF, RK2_IF };
enum class InitialKind { TaylorGreen, RandomSpectrum, FromFile };

std::string to_string(Integrator i);
std::string to_string(InitialKind k);

struct InitialSpec {
  InitialKind kind = InitialKind::TaylorGreen;
  /// TaylorGreen: velocity scale. RandomSpectrum: RMS of |u| over the box.
  double amplitude = 1.0;
  /// RandomSpectrum: coefficient magnitude ~ |xi|^slope before projection.
  double spectrum_slope = -2.0;
  std::uint64_t seed = 1;
  std::string file_path;
};

/// Time integration with an exact viscous integrating factor: the linear
/// part imposes no step restriction, so dt * nu * |xi|^2_max may be large.
/// The explicit nonlinear and damping terms need dt * |u|_max * |xi|_max
/// (advective CFL) and dt * f'(|u|)|u| well below the RK stability limit
/// (about 2.8 for RK4, 2 for RK2).
struct SolverConfig {
  double nu = 0.1;
  DampingLaw law = DampingLaw::zero();
  TorusGrid grid{32};
  /// Friedrich radius; unset means grid.default_cutoff().
  std::optional<double> cutoff_R;
  double dt = 1e-3;
  double t_end = 1.0;
  Integrator integrator = Integrator::RK4_IF;
  InitialSpec initial;
  int sample_every = 10;
  bool enable_nonlinear = true;
  bool enable_damping = true;

  double cutoff() const { return cutoff_R ? *cutoff_R : grid.default_cutoff(); }
  /// Number of steps to reach t_end (t_end / dt rounded to nearest).
  long step_count() const;
  /// Throws DomainError on out-of-range values.
  void validate() const;
};

/// Verdict thresholds. Every check reads its threshold from here.
struct Tolerances {
  /// max |budget residual| / ||u0||^2
  double budget_rel = 1e-6;
  /// Relative slack of sampled pointwise inequalities.
  double pointwise = kPointwiseTolerance;
  /// Divergence defect of evolved states.
  double divergence = 1e-11;
  /// Relative slack on the twin-run contraction bound.
  double contraction_rel = 1e-9;
  /// Relative slack on the continuity shift bound.
  double shift_rel = 1e-6;
  /// Relative slack on the Groenwall conclusion.
  double gronwall_rel = 1e-9;
  /// Accepted window for the fitted equicontinuity exponent.
  double gamma_min = 0.5;
  double gamma_max = 1.1;
  /// Accepted window for the continuity order in epsilon.
  double order_min = 0.9;
  double order_max = 1.1;
  /// Relative deviation allowed in the linear-response check of twin runs.
  double linear_response = 0.1;

  /// Multiplies every slack (not the fit windows) by `factor`.
  Tolerances scaled(double factor) const;
};

struct CertSettings {
  double x_max = 50.0;
  int samples = 10000;
  /// Caller-supplied (c, p); required for Custom laws.
  std::optional<double> c;
  std::optional<double> p;
};

struct BatterySettings {
  int pairs = 100000;
  double box = 5.0;
  std::vector<double> radii{1.0, 3.0, 10.0};
  std::uint64_t seed = 12345;
};

struct TwinSettings {
  std::vector<double> deltas{1e-6, 5e-7};
  std::uint64_t seed = 777;
};

struct ContinuitySettings {
  std::vector<double> epsilons{0.1, 0.05, 0.025, 0.0125};
};

struct EquicontinuitySettings {
  /// Largest lag used in the power-law fit, as a fraction of the sampled span.
  double fit_fraction = 0.5;
};

struct RunConfig {
  SolverConfig solver;
  Tolerances tol;
  CertSettings cert;
  BatterySettings battery;
  TwinSettings twin;
  ContinuitySettings continuity;
  EquicontinuitySettings equicontinuity;
  bool write_snapshots = false;
};

/// Parsed `key = value` pairs; duplicate keys are an error.
std::map<std::string, std::string> parse_key_values(const std::string& text);

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Every key in fixed order, so equal configurations give equal text.
std::string canonical_text(const RunConfig& cfg);
/// Lower-case hex SHA-256 of canonical_text.
std::string config_hash(const RunConfig& cfg);
std::string sha256_hex(const std::string& data);

}  // namespace nsdamp
