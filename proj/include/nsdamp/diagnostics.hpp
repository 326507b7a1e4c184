#pragma once

/// @file diagnostics.hpp
/// @brief Verdicts computed from trajectories: energy budget, time
/// equicontinuity in H^-2, discrete Groenwall checks, twin-run contraction
/// and continuity at t = 0.

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "nsdamp/config.hpp"
#include "nsdamp/damping_law.hpp"
#include "nsdamp/solver.hpp"

namespace nsdamp {

// ---------------------------------------------------------------------------
// Energy budget

struct LedgerRow {
  double t;
  double l2_sq;
  /// 2 nu int_0^t ||grad u||^2 (solver accumulator)
  double visc_int;
  /// 2 int_0^t int f(|u|)|u|^2 (solver accumulator)
  double damp_int;
  double budget;
  double residual;
  /// The same two integrals by the trapezoidal rule on the samples.
  double visc_int_trap;
  double damp_int_trap;
};

struct EnergyLedger {
  std::vector<LedgerRow> rows;
  double initial_energy = 0.0;
  double max_abs_residual = 0.0;
  /// max(residual, 0): overshoot in the direction the inequality forbids.
  double max_positive_residual = 0.0;
  /// max_abs_residual / ||u0||^2 (or the absolute value when u0 = 0).
  double max_rel_residual = 0.0;
  /// Largest |trapezoidal - accumulator| relative to ||u0||^2.
  double quadrature_disagreement = 0.0;
  bool integrals_nondecreasing = true;
};

EnergyLedger energy_budget(const Trajectory& traj, double nu);
void write_ledger_csv(std::ostream& os, const EnergyLedger& ledger);

/// t, energy, enstrophy, damping_rate, snapshot (file name or empty).
void write_index_csv(std::ostream& os, const Trajectory& traj,
                     const std::vector<std::string>& snapshots = {});

// ---------------------------------------------------------------------------
// Equicontinuity

inline constexpr std::size_t kMaxModulusSamples = 512;

struct ModulusRow {
  double lag;
  double modulus;
};

struct EquicontinuityResult {
  std::vector<ModulusRow> rows;
  /// modulus ~ amplitude * lag^gamma on lags <= fit_fraction * span.
  double amplitude = 0.0;
  double gamma = 0.0;
  int fit_points = 0;
  /// Samples used (the trajectory is thinned evenly above kMaxModulusSamples).
  std::size_t samples_used = 0;
};

/// sup over sampled pairs with |t2 - t1| <= lag of ||u(t2) - u(t1)||_{H^-2}.
/// Needs at least 3 samples with stored fields.
EquicontinuityResult equicontinuity_modulus(const Trajectory& traj, double fit_fraction = 0.5);
void write_modulus_csv(std::ostream& os, const EquicontinuityResult& r);

/// Least-squares slope and intercept of log y against log x.
struct PowerFit {
  double exponent;
  double amplitude;
};
PowerFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y);

// ---------------------------------------------------------------------------
// Groenwall

struct GronwallResult {
  /// g_i <= (C + sum_trap h g) (1 + tol) at every sample
  bool hypothesis = false;
  /// g_i <= C exp(sum_trap h) (1 + tol) at every sample
  bool conclusion = false;
  /// The closed-form exponential g = C e^{lambda t}, h = lambda, on the same
  /// grid passed both checks.
  bool calibration = false;
  std::vector<double> hypothesis_margin;
  std::vector<double> conclusion_margin;
  bool verdict() const { return hypothesis && conclusion && calibration; }
};

/// t nondecreasing, h >= 0 (DomainError otherwise).
GronwallResult gronwall_check(const std::vector<double>& t, const std::vector<double>& g,
                              const std::vector<double>& h, double C, double rel_tol = 1e-9);

// ---------------------------------------------------------------------------
// Uniqueness and continuity

/// The (c, p) used for the stability bounds: cfg.cert.c/p if given, else the
/// closed form for the family, then verified on (0, cert.x_max].
LowerBoundCert stability_certificate(const RunConfig& cfg);

struct ContractionRow {
  double t;
  double w_sq;
  double bound;
  double margin;
};

struct ContractionReport {
  double delta = 0.0;
  double c_nu_p = 0.0;
  double w0_sq = 0.0;
  std::vector<ContractionRow> rows;
  double sup_w = 0.0;
  double min_rel_margin = 0.0;
  bool holds = false;
};

/// Runs u from the configured initial data and, for each delta, v from
/// u0 + delta * w with w a seeded random divergence-free field of unit L2
/// norm. The perturbed runs execute concurrently. The bound is
/// ||w(0)||^2 exp(2 c_{nu,p} t). Throws RefusalError without a verified
/// certificate with p > 2; throws BlowUpError if any run blows up.
std::vector<ContractionReport> twin_run_contraction(const RunConfig& cfg,
                                                    const std::vector<double>& deltas,
                                                    std::uint64_t seed2);
void write_contraction_csv(std::ostream& os, const std::vector<ContractionReport>& reports);

/// Largest |(sup_w(a)/sup_w(b)) / (delta_a/delta_b) - 1| over consecutive
/// reports with positive deltas.
double linear_response_deviation(const std::vector<ContractionReport>& reports);

struct ContinuityRow {
  double eps;
  double distance;
};

struct ShiftRow {
  double eps;
  double sup_shift;
  double bound;
};

struct ContinuityResult {
  std::vector<ContinuityRow> rows;
  bool monotone = false;
  /// Fitted exponent of distance ~ eps^order.
  double order = 0.0;
  /// Present when a certificate with p > 2 is available.
  double c_nu_p = 0.0;
  bool shift_checked = false;
  std::vector<ShiftRow> shift_rows;
  bool shift_holds = false;
};

/// ||u(eps) - u0||_{L2} for each eps from one run. Each eps must be a
/// positive multiple of dt not exceeding t_end. When a stability
/// certificate exists, also checks sup_t ||u(t+eps) - u(t)|| <=
/// ||u(eps) - u0|| exp(c_{nu,p} t_end)(1 + shift_rel) for every eps that is a
/// multiple of the sample spacing.
ContinuityResult continuity_probe(const RunConfig& cfg, const std::vector<double>& epsilons);
void write_continuity_csv(std::ostream& os, const ContinuityResult& r);

/// ||a - b||_{L2}.
double l2_distance(const VectorFieldK& a, const VectorFieldK& b);
/// ||a - b||_{H^s} (inhomogeneous).
double sobolev_distance(const VectorFieldK& a, const VectorFieldK& b, double s);

}  // namespace nsdamp
