#pragma once

/// @file spectral_ops.hpp
/// @brief Transforms, spectral multipliers, projections, norms and the
/// pseudo-spectral nonlinear and damping terms on the torus.

#include <array>
#include <memory>
#include <vector>

#include "nsdamp/damping_law.hpp"
#include "nsdamp/fft.hpp"
#include "nsdamp/field.hpp"
#include "nsdamp/grid.hpp"
#include "nsdamp/kernels.hpp"

namespace nsdamp {

/// The Friedrich cutoff keeps the open ball |xi| < R. Flipping this keeps
/// the closed ball |xi| <= R instead.
inline constexpr bool kOpenBallCutoff = true;

inline bool kept_by_cutoff(double xi_sq, double R) {
  return kOpenBallCutoff ? xi_sq < R * R : xi_sq <= R * R;
}

/// |xi|^2 for every spectral index, FFT order.
std::vector<double> xi_squared_table(const TorusGrid& grid);

// ---------------------------------------------------------------------------
// Transforms on the base grid. The Nyquist planes are dropped on the way in,
// so the round trip is the identity on Nyquist-free samples.

VectorFieldK forward_transform(const TorusGrid& grid, const VectorSamples& samples);
ScalarFieldK forward_transform(const TorusGrid& grid, const ScalarSamples& samples);
VectorSamples inverse_transform(const VectorFieldK& u);
ScalarSamples inverse_transform(const ScalarFieldK& u);

/// Physical samples on the padded grid of u's TorusGrid.
VectorSamples inverse_transform_padded(const VectorFieldK& u);

// ---------------------------------------------------------------------------
// Multipliers

/// u - xi (xi . u)/|xi|^2 per mode, zero mean. Sets divergence_free.
VectorFieldK leray_project(const VectorFieldK& u);
VectorFieldK friedrich_cutoff(const VectorFieldK& u, double R);
ScalarFieldK friedrich_cutoff(const ScalarFieldK& u, double R);

VectorFieldK gradient(const ScalarFieldK& p);
ScalarFieldK divergence(const VectorFieldK& u);
ScalarFieldK laplacian(const ScalarFieldK& p);
VectorFieldK laplacian(const VectorFieldK& u);

// ---------------------------------------------------------------------------
// Norms, scaled so that s = 0 is the L2 norm on the box:
//   ||u||_{H^s}^2  = (V/n^6) sum_k (1 + |xi|^2)^s |u_hat|^2
//   ||u||_{Hd^s}^2 = (V/n^6) sum_{k != 0} |xi|^(2s) |u_hat|^2
// A homogeneous norm with s < 0 is undefined for a field with a mean and
// throws DomainError.

double sobolev_norm(const ScalarFieldK& u, double s, bool homogeneous);
double sobolev_norm(const VectorFieldK& u, double s, bool homogeneous);

/// Per-mode weights of the norm above, including the V/n^6 factor.
std::vector<double> sobolev_weights(const TorusGrid& grid, double s, bool homogeneous);

/// Relative size of the mean mode used by the homogeneous-norm check.
inline constexpr double kMeanTolerance = 1e-12;

/// Real L2 inner product (u, v).
double inner_product(const VectorFieldK& u, const VectorFieldK& v);
double inner_product(const ScalarFieldK& u, const ScalarFieldK& v);
double l2_norm(const VectorFieldK& u);
/// ||grad u||_{L2}^2, summed over components.
double enstrophy(const VectorFieldK& u);

/// ||u||_{L^q}, from collocation on the padded grid.
double lebesgue_norm(const VectorFieldK& u, double q);

// ---------------------------------------------------------------------------
// Nonlinear terms

/// div(u (x) u) from the six products on the padded grid, truncated to the
/// base cube. Throws ContractError unless u is numerically divergence-free.
VectorFieldK nonlinear_term(const VectorFieldK& u);

struct DampingTerm {
  VectorFieldK force;
  /// Collocation integral (V/M^3) sum_x f(|u|)|u|^2 on the padded grid.
  double dissipation;
};

/// f(|u|)u formed on the padded grid, truncated to the base cube.
DampingTerm damping_term(const VectorFieldK& u, const DampingLaw& law);

struct PressureField {
  ScalarFieldK pressure;
  double s;
  /// ||pressure||_{H^{-s}}
  double negative_norm;
};

/// pi = (-Delta)^{-1} div[div(u (x) u) + f(|u|)u], zero mean. The returned
/// norm is the inhomogeneous H^{-s} norm, s > 3/2.
PressureField pressure_recover(const VectorFieldK& u, const DampingLaw& law, double s = 2.0);

struct ProductProbe {
  double lhs;
  double rhs_factor;
};

/// lhs = ||uv - mean(uv)||_{Hd^{s1+s2-3/2}} with uv formed exactly on a
/// doubled grid; rhs_factor = ||u||_{Hd^s1}||v||_{Hd^s2} + ||u||_{Hd^s2}||v||_{Hd^s1}.
/// Requires s1 + s2 > 0 and s1 < 3/2.
ProductProbe lp_product_probe(const ScalarFieldK& u, const ScalarFieldK& v, double s1, double s2);

// ---------------------------------------------------------------------------
// Engine for the time stepper: one pass produces the projected, truncated
// forcing together with the scalars the energy budget needs.

enum class KernelMode { Serial, Parallel };

struct ForcingScalars {
  /// ||grad u||^2 of the input.
  double enstrophy = 0.0;
  /// Collocation damping integral of the input.
  double dissipation = 0.0;
};

class PseudoSpectralEngine {
public:
  PseudoSpectralEngine(const TorusGrid& grid, DampingLaw law,
                       KernelMode mode = KernelMode::Parallel);

  const TorusGrid& grid() const { return grid_; }
  const DampingLaw& law() const { return law_; }

  /// out = -J_R P[div(u (x) u) + f(|u|)u]. Either term can be switched off.
  ForcingScalars forcing(const VectorFieldK& u, double cutoff_R, bool nonlinear, bool damping,
                         VectorFieldK& out);

  /// Spectra of the six products and of f(|u|)u on the base cube, unprojected.
  /// Returns the damping collocation integral.
  double products(const VectorFieldK& u, bool nonlinear, bool damping);
  const std::array<Coeffs, 6>& product_spectra() const { return prod_hat_; }
  const std::array<Coeffs, 3>& damping_spectra() const { return damp_hat_; }

private:
  TorusGrid grid_;
  DampingLaw law_;
  KernelMode mode_;
  PaddedTransform transform_;
  std::array<RealBuffer, 3> u_phys_;
  std::array<RealBuffer, 6> prod_phys_;
  std::array<RealBuffer, 3> damp_phys_;
  std::array<Coeffs, 6> prod_hat_;
  std::array<Coeffs, 3> damp_hat_;
};

}  // namespace nsdamp
