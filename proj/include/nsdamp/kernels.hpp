#pragma once

/// @file kernels.hpp
/// @brief Data-parallel inner loops of the pseudo-spectral pass.
///
/// Every kernel has a serial reference in kernels::serial and an OpenMP
/// version in kernels::omp with the same signature. Reductions are taken over
/// fixed blocks of kReductionBlock entries whose partial sums are combined in
/// block order, so both versions return bit-identical results for any thread
/// count.

#include <array>
#include <cstddef>

#include "nsdamp/damping_law.hpp"
#include "nsdamp/field.hpp"

namespace nsdamp::kernels {

inline constexpr std::size_t kReductionBlock = 4096;

/// Samples of the three velocity components on one grid.
struct VelocitySamples {
  const double* u[3];
  std::size_t size;
};

/// prod[0..5] = u0u0, u0u1, u0u2, u1u1, u1u2, u2u2 pointwise.
using ProductPointers = std::array<double*, 6>;
using DampingPointers = std::array<double*, 3>;

/// Per-mode data needed to assemble the spectral forcing.
struct ModeTables {
  int n;
  double kappa;
  /// Squared Friedrich radius; modes with |xi|^2 < cutoff_sq are kept.
  double cutoff_sq;
};

/// Spectra of the pointwise products on the base grid. Either group may be
/// null to leave that term out.
struct ForcingInputs {
  const Complex* prod[6];
  const Complex* damp[3];
};

namespace serial {

/// Fills the six quadratic products (if prod is non-null) and the damping
/// force f(|u|)u (if damp is non-null). Returns sum_x f(|u(x)|)|u(x)|^2,
/// or 0 when damp is null.
double pointwise_products(const VelocitySamples& u, const ProductPointers* prod,
                          const DampingPointers* damp, const DampingLaw& law);

/// out = -J_R P[div(u (x) u) + f(|u|)u] per mode, plus |xi|^2 |u_hat|^2
/// summed over kept modes when u_hat is given (the enstrophy numerator).
double assemble_forcing(const ModeTables& t, const ForcingInputs& in,
                        const std::array<const Complex*, 3>& u_hat,
                        const std::array<Complex*, 3>& out);

/// sum_k w[k] |c[k]|^2.
double weighted_sq_sum(const Complex* c, const double* w, std::size_t size);
/// sum_k w[k] |a[k] - b[k]|^2.
double weighted_sq_diff_sum(const Complex* a, const Complex* b, const double* w,
                            std::size_t size);

}  // namespace serial

namespace omp {

double pointwise_products(const VelocitySamples& u, const ProductPointers* prod,
                          const DampingPointers* damp, const DampingLaw& law);
double assemble_forcing(const ModeTables& t, const ForcingInputs& in,
                        const std::array<const Complex*, 3>& u_hat,
                        const std::array<Complex*, 3>& out);
double weighted_sq_sum(const Complex* c, const double* w, std::size_t size);
double weighted_sq_diff_sum(const Complex* a, const Complex* b, const double* w,
                            std::size_t size);

}  // namespace omp

}  // namespace nsdamp::kernels
