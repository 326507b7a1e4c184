#pragma once

/// @file field.hpp
/// @brief Fourier-coefficient fields on the torus.
///
/// Coefficients use the unnormalized forward convention
///   u_hat(k) = sum_x u(x) exp(-i xi.x),    u(x) = n^-3 sum_k u_hat(k) exp(i xi.x)
/// so that ||u||_{L2}^2 = (V / n^6) sum_k |u_hat(k)|^2 with V the box volume.
/// The full spectrum (all n^3 wavenumbers, FFT order) is stored, so Hermitian
/// symmetry u_hat(-k) = conj(u_hat(k)) is an invariant of the data rather than
/// of the layout.

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "nsdamp/grid.hpp"

namespace nsdamp {

using Complex = std::complex<double>;
using Coeffs = std::vector<Complex>;

/// Physical samples of a real scalar on the n^3 grid, row-major (x0, x1, x2).
using ScalarSamples = std::vector<double>;
using VectorSamples = std::array<std::vector<double>, 3>;

class ScalarFieldK {
public:
  ScalarFieldK() = default;
  explicit ScalarFieldK(const TorusGrid& grid) : grid_(grid), c_(grid.size()) {}
  ScalarFieldK(const TorusGrid& grid, Coeffs coeffs);

  const TorusGrid& grid() const { return grid_; }
  Coeffs& coeffs() { return c_; }
  const Coeffs& coeffs() const { return c_; }

  Complex& at(int k0, int k1, int k2);
  Complex at(int k0, int k1, int k2) const;

  /// max_k |u_hat(-k) - conj(u_hat(k))|.
  double hermitian_defect() const;
  /// Zero-mode coefficient.
  Complex mean_coefficient() const { return c_.empty() ? Complex{} : c_[0]; }

  ScalarFieldK& operator+=(const ScalarFieldK& other);
  ScalarFieldK& operator-=(const ScalarFieldK& other);
  ScalarFieldK& operator*=(double s);

private:
  TorusGrid grid_;
  Coeffs c_;
};

class VectorFieldK {
public:
  VectorFieldK() = default;
  explicit VectorFieldK(const TorusGrid& grid);
  VectorFieldK(const TorusGrid& grid, std::array<Coeffs, 3> comps, bool divergence_free = false);

  const TorusGrid& grid() const { return grid_; }
  Coeffs& component(int a) { return c_[a]; }
  const Coeffs& component(int a) const { return c_[a]; }
  std::array<Coeffs, 3>& components() { return c_; }
  const std::array<Coeffs, 3>& components() const { return c_; }

  Complex& at(int a, int k0, int k1, int k2);
  Complex at(int a, int k0, int k1, int k2) const;

  bool divergence_free() const { return divergence_free_; }
  void set_divergence_free(bool flag) { divergence_free_ = flag; }

  /// max over components and k of |u_hat(-k) - conj(u_hat(k))|.
  double hermitian_defect() const;
  /// max_k |xi . u_hat(k)| divided by the coefficient l2 norm (0 for u = 0).
  double divergence_defect() const;
  /// Whether divergence_defect() <= tol.
  bool check_divergence_free(double tol = 1e-12) const;
  /// sqrt(sum over components and k of |u_hat|^2).
  double coefficient_norm() const;
  /// Largest |u_hat| over all coefficients; NaN if any coefficient is not finite.
  double max_abs_coefficient() const;
  bool all_finite() const;

  VectorFieldK& operator+=(const VectorFieldK& other);
  VectorFieldK& operator-=(const VectorFieldK& other);
  VectorFieldK& operator*=(double s);
  /// this += s * other
  void axpy(double s, const VectorFieldK& other);

  friend bool operator==(const VectorFieldK& a, const VectorFieldK& b) {
    return a.grid_ == b.grid_ && a.c_ == b.c_;
  }

private:
  TorusGrid grid_;
  std::array<Coeffs, 3> c_;
  bool divergence_free_ = false;
};

VectorFieldK operator-(const VectorFieldK& a, const VectorFieldK& b);
VectorFieldK operator+(const VectorFieldK& a, const VectorFieldK& b);

}  // namespace nsdamp
