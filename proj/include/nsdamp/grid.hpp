#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>

namespace nsdamp {

/// Periodic cube [0, period)^3 sampled with n points per axis.
///
/// Spectral index i in [0, n) maps to the integer wavenumber k = i for
/// i < n/2 and k = i - n otherwise (FFT order); the physical wavenumber is
/// xi = kappa * k with kappa = 2 pi / period. The index i = n/2 (k = -n/2)
/// is the Nyquist mode and is kept at zero everywhere.
///
/// Pointwise products are formed on a padded grid of pad_factor * n points
/// per axis.
class TorusGrid {
public:
  TorusGrid() : TorusGrid(32) {}
  explicit TorusGrid(int n, double period = 2.0 * std::numbers::pi, double pad_factor = 2.0);

  int n() const { return n_; }
  double period() const { return period_; }
  double pad_factor() const { return pad_; }
  int padded_n() const { return padded_n_; }

  std::size_t size() const { return static_cast<std::size_t>(n_) * n_ * n_; }
  std::size_t padded_size() const {
    return static_cast<std::size_t>(padded_n_) * padded_n_ * padded_n_;
  }
  double kappa() const { return 2.0 * std::numbers::pi / period_; }
  double volume() const { return period_ * period_ * period_; }

  /// Integer wavenumber of spectral index i.
  int wavenumber(int i) const { return i < n_ / 2 ? i : i - n_; }
  /// Spectral index of integer wavenumber k in [-n/2, n/2).
  int index_of(int k) const { return k >= 0 ? k : k + n_; }
  bool is_nyquist(int i) const { return i == n_ / 2; }

  std::size_t flat(int i0, int i1, int i2) const {
    return (static_cast<std::size_t>(i0) * n_ + i1) * n_ + i2;
  }

  /// Radius of the ball inscribed in the resolved wavenumber cube.
  double resolved_radius() const { return kappa() * n_ / 2.0; }
  /// Friedrich radius at which truncation and dealiasing coincide: the
  /// inscribed ball when products are padded (pad >= 3/2), the 2/3-rule
  /// radius otherwise.
  double default_cutoff() const {
    return pad_ >= 1.5 ? resolved_radius() : kappa() * n_ / 3.0;
  }

  friend bool operator==(const TorusGrid& a, const TorusGrid& b) {
    return a.n_ == b.n_ && a.period_ == b.period_ && a.pad_ == b.pad_;
  }

private:
  int n_;
  double period_;
  double pad_;
  int padded_n_;
};

}  // namespace nsdamp
