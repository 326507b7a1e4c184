#pragma once

/// @file fft.hpp
/// @brief Real-to-complex transforms between base-grid spectra and physical
/// samples on a (possibly padded) grid, backed by FFTW.

#include <complex>
#include <cstddef>
#include <new>
#include <span>
#include <vector>

#include "nsdamp/field.hpp"

namespace nsdamp {

namespace detail {
void* fftw_alloc_bytes(std::size_t bytes);
void fftw_free_bytes(void* p) noexcept;
}  // namespace detail

/// Allocator giving FFTW's SIMD alignment to std::vector storage.
template <class T>
struct FftwAllocator {
  using value_type = T;
  FftwAllocator() = default;
  template <class U>
  FftwAllocator(const FftwAllocator<U>&) noexcept {}
  T* allocate(std::size_t n) { return static_cast<T*>(detail::fftw_alloc_bytes(n * sizeof(T))); }
  void deallocate(T* p, std::size_t) noexcept { detail::fftw_free_bytes(p); }
  template <class U>
  bool operator==(const FftwAllocator<U>&) const noexcept { return true; }
};

using RealBuffer = std::vector<double, FftwAllocator<double>>;
using HalfSpectrum = std::vector<Complex, FftwAllocator<Complex>>;

/// Maps full base-grid spectra (n^3, FFT order) to real samples on an m^3
/// grid and back, m >= n. Wavenumbers outside the base cube are zero on the
/// way in and discarded on the way out; the Nyquist plane of the base grid
/// is forced to zero. Scaling follows the field convention, so with m = n
/// the pair is the plain forward/inverse DFT.
///
/// Instances own scratch space and are not meant to be shared between
/// threads; the underlying FFTW plans are shared and cached.
class PaddedTransform {
public:
  PaddedTransform(int n, int m);

  int n() const { return n_; }
  int m() const { return m_; }
  std::size_t physical_size() const { return static_cast<std::size_t>(m_) * m_ * m_; }

  void to_physical(const Coeffs& base, RealBuffer& out);
  void to_spectral(const RealBuffer& in, Coeffs& base);

  /// Same as calling to_physical / to_spectral for each item; items are
  /// independent and run in parallel.
  void to_physical(std::span<const Coeffs* const> base, std::span<RealBuffer* const> out);
  void to_spectral(std::span<const RealBuffer* const> in, std::span<Coeffs* const> base);

private:
  void scatter(const Coeffs& base, HalfSpectrum& half) const;
  void gather(const HalfSpectrum& half, Coeffs& base) const;
  HalfSpectrum& scratch(std::size_t slot);

  int n_;
  int m_;
  std::size_t half_size_;
  void* r2c_;
  void* c2r_;
  std::vector<HalfSpectrum> scratch_;
};

}  // namespace nsdamp
