#include "nsdamp/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <mutex>

#include "nsdamp/errors.hpp"

namespace nsdamp {

namespace detail {

void* fftw_alloc_bytes(std::size_t bytes) {
  void* p = fftw_malloc(bytes == 0 ? 1 : bytes);
  if (!p) throw std::bad_alloc();
  return p;
}

void fftw_free_bytes(void* p) noexcept { fftw_free(p); }

}  // namespace detail

namespace {

struct PlanPair {
  fftw_plan r2c;
  fftw_plan c2r;
};

// The FFTW planner is not thread-safe; execution with the new-array API is.
// Plans live for the process lifetime. FFTW_ESTIMATE keeps them deterministic.
PlanPair plans_for(int m) {
  static std::mutex mutex;
  static std::map<int, PlanPair> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(m);
  if (it != cache.end()) return it->second;
  const std::size_t real_size = static_cast<std::size_t>(m) * m * m;
  const std::size_t half_size = static_cast<std::size_t>(m) * m * (m / 2 + 1);
  auto* real = static_cast<double*>(fftw_malloc(sizeof(double) * real_size));
  auto* half = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * half_size));
  PlanPair pair{fftw_plan_dft_r2c_3d(m, m, m, real, half, FFTW_ESTIMATE),
                fftw_plan_dft_c2r_3d(m, m, m, half, real, FFTW_ESTIMATE)};
  fftw_free(real);
  fftw_free(half);
  if (!pair.r2c || !pair.c2r) throw std::runtime_error("FFTW planning failed");
  cache.emplace(m, pair);
  return pair;
}

}  // namespace

PaddedTransform::PaddedTransform(int n, int m) : n_(n), m_(m) {
  if (n < 2 || m < n || n % 2 != 0 || m % 2 != 0) {
    throw ShapeError("padded transform needs even n <= m");
  }
  half_size_ = static_cast<std::size_t>(m) * m * (m / 2 + 1);
  const auto pair = plans_for(m);
  r2c_ = pair.r2c;
  c2r_ = pair.c2r;
}

HalfSpectrum& PaddedTransform::scratch(std::size_t slot) {
  if (scratch_.size() <= slot) scratch_.resize(slot + 1);
  auto& buf = scratch_[slot];
  if (buf.size() != half_size_) buf.resize(half_size_);
  return buf;
}

void PaddedTransform::scatter(const Coeffs& base, HalfSpectrum& half) const {
  std::memset(static_cast<void*>(half.data()), 0, sizeof(Complex) * half.size());
  const int n = n_;
  const int m = m_;
  const int hm = m / 2 + 1;
  const double scale = 1.0 / (static_cast<double>(n) * n * n);
  for (int i0 = 0; i0 < n; ++i0) {
    if (i0 == n / 2) continue;
    const int k0 = i0 < n / 2 ? i0 : i0 - n;
    const int j0 = k0 >= 0 ? k0 : k0 + m;
    for (int i1 = 0; i1 < n; ++i1) {
      if (i1 == n / 2) continue;
      const int k1 = i1 < n / 2 ? i1 : i1 - n;
      const int j1 = k1 >= 0 ? k1 : k1 + m;
      const Complex* src = base.data() + (static_cast<std::size_t>(i0) * n + i1) * n;
      Complex* dst = half.data() + (static_cast<std::size_t>(j0) * m + j1) * hm;
      for (int k2 = 0; k2 < n / 2; ++k2) dst[k2] = scale * src[k2];
    }
  }
}

void PaddedTransform::gather(const HalfSpectrum& half, Coeffs& base) const {
  const int n = n_;
  const int m = m_;
  const int hm = m / 2 + 1;
  const double scale = (static_cast<double>(n) * n * n) / (static_cast<double>(m) * m * m);
  base.assign(static_cast<std::size_t>(n) * n * n, Complex{});
  for (int i0 = 0; i0 < n; ++i0) {
    if (i0 == n / 2) continue;
    const int k0 = i0 < n / 2 ? i0 : i0 - n;
    const int j0 = k0 >= 0 ? k0 : k0 + m;
    const int jm0 = k0 > 0 ? m - k0 : -k0;
    for (int i1 = 0; i1 < n; ++i1) {
      if (i1 == n / 2) continue;
      const int k1 = i1 < n / 2 ? i1 : i1 - n;
      const int j1 = k1 >= 0 ? k1 : k1 + m;
      const int jm1 = k1 > 0 ? m - k1 : -k1;
      Complex* dst = base.data() + (static_cast<std::size_t>(i0) * n + i1) * n;
      const Complex* row = half.data() + (static_cast<std::size_t>(j0) * m + j1) * hm;
      const Complex* mirror = half.data() + (static_cast<std::size_t>(jm0) * m + jm1) * hm;
      for (int k2 = 0; k2 < n / 2; ++k2) dst[k2] = scale * row[k2];
      // Negative k2 from the conjugate of (-k0, -k1, -k2).
      for (int i2 = n / 2 + 1; i2 < n; ++i2) dst[i2] = scale * std::conj(mirror[n - i2]);
    }
  }
}

void PaddedTransform::to_physical(const Coeffs& base, RealBuffer& out) {
  if (base.size() != static_cast<std::size_t>(n_) * n_ * n_) {
    throw ShapeError("to_physical: coefficient count does not match grid");
  }
  auto& half = scratch(0);
  scatter(base, half);
  out.resize(physical_size());
  fftw_execute_dft_c2r(static_cast<fftw_plan>(c2r_), reinterpret_cast<fftw_complex*>(half.data()),
                       out.data());
}

void PaddedTransform::to_spectral(const RealBuffer& in, Coeffs& base) {
  if (in.size() != physical_size()) throw ShapeError("to_spectral: sample count does not match grid");
  auto& half = scratch(0);
  // r2c leaves its input intact.
  fftw_execute_dft_r2c(static_cast<fftw_plan>(r2c_), const_cast<double*>(in.data()),
                       reinterpret_cast<fftw_complex*>(half.data()));
  gather(half, base);
}

void PaddedTransform::to_physical(std::span<const Coeffs* const> base,
                                  std::span<RealBuffer* const> out) {
  if (base.size() != out.size()) throw ShapeError("to_physical: batch size mismatch");
  const auto count = static_cast<std::ptrdiff_t>(base.size());
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    scratch(static_cast<std::size_t>(i));
    out[i]->resize(physical_size());
  }
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    auto& half = scratch_[static_cast<std::size_t>(i)];
    scatter(*base[i], half);
    fftw_execute_dft_c2r(static_cast<fftw_plan>(c2r_), reinterpret_cast<fftw_complex*>(half.data()),
                         out[i]->data());
  }
}

void PaddedTransform::to_spectral(std::span<const RealBuffer* const> in,
                                  std::span<Coeffs* const> base) {
  if (base.size() != in.size()) throw ShapeError("to_spectral: batch size mismatch");
  const auto count = static_cast<std::ptrdiff_t>(in.size());
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    if (in[i]->size() != physical_size()) throw ShapeError("to_spectral: sample count does not match grid");
    scratch(static_cast<std::size_t>(i));
  }
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    auto& half = scratch_[static_cast<std::size_t>(i)];
    fftw_execute_dft_r2c(static_cast<fftw_plan>(r2c_), const_cast<double*>(in[i]->data()),
                         reinterpret_cast<fftw_complex*>(half.data()));
    gather(half, *base[i]);
  }
}

}  // namespace nsdamp
