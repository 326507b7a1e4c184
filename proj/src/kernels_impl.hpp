#pragma once

// Block bodies shared by the serial and OpenMP kernel drivers. Each function
// handles entries [begin, end) and returns that block's partial sum.

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "nsdamp/kernels.hpp"

namespace nsdamp::kernels::detail {

// Neumaier-compensated running sum. Plain summation of ~10^5 terms of one
// sign loses up to n * eps relative, which would show in the budget residual.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    const double t = sum + x;
    carry += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + carry; }
};

inline std::size_t block_count(std::size_t size) {
  return (size + kReductionBlock - 1) / kReductionBlock;
}

inline std::size_t block_end(std::size_t b, std::size_t size) {
  return std::min(size, (b + 1) * kReductionBlock);
}

inline double products_block(const VelocitySamples& v, const ProductPointers* prod,
                             const DampingPointers* damp, const DampingLaw& law,
                             std::size_t begin, std::size_t end) {
  const double* u0 = v.u[0];
  const double* u1 = v.u[1];
  const double* u2 = v.u[2];
  if (prod) {
    const auto& p = *prod;
    for (std::size_t i = begin; i < end; ++i) {
      const double a = u0[i], b = u1[i], c = u2[i];
      p[0][i] = a * a;
      p[1][i] = a * b;
      p[2][i] = a * c;
      p[3][i] = b * b;
      p[4][i] = b * c;
      p[5][i] = c * c;
    }
  }
  CompensatedSum sum;
  if (damp) {
    const auto& d = *damp;
    for (std::size_t i = begin; i < end; ++i) {
      const double a = u0[i], b = u1[i], c = u2[i];
      const double s = a * a + b * b + c * c;
      const double f = law.eval_from_square(s);
      d[0][i] = f * a;
      d[1][i] = f * b;
      d[2][i] = f * c;
      sum.add(f * s);
    }
  }
  return sum.value();
}

inline double forcing_block(const ModeTables& t, const ForcingInputs& in,
                            const std::array<const Complex*, 3>& u_hat,
                            const std::array<Complex*, 3>& out, std::size_t begin,
                            std::size_t end) {
  const int n = t.n;
  const int half = n / 2;
  const Complex I(0.0, 1.0);
  CompensatedSum ens;
  for (std::size_t idx = begin; idx < end; ++idx) {
    const int i2 = static_cast<int>(idx % n);
    const int i1 = static_cast<int>((idx / n) % n);
    const int i0 = static_cast<int>(idx / (static_cast<std::size_t>(n) * n));
    const double x0 = t.kappa * (i0 < half ? i0 : i0 - n);
    const double x1 = t.kappa * (i1 < half ? i1 : i1 - n);
    const double x2 = t.kappa * (i2 < half ? i2 : i2 - n);
    const double k2 = x0 * x0 + x1 * x1 + x2 * x2;
    if (u_hat[0]) {
      ens.add(k2 * (std::norm(u_hat[0][idx]) + std::norm(u_hat[1][idx]) + std::norm(u_hat[2][idx])));
    }
    if (i0 == half || i1 == half || i2 == half || k2 == 0.0 || !(k2 < t.cutoff_sq)) {
      out[0][idx] = out[1][idx] = out[2][idx] = Complex{};
      continue;
    }
    Complex f0{}, f1{}, f2{};
    if (in.prod[0]) {
      const Complex p00 = in.prod[0][idx], p01 = in.prod[1][idx], p02 = in.prod[2][idx];
      const Complex p11 = in.prod[3][idx], p12 = in.prod[4][idx], p22 = in.prod[5][idx];
      f0 = I * (x0 * p00 + x1 * p01 + x2 * p02);
      f1 = I * (x0 * p01 + x1 * p11 + x2 * p12);
      f2 = I * (x0 * p02 + x1 * p12 + x2 * p22);
    }
    if (in.damp[0]) {
      f0 += in.damp[0][idx];
      f1 += in.damp[1][idx];
      f2 += in.damp[2][idx];
    }
    const Complex dot = (x0 * f0 + x1 * f1 + x2 * f2) / k2;
    out[0][idx] = -(f0 - x0 * dot);
    out[1][idx] = -(f1 - x1 * dot);
    out[2][idx] = -(f2 - x2 * dot);
  }
  return ens.value();
}

inline double sq_block(const Complex* c, const double* w, std::size_t begin, std::size_t end) {
  CompensatedSum s;
  for (std::size_t i = begin; i < end; ++i) s.add(w[i] * std::norm(c[i]));
  return s.value();
}

inline double sq_diff_block(const Complex* a, const Complex* b, const double* w,
                            std::size_t begin, std::size_t end) {
  CompensatedSum s;
  for (std::size_t i = begin; i < end; ++i) s.add(w[i] * std::norm(a[i] - b[i]));
  return s.value();
}

}  // namespace nsdamp::kernels::detail
