#include "nsdamp/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nsdamp/errors.hpp"

namespace nsdamp {

namespace {

std::size_t mirror_index(const TorusGrid& g, int i0, int i1, int i2) {
  const int n = g.n();
  return g.flat((n - i0) % n, (n - i1) % n, (n - i2) % n);
}

double hermitian_defect_of(const TorusGrid& g, const Coeffs& c) {
  const int n = g.n();
  double worst = 0.0;
  for (int i0 = 0; i0 < n; ++i0)
    for (int i1 = 0; i1 < n; ++i1)
      for (int i2 = 0; i2 < n; ++i2) {
        const auto a = c[g.flat(i0, i1, i2)];
        const auto b = c[mirror_index(g, i0, i1, i2)];
        worst = std::max(worst, std::abs(a - std::conj(b)));
      }
  return worst;
}

void require_same_grid(const TorusGrid& a, const TorusGrid& b) {
  if (!(a == b)) throw ShapeError("fields live on different grids");
}

}  // namespace

ScalarFieldK::ScalarFieldK(const TorusGrid& grid, Coeffs coeffs) : grid_(grid), c_(std::move(coeffs)) {
  if (c_.size() != grid_.size()) throw ShapeError("scalar field: coefficient count does not match grid");
}

Complex& ScalarFieldK::at(int k0, int k1, int k2) {
  return c_[grid_.flat(grid_.index_of(k0), grid_.index_of(k1), grid_.index_of(k2))];
}

Complex ScalarFieldK::at(int k0, int k1, int k2) const {
  return c_[grid_.flat(grid_.index_of(k0), grid_.index_of(k1), grid_.index_of(k2))];
}

double ScalarFieldK::hermitian_defect() const { return hermitian_defect_of(grid_, c_); }

ScalarFieldK& ScalarFieldK::operator+=(const ScalarFieldK& other) {
  require_same_grid(grid_, other.grid_);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += other.c_[i];
  return *this;
}

ScalarFieldK& ScalarFieldK::operator-=(const ScalarFieldK& other) {
  require_same_grid(grid_, other.grid_);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= other.c_[i];
  return *this;
}

ScalarFieldK& ScalarFieldK::operator*=(double s) {
  for (auto& v : c_) v *= s;
  return *this;
}

VectorFieldK::VectorFieldK(const TorusGrid& grid) : grid_(grid) {
  for (auto& comp : c_) comp.assign(grid.size(), Complex{});
}

VectorFieldK::VectorFieldK(const TorusGrid& grid, std::array<Coeffs, 3> comps, bool divergence_free)
    : grid_(grid), c_(std::move(comps)), divergence_free_(divergence_free) {
  for (const auto& comp : c_) {
    if (comp.size() != grid_.size()) throw ShapeError("vector field: coefficient count does not match grid");
  }
}

Complex& VectorFieldK::at(int a, int k0, int k1, int k2) {
  return c_[a][grid_.flat(grid_.index_of(k0), grid_.index_of(k1), grid_.index_of(k2))];
}

Complex VectorFieldK::at(int a, int k0, int k1, int k2) const {
  return c_[a][grid_.flat(grid_.index_of(k0), grid_.index_of(k1), grid_.index_of(k2))];
}

double VectorFieldK::hermitian_defect() const {
  double worst = 0.0;
  for (const auto& comp : c_) worst = std::max(worst, hermitian_defect_of(grid_, comp));
  return worst;
}

double VectorFieldK::coefficient_norm() const {
  double sum = 0.0;
  for (const auto& comp : c_)
    for (const auto& v : comp) sum += std::norm(v);
  return std::sqrt(sum);
}

double VectorFieldK::divergence_defect() const {
  const double norm = coefficient_norm();
  if (norm == 0.0) return 0.0;
  const int n = grid_.n();
  const double kappa = grid_.kappa();
  double worst = 0.0;
  for (int i0 = 0; i0 < n; ++i0) {
    const double x0 = kappa * grid_.wavenumber(i0);
    for (int i1 = 0; i1 < n; ++i1) {
      const double x1 = kappa * grid_.wavenumber(i1);
      for (int i2 = 0; i2 < n; ++i2) {
        const double x2 = kappa * grid_.wavenumber(i2);
        const auto idx = grid_.flat(i0, i1, i2);
        const Complex d = x0 * c_[0][idx] + x1 * c_[1][idx] + x2 * c_[2][idx];
        worst = std::max(worst, std::abs(d));
      }
    }
  }
  return worst / norm;
}

bool VectorFieldK::check_divergence_free(double tol) const { return divergence_defect() <= tol; }

double VectorFieldK::max_abs_coefficient() const {
  double worst = 0.0;
  for (const auto& comp : c_)
    for (const auto& v : comp) {
      const double a = std::abs(v);
      if (!std::isfinite(a)) return std::numeric_limits<double>::quiet_NaN();
      worst = std::max(worst, a);
    }
  return worst;
}

bool VectorFieldK::all_finite() const { return !std::isnan(max_abs_coefficient()); }

VectorFieldK& VectorFieldK::operator+=(const VectorFieldK& other) {
  require_same_grid(grid_, other.grid_);
  for (int a = 0; a < 3; ++a)
    for (std::size_t i = 0; i < c_[a].size(); ++i) c_[a][i] += other.c_[a][i];
  divergence_free_ = divergence_free_ && other.divergence_free_;
  return *this;
}

VectorFieldK& VectorFieldK::operator-=(const VectorFieldK& other) {
  require_same_grid(grid_, other.grid_);
  for (int a = 0; a < 3; ++a)
    for (std::size_t i = 0; i < c_[a].size(); ++i) c_[a][i] -= other.c_[a][i];
  divergence_free_ = divergence_free_ && other.divergence_free_;
  return *this;
}

VectorFieldK& VectorFieldK::operator*=(double s) {
  for (auto& comp : c_)
    for (auto& v : comp) v *= s;
  return *this;
}

void VectorFieldK::axpy(double s, const VectorFieldK& other) {
  require_same_grid(grid_, other.grid_);
  for (int a = 0; a < 3; ++a)
    for (std::size_t i = 0; i < c_[a].size(); ++i) c_[a][i] += s * other.c_[a][i];
  divergence_free_ = divergence_free_ && other.divergence_free_;
}

VectorFieldK operator-(const VectorFieldK& a, const VectorFieldK& b) {
  VectorFieldK out = a;
  out -= b;
  return out;
}

VectorFieldK operator+(const VectorFieldK& a, const VectorFieldK& b) {
  VectorFieldK out = a;
  out += b;
  return out;
}

}  // namespace nsdamp
