#include "nsdamp/spectral_ops.hpp"

#include <algorithm>
#include <cmath>

#include "nsdamp/errors.hpp"

namespace nsdamp {

namespace {

const Complex kI(0.0, 1.0);

// Calls fn(flat_index, xi0, xi1, xi2, nyquist) for every mode of the grid.
template <class Fn>
void for_each_mode(const TorusGrid& g, Fn&& fn) {
  const int n = g.n();
  const double kap = g.kappa();
  std::size_t idx = 0;
  for (int i0 = 0; i0 < n; ++i0) {
    const double x0 = kap * g.wavenumber(i0);
    for (int i1 = 0; i1 < n; ++i1) {
      const double x1 = kap * g.wavenumber(i1);
      for (int i2 = 0; i2 < n; ++i2, ++idx) {
        const double x2 = kap * g.wavenumber(i2);
        const bool nyq = g.is_nyquist(i0) || g.is_nyquist(i1) || g.is_nyquist(i2);
        fn(idx, x0, x1, x2, nyq);
      }
    }
  }
}

RealBuffer to_buffer(const std::vector<double>& v) { return RealBuffer(v.begin(), v.end()); }
std::vector<double> from_buffer(const RealBuffer& b) { return std::vector<double>(b.begin(), b.end()); }

void check_samples(const TorusGrid& g, const std::vector<double>& s) {
  if (s.size() != g.size()) throw ShapeError("sample count does not match grid");
}

bool has_mean(Complex mean, double coeff_norm) { return std::abs(mean) > kMeanTolerance * coeff_norm; }

double coeff_norm_of(const Coeffs& c) {
  double s = 0.0;
  for (const auto& v : c) s += std::norm(v);
  return std::sqrt(s);
}

}  // namespace

std::vector<double> xi_squared_table(const TorusGrid& grid) {
  std::vector<double> t(grid.size());
  for_each_mode(grid, [&](std::size_t i, double a, double b, double c, bool) {
    t[i] = a * a + b * b + c * c;
  });
  return t;
}

// ---------------------------------------------------------------------------

VectorFieldK forward_transform(const TorusGrid& grid, const VectorSamples& samples) {
  PaddedTransform tr(grid.n(), grid.n());
  VectorFieldK out(grid);
  for (int a = 0; a < 3; ++a) {
    check_samples(grid, samples[a]);
    tr.to_spectral(to_buffer(samples[a]), out.component(a));
  }
  return out;
}

ScalarFieldK forward_transform(const TorusGrid& grid, const ScalarSamples& samples) {
  check_samples(grid, samples);
  PaddedTransform tr(grid.n(), grid.n());
  ScalarFieldK out(grid);
  tr.to_spectral(to_buffer(samples), out.coeffs());
  return out;
}

VectorSamples inverse_transform(const VectorFieldK& u) {
  const int n = u.grid().n();
  PaddedTransform tr(n, n);
  VectorSamples out;
  RealBuffer buf;
  for (int a = 0; a < 3; ++a) {
    tr.to_physical(u.component(a), buf);
    out[a] = from_buffer(buf);
  }
  return out;
}

ScalarSamples inverse_transform(const ScalarFieldK& u) {
  const int n = u.grid().n();
  PaddedTransform tr(n, n);
  RealBuffer buf;
  tr.to_physical(u.coeffs(), buf);
  return from_buffer(buf);
}

VectorSamples inverse_transform_padded(const VectorFieldK& u) {
  PaddedTransform tr(u.grid().n(), u.grid().padded_n());
  VectorSamples out;
  RealBuffer buf;
  for (int a = 0; a < 3; ++a) {
    tr.to_physical(u.component(a), buf);
    out[a] = from_buffer(buf);
  }
  return out;
}

// ---------------------------------------------------------------------------

VectorFieldK leray_project(const VectorFieldK& u) {
  VectorFieldK out(u.grid());
  const auto& c = u.components();
  auto& o = out.components();
  for_each_mode(u.grid(), [&](std::size_t i, double a, double b, double d, bool nyq) {
    const double k2 = a * a + b * b + d * d;
    if (nyq || k2 == 0.0) return;
    const Complex dot = (a * c[0][i] + b * c[1][i] + d * c[2][i]) / k2;
    o[0][i] = c[0][i] - a * dot;
    o[1][i] = c[1][i] - b * dot;
    o[2][i] = c[2][i] - d * dot;
  });
  out.set_divergence_free(true);
  return out;
}

VectorFieldK friedrich_cutoff(const VectorFieldK& u, double R) {
  if (R < 0.0) throw DomainError("friedrich_cutoff: R must be nonnegative");
  VectorFieldK out = u;
  auto& o = out.components();
  for_each_mode(u.grid(), [&](std::size_t i, double a, double b, double d, bool) {
    if (!kept_by_cutoff(a * a + b * b + d * d, R)) o[0][i] = o[1][i] = o[2][i] = Complex{};
  });
  return out;
}

ScalarFieldK friedrich_cutoff(const ScalarFieldK& u, double R) {
  if (R < 0.0) throw DomainError("friedrich_cutoff: R must be nonnegative");
  ScalarFieldK out = u;
  auto& o = out.coeffs();
  for_each_mode(u.grid(), [&](std::size_t i, double a, double b, double d, bool) {
    if (!kept_by_cutoff(a * a + b * b + d * d, R)) o[i] = Complex{};
  });
  return out;
}

VectorFieldK gradient(const ScalarFieldK& p) {
  VectorFieldK out(p.grid());
  auto& o = out.components();
  const auto& c = p.coeffs();
  for_each_mode(p.grid(), [&](std::size_t i, double a, double b, double d, bool nyq) {
    if (nyq) return;
    o[0][i] = kI * a * c[i];
    o[1][i] = kI * b * c[i];
    o[2][i] = kI * d * c[i];
  });
  return out;
}

ScalarFieldK divergence(const VectorFieldK& u) {
  ScalarFieldK out(u.grid());
  auto& o = out.coeffs();
  const auto& c = u.components();
  for_each_mode(u.grid(), [&](std::size_t i, double a, double b, double d, bool nyq) {
    if (nyq) return;
    o[i] = kI * (a * c[0][i] + b * c[1][i] + d * c[2][i]);
  });
  return out;
}

ScalarFieldK laplacian(const ScalarFieldK& p) {
  ScalarFieldK out(p.grid());
  auto& o = out.coeffs();
  const auto& c = p.coeffs();
  for_each_mode(p.grid(), [&](std::size_t i, double a, double b, double d, bool) {
    o[i] = -(a * a + b * b + d * d) * c[i];
  });
  return out;
}

VectorFieldK laplacian(const VectorFieldK& u) {
  VectorFieldK out(u.grid(), u.components(), u.divergence_free());
  auto& o = out.components();
  for_each_mode(u.grid(), [&](std::size_t i, double a, double b, double d, bool) {
    const double k2 = a * a + b * b + d * d;
    for (auto& comp : o) comp[i] *= -k2;
  });
  return out;
}

// ---------------------------------------------------------------------------

std::vector<double> sobolev_weights(const TorusGrid& grid, double s, bool homogeneous) {
  const double n3 = static_cast<double>(grid.size());
  const double scale = grid.volume() / (n3 * n3);
  std::vector<double> w(grid.size());
  for_each_mode(grid, [&](std::size_t i, double a, double b, double d, bool) {
    const double k2 = a * a + b * b + d * d;
    if (homogeneous) {
      w[i] = k2 == 0.0 ? 0.0 : scale * std::pow(k2, s);
    } else {
      w[i] = scale * std::pow(1.0 + k2, s);
    }
  });
  return w;
}

double sobolev_norm(const ScalarFieldK& u, double s, bool homogeneous) {
  if (homogeneous && s < 0.0 && has_mean(u.mean_coefficient(), coeff_norm_of(u.coeffs()))) {
    throw DomainError("homogeneous negative-order norm of a field with nonzero mean");
  }
  const auto w = sobolev_weights(u.grid(), s, homogeneous);
  return std::sqrt(kernels::omp::weighted_sq_sum(u.coeffs().data(), w.data(), w.size()));
}

double sobolev_norm(const VectorFieldK& u, double s, bool homogeneous) {
  if (homogeneous && s < 0.0) {
    double mean_sq = 0.0;
    for (const auto& c : u.components()) mean_sq += std::norm(c[0]);
    if (std::sqrt(mean_sq) > kMeanTolerance * u.coefficient_norm()) {
      throw DomainError("homogeneous negative-order norm of a field with nonzero mean");
    }
  }
  const auto w = sobolev_weights(u.grid(), s, homogeneous);
  double total = 0.0;
  for (const auto& c : u.components()) total += kernels::omp::weighted_sq_sum(c.data(), w.data(), w.size());
  return std::sqrt(total);
}

double inner_product(const VectorFieldK& u, const VectorFieldK& v) {
  if (!(u.grid() == v.grid())) throw ShapeError("inner_product: fields live on different grids");
  const double n3 = static_cast<double>(u.grid().size());
  double s = 0.0;
  for (int a = 0; a < 3; ++a) {
    const auto& x = u.component(a);
    const auto& y = v.component(a);
    for (std::size_t i = 0; i < x.size(); ++i) s += (std::conj(x[i]) * y[i]).real();
  }
  return s * u.grid().volume() / (n3 * n3);
}

double inner_product(const ScalarFieldK& u, const ScalarFieldK& v) {
  if (!(u.grid() == v.grid())) throw ShapeError("inner_product: fields live on different grids");
  const double n3 = static_cast<double>(u.grid().size());
  double s = 0.0;
  const auto& x = u.coeffs();
  const auto& y = v.coeffs();
  for (std::size_t i = 0; i < x.size(); ++i) s += (std::conj(x[i]) * y[i]).real();
  return s * u.grid().volume() / (n3 * n3);
}

double l2_norm(const VectorFieldK& u) { return sobolev_norm(u, 0.0, false); }

double enstrophy(const VectorFieldK& u) {
  const auto w = sobolev_weights(u.grid(), 1.0, true);
  double total = 0.0;
  for (const auto& c : u.components()) total += kernels::omp::weighted_sq_sum(c.data(), w.data(), w.size());
  return total;
}

double lebesgue_norm(const VectorFieldK& u, double q) {
  if (!(q >= 1.0)) throw DomainError("lebesgue_norm: q must be >= 1");
  const auto phys = inverse_transform_padded(u);
  const std::size_t m3 = phys[0].size();
  double s = 0.0;
  for (std::size_t i = 0; i < m3; ++i) {
    const double mag = std::sqrt(phys[0][i] * phys[0][i] + phys[1][i] * phys[1][i] +
                                 phys[2][i] * phys[2][i]);
    s += std::pow(mag, q);
  }
  return std::pow(s * u.grid().volume() / static_cast<double>(m3), 1.0 / q);
}

// ---------------------------------------------------------------------------

namespace {

constexpr double kNonlinearDivergenceTolerance = 1e-10;

VectorFieldK divergence_of_products(const TorusGrid& g, const std::array<Coeffs, 6>& p) {
  VectorFieldK out(g);
  auto& o = out.components();
  for_each_mode(g, [&](std::size_t i, double a, double b, double d, bool nyq) {
    if (nyq) return;
    o[0][i] = kI * (a * p[0][i] + b * p[1][i] + d * p[2][i]);
    o[1][i] = kI * (a * p[1][i] + b * p[3][i] + d * p[4][i]);
    o[2][i] = kI * (a * p[2][i] + b * p[4][i] + d * p[5][i]);
  });
  return out;
}

}  // namespace

VectorFieldK nonlinear_term(const VectorFieldK& u) {
  if (!u.check_divergence_free(kNonlinearDivergenceTolerance)) {
    throw ContractError("nonlinear_term: input is not divergence-free");
  }
  PseudoSpectralEngine engine(u.grid(), DampingLaw::zero());
  engine.products(u, true, false);
  return divergence_of_products(u.grid(), engine.product_spectra());
}

DampingTerm damping_term(const VectorFieldK& u, const DampingLaw& law) {
  PseudoSpectralEngine engine(u.grid(), law);
  const double diss = engine.products(u, false, true);
  VectorFieldK force(u.grid(), engine.damping_spectra());
  return {std::move(force), diss};
}

PressureField pressure_recover(const VectorFieldK& u, const DampingLaw& law, double s) {
  if (!(s > 1.5)) throw DomainError("pressure_recover: s must exceed 3/2");
  if (!u.check_divergence_free(kNonlinearDivergenceTolerance)) {
    throw ContractError("pressure_recover: input is not divergence-free");
  }
  const auto& g = u.grid();
  PseudoSpectralEngine engine(g, law);
  engine.products(u, true, !law.is_zero());
  VectorFieldK total = divergence_of_products(g, engine.product_spectra());
  if (!law.is_zero()) total += VectorFieldK(g, engine.damping_spectra());
  ScalarFieldK pi(g);
  auto& o = pi.coeffs();
  const auto& f = total.components();
  for_each_mode(g, [&](std::size_t i, double a, double b, double d, bool nyq) {
    const double k2 = a * a + b * b + d * d;
    if (nyq || k2 == 0.0) return;
    o[i] = kI * (a * f[0][i] + b * f[1][i] + d * f[2][i]) / k2;
  });
  const double norm = sobolev_norm(pi, -s, false);
  return {std::move(pi), s, norm};
}

ProductProbe lp_product_probe(const ScalarFieldK& u, const ScalarFieldK& v, double s1, double s2) {
  if (!(s1 + s2 > 0.0) || !(s1 < 1.5)) {
    throw DomainError("lp_product_probe: requires s1 + s2 > 0 and s1 < 3/2");
  }
  if (!(u.grid() == v.grid())) throw ShapeError("lp_product_probe: fields live on different grids");
  const auto& g = u.grid();
  const int n = g.n();
  // Base modes satisfy |k| <= n/2 - 1, so the product fits the doubled cube
  // without wrap-around and the transform is exact.
  const TorusGrid big(2 * n, g.period(), g.pad_factor());
  PaddedTransform up(n, 2 * n);
  RealBuffer pu, pv;
  up.to_physical(u.coeffs(), pu);
  up.to_physical(v.coeffs(), pv);
  for (std::size_t i = 0; i < pu.size(); ++i) pu[i] *= pv[i];
  PaddedTransform own(2 * n, 2 * n);
  ScalarFieldK prod(big);
  own.to_spectral(pu, prod.coeffs());
  prod.coeffs()[0] = Complex{};
  const double s = s1 + s2 - 1.5;
  const double lhs = sobolev_norm(prod, s, true);
  const auto nu1 = sobolev_norm(u, s1, true);
  const auto nu2 = sobolev_norm(u, s2, true);
  const auto nv1 = sobolev_norm(v, s1, true);
  const auto nv2 = sobolev_norm(v, s2, true);
  return {lhs, nu1 * nv2 + nu2 * nv1};
}

// ---------------------------------------------------------------------------

PseudoSpectralEngine::PseudoSpectralEngine(const TorusGrid& grid, DampingLaw law, KernelMode mode)
    : grid_(grid), law_(std::move(law)), mode_(mode), transform_(grid.n(), grid.padded_n()) {}

double PseudoSpectralEngine::products(const VectorFieldK& u, bool nonlinear, bool damping) {
  if (!(u.grid() == grid_)) throw ShapeError("engine: field lives on a different grid");
  const std::size_t m3 = transform_.physical_size();
  std::array<const Coeffs*, 3> in{&u.component(0), &u.component(1), &u.component(2)};
  std::array<RealBuffer*, 3> phys{&u_phys_[0], &u_phys_[1], &u_phys_[2]};
  transform_.to_physical(std::span<const Coeffs* const>(in), std::span<RealBuffer* const>(phys));

  kernels::VelocitySamples samples{{u_phys_[0].data(), u_phys_[1].data(), u_phys_[2].data()}, m3};
  kernels::ProductPointers pp{};
  kernels::DampingPointers dp{};
  if (nonlinear) {
    for (int k = 0; k < 6; ++k) {
      prod_phys_[k].resize(m3);
      pp[k] = prod_phys_[k].data();
    }
  }
  if (damping) {
    for (int k = 0; k < 3; ++k) {
      damp_phys_[k].resize(m3);
      dp[k] = damp_phys_[k].data();
    }
  }
  const auto* ppp = nonlinear ? &pp : nullptr;
  const auto* dpp = damping ? &dp : nullptr;
  const double sum = mode_ == KernelMode::Serial
                         ? kernels::serial::pointwise_products(samples, ppp, dpp, law_)
                         : kernels::omp::pointwise_products(samples, ppp, dpp, law_);

  std::vector<const RealBuffer*> src;
  std::vector<Coeffs*> dst;
  if (nonlinear) {
    for (int k = 0; k < 6; ++k) {
      src.push_back(&prod_phys_[k]);
      dst.push_back(&prod_hat_[k]);
    }
  }
  if (damping) {
    for (int k = 0; k < 3; ++k) {
      src.push_back(&damp_phys_[k]);
      dst.push_back(&damp_hat_[k]);
    }
  }
  if (!src.empty()) transform_.to_spectral(src, dst);
  if (!damping) return 0.0;
  return sum * grid_.volume() / static_cast<double>(m3);
}

ForcingScalars PseudoSpectralEngine::forcing(const VectorFieldK& u, double cutoff_R, bool nonlinear,
                                             bool damping, VectorFieldK& out) {
  const bool damp_on = damping && !law_.is_zero();
  ForcingScalars result;
  if (nonlinear || damp_on) result.dissipation = products(u, nonlinear, damp_on);
  if (!(out.grid() == grid_)) out = VectorFieldK(grid_);
  kernels::ModeTables tables{grid_.n(), grid_.kappa(), cutoff_R * cutoff_R};
  if (!kOpenBallCutoff) tables.cutoff_sq = std::nextafter(cutoff_R * cutoff_R, HUGE_VAL);
  kernels::ForcingInputs in{};
  if (nonlinear) {
    for (int k = 0; k < 6; ++k) in.prod[k] = prod_hat_[k].data();
  }
  if (damp_on) {
    for (int k = 0; k < 3; ++k) in.damp[k] = damp_hat_[k].data();
  }
  std::array<const Complex*, 3> uh{u.component(0).data(), u.component(1).data(), u.component(2).data()};
  std::array<Complex*, 3> o{out.component(0).data(), out.component(1).data(), out.component(2).data()};
  const double ens = mode_ == KernelMode::Serial ? kernels::serial::assemble_forcing(tables, in, uh, o)
                                                 : kernels::omp::assemble_forcing(tables, in, uh, o);
  const double n3 = static_cast<double>(grid_.size());
  result.enstrophy = ens * grid_.volume() / (n3 * n3);
  out.set_divergence_free(true);
  return result;
}

}  // namespace nsdamp
