#pragma once

// Shared fixtures for the unit tests: seeded random fields and small configs.

#include <cmath>
#include <filesystem>
#include <random>
#include <string>

#include "nsdamp/config.hpp"
#include "nsdamp/spectral_ops.hpp"

namespace nsdamp::test {

inline double uniform_pm1(std::mt19937_64& rng) {
  return std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
}

/// Real white-noise samples pushed through the forward transform.
inline VectorFieldK random_vector(const TorusGrid& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  VectorSamples s;
  for (auto& c : s) {
    c.resize(g.size());
    for (auto& x : c) x = uniform_pm1(rng);
  }
  return forward_transform(g, s);
}

inline ScalarFieldK random_scalar(const TorusGrid& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ScalarSamples s(g.size());
  for (auto& x : s) x = uniform_pm1(rng);
  return forward_transform(g, s);
}

/// Mean-free, divergence-free random field supported in |xi| < R.
inline VectorFieldK random_solenoidal(const TorusGrid& g, std::uint64_t seed, double R) {
  return friedrich_cutoff(leray_project(random_vector(g, seed)), R);
}

/// Physical coordinate of grid index j.
inline double coord(const TorusGrid& g, int j) { return g.period() * j / g.n(); }

inline double max_abs_diff(const VectorSamples& a, const VectorSamples& b) {
  double m = 0.0;
  for (int c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < a[c].size(); ++i) m = std::max(m, std::abs(a[c][i] - b[c][i]));
  return m;
}

/// Fresh empty directory under the system temp dir.
inline std::string scratch_dir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("nsdamp_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p.string();
}

/// Taylor-Green start on a small grid with x^4 damping.
inline RunConfig small_tg_config(int n = 16) {
  RunConfig cfg;
  cfg.solver.grid = TorusGrid(n);
  cfg.solver.nu = 0.1;
  cfg.solver.law = DampingLaw::polynomial(1.0, 5.0);
  cfg.solver.dt = 0.01;
  cfg.solver.t_end = 0.2;
  cfg.solver.sample_every = 2;
  cfg.solver.initial.kind = InitialKind::TaylorGreen;
  cfg.solver.initial.amplitude = 1.0;
  return cfg;
}

}  // namespace nsdamp::test
