// Serial reference kernels against their OpenMP counterparts on grids of
// side 32, 48 and 64. Set OMP_NUM_THREADS to vary the thread count.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "nsdamp/kernels.hpp"

namespace {

using namespace nsdamp;
namespace k = nsdamp::kernels;

struct RealData {
  explicit RealData(std::size_t size) : u(3, std::vector<double>(size)), prod(6, std::vector<double>(size)),
                                        damp(3, std::vector<double>(size)) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (auto& c : u)
      for (auto& x : c) x = d(rng);
  }
  std::vector<std::vector<double>> u, prod, damp;
};

struct SpectralData {
  explicit SpectralData(std::size_t size)
      : in(9, std::vector<Complex>(size)), u(3, std::vector<Complex>(size)), out(3, std::vector<Complex>(size)),
        w(size) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (auto* group : {&in, &u})
      for (auto& c : *group)
        for (auto& z : c) z = {d(rng), d(rng)};
    for (auto& x : w) x = d(rng) + 1.0;
  }
  std::vector<std::vector<Complex>> in, u, out;
  std::vector<double> w;
};

template <bool Parallel>
void BM_pointwise(benchmark::State& state) {
  const std::size_t n = state.range(0), m = n * n * n;
  RealData data(m);
  const auto law = DampingLaw::polynomial(1.0, 5.0);
  k::VelocitySamples v{{data.u[0].data(), data.u[1].data(), data.u[2].data()}, m};
  k::ProductPointers p;
  for (int i = 0; i < 6; ++i) p[i] = data.prod[i].data();
  k::DampingPointers q{data.damp[0].data(), data.damp[1].data(), data.damp[2].data()};
  for (auto _ : state) {
    const double s = Parallel ? k::omp::pointwise_products(v, &p, &q, law)
                              : k::serial::pointwise_products(v, &p, &q, law);
    benchmark::DoNotOptimize(s);
  }
  state.SetItemsProcessed(state.iterations() * m);
}

template <bool Parallel>
void BM_assemble(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const std::size_t m = static_cast<std::size_t>(n) * n * n;
  SpectralData data(m);
  k::ModeTables t{n, 1.0, (n / 3.0) * (n / 3.0)};
  k::ForcingInputs in{};
  for (int i = 0; i < 6; ++i) in.prod[i] = data.in[i].data();
  for (int i = 0; i < 3; ++i) in.damp[i] = data.in[6 + i].data();
  std::array<const Complex*, 3> u{data.u[0].data(), data.u[1].data(), data.u[2].data()};
  std::array<Complex*, 3> out{data.out[0].data(), data.out[1].data(), data.out[2].data()};
  for (auto _ : state) {
    const double s = Parallel ? k::omp::assemble_forcing(t, in, u, out) : k::serial::assemble_forcing(t, in, u, out);
    benchmark::DoNotOptimize(s);
  }
  state.SetItemsProcessed(state.iterations() * m);
}

template <bool Parallel>
void BM_weighted(benchmark::State& state) {
  const std::size_t n = state.range(0), m = n * n * n;
  SpectralData data(m);
  for (auto _ : state) {
    const double s = Parallel ? k::omp::weighted_sq_diff_sum(data.u[0].data(), data.u[1].data(), data.w.data(), m)
                              : k::serial::weighted_sq_diff_sum(data.u[0].data(), data.u[1].data(), data.w.data(), m);
    benchmark::DoNotOptimize(s);
  }
  state.SetItemsProcessed(state.iterations() * m);
}

}  // namespace

BENCHMARK(BM_pointwise<false>)->Arg(32)->Arg(48)->Arg(64)->Name("pointwise/serial");
BENCHMARK(BM_pointwise<true>)->Arg(32)->Arg(48)->Arg(64)->Name("pointwise/omp");
BENCHMARK(BM_assemble<false>)->Arg(32)->Arg(48)->Arg(64)->Name("assemble_forcing/serial");
BENCHMARK(BM_assemble<true>)->Arg(32)->Arg(48)->Arg(64)->Name("assemble_forcing/omp");
BENCHMARK(BM_weighted<false>)->Arg(32)->Arg(48)->Arg(64)->Name("weighted_sq_diff/serial");
BENCHMARK(BM_weighted<true>)->Arg(32)->Arg(48)->Arg(64)->Name("weighted_sq_diff/omp");

BENCHMARK_MAIN();
